"""Scenario geometry, user mix, path loss and Rician channel synthesis.

The BS and the RIS carry half-wavelength uniform linear arrays. Steering
angles are the horizontal azimuths between the nodes, so a drop is fully
determined by the user positions and the fading draw.
"""

from dataclasses import dataclass, field

import numpy as np


class DimensionError(ValueError):
    """Raised when (M, N, K) cannot support zero-forcing."""


@dataclass(frozen=True)
class Geometry:
    bs_position: tuple = (0.0, 0.0, 10.0)
    ris_position: tuple = (30.0, 20.0, 10.0)
    user_height: float = 1.5
    r_min: float = 10.0
    r_max: float = 150.0

    def __post_init__(self):
        if not 0 < self.r_min <= self.r_max:
            raise ValueError(f"need 0 < r_min <= r_max, got {self.r_min}, {self.r_max}")
        if self.user_height < 0 or self.bs_position[2] < 0 or self.ris_position[2] < 0:
            raise ValueError("heights must be non-negative")


@dataclass(frozen=True)
class UserProfile:
    kind: str
    rate_bps: float
    bandwidth_hz: float
    sar_ref: float  # W/kg per W of transmit power

    @property
    def r_th(self):
        """Target spectral efficiency in bits/s/Hz."""
        return self.rate_bps / self.bandwidth_hz


DATA_USER = UserProfile("data", 600e6, 100e6, 41e-4)
VOICE_USER = UserProfile("voice", 13.3e3, 7e3, 63e-4)


@dataclass(frozen=True)
class ChannelParams:
    rician_kappa: float = 10.0
    element_spacing: float = 0.5
    # intercept of the LOS path-loss law in dB; see pathloss_db
    los_intercept_db: float = 35.6

    def __post_init__(self):
        if self.rician_kappa < 0:
            raise ValueError("rician_kappa must be >= 0")


@dataclass(frozen=True)
class ChannelSet:
    """Channel matrices of one realization.

    h_u: N x K users -> RIS, h_r: M x N RIS -> BS, h_d: M x K users -> BS.
    """

    h_u: np.ndarray
    h_r: np.ndarray
    h_d: np.ndarray

    def __post_init__(self):
        n, k = self.h_u.shape
        m, n2 = self.h_r.shape
        m2, k2 = self.h_d.shape
        if n != n2 or m != m2 or k != k2:
            raise DimensionError(
                f"inconsistent shapes h_u {self.h_u.shape}, h_r {self.h_r.shape}, h_d {self.h_d.shape}"
            )
        for name in ("h_u", "h_r", "h_d"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} has non-finite entries")

    @property
    def dims(self):
        """(M, N, K)."""
        return self.h_r.shape[0], self.h_r.shape[1], self.h_u.shape[1]

    def subset(self, m, n):
        """Channels seen by the first ``m`` BS antennas and first ``n`` RIS elements."""
        return ChannelSet(self.h_u[:n], self.h_r[:m, :n], self.h_d[:m])

    def without_ris(self):
        return ChannelSet(self.h_u, np.zeros_like(self.h_r), self.h_d)


def place_users(geometry, k, rng):
    """Drop ``k`` users uniformly over the annulus r_min <= r <= r_max around the BS.

    Returns a (k, 3) array of positions in meters.
    """
    if k < 1:
        raise ValueError("need at least one user")
    r2 = rng.uniform(geometry.r_min**2, geometry.r_max**2, size=k)
    r = np.sqrt(r2)
    phi = rng.uniform(0.0, 2 * np.pi, size=k)
    bx, by, _ = geometry.bs_position
    return np.column_stack(
        [bx + r * np.cos(phi), by + r * np.sin(phi), np.full(k, float(geometry.user_height))]
    )


def pathloss_db(kind, d, los_intercept_db=35.6):
    """3GPP-style path loss in dB.

    LOS: los_intercept_db + 22 log10(d); NLOS: 32.6 + 36.7 log10(d).
    Pass ``los_intercept_db=-35.6`` for the negative-intercept variant of the
    LOS law.
    """
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    kind = kind.upper()
    if kind == "LOS":
        return los_intercept_db + 22.0 * np.log10(d)
    if kind == "NLOS":
        return 32.6 + 36.7 * np.log10(d)
    raise ValueError(f"unknown link kind {kind!r}")


def amplitude(pl_db):
    return 10.0 ** (-np.asarray(pl_db) / 20.0)


def steering_vector(n_elements, angle, spacing=0.5):
    """Unit-modulus ULA response exp(j 2 pi spacing i sin(angle)), i = 0..n-1."""
    i = np.arange(n_elements)
    return np.exp(1j * 2 * np.pi * spacing * i * np.sin(angle))


def _azimuth(src, dst):
    return np.arctan2(dst[1] - src[1], dst[0] - src[0])


def _cn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _rician_weights(kappa):
    if np.isinf(kappa):
        return 1.0, 0.0
    return np.sqrt(kappa / (kappa + 1)), np.sqrt(1 / (kappa + 1))


def draw_profiles(k, rng, p_data=0.75):
    """Bernoulli user mix: data with probability ``p_data``, voice otherwise."""
    return [DATA_USER if u < p_data else VOICE_USER for u in rng.uniform(size=k)]


def synthesize_channels(geometry, positions, params, m, n, rng):
    """Draw one ChannelSet for users at ``positions`` (K x 3).

    RIS links are Rician with factor kappa, the direct links Rayleigh. Path
    loss enters as the amplitude factor 10^(-PL/20) over 3-D distances.
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    k = positions.shape[0]
    if k < 1:
        raise DimensionError("need at least one user")
    if n < k or m < k:
        raise DimensionError(f"zero-forcing needs N >= K and M >= K, got M={m}, N={n}, K={k}")
    bs = np.asarray(geometry.bs_position, dtype=float)
    ris = np.asarray(geometry.ris_position, dtype=float)
    w_los, w_nlos = _rician_weights(params.rician_kappa)
    spacing = params.element_spacing

    d_rb = np.linalg.norm(ris - bs)
    a_m = steering_vector(m, _azimuth(bs, ris), spacing)
    a_n = steering_vector(n, _azimuth(ris, bs), spacing)
    pl_rb = amplitude(pathloss_db("LOS", d_rb, params.los_intercept_db))
    h_r = pl_rb * (w_los * np.outer(a_m, a_n) + w_nlos * _cn(rng, m, n))

    d_ur = np.linalg.norm(positions - ris, axis=1)
    pl_ur = amplitude(pathloss_db("LOS", d_ur, params.los_intercept_db))
    a_k = np.column_stack([steering_vector(n, _azimuth(ris, p), spacing) for p in positions])
    h_u = pl_ur * (w_los * a_k + w_nlos * _cn(rng, n, k))

    d_ub = np.linalg.norm(positions - bs, axis=1)
    pl_ub = amplitude(pathloss_db("NLOS", d_ub))
    h_d = pl_ub * _cn(rng, m, k)
    return ChannelSet(h_u=h_u, h_r=h_r, h_d=h_d)


@dataclass
class Drop:
    """One Monte Carlo drop: user mix, positions and channels."""

    profiles: list
    positions: np.ndarray
    channels: ChannelSet
    seed: tuple = field(default=())

    @property
    def sar_ref(self):
        return np.array([p.sar_ref for p in self.profiles])

    @property
    def r_th(self):
        return np.array([p.r_th for p in self.profiles])

    def subset(self, m, n):
        return Drop(self.profiles, self.positions, self.channels.subset(m, n), self.seed)


def draw_drop(geometry, params, k, m, n, rng, p_data=0.75):
    profiles = draw_profiles(k, rng, p_data)
    positions = place_users(geometry, k, rng)
    channels = synthesize_channels(geometry, positions, params, m, n, rng)
    return Drop(profiles, positions, channels)
