"""Zero-forcing uplink: beamformer, SINR and minimum powers for target rates."""

from dataclasses import dataclass

import numpy as np

from ris_emf.linalg import pseudo_inverse

P_MAX = 0.2  # W, handset transmit power limit


def dbm_to_watt(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def phase_matrix(theta):
    return np.diag(np.exp(1j * np.asarray(theta, dtype=float)))


def composite_channel(channels, theta):
    """H^r diag(e^{j theta}) H^u + H^d, shape M x K."""
    phi = np.exp(1j * np.asarray(theta, dtype=float))
    return (channels.h_r * phi) @ channels.h_u + channels.h_d


def zf_beamformer(channels, theta):
    """K x M zero-forcing receiver, the pseudo-inverse of the composite channel."""
    return pseudo_inverse(composite_channel(channels, theta))


def noise_scaled(r_th, sigma2):
    """(2^r_th - 1) sigma^2 per user."""
    return (2.0 ** np.asarray(r_th, dtype=float) - 1.0) * sigma2


@dataclass
class LinkState:
    g: np.ndarray
    p_star: np.ndarray
    sigma2: float

    @property
    def row_norm2(self):
        return np.sum(np.abs(self.g) ** 2, axis=1)


def required_powers(channels, theta, sigma2, r_th):
    """Smallest powers meeting each target spectral efficiency under ZF (uncapped)."""
    g = zf_beamformer(channels, theta)
    return noise_scaled(r_th, sigma2) * np.sum(np.abs(g) ** 2, axis=1)


def link_state(channels, theta, sigma2, r_th):
    g = zf_beamformer(channels, theta)
    p = noise_scaled(r_th, sigma2) * np.sum(np.abs(g) ** 2, axis=1)
    return LinkState(g=g, p_star=p, sigma2=sigma2)


def sinr(link, k, p=None):
    """ZF SINR of user k: p_k / (sigma^2 ||g_k||^2)."""
    p = link.p_star if p is None else np.asarray(p, dtype=float)
    return p[k] / (link.sigma2 * np.sum(np.abs(link.g[k]) ** 2))


def sinr_general(g, channels, theta, p, sigma2, k):
    """SINR of user k for an arbitrary receiver ``g``.

    Returns (sinr, signal, interference) with expected symbol powers
    E|x_i|^2 = p_i.
    """
    gain = np.abs(g[k] @ composite_channel(channels, theta)) ** 2 * np.asarray(p, dtype=float)
    signal = gain[k]
    interference = gain.sum() - signal
    noise = sigma2 * np.sum(np.abs(g[k]) ** 2)
    return signal / (noise + interference), signal, interference
