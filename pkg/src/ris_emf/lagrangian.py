"""Lagrangian of the relaxed exposure problem and its derivatives in the phases.

With weights a_k = (SAR_ref_k + lambda_k) (2^r_k - 1) sigma^2 the Lagrangian
collapses to tr((Q^H Q)^{-1}) - p_max ||lambda||_1, where Q is the composite
channel with columns scaled by 1/sqrt(a_k). Everything below works on that
trace form.
"""

from dataclasses import dataclass

import numpy as np

from ris_emf.exposure import exposure_index
from ris_emf.linalg import gram_inverse
from ris_emf.zf_link import P_MAX, noise_scaled, required_powers, zf_beamformer


@dataclass(frozen=True)
class Problem:
    """Per-drop data the optimizer needs besides the phases and multipliers."""

    channels: object
    sar_ref: np.ndarray
    r_th: np.ndarray
    sigma2: float
    p_max: float = P_MAX

    @property
    def sigma_tilde2(self):
        return noise_scaled(self.r_th, self.sigma2)

    @property
    def n_elements(self):
        return self.channels.h_r.shape[1]

    def powers(self, theta):
        """Uncapped minimum powers at ``theta``."""
        return required_powers(self.channels, theta, self.sigma2, self.r_th)

    def ei(self, theta, capped=False):
        p = self.powers(theta)
        if capped:
            p = np.minimum(p, self.p_max)
        return exposure_index(self.sar_ref, p)


@dataclass(frozen=True)
class WeightedProblem:
    a: np.ndarray
    phi: np.ndarray  # e^{j theta}
    h_r: np.ndarray
    h_u_bar: np.ndarray
    h_d_bar: np.ndarray
    q: np.ndarray
    t: np.ndarray
    p_max: float

    @property
    def qt2(self):
        return self.q @ self.t @ self.t


def build_weighted(problem, theta, lam):
    lam = np.asarray(lam, dtype=float)
    a = (problem.sar_ref + lam) * problem.sigma_tilde2
    if np.any(a <= 0):
        raise ValueError("weights a_k must be positive")
    scale = 1.0 / np.sqrt(a)
    ch = problem.channels
    phi = np.exp(1j * np.asarray(theta, dtype=float))
    h_u_bar = ch.h_u * scale
    h_d_bar = ch.h_d * scale
    q = (ch.h_r * phi) @ h_u_bar + h_d_bar
    t = gram_inverse(q)
    return WeightedProblem(a, phi, ch.h_r, h_u_bar, h_d_bar, q, t, problem.p_max)


def lagrangian_value(wp, lam):
    """tr(T) - p_max ||lambda||_1."""
    return float(np.real(np.trace(wp.t)) - wp.p_max * np.sum(np.abs(lam)))


def lagrangian_via_beamformer(problem, theta, lam):
    """The same Lagrangian evaluated as sum_k a_k ||g_k||^2 - p_max ||lambda||_1.

    Also returns the tr(G^H A G) form, so both can be checked against the
    trace form.
    """
    lam = np.asarray(lam, dtype=float)
    a = (problem.sar_ref + lam) * problem.sigma_tilde2
    g = zf_beamformer(problem.channels, theta)
    penalty = problem.p_max * np.sum(np.abs(lam))
    by_rows = np.sum(a * np.sum(np.abs(g) ** 2, axis=1)) - penalty
    by_trace = np.real(np.trace(g.conj().T @ (a[:, None] * g))) - penalty
    return float(by_rows), float(by_trace)


def _rank1_contract(h_r, h_u_bar, d):
    """sum_{m,k} h_r[m, n] conj(d[..., m, k]) h_u_bar[n, k] for every n.

    ``d`` may carry a leading batch axis, in which case the result is
    batch x N.
    """
    return np.sum((h_r.T @ np.conj(d)) * h_u_bar, axis=-1)


def grad_theta(wp):
    """dL/dtheta_i = Re tr(j e^{j theta_i} (h^r_i h_bar^u_(i)) (dL/dQ)^H), dL/dQ = -2 Q T^2."""
    d = -2.0 * wp.qt2
    return np.real(1j * wp.phi * _rank1_contract(wp.h_r, wp.h_u_bar, d))


def grad_lambda(p, p_max):
    """dL/dlambda_k = p_k(theta) - p_max."""
    return np.asarray(p, dtype=float) - p_max


def _hessian_parts(wp, form):
    q, t = wp.q, wp.t
    t2 = t @ t
    qh = q.conj().T
    # R_v = -2j e^{j theta_v} h^r_v h_bar^u_(v), stacked over v
    r = -2j * wp.phi[:, None, None] * (wp.h_r.T[:, :, None] * wp.h_u_bar[:, None, :])
    rh = np.conj(np.swapaxes(r, 1, 2))
    if form == "derived":
        s = rh @ q + qh @ r
        inner = t @ s + s @ t
    elif form == "printed":
        c = rh @ q - qh @ r
        inner = t @ c - c @ t
    else:
        raise ValueError(f"unknown Hessian form {form!r}")
    d = r @ t2 - q @ t @ inner @ t
    psi = 1j * wp.phi[None, :] * _rank1_contract(wp.h_r, wp.h_u_bar, d)
    diag = np.trace(1j * r @ t2 @ qh, axis1=1, axis2=2)
    return psi, diag


def hessian_theta(wp, form="derived"):
    """Hessian of the Lagrangian in the phases, N x N.

    Off-diagonal (v, u) entries are Re psi_{v,u} and the diagonal adds
    Re tr(j R_v T^2 Q^H). With ``form="derived"`` the derivative of the
    gradient term with respect to Q uses
    R T^2 - Q T (T S + S T) T, S = R^H Q + Q^H R, which is what the chain
    rule through T = (Q^H Q)^{-1} gives. ``form="printed"`` swaps in the
    commutator T C - C T with C = R^H Q - Q^H R; it does not match finite
    differences and is kept only for the gradcheck report.
    """
    psi, diag = _hessian_parts(wp, form)
    h = np.real(psi)
    h[np.diag_indices_from(h)] += np.real(diag)
    return h


def hessian_terms(wp, form="derived"):
    """Per-term pieces of the Hessian: the psi matrix and the extra diagonal term."""
    psi, diag = _hessian_parts(wp, form)
    return {"psi": np.real(psi), "diag": np.real(diag)}
