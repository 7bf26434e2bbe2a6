"""Exposure index and rate-satisfaction metrics."""

import numpy as np


class LengthMismatch(ValueError):
    pass


def _same_length(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"length mismatch: {a.shape} vs {b.shape}")
    return a, b


def exposure_index(sar_ref, p):
    """Population exposure index sum_k SAR_ref_k p_k in W/kg."""
    sar_ref, p = _same_length(sar_ref, p)
    return float(np.dot(sar_ref, p))


def achieved_rates(p, sigma2, g_row_norm2, p_max=None):
    """Spectral efficiency log2(1 + p_k / (sigma^2 ||g_k||^2)) under ZF.

    If ``p_max`` is given the powers are capped first.
    """
    p = np.asarray(p, dtype=float)
    if p_max is not None:
        p = np.minimum(p, p_max)
    return np.log2(1.0 + p / (sigma2 * np.asarray(g_row_norm2, dtype=float)))


def rate_satisfaction(r_achieved, r_target):
    """Sum of achieved over sum of target spectral efficiencies."""
    r_achieved, r_target = _same_length(r_achieved, r_target)
    if np.any(r_target <= 0):
        raise ValueError("targets must be positive")
    return float(r_achieved.sum() / r_target.sum())
