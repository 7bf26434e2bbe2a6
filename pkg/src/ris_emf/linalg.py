"""Dense complex linear-algebra helpers shared by the link and optimizer code."""

import numpy as np

RANK_TOL = 1e-12
COND_MAX = 1e12


class RankDeficient(np.linalg.LinAlgError):
    """Raised when a matrix that must have full column rank does not."""


class Singular(np.linalg.LinAlgError):
    """Raised when a Gram matrix is too ill-conditioned to invert."""


def pseudo_inverse(a, rank_tol=RANK_TOL):
    """Moore-Penrose pseudo-inverse of a full-column-rank matrix via SVD.

    Raises RankDeficient if the smallest singular value falls below
    ``rank_tol`` times the largest one.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or 0 in a.shape:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if a.shape[0] < a.shape[1]:
        raise RankDeficient(f"{a.shape[0]}x{a.shape[1]} matrix cannot have full column rank")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if s[-1] < rank_tol * s[0]:
        raise RankDeficient(f"smallest singular value {s[-1]:.3e} below {rank_tol:g} x {s[0]:.3e}")
    return (vh.conj().T / s) @ u.conj().T


def gram_inverse(q, cond_max=COND_MAX):
    """Return ``(Q^H Q)^{-1}``, Hermitian positive definite."""
    q = np.asarray(q, dtype=complex)
    gram = q.conj().T @ q
    gram = 0.5 * (gram + gram.conj().T)
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > cond_max:
        raise Singular(f"Gram matrix condition number {cond:.3e} exceeds {cond_max:g}")
    t = np.linalg.inv(gram)
    return 0.5 * (t + t.conj().T)


def col_row_outer(a, b):
    """Outer product with entry (m, k) equal to ``a[m] * b[k]`` (no conjugation)."""
    return np.outer(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
