"""Dual gradient descent over the RIS phases, plus baseline phase profiles."""

from dataclasses import dataclass, field

import numpy as np

from ris_emf.lagrangian import build_weighted, grad_lambda, grad_theta, hessian_theta
from ris_emf.zf_link import P_MAX


@dataclass(frozen=True)
class OptimizerConfig:
    gamma: float = 1.0
    max_iters: int = 100
    ei_rel_tol: float = 1e-5
    patience: int = 3  # consecutive small-change iterations before stopping
    p_max: float = P_MAX

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.ei_rel_tol <= 0 or self.patience < 1:
            raise ValueError("tolerances must be positive")


@dataclass
class TraceRecord:
    iteration: int
    ei: float  # uncapped powers
    ei_capped: float
    grad_inf: float
    alpha: float
    active: int  # multipliers currently > 0


@dataclass
class SolverState:
    theta: np.ndarray
    lam: np.ndarray
    p: np.ndarray  # capped on return
    ei: float  # EI of the capped powers
    iteration: int = 0
    stop_reason: str = ""
    trace: list = field(default_factory=list)


def optimal_step(theta, g, grad_fn, hess_fn, ei_fn):
    """Step length along -g from a quadratic model at three trial points.

    Trial steps are 0, pi/2 / max|g| and pi / max|g|, so the largest phase
    moves by at most pi. A trial is used only if it lowers the best EI seen
    so far and the curvature g^T H g there is positive; the step is then
    alpha_bar + g^T g_tilde / g^T H g. Returns 0 if no trial qualifies.
    """
    g = np.asarray(g, dtype=float)
    gmax = np.max(np.abs(g)) if g.size else 0.0
    if not np.isfinite(gmax) or gmax == 0.0:
        return 0.0
    alpha = 0.0
    ei_min = np.inf
    for a_bar in (0.0, 0.5 * np.pi / gmax, np.pi / gmax):
        theta_t = theta - a_bar * g
        ei_t = ei_fn(theta_t)
        if ei_t < ei_min:
            g_t = grad_fn(theta_t)
            curv = g @ hess_fn(theta_t) @ g
            if curv > 0:
                alpha = a_bar + (g @ g_t) / curv
                ei_min = ei_t
    return float(alpha)


def dual_gradient_descent(problem, config=OptimizerConfig(), theta0=None):
    """Minimize the exposure index over the phases subject to the power cap.

    Phase steps use ``optimal_step``; multipliers take projected ascent
    steps of size gamma * mean(SAR_ref) and are reset to zero for users
    whose power is below the cap. Stops when the step is zero, when the
    relative EI change stays below ``ei_rel_tol`` for ``patience``
    iterations, or after ``max_iters``.
    """
    p_max = config.p_max
    n = problem.n_elements
    k = len(problem.sar_ref)
    theta = np.zeros(n) if theta0 is None else np.array(theta0, dtype=float)
    lam = np.zeros(k)
    beta = config.gamma * float(np.mean(problem.sar_ref))

    def grad_fn(th):
        return grad_theta(build_weighted(problem, th, lam))

    def hess_fn(th):
        return hessian_theta(build_weighted(problem, th, lam))

    def ei_fn(th):
        return problem.ei(th)

    p = problem.powers(theta)
    ei_prev = float(np.dot(problem.sar_ref, p))
    trace = [
        TraceRecord(0, ei_prev, float(np.dot(problem.sar_ref, np.minimum(p, p_max))), 0.0, 0.0, 0)
    ]
    calm = 0
    reason = "max_iters"
    it = 0
    for it in range(1, config.max_iters + 1):
        g = grad_fn(theta)
        alpha = optimal_step(theta, g, grad_fn, hess_fn, ei_fn)
        theta = theta - alpha * g

        p = problem.powers(theta)
        lam = np.maximum(0.0, lam + beta * grad_lambda(p, p_max))
        lam[p < p_max] = 0.0

        ei = float(np.dot(problem.sar_ref, p))
        trace.append(
            TraceRecord(
                iteration=it,
                ei=ei,
                ei_capped=float(np.dot(problem.sar_ref, np.minimum(p, p_max))),
                grad_inf=float(np.max(np.abs(g))) if g.size else 0.0,
                alpha=alpha,
                active=int(np.count_nonzero(lam)),
            )
        )
        if alpha == 0.0:
            reason = "zero_step"
            break
        calm = calm + 1 if abs(ei - ei_prev) <= config.ei_rel_tol * abs(ei_prev) else 0
        ei_prev = ei
        if calm >= config.patience:
            reason = "converged"
            break

    p_capped = np.minimum(p, p_max)
    return SolverState(
        theta=theta,
        lam=lam,
        p=p_capped,
        ei=float(np.dot(problem.sar_ref, p_capped)),
        iteration=it,
        stop_reason=reason,
        trace=trace,
    )


def quantize_phases(theta, levels):
    """Map each phase to the nearest of 2 pi l / L, l = 0..L-1 (ties go to the lower level)."""
    if levels < 2:
        raise ValueError("need at least 2 levels")
    step = 2 * np.pi / levels
    wrapped = np.mod(np.asarray(theta, dtype=float), 2 * np.pi)
    idx = np.ceil(wrapped / step - 0.5)
    return np.mod(idx, levels) * step


def baseline_phases(kind, n, rng=None):
    """Phase profile for a baseline strategy.

    "zero" and "noris" give theta = 0 (for "noris" the caller also drops the
    RIS channel, see ChannelSet.without_ris); "random" draws i.i.d.
    Uniform[0, 2 pi).
    """
    kind = kind.lower()
    if kind in ("zero", "noris"):
        return np.zeros(n)
    if kind == "random":
        if rng is None:
            raise ValueError("random phases need an rng")
        return rng.uniform(0.0, 2 * np.pi, size=n)
    raise ValueError(f"unknown baseline {kind!r}")
