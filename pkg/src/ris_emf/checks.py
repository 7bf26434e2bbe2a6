"""Finite-difference and identity checks on small random instances.

Shared by the ``gradcheck`` CLI subcommand and the acceptance tests.
"""

from dataclasses import dataclass

import numpy as np

from ris_emf.lagrangian import (
    Problem,
    build_weighted,
    grad_theta,
    hessian_terms,
    hessian_theta,
    lagrangian_value,
    lagrangian_via_beamformer,
)
from ris_emf.scenario import ChannelSet
from ris_emf.zf_link import composite_channel, link_state, zf_beamformer

GRAD_TOL = 1e-6
GRAD_FLOOR = 1e-10
HESS_TOL = 1e-4
SYM_TOL = 1e-9
EQUIV_TOL = 1e-9
ZF_TOL = 1e-9
RATE_TOL = 1e-10


def _cn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


@dataclass
class Instance:
    problem: Problem
    theta: np.ndarray
    lam: np.ndarray


def random_instance(rng, k=3, n=6, m=4):
    """Unit-scale channels with theta in [0, 2 pi)^N and lambda in [0, 1]^K."""
    ch = ChannelSet(h_u=_cn(rng, n, k), h_r=_cn(rng, m, n), h_d=_cn(rng, m, k))
    problem = Problem(
        channels=ch,
        sar_ref=rng.uniform(0.5, 1.5, k),
        r_th=rng.uniform(0.5, 2.0, k),
        sigma2=1.0,
        p_max=rng.uniform(0.5, 2.0),
    )
    return Instance(problem, rng.uniform(0, 2 * np.pi, n), rng.uniform(0, 1, k))


def lagrangian_at(problem, theta, lam):
    return lagrangian_value(build_weighted(problem, theta, lam), lam)


def fd_gradient(problem, theta, lam, step=1e-6):
    out = np.empty(len(theta))
    for i in range(len(theta)):
        e = np.zeros(len(theta))
        e[i] = step
        out[i] = (lagrangian_at(problem, theta + e, lam) - lagrangian_at(problem, theta - e, lam)) / (2 * step)
    return out


def fd_hessian(problem, theta, lam, step=1e-5):
    n = len(theta)
    out = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = step
        gp = grad_theta(build_weighted(problem, theta + e, lam))
        gm = grad_theta(build_weighted(problem, theta - e, lam))
        out[i] = (gp - gm) / (2 * step)
    return out


def max_rel_err(x, ref, floor=GRAD_FLOOR):
    x, ref = np.asarray(x), np.asarray(ref)
    return float(np.max(np.abs(x - ref) / np.maximum(np.abs(ref), floor)))


def gradient_error(inst):
    wp = build_weighted(inst.problem, inst.theta, inst.lam)
    return max_rel_err(grad_theta(wp), fd_gradient(inst.problem, inst.theta, inst.lam))


def hessian_errors(inst, form="derived"):
    """(max relative error vs finite differences, relative asymmetry)."""
    wp = build_weighted(inst.problem, inst.theta, inst.lam)
    h = hessian_theta(wp, form)
    ref = fd_hessian(inst.problem, inst.theta, inst.lam)
    asym = float(np.linalg.norm(h - h.T) / np.linalg.norm(h))
    return max_rel_err(h, ref), asym


def hessian_term_report(inst, form="printed"):
    """Split the finite-difference mismatch into off-diagonal and diagonal parts."""
    wp = build_weighted(inst.problem, inst.theta, inst.lam)
    terms = hessian_terms(wp, form)
    ref = fd_hessian(inst.problem, inst.theta, inst.lam)
    h = hessian_theta(wp, form)
    off = ~np.eye(len(inst.theta), dtype=bool)
    scale = np.max(np.abs(ref))
    return {
        "off_diagonal_psi": float(np.max(np.abs(h - ref)[off]) / scale),
        "diagonal_total": float(np.max(np.abs(np.diag(h) - np.diag(ref))) / scale),
        "diag_trace_term_norm": float(np.max(np.abs(terms["diag"])) / scale),
        "asymmetry": float(np.linalg.norm(h - h.T) / np.linalg.norm(h)),
    }


def equivalence_error(inst):
    wp = build_weighted(inst.problem, inst.theta, inst.lam)
    by_trace = lagrangian_value(wp, inst.lam)
    by_rows, by_gag = lagrangian_via_beamformer(inst.problem, inst.theta, inst.lam)
    scale = max(abs(by_trace), 1e-300)
    return max(abs(by_trace - by_rows), abs(by_trace - by_gag)) / scale


def zf_errors(inst):
    """(||G Q - I||_F, max |log2(1 + SINR_k) - r_th_k|) at uncapped powers."""
    pr = inst.problem
    g = zf_beamformer(pr.channels, inst.theta)
    k = g.shape[0]
    zf = float(np.linalg.norm(g @ composite_channel(pr.channels, inst.theta) - np.eye(k)))
    link = link_state(pr.channels, inst.theta, pr.sigma2, pr.r_th)
    sinr = link.p_star / (pr.sigma2 * link.row_norm2)
    return zf, float(np.max(np.abs(np.log2(1 + sinr) - pr.r_th)))


def run_all(count=20, seed=0, k=3, n=6, m=4):
    """Run every check on ``count`` random instances; returns worst values and pass flags."""
    rng = np.random.default_rng(seed)
    worst = {"gradient": 0.0, "hessian": 0.0, "symmetry": 0.0, "equivalence": 0.0, "zf": 0.0, "rate": 0.0,
             "hessian_printed": 0.0}
    for _ in range(count):
        inst = random_instance(rng, k, n, m)
        worst["gradient"] = max(worst["gradient"], gradient_error(inst))
        h_err, asym = hessian_errors(inst)
        worst["hessian"] = max(worst["hessian"], h_err)
        worst["symmetry"] = max(worst["symmetry"], asym)
        worst["hessian_printed"] = max(worst["hessian_printed"], hessian_errors(inst, "printed")[0])
        worst["equivalence"] = max(worst["equivalence"], equivalence_error(inst))
        zf, rate = zf_errors(inst)
        worst["zf"] = max(worst["zf"], zf)
        worst["rate"] = max(worst["rate"], rate)
    limits = {"gradient": GRAD_TOL, "hessian": HESS_TOL, "symmetry": SYM_TOL, "equivalence": EQUIV_TOL,
              "zf": ZF_TOL, "rate": RATE_TOL}
    passed = {key: worst[key] < lim for key, lim in limits.items()}
    return worst, limits, passed
