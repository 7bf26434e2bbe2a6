"""Monte Carlo experiment driver: noise sweeps, array-size sweeps, convergence traces.

Records CSV columns: strategy, sigma2_dbm, n, m, drop, ei, rate_satisfaction,
iterations, stop_reason. Aggregate CSV columns: strategy, sigma2_dbm, n, m, drops, ei_mean,
rate_satisfaction_mean, iterations_mean. Wall times go to a separate
timings CSV so the records stay byte-stable across runs.
"""

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import yaml

from ris_emf.exposure import achieved_rates, rate_satisfaction
from ris_emf.lagrangian import Problem
from ris_emf.linalg import RankDeficient, Singular
from ris_emf.optimizer import OptimizerConfig, baseline_phases, dual_gradient_descent, quantize_phases
from ris_emf.scenario import ChannelParams, Geometry, draw_drop
from ris_emf.zf_link import dbm_to_watt, link_state

log = logging.getLogger(__name__)

RECORD_COLUMNS = [
    "strategy", "sigma2_dbm", "n", "m", "drop", "ei", "rate_satisfaction", "iterations", "stop_reason",
]
AGGREGATE_COLUMNS = [
    "strategy", "sigma2_dbm", "n", "m", "drops", "ei_mean", "rate_satisfaction_mean", "iterations_mean",
]
STRATEGIES = ("optimized", "zero", "random", "noris")
MAX_REDRAWS = 20


class ConfigError(ValueError):
    pass


def parse_strategy(name):
    """Return (kind, levels); quantized strategies are spelled ``quantized:L``."""
    name = str(name).strip().lower()
    if name.startswith("quantized:"):
        try:
            levels = int(name.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad quantization level in {name!r}") from None
        if levels < 2:
            raise ConfigError(f"quantization needs >= 2 levels, got {levels}")
        return "quantized", levels
    if name not in STRATEGIES:
        raise ConfigError(f"unknown strategy {name!r}")
    return name, None


@dataclass
class ExperimentConfig:
    k: int = 16
    n: int = 128
    m: int = 32
    sigma2_dbm: list = field(default_factory=lambda: [-100.0, -97.5, -95.0, -92.5, -90.0])
    strategies: list = field(
        default_factory=lambda: ["optimized", "zero", "random", "noris", "quantized:2", "quantized:4"]
    )
    drops: int = 100
    master_seed: int = 2022
    workers: int = 1
    # array-size sweep
    n_grid: list = field(default_factory=lambda: [32, 64, 96, 128])
    m_grid: list = field(default_factory=lambda: [16, 32, 64])
    # scenario
    p_data: float = 0.75
    user_height: float = 1.5
    r_min: float = 10.0
    r_max: float = 150.0
    bs_x: float = 0.0
    bs_y: float = 0.0
    bs_z: float = 10.0
    ris_x: float = 30.0
    ris_y: float = 20.0
    ris_z: float = 10.0
    kappa: float = 10.0
    los_intercept_db: float = 35.6
    # optimizer
    gamma: float = 1.0
    max_iters: int = 100
    ei_rel_tol: float = 1e-5
    p_max: float = 0.2

    def __post_init__(self):
        self.sigma2_dbm = [float(s) for s in _as_list(self.sigma2_dbm)]
        self.strategies = [str(s).lower() for s in _as_list(self.strategies)]
        self.n_grid = [int(v) for v in _as_list(self.n_grid)]
        self.m_grid = [int(v) for v in _as_list(self.m_grid)]
        if self.drops < 1:
            raise ConfigError("drops must be >= 1")
        if not self.sigma2_dbm or not self.strategies or not self.n_grid or not self.m_grid:
            raise ConfigError("grids must be non-empty")
        if self.k < 1 or self.n < self.k or self.m < self.k:
            raise ConfigError(f"need N >= K and M >= K, got K={self.k}, N={self.n}, M={self.m}")
        if min(self.n_grid) < self.k or min(self.m_grid) < self.k:
            raise ConfigError("every N and M in the grids must be >= K")
        for s in self.strategies:
            parse_strategy(s)
        try:
            self.geometry
            self.channel_params
            self.optimizer
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def geometry(self):
        return Geometry(
            bs_position=(self.bs_x, self.bs_y, self.bs_z),
            ris_position=(self.ris_x, self.ris_y, self.ris_z),
            user_height=self.user_height,
            r_min=self.r_min,
            r_max=self.r_max,
        )

    @property
    def channel_params(self):
        return ChannelParams(rician_kappa=self.kappa, los_intercept_db=self.los_intercept_db)

    @property
    def optimizer(self):
        return OptimizerConfig(
            gamma=self.gamma, max_iters=self.max_iters, ei_rel_tol=self.ei_rel_tol, p_max=self.p_max
        )


def _as_list(value):
    if isinstance(value, (list, tuple)):
        return list(value)
    if isinstance(value, str):
        return [v for v in (s.strip() for s in value.split(",")) if v]
    return [value]


def load_config(path=None, **overrides):
    """Read a flat YAML key-value file and apply ``overrides`` (None values ignored)."""
    data = {}
    if path is not None:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise ConfigError("config must be a flat key-value mapping")
    data.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ConfigError(f"config must be flat, nested keys: {nested}")
    try:
        return ExperimentConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def dump_config(config, path):
    with open(path, "w") as fh:
        yaml.safe_dump(asdict(config), fh, sort_keys=False)


@dataclass
class ExperimentRecord:
    strategy: str
    sigma2_dbm: float
    n: int
    m: int
    drop: int
    ei: float
    rate_satisfaction: float
    iterations: int
    stop_reason: str = ""
    wall_time: float = 0.0


def drop_rng(master_seed, drop, attempt=0, stream=0):
    return np.random.default_rng(np.random.SeedSequence([master_seed, drop, attempt, stream]))


def _draw(config, drop, attempt, m, n):
    rng = drop_rng(config.master_seed, drop, attempt)
    d = draw_drop(config.geometry, config.channel_params, config.k, m, n, rng, config.p_data)
    d.seed = (config.master_seed, drop, attempt)
    return d


def evaluate_phases(problem, theta):
    """(EI with capped powers, rate-satisfaction ratio) at fixed phases."""
    link = link_state(problem.channels, theta, problem.sigma2, problem.r_th)
    p = np.minimum(link.p_star, problem.p_max)
    rates = achieved_rates(p, problem.sigma2, link.row_norm2)
    return float(np.dot(problem.sar_ref, p)), rate_satisfaction(np.minimum(rates, problem.r_th), problem.r_th)


def run_strategies(drop, sigma2_dbm, strategies, config, drop_index, random_theta=None):
    """Evaluate every strategy on one drop at one noise level."""
    sigma2 = float(dbm_to_watt(sigma2_dbm))
    m, n, _ = drop.channels.dims
    problem = Problem(drop.channels, drop.sar_ref, drop.r_th, sigma2, config.p_max)
    parsed = [parse_strategy(s) for s in strategies]
    need_opt = any(kind in ("optimized", "quantized") for kind, _ in parsed)
    opt_state, opt_time = None, 0.0
    if need_opt:
        t0 = time.perf_counter()
        opt_state = dual_gradient_descent(problem, config.optimizer)
        opt_time = time.perf_counter() - t0

    out = []
    for name, (kind, levels) in zip(strategies, parsed):
        t0 = time.perf_counter()
        iterations, stop = 0, ""
        target = problem
        if kind == "optimized":
            theta, iterations, stop = opt_state.theta, opt_state.iteration, opt_state.stop_reason
        elif kind == "quantized":
            theta = quantize_phases(opt_state.theta, levels)
            iterations, stop = opt_state.iteration, opt_state.stop_reason
        elif kind == "random":
            theta = random_theta[:n] if random_theta is not None else baseline_phases(
                "random", n, drop_rng(config.master_seed, drop_index, stream=1)
            )
        else:
            theta = baseline_phases(kind, n)
            if kind == "noris":
                target = replace(problem, channels=drop.channels.without_ris())
        ei, ratio = evaluate_phases(target, theta)
        wall = time.perf_counter() - t0 + (opt_time if kind in ("optimized", "quantized") else 0.0)
        out.append(ExperimentRecord(name, float(sigma2_dbm), n, m, drop_index, ei, ratio, iterations, stop, wall))
    return out


def _sweep_unit(args):
    config, drop_index = args
    for attempt in range(MAX_REDRAWS):
        try:
            drop = _draw(config, drop_index, attempt, config.m, config.n)
            random_theta = baseline_phases("random", config.n, drop_rng(config.master_seed, drop_index, stream=1))
            recs = []
            for s2 in config.sigma2_dbm:
                recs.extend(run_strategies(drop, s2, config.strategies, config, drop_index, random_theta))
            return recs, attempt
        except (RankDeficient, Singular) as exc:
            log.info("drop %d attempt %d degenerate (%s), redrawing", drop_index, attempt, exc)
    raise RuntimeError(f"drop {drop_index}: no usable channel after {MAX_REDRAWS} draws")


def _elements_unit(args):
    config, drop_index = args
    n_max, m_max = max(config.n_grid), max(config.m_grid)
    for attempt in range(MAX_REDRAWS):
        try:
            full = _draw(config, drop_index, attempt, m_max, n_max)
            recs = []
            for s2 in config.sigma2_dbm:
                for m in config.m_grid:
                    for n in config.n_grid:
                        recs.extend(
                            run_strategies(full.subset(m, n), s2, config.strategies, config, drop_index)
                        )
            return recs, attempt
        except (RankDeficient, Singular) as exc:
            log.info("drop %d attempt %d degenerate (%s), redrawing", drop_index, attempt, exc)
    raise RuntimeError(f"drop {drop_index}: no usable channel after {MAX_REDRAWS} draws")


def _run_units(unit, config):
    jobs = [(config, d) for d in range(config.drops)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(unit, jobs))
    else:
        results = [unit(j) for j in jobs]
    redraws = sum(r[1] for r in results)
    if redraws:
        log.warning("%d degenerate channel draws were redrawn", redraws)
    records = [rec for recs, _ in results for rec in recs]
    return sort_records(records, config.strategies)


def sort_records(records, strategy_order=None):
    order = {s: i for i, s in enumerate(strategy_order or [])}
    return sorted(records, key=lambda r: (order.get(r.strategy, len(order)), r.strategy, r.sigma2_dbm, r.n, r.m, r.drop))


def run_sweep(config, out_dir=None):
    """Noise sweep over every strategy with paired drops.

    All strategies and noise levels of a drop share one channel draw.
    Returns (records, aggregates); writes CSVs when ``out_dir`` is given.
    """
    records = _run_units(_sweep_unit, config)
    aggregates = aggregate(records)
    if out_dir is not None:
        write_outputs(records, aggregates, out_dir, "sweep")
    return records, aggregates


def run_elements(config, out_dir=None):
    """EI versus RIS size N and BS antenna count M on nested paired drops.

    Each drop is drawn once at the largest (M, N); smaller arrays use the
    leading antennas and elements of the same draw.
    """
    records = _run_units(_elements_unit, config)
    aggregates = aggregate(records)
    if out_dir is not None:
        write_outputs(records, aggregates, out_dir, "elements")
    return records, aggregates


def aggregate(records):
    groups = {}
    for r in records:
        groups.setdefault((r.strategy, r.sigma2_dbm, r.n, r.m), []).append(r)
    rows = []
    for (strategy, s2, n, m), rs in groups.items():
        rows.append(
            {
                "strategy": strategy,
                "sigma2_dbm": s2,
                "n": n,
                "m": m,
                "drops": len(rs),
                "ei_mean": float(np.mean([r.ei for r in rs])),
                "rate_satisfaction_mean": float(np.mean([r.rate_satisfaction for r in rs])),
                "iterations_mean": float(np.mean([r.iterations for r in rs])),
            }
        )
    return rows


def _fmt(v):
    return repr(v) if isinstance(v, float) else str(v)


def write_outputs(records, aggregates, out_dir, stem):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / f"{stem}_records.csv", RECORD_COLUMNS, [asdict(r) for r in records])
    write_csv(out / f"{stem}_aggregate.csv", AGGREGATE_COLUMNS, aggregates)
    write_csv(
        out / f"{stem}_timings.csv",
        ["strategy", "sigma2_dbm", "n", "m", "drop", "wall_time"],
        [asdict(r) for r in records],
    )


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])


def read_records(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        ExperimentRecord(
            strategy=r["strategy"],
            sigma2_dbm=float(r["sigma2_dbm"]),
            n=int(r["n"]),
            m=int(r["m"]),
            drop=int(r["drop"]),
            ei=float(r["ei"]),
            rate_satisfaction=float(r["rate_satisfaction"]),
            iterations=int(r["iterations"]),
            stop_reason=r["stop_reason"],
        )
        for r in rows
    ]


def emit_convergence(trace, path):
    """Write an (iteration, ei) CSV for one optimizer run; ``ei`` uses capped powers."""
    if not trace:
        raise ValueError("empty trace")
    write_csv(path, ["iteration", "ei"], [{"iteration": t.iteration, "ei": t.ei_capped} for t in trace])


def read_convergence(path):
    with open(path, newline="") as fh:
        return [(int(r["iteration"]), float(r["ei"])) for r in csv.DictReader(fh)]


def run_convergence(config, out_dir=None, drop_index=0):
    """Optimizer traces for one drop at every noise level of the config."""
    for attempt in range(MAX_REDRAWS):
        try:
            drop = _draw(config, drop_index, attempt, config.m, config.n)
            states = {}
            for s2 in config.sigma2_dbm:
                problem = Problem(drop.channels, drop.sar_ref, drop.r_th, float(dbm_to_watt(s2)), config.p_max)
                states[s2] = dual_gradient_descent(problem, config.optimizer)
            break
        except (RankDeficient, Singular):
            continue
    else:
        raise RuntimeError(f"drop {drop_index}: no usable channel after {MAX_REDRAWS} draws")
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for s2, st in states.items():
            emit_convergence(st.trace, out / f"convergence_{s2:g}dBm.csv")
    return states
