"""Experiment runner: convergence tables and identity batteries.

Each experiment returns an :class:`ExperimentResult` holding plot-ready
tables and a list of :class:`Check` records. Hard checks decide the exit
code; soft checks only warn. Replicates use consecutive seeds starting at
``SimConfig.seed`` and are merged in seed order, so output does not depend
on the number of workers.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from ._accel import BACKEND
from .crossings import crossing_integrals
from .follmer import bracket_samples, covariation, identity_report, realized_jump_square_sum
from .path import CadlagPath, make_path, write_csv
from .simulate import RNG_NAME, SimConfig, correlated_brownian_pair, generate
from .skorohod import backlash, carrier_violations, envelope_energy, identity_family, jordan_envelope
from .stieltjes import integration_by_parts_check, preset
from .variation import (
    bracketing_bounds,
    prefix_variation,
    total_variation,
    variation_exhaustive,
    variation_oracle_dp,
    variation_triple,
)

log = logging.getLogger(__name__)

EXPERIMENTS = (
    "thm1_convergence",
    "crossing_identity",
    "covariation",
    "follmer_residuals",
    "pure_jump_order",
    "stable_scaling",
    "identity_suite",
)

# Discrete-monitoring shift of a Brownian extremum, -zeta(1/2)/sqrt(2*pi).
MONITORING_SHIFT = 0.5825971579390106

DEFAULT_LADDER = (0.08, 0.04, 0.02)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    sim: SimConfig = field(default_factory=SimConfig)
    eps_list: tuple = DEFAULT_LADDER
    grid: tuple | None = None
    replicates: int = 8
    workers: int = 1
    output: str | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        eps = [float(e) for e in self.eps_list]
        if not eps or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise ConfigError("eps_list must be positive and strictly decreasing")
        self.eps_list = tuple(eps)
        if int(self.replicates) < 1:
            raise ConfigError("replicates must be >= 1")
        if int(self.workers) < 1:
            raise ConfigError("workers must be >= 1")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        sim = d.pop("sim", {}) or {}
        try:
            return cls(sim=SimConfig(**sim), **d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sim"] = self.sim.to_dict()
        return d

    def opt(self, key, default):
        return self.options.get(key, default)


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    passed: bool
    hard: bool = True
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else ("FAIL" if self.hard else "WARN")
        extra = f"  ({self.detail})" if self.detail else ""
        return f"[{tag}] {self.name}: {self.value:.6g} vs {self.threshold:.6g}{extra}"


@dataclass
class ExperimentResult:
    experiment: str
    config: dict
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if c.hard)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def check(self, name, value, threshold, passed, hard=True, detail="") -> Check:
        c = Check(name, float(value), float(threshold), bool(passed), hard, detail)
        self.checks.append(c)
        log.info(c.line())
        return c

    def report(self) -> str:
        head = f"{self.experiment}: {'OK' if self.ok else 'FAILED'}"
        return "\n".join([head] + ["  " + c.line() for c in self.checks])


def _pmap(fn, items, workers: int) -> list:
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _seeds(cfg: ExperimentConfig) -> list[int]:
    return [cfg.sim.seed + r for r in range(int(cfg.replicates))]


def _grid(cfg: ExperimentConfig) -> np.ndarray:
    if cfg.grid is not None:
        return np.asarray(cfg.grid, dtype=np.float64)
    return np.linspace(0.0, cfg.sim.T, 101)


def continuous_qv_rate(sim: SimConfig) -> float:
    """d[X]^cont/dt for the simulated kinds."""
    return sim.sigma**2 if sim.kind in ("brownian", "jump_diffusion") else 0.0


def sup_error_vs_line(times, values, slope) -> float:
    """Exact ``sup_t |v(t) - slope * t|`` for a piecewise-constant ``v`` on ``[t_0, t_end]``."""
    a = np.abs(values - slope * times)
    b = np.abs(values[:-1] - slope * times[1:])
    return float(max(a.max(), b.max() if b.size else 0.0))


def median_se(x) -> float:
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        return 0.0
    return 1.2533 * float(np.std(x, ddof=1)) / math.sqrt(x.size)


def partition_sum_diagnostic(p: CadlagPath, levels=None, eps_list=DEFAULT_LADDER) -> dict:
    """Sums of squared increments along dyadic time partitions, next to ``eps * TTV``.

    Informational: no equality between the two columns is asserted. Returns
    columns ``level, mesh, partition_sum`` plus one ``T_<eps>`` value per eps.
    """
    T = p.horizon
    if levels is None:
        top = max(1, int(math.ceil(math.log2(max(len(p) - 1, 1)))))
        levels = range(max(0, top - 8), top + 1)
    rows = {"level": [], "mesh": [], "partition_sum": []}
    for k in levels:
        ts = np.linspace(0.0, T, (1 << k) + 1)
        v = p.values[np.searchsorted(p.times, ts, side="right") - 1]
        rows["level"].append(k)
        rows["mesh"].append(T / (1 << k))
        rows["partition_sum"].append(float(np.sum(np.diff(v) ** 2)))
    out = {k: np.asarray(v) for k, v in rows.items()}
    out["sample_sum"] = float(np.sum(np.diff(p.values) ** 2))
    out["normalized_ttv"] = {float(e): float(e) * variation_triple(p, e).ttv for e in eps_list}
    return out


# --------------------------------------------------------------------------
# thm1_convergence


def _thm1_replicate(args):
    cfg, seed = args
    p = generate(replace(cfg.sim, seed=seed))
    grid = _grid(cfg)
    idx = np.searchsorted(p.times, grid, side="right") - 1
    rate = continuous_qv_rate(cfg.sim)
    # sampling scale for the monitoring-corrected diagnostic column
    h = math.sqrt(float(np.mean(np.diff(p.values) ** 2)))
    per_eps = []
    for eps in cfg.eps_list:
        ttv, utv, dtv = prefix_variation(p.values, eps)
        T, U, D = eps * ttv, eps * utv, eps * dtv
        sup_err = sup_error_vs_line(p.times, T, rate)
        corr = (eps + 2.0 * MONITORING_SHIFT * h) / eps
        per_eps.append(
            {
                "eps": eps,
                "T": T[idx],
                "U": U[idx],
                "D": D[idx],
                "T_monitoring_corrected": corr * T[idx],
                "sup_err": sup_err,
                "sup_err_corrected": sup_error_vs_line(p.times, corr * T, rate),
                "T_end": float(T[-1]),
                "U_end": float(U[-1]),
                "D_end": float(D[-1]),
            }
        )
    extra = {}
    if cfg.sim.kind in ("jump_diffusion", "compound_poisson"):
        diag = partition_sum_diagnostic(p, levels=[max(1, int(math.log2(cfg.sim.n)))], eps_list=cfg.eps_list)
        extra = {"partition_sum": float(diag["partition_sum"][-1]), "jump_sq_sum": realized_jump_square_sum(p)}
    return seed, grid, per_eps, extra


def run_thm1(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(cfg.experiment, cfg.to_dict())
    rate = continuous_qv_rate(cfg.sim)
    reps = _pmap(_thm1_replicate, [(cfg, s) for s in _seeds(cfg)], cfg.workers)
    cols = {k: [] for k in ("seed", "t", "eps", "T", "U", "D", "target", "abs_err", "sup_err", "T_monitoring_corrected")}
    summ = {k: [] for k in ("seed", "eps", "sup_err", "sup_err_corrected", "T_end", "U_end", "D_end")}
    for seed, grid, per_eps, _ in reps:
        target = rate * grid
        for r in per_eps:
            m = grid.size
            cols["seed"].append(np.full(m, seed))
            cols["t"].append(grid)
            cols["eps"].append(np.full(m, r["eps"]))
            cols["T"].append(r["T"])
            cols["U"].append(r["U"])
            cols["D"].append(r["D"])
            cols["target"].append(target)
            cols["abs_err"].append(np.abs(r["T"] - target))
            cols["sup_err"].append(np.full(m, r["sup_err"]))
            cols["T_monitoring_corrected"].append(r["T_monitoring_corrected"])
            for k in ("eps", "sup_err", "sup_err_corrected", "T_end", "U_end", "D_end"):
                summ[k].append(r[k])
            summ["seed"].append(seed)
    res.tables["convergence"] = {k: np.concatenate(v) for k, v in cols.items()}
    res.tables["per_replicate"] = {k: np.asarray(v, dtype=float) for k, v in summ.items()}

    eps_arr = np.asarray(summ["eps"])
    med = {}
    for eps in cfg.eps_list:
        sel = eps_arr == eps
        med[eps] = {
            k: float(np.median(np.asarray(summ[k])[sel]))
            for k in ("sup_err", "sup_err_corrected", "T_end", "U_end", "D_end")
        }
        med[eps]["sup_err_se"] = median_se(np.asarray(summ["sup_err"])[sel])
    res.summary["median_by_eps"] = {str(k): v for k, v in med.items()}

    eps0 = cfg.eps_list[-1]
    horizon = cfg.sim.T
    target_end = rate * horizon
    if cfg.sim.kind == "brownian":
        tol_sup = cfg.opt("tol_sup", 0.05)
        tol_ud = cfg.opt("tol_ud", 0.03)
        res.check(f"median sup|T-t| at eps={eps0:g}", med[eps0]["sup_err"], tol_sup, med[eps0]["sup_err"] <= tol_sup)
        du = abs(med[eps0]["U_end"] - 0.5 * target_end)
        dd = abs(med[eps0]["D_end"] - 0.5 * target_end)
        res.check(f"|U_end - half target| at eps={eps0:g}", du, tol_ud, du <= tol_ud)
        res.check(f"|D_end - half target| at eps={eps0:g}", dd, tol_ud, dd <= tol_ud)
        worst = 0.0
        ok = True
        for a, b in zip(cfg.eps_list, cfg.eps_list[1:]):
            slack = 2.0 * max(med[a]["sup_err_se"], med[b]["sup_err_se"])
            excess = med[b]["sup_err"] - med[a]["sup_err"]
            worst = max(worst, excess - slack)
            ok &= excess <= slack
        res.check("sup error shrinks along ladder (excess over 2 SE)", worst, 0.0, ok,
                  detail=" -> ".join(f"{med[e]['sup_err']:.4f}" for e in cfg.eps_list))
    elif cfg.sim.kind == "jump_diffusion":
        tol = cfg.opt("tol_T_end", 0.06)
        dev = abs(med[eps0]["T_end"] - target_end)
        res.check(f"|median T_end - continuous target| at eps={eps0:g}", dev, tol, dev <= tol)
        margins = [e["partition_sum"] - (target_end + 0.5 * e["jump_sq_sum"]) for _, _, _, e in reps]
        res.check("partition sum exceeds target + 0.5*sum(jump^2) on every replicate",
                  min(margins), 0.0, min(margins) > 0)
        res.summary["partition"] = [dict(seed=s, **e) for s, _, _, e in reps]
    return res


# --------------------------------------------------------------------------
# covariation


def run_covariation(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(cfg.experiment, cfg.to_dict())
    rho = float(cfg.opt("rho", 0.5))
    eps = cfg.eps_list[-1]
    grid = _grid(cfg)
    rate = rho * cfg.sim.sigma**2

    def one(seed):
        x, y = correlated_brownian_pair(replace(cfg.sim, kind="brownian", seed=seed), rho)
        c = covariation(x, y, eps, grid)
        return seed, c.values

    reps = _pmap(one, _seeds(cfg), cfg.workers)
    res.tables["covariation"] = {
        "seed": np.concatenate([np.full(grid.size, s) for s, _ in reps]),
        "t": np.tile(grid, len(reps)),
        "eps": np.full(grid.size * len(reps), eps),
        "covariation": np.concatenate([v for _, v in reps]),
        "target": np.tile(rate * grid, len(reps)),
    }
    ends = np.array([v[-1] for _, v in reps])
    dev = abs(float(np.median(ends)) - rate * grid[-1])
    res.summary["end_values"] = ends.tolist()
    tol = cfg.opt("tol", 0.06)
    res.check(f"|median covariation at t_end - rho t| (eps={eps:g})", dev, tol, dev <= tol)
    return res


# --------------------------------------------------------------------------
# follmer_residuals

RESIDUALS = ("residual_thm2", "residual_prop1", "residual_relation", "gap_second_prime", "gap_x_second")


def finite_variation_exact_residual(seed: int = 7, fn_name: str = "cos") -> float:
    """Change-of-variable residual for a pure-jump path with the ``x^eps = x`` family."""
    p = generate(SimConfig(kind="compound_poisson", n=256, lam=20.0, seed=seed))
    p = make_path(p.times, p.values)  # literal reading: every increment is a jump
    r = identity_report(p, preset(fn_name), 0.0, family=identity_family)
    return abs(r.residual_thm2)


def run_follmer(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(cfg.experiment, cfg.to_dict())
    fn = preset(cfg.opt("f", "cos"))

    def one(seed):
        p = generate(replace(cfg.sim, seed=seed))
        return seed, [identity_report(p, fn, eps) for eps in cfg.eps_list]

    reps = _pmap(one, _seeds(cfg), cfg.workers)
    fields = list(reps[0][1][0].as_dict())
    table = {"seed": []}
    table.update({k: [] for k in fields})
    for seed, reports in reps:
        for r in reports:
            table["seed"].append(seed)
            for k, v in r.as_dict().items():
                table[k].append(v)
    res.tables["residuals"] = {k: np.asarray(v, dtype=float) for k, v in table.items()}

    eps_col = res.tables["residuals"]["eps"]
    med = {
        eps: {k: float(np.median(np.abs(res.tables["residuals"][k][eps_col == eps]))) for k in RESIDUALS}
        for eps in cfg.eps_list
    }
    res.summary["median_abs_by_eps"] = {str(k): v for k, v in med.items()}
    eps0 = cfg.eps_list[-1]
    tols = {
        "residual_thm2": cfg.opt("tol_thm2", 0.05),
        "residual_prop1": cfg.opt("tol_prop1", 0.05),
        "residual_relation": cfg.opt("tol_relation", 0.02),
        "gap_second_prime": cfg.opt("tol_gap", 0.02),
        "gap_x_second": cfg.opt("tol_gap", 0.02),
    }
    for k, tol in tols.items():
        res.check(f"median |{k}| at eps={eps0:g}", med[eps0][k], tol, med[eps0][k] <= tol)
    for k in ("residual_thm2", "residual_prop1"):
        seq = [med[e][k] for e in cfg.eps_list]
        worst = max(b - a for a, b in zip(seq, seq[1:])) if len(seq) > 1 else 0.0
        res.check(f"median |{k}| shrinks along ladder", worst, 0.0, worst <= 0.0,
                  detail=" -> ".join(f"{v:.4f}" for v in seq))
    fv = finite_variation_exact_residual(fn_name=cfg.opt("f", "cos"))
    res.check("finite-variation path, identity family: |residual_thm2|", fv, 1e-10, fv <= 1e-10)
    return res


# --------------------------------------------------------------------------
# pure_jump_order


def run_pure_jump(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(cfg.experiment, cfg.to_dict())
    sim = replace(cfg.sim, kind="compound_poisson")

    def one(seed):
        p = generate(replace(sim, seed=seed))
        tv = total_variation(p.values)
        return seed, tv, [variation_triple(p, e).ttv for e in cfg.eps_list]

    reps = _pmap(one, _seeds(cfg), cfg.workers)
    rows = {"seed": [], "eps": [], "eps_ttv": [], "eps_tv": []}
    hard_ok = True
    worst_gap = -math.inf
    decreasing = True
    for seed, tv, ttvs in reps:
        vals = [e * t for e, t in zip(cfg.eps_list, ttvs)]
        for e, t, v in zip(cfg.eps_list, ttvs, vals):
            rows["seed"].append(seed)
            rows["eps"].append(e)
            rows["eps_ttv"].append(v)
            rows["eps_tv"].append(e * tv)
            hard_ok &= t <= tv
            worst_gap = max(worst_gap, t - tv)
        decreasing &= all(b < a for a, b in zip(vals, vals[1:]))
    res.tables["pure_jump"] = {k: np.asarray(v, dtype=float) for k, v in rows.items()}
    eps0 = cfg.eps_list[-1]
    last = res.tables["pure_jump"]["eps_ttv"][res.tables["pure_jump"]["eps"] == eps0]
    res.check("eps*TTV <= eps*TV on every replicate and eps (TTV - TV)", worst_gap, 0.0, hard_ok)
    tol = cfg.opt("tol", 0.1)
    res.check(f"max eps*TTV at eps={eps0:g}", last.max(), tol, last.max() <= tol)
    res.check("eps*TTV decreasing along ladder on every replicate", float(decreasing), 1.0, decreasing)
    return res


# --------------------------------------------------------------------------
# stable_scaling


def loglog_slope(eps_list, values) -> float:
    return float(np.polyfit(np.log(np.asarray(eps_list)), np.log(np.asarray(values)), 1)[0])


def run_stable(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(cfg.experiment, cfg.to_dict())
    sim = replace(cfg.sim, kind="alpha_stable")

    def one(seed):
        p = generate(replace(sim, seed=seed))
        ttv = [variation_triple(p, e).ttv for e in cfg.eps_list]
        return seed, ttv, loglog_slope(cfg.eps_list, ttv)

    reps = _pmap(one, _seeds(cfg), cfg.workers)
    res.tables["stable"] = {
        "seed": np.repeat([s for s, _, _ in reps], len(cfg.eps_list)).astype(float),
        "eps": np.tile(cfg.eps_list, len(reps)),
        "ttv": np.concatenate([t for _, t, _ in reps]),
        "slope": np.repeat([s for _, _, s in reps], len(cfg.eps_list)),
    }
    slope = float(np.median([s for _, _, s in reps]))
    expected = 1.0 - sim.alpha
    tol = cfg.opt("tol", 0.2)
    res.summary["median_slope"] = slope
    res.check(f"|median log-log slope - (1 - alpha)| (slope {slope:.3f})", abs(slope - expected), tol,
              abs(slope - expected) <= tol, hard=False)
    return res


# --------------------------------------------------------------------------
# property batteries


def random_path(rng: np.random.Generator, n_max: int, n_min: int = 2) -> CadlagPath:
    """Random test path mixing diffusive steps, jumps, plateaus and lattice ties."""
    n = int(rng.integers(n_min, n_max + 1))
    style = rng.integers(0, 4)
    scale = float(rng.choice([0.01, 0.1, 1.0]))
    steps = scale * rng.standard_normal(n - 1) if n > 1 else np.zeros(0)
    if style == 1:
        hit = rng.random(n - 1) < 0.1
        steps = steps + hit * rng.normal(0.0, 5 * scale, n - 1)
    elif style == 2:
        steps = steps * (rng.random(n - 1) < 0.4)
    x = float(rng.normal()) + np.concatenate(([0.0], np.cumsum(steps)))
    if style == 3:
        x = np.round(x / (0.5 * scale)) * (0.5 * scale)
    t = np.cumsum(np.concatenate(([0.0], rng.uniform(0.1, 1.0, n - 1))))
    return make_path(t, x)


def _tally(results: dict, name: str, ok: bool):
    passed, total = results.get(name, (0, 0))
    results[name] = (passed + int(bool(ok)), total + 1)


def oracle_battery(n_paths: int, n_max: int, seed: int, exhaustive_cases: int = 0, exhaustive_n: int = 12) -> dict:
    """Fast kernel vs DP on random paths; DP vs exhaustive on short ones."""
    rng = np.random.default_rng(seed)
    out = {}
    worst = 0.0
    for _ in range(n_paths):
        p = random_path(rng, n_max)
        eps = float(rng.choice([0.0, 0.01, 0.1, 0.5, 1.0, rng.uniform(0, 2)]))
        a = variation_triple(p, eps)
        b = variation_oracle_dp(p, eps)
        err = max(abs(a.ttv - b.ttv), abs(a.utv - b.utv), abs(a.dtv - b.dtv))
        worst = max(worst, err / len(p))
        _tally(out, "fast == dp", err <= 1e-12 * len(p))
    worst_ex = 0.0
    for _ in range(exhaustive_cases):
        p = random_path(rng, exhaustive_n, n_min=1)
        eps = float(rng.choice([0.0, 0.1, 0.5, rng.uniform(0, 2)]))
        b = variation_oracle_dp(p, eps)
        c = variation_exhaustive(p.values, eps)
        err = max(abs(c.ttv - b.ttv), abs(c.utv - b.utv), abs(c.dtv - b.dtv))
        worst_ex = max(worst_ex, err / len(p))
        _tally(out, "dp == exhaustive", err <= 1e-12 * len(p))
    out["_worst_per_sample"] = (worst, worst_ex)
    return out


def jordan_battery(n_paths: int, n_max: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    out = {}
    for _ in range(n_paths):
        p = random_path(rng, n_max)
        e1, e2 = sorted(float(v) for v in rng.uniform(0.0, 2.0, 2))
        a = variation_triple(p, e1)
        b = variation_triple(p, e2)
        _tally(out, "ttv == utv + dtv", abs(a.ttv - (a.utv + a.dtv)) <= 1e-9 * (1 + a.ttv))
        rem = a.utv - a.dtv - (p.values[-1] - p.values[0])
        _tally(out, "|utv - dtv - increment| <= eps", abs(rem) <= e1 + 1e-9)
        _tally(out, "monotone in eps", a.ttv >= b.ttv and a.utv >= b.utv and a.dtv >= b.dtv)
        if e2 > 0:
            j = jordan_envelope(p, e2)
            _tally(out, "jordan envelope within eps", np.max(np.abs(j.remainder)) <= e2 * (1 + 1e-12) + 1e-12)
        if 0 < e1 < 1:
            lo, v, hi = bracketing_bounds(p, e1)
            _tally(out, "reciprocal bracketing", lo <= v * (1 + 1e-12) + 1e-15 and v <= hi * (1 + 1e-12) + 1e-15)
    return out


def envelope_battery(n_paths: int, n_max: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    out = {}
    for _ in range(n_paths):
        p = random_path(rng, n_max)
        spread = float(np.ptp(p.values)) or 1.0
        h = float(rng.uniform(0.01, 0.6)) * spread
        e = backlash(p, h)
        x, y = p.values, e.env.values
        n = len(p)
        tol = 1e-12 * max(1.0, float(np.max(np.abs(x))))
        _tally(out, "sup|x - y| <= h", np.max(np.abs(x - y)) <= h + tol)
        _tally(out, "|dy| <= |dx|", bool(np.all(np.abs(np.diff(y)) <= np.abs(np.diff(x)) + tol)))
        _tally(out, "y0 == x0", y[0] == x[0])
        _tally(out, "carrier property", carrier_violations(e) == 0)
        tv = total_variation(y)
        energy = envelope_energy(e)
        _tally(out, "energy == h * TV(y)", abs(energy - h * tv) <= 1e-12 * n * max(1.0, h * tv))
        lower = variation_triple(p, 2 * h).ttv
        slack = 1e-12 * n * max(1.0, tv)
        _tally(out, "sandwich", lower - slack <= tv <= lower + 2 * h + slack)
        k = int(rng.integers(1, n + 1))
        pre = backlash(make_path(p.times[:k], x[:k]), h).env.values
        _tally(out, "prefix stability", np.array_equal(pre, y[:k]))
        dom = np.abs(np.diff(x - y) * np.diff(y))
        dx = np.abs(np.diff(x))
        _tally(out, "jump-sum domination", bool(np.all(dom <= np.minimum(2 * h * dx, 2 * dx * dx) + tol)))
        br = bracket_samples(e)
        inc = np.diff(br)
        _tally(out, "bracket non-decreasing", bool(np.all(inc >= -tol)))
        _tally(out, "bracket jump bound", bool(np.all(inc <= 2 * h * (dx + 2 * h) + tol)))
    return out


def crossing_battery(n_paths: int, n_max: int, seed: int, eps_list=(0.05, 0.2, 1.0)) -> dict:
    rng = np.random.default_rng(seed)
    out = {}
    worst = 0.0
    for _ in range(n_paths):
        p = random_path(rng, n_max)
        for eps in eps_list:
            v = variation_triple(p, eps)
            up, down, total = crossing_integrals(p.values, eps)
            errs = [abs(up - v.utv) / (1 + v.utv), abs(down - v.dtv) / (1 + v.dtv), abs(total - v.ttv) / (1 + v.ttv)]
            worst = max(worst, max(errs))
            _tally(out, f"crossing integrals == variations (eps={eps:g})", max(errs) <= 1e-9)
    out["_worst_rel"] = worst
    return out


def stieltjes_battery(n_paths: int, n_max: int, seed: int) -> dict:
    rng = np.random.default_rng(seed)
    out = {}
    for _ in range(n_paths):
        p = random_path(rng, n_max)
        q = p.with_values(rng.standard_normal(len(p)).cumsum())
        r = integration_by_parts_check(p, q)
        _tally(out, "integration by parts", abs(r) <= 1e-10)
    return out


def _merge(*parts) -> dict:
    merged = {}
    for part in parts:
        merged.update({k: v for k, v in part.items() if not k.startswith("_")})
    return merged


def run_identity_suite(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(cfg.experiment, cfg.to_dict())
    n_paths = int(cfg.opt("n_paths", 1000))
    n_max = int(cfg.opt("n_max", 200))
    seed = cfg.sim.seed
    tallies = _merge(
        oracle_battery(n_paths, n_max, seed, exhaustive_cases=n_paths),
        jordan_battery(n_paths, n_max, seed + 1),
        envelope_battery(n_paths, n_max, seed + 2),
        crossing_battery(max(1, n_paths // 4), n_max, seed + 3),
        stieltjes_battery(n_paths, n_max, seed + 4),
    )
    names = sorted(tallies)
    res.tables["identity_suite"] = {
        "passed": np.array([tallies[k][0] for k in names], dtype=float),
        "total": np.array([tallies[k][1] for k in names], dtype=float),
    }
    res.summary["properties"] = {k: {"passed": tallies[k][0], "total": tallies[k][1]} for k in names}
    for k in names:
        passed, total = tallies[k]
        res.check(k, total - passed, 0, passed == total, detail=f"{passed}/{total}")
    return res


def run_crossing_identity(cfg: ExperimentConfig) -> ExperimentResult:
    res = ExperimentResult(cfg.experiment, cfg.to_dict())
    n_paths = int(cfg.opt("n_paths", 1000))
    n_max = int(cfg.opt("n_max", 500))
    eps_list = tuple(cfg.opt("crossing_eps", (0.05, 0.2, 1.0)))
    tallies = crossing_battery(n_paths, n_max, cfg.sim.seed, eps_list)
    worst = tallies.pop("_worst_rel")
    res.summary["worst_relative_error"] = worst
    for k, (passed, total) in sorted(tallies.items()):
        res.check(k, total - passed, 0, passed == total, detail=f"{passed}/{total}, worst rel {worst:.2e}")
    return res


RUNNERS = {
    "thm1_convergence": run_thm1,
    "crossing_identity": run_crossing_identity,
    "covariation": run_covariation,
    "follmer_residuals": run_follmer,
    "pure_jump_order": run_pure_jump,
    "stable_scaling": run_stable,
    "identity_suite": run_identity_suite,
}


def run(cfg: ExperimentConfig) -> ExperimentResult:
    """Run one experiment and, if ``cfg.output`` is set, write its artifacts."""
    res = RUNNERS[cfg.experiment](cfg)
    res.summary["exit_code"] = res.exit_code
    if cfg.output:
        write_artifacts(res, cfg.output)
    return res


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    return o


def sidecar(extra: dict | None = None) -> dict:
    meta = {"truncvar": __version__, "backend": BACKEND, "rng": RNG_NAME, "numpy": np.__version__}
    if extra:
        meta.update(extra)
    return _jsonable(meta)


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_table(path, columns: dict, meta: dict) -> None:
    write_csv(path, columns)
    write_json(str(path) + ".meta.json", meta)


def write_artifacts(res: ExperimentResult, outdir) -> list:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    meta = sidecar({"config": res.config, "experiment": res.experiment})
    written = []
    for name, cols in res.tables.items():
        path = out / f"{res.experiment}_{name}.csv"
        write_table(path, cols, meta)
        written.append(path)
    summary = {
        "experiment": res.experiment,
        "ok": res.ok,
        "checks": [asdict(c) for c in res.checks],
        "summary": res.summary,
        "meta": meta,
    }
    path = out / f"{res.experiment}_summary.json"
    write_json(path, summary)
    written.append(path)
    return written
