"""Seeded test processes with known continuous quadratic variation.

========================  =============================
kind                      continuous part of [X]_t
========================  =============================
``brownian``              ``sigma**2 * t``
``compound_poisson``      0
``jump_diffusion``        ``sigma**2 * t``
``alpha_stable``          0 (pure jump)
========================  =============================

All randomness comes from ``numpy.random.Generator(PCG64)`` seeded with
``SimConfig.seed``; identical configs give bitwise identical paths.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .path import CadlagPath, make_path

KINDS = ("brownian", "compound_poisson", "jump_diffusion", "alpha_stable")
RNG_NAME = "numpy.random.PCG64"


@dataclass(frozen=True)
class SimConfig:
    kind: str = "brownian"
    T: float = 1.0
    n: int = 1024
    seed: int = 0
    sigma: float = 1.0
    drift: float = 0.0
    lam: float = 0.0
    jump_sd: float = 1.0
    alpha: float = 1.5
    stable_scale: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if not self.T > 0:
            raise ValueError("T must be > 0")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        if self.sigma < 0 or self.jump_sd < 0 or self.stable_scale <= 0:
            raise ValueError("scales must be non-negative (stable_scale > 0)")
        if self.lam < 0:
            raise ValueError("jump rate must be >= 0")
        if self.kind == "alpha_stable" and not 1.0 < self.alpha < 2.0:
            raise ValueError("alpha must lie in (1, 2)")

    def to_dict(self) -> dict:
        return asdict(self)


def metadata(cfg: SimConfig, **extra) -> dict:
    """Provenance record written next to every simulated path."""
    from . import __version__

    meta = {
        "config": cfg.to_dict(),
        "rng": RNG_NAME,
        "numpy": np.__version__,
        "truncvar": __version__,
    }
    meta.update(extra)
    return meta


def _rng(cfg: SimConfig) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(cfg.seed))


def _brownian_values(cfg: SimConfig, rng: np.random.Generator) -> np.ndarray:
    dt = cfg.T / cfg.n
    steps = cfg.sigma * math.sqrt(dt) * rng.standard_normal(cfg.n) + cfg.drift * dt
    return np.concatenate(([0.0], np.cumsum(steps)))


def _poisson_jumps(cfg: SimConfig, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    times = []
    if cfg.lam > 0:
        s = rng.exponential(1.0 / cfg.lam)
        while s <= cfg.T:
            times.append(s)
            s += rng.exponential(1.0 / cfg.lam)
    times = np.asarray(times, dtype=np.float64)
    sizes = cfg.jump_sd * rng.standard_normal(times.size)
    return times, sizes


def chambers_mallows_stuck(alpha: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Standard symmetric alpha-stable variates (characteristic function ``exp(-|u|**alpha)``)."""
    v = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, size)
    w = rng.exponential(1.0, size)
    return (
        np.sin(alpha * v)
        / np.cos(v) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha)
    )


def generate(cfg: SimConfig) -> CadlagPath:
    """Sample one path of ``cfg.kind`` on ``[0, cfg.T]``.

    The diffusion grid is uniform with ``n`` steps. Poisson jumps get their
    own sample times (merged into the grid) and are the only increments
    flagged in ``jump_mask``. Alpha-stable paths keep the literal reading in
    which every increment is a jump.
    """
    rng = _rng(cfg)
    grid = np.linspace(0.0, cfg.T, cfg.n + 1)
    if cfg.kind == "brownian":
        return make_path(grid, _brownian_values(cfg, rng), jump_mask=np.zeros(grid.size, bool))
    if cfg.kind == "alpha_stable":
        dt = cfg.T / cfg.n
        steps = cfg.stable_scale * dt ** (1.0 / cfg.alpha) * chambers_mallows_stuck(cfg.alpha, cfg.n, rng)
        return make_path(grid, np.concatenate(([0.0], np.cumsum(steps))))

    if cfg.kind == "jump_diffusion":
        base = _brownian_values(cfg, rng)
    else:
        base = np.zeros(grid.size)
    jt, js = _poisson_jumps(cfg, rng)
    times = np.union1d(grid, jt)
    pos = np.searchsorted(grid, times, side="right") - 1
    cont = base[pos]
    jumps_cum = np.zeros(times.size)
    mask = np.zeros(times.size, dtype=bool)
    if jt.size:
        at = np.searchsorted(times, jt)
        incr = np.zeros(times.size)
        np.add.at(incr, at, js)
        jumps_cum = np.cumsum(incr)
        mask[at] = True
    return make_path(times, cont + jumps_cum, jump_mask=mask)


def correlated_brownian_pair(cfg: SimConfig, rho: float) -> tuple[CadlagPath, CadlagPath]:
    """Two Brownian paths with instantaneous correlation ``rho``."""
    rho = float(rho)
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [-1, 1], got {rho}")
    rng = _rng(cfg)
    dt = cfg.T / cfg.n
    scale = cfg.sigma * math.sqrt(dt)
    z1 = rng.standard_normal(cfg.n)
    z2 = rng.standard_normal(cfg.n)
    dw1 = scale * z1 + cfg.drift * dt
    dw2 = scale * (rho * z1 + math.sqrt(1.0 - rho * rho) * z2) + cfg.drift * dt
    grid = np.linspace(0.0, cfg.T, cfg.n + 1)
    mask = np.zeros(grid.size, bool)
    x = make_path(grid, np.concatenate(([0.0], np.cumsum(dw1))), jump_mask=mask)
    y = make_path(grid, np.concatenate(([0.0], np.cumsum(dw2))), jump_mask=mask)
    return x, y
