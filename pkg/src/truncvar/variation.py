"""Truncated, upward and downward truncated variation of sampled paths.

For a truncation level ``eps >= 0`` the truncated variation is the supremum,
over all increasing index chains, of ``sum max(|x_j - x_i| - eps, 0)``; the
upward (downward) variant only counts rises (falls). At ``eps = 0`` these
are the total variation and its Jordan positive / negative parts.

:func:`variation_triple` and :func:`variation_curve` use the linear-time
kernel. :func:`variation_oracle_dp` and :func:`variation_exhaustive` compute
the same supremum by brute force and exist to check it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .path import CadlagPath, PathError, index_at


@dataclass(frozen=True)
class VariationTriple:
    ttv: float
    utv: float
    dtv: float

    def scaled(self, factor: float) -> "VariationTriple":
        return VariationTriple(factor * self.ttv, factor * self.utv, factor * self.dtv)

    def as_dict(self) -> dict:
        return {"ttv": self.ttv, "utv": self.utv, "dtv": self.dtv}


@dataclass(frozen=True)
class VariationProcess:
    """Running triples on an evaluation grid; each column is over ``[0, t]``."""

    grid: np.ndarray
    ttv: np.ndarray
    utv: np.ndarray
    dtv: np.ndarray
    eps: float

    def at(self, k: int) -> VariationTriple:
        return VariationTriple(float(self.ttv[k]), float(self.utv[k]), float(self.dtv[k]))

    def normalized(self) -> "VariationProcess":
        """``eps`` times every column, i.e. the processes (T, U, D)."""
        e = self.eps
        return VariationProcess(self.grid, e * self.ttv, e * self.utv, e * self.dtv, e)


def check_eps(eps: float) -> float:
    eps = float(eps)
    if not eps >= 0.0:
        raise ValueError(f"truncation parameter must be >= 0, got {eps!r}")
    return eps


def _window(p: CadlagPath, upto) -> np.ndarray:
    if upto is None:
        return p.values
    return p.values[: index_at(p, upto) + 1]


def variation_triple(p: CadlagPath, eps: float, upto: float | None = None) -> VariationTriple:
    """Exact (TTV, UTV, DTV) of ``p`` on ``[0, upto]`` at truncation ``eps``."""
    eps = check_eps(eps)
    x = _window(p, upto)
    ttv, utv, dtv = kernels.truncvar_prefix(np.ascontiguousarray(x), eps)
    return VariationTriple(float(ttv[-1]), float(utv[-1]), float(dtv[-1]))


def prefix_variation(values: np.ndarray, eps: float):
    """Per-sample running (ttv, utv, dtv) arrays for a raw value array."""
    return kernels.truncvar_prefix(np.ascontiguousarray(values, dtype=np.float64), check_eps(eps))


def variation_curve(p: CadlagPath, eps: float, grid=None) -> VariationProcess:
    """Running triple at every grid time, from a single sweep.

    ``grid`` defaults to the sample times. It must be non-decreasing and lie
    within ``[0, horizon]``.
    """
    eps = check_eps(eps)
    g = p.times if grid is None else np.asarray(grid, dtype=np.float64)
    if g.ndim != 1:
        raise ValueError("grid must be one-dimensional")
    if g.size > 1 and np.any(np.diff(g) < 0):
        raise ValueError("grid must be sorted in increasing order")
    if g.size and (g[0] < p.times[0] or g[-1] > p.horizon):
        raise PathError("grid leaves the sampled horizon")
    ttv, utv, dtv = kernels.truncvar_prefix(p.values, eps)
    idx = np.searchsorted(p.times, g, side="right") - 1
    return VariationProcess(g, ttv[idx], utv[idx], dtv[idx], eps)


def normalized_variation(p: CadlagPath, eps: float, upto: float | None = None) -> VariationTriple:
    """``eps * (TTV, UTV, DTV)``, the processes (T, U, D) at time ``upto``."""
    return variation_triple(p, eps, upto).scaled(float(eps))


def variation_oracle_dp(p: CadlagPath, eps: float, upto: float | None = None) -> VariationTriple:
    """Reference supremum via the O(n^2) chain dynamic program."""
    eps = check_eps(eps)
    x = np.ascontiguousarray(_window(p, upto))
    t, u, d = kernels.truncvar_dp(x, eps)
    return VariationTriple(float(t), float(u), float(d))


@lru_cache(maxsize=None)
def _consecutive_pairs(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Incidence of (i, j) as adjacent members, for every subset of range(n).

    Row ``m`` of the returned matrix marks the pairs that are consecutive in
    the subset encoded by the bits of ``m``.
    """
    pairs = list(itertools.combinations(range(n), 2))
    ii = np.array([a for a, _ in pairs], dtype=np.int64)
    jj = np.array([b for _, b in pairs], dtype=np.int64)
    masks = np.arange(1 << n, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(n)) & 1
    # prefix counts let us test "no member strictly between i and j"
    csum = np.concatenate([np.zeros((masks.size, 1), dtype=np.int64), np.cumsum(bits, axis=1)], axis=1)
    inc = np.zeros((masks.size, len(pairs)), dtype=np.float64)
    for k, (a, b) in enumerate(pairs):
        between = csum[:, b] - csum[:, a + 1]
        inc[:, k] = (bits[:, a] == 1) & (bits[:, b] == 1) & (between == 0)
    return inc, ii, jj


def variation_exhaustive(values, eps: float) -> VariationTriple:
    """Enumerate all ``2**n`` index subsets; only sensible for ``n <= 14``."""
    eps = check_eps(eps)
    x = np.asarray(values, dtype=np.float64)
    n = x.size
    if n > 16:
        raise ValueError("exhaustive enumeration is limited to n <= 16")
    if n < 2:
        return VariationTriple(0.0, 0.0, 0.0)
    inc, ii, jj = _consecutive_pairs(n)
    diff = x[jj] - x[ii]
    t = inc @ np.maximum(np.abs(diff) - eps, 0.0)
    u = inc @ np.maximum(diff - eps, 0.0)
    d = inc @ np.maximum(-diff - eps, 0.0)
    return VariationTriple(float(t.max()), float(u.max()), float(d.max()))


def total_variation(values) -> float:
    """Classical total variation of a value sequence (sum of |increments|)."""
    return float(kernels.kahan_sum(np.abs(np.diff(np.asarray(values, dtype=np.float64)))))


def bracketing_bounds(p: CadlagPath, eps: float, upto: float | None = None) -> tuple[float, float, float]:
    """Lower and upper bounds on ``eps * TTV(eps)`` from integer reciprocals.

    For ``0 < eps < 1`` with ``a = floor(1/eps)`` and ``b = ceil(1/eps)``::

        a/(a+1) * (1/a) * TTV(1/a)  <=  eps * TTV(eps)  <=  b/(b-1) * (1/b) * TTV(1/b)

    Returns ``(lower, value, upper)``.
    """
    eps = check_eps(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError("bracketing needs 0 < eps < 1")
    a = int(np.floor(1.0 / eps))
    b = int(np.ceil(1.0 / eps))
    value = eps * variation_triple(p, eps, upto).ttv
    lower = a / (a + 1) * (1.0 / a) * variation_triple(p, 1.0 / a, upto).ttv
    if b > 1:
        upper = b / (b - 1) * (1.0 / b) * variation_triple(p, 1.0 / b, upto).ttv
    else:
        upper = float("inf")
    return lower, value, upper
