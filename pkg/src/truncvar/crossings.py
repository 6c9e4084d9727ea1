"""Band-crossing counts and their integrals over the level.

For a level ``y`` and band width ``eps`` a down-crossing of ``[y, y+eps]`` is
a visit strictly above ``y+eps`` followed by a visit strictly below ``y``;
an up-crossing is the reverse. Integrated over ``y``, the up / down / total
counts reproduce UTV / DTV / TTV exactly, which :func:`crossing_integral`
evaluates without quadrature: the counts are piecewise constant in ``y``
with breakpoints among ``{x_i} | {x_i - eps}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .path import CadlagPath, index_at

INF = math.inf


@dataclass(frozen=True)
class CrossingTrace:
    """Stopping indices of both crossing families at one level.

    ``down_sigmas[0]`` and ``up_sigmas[0]`` are the window start. Indices
    refer to the path's samples; a stopping time that never occurs is
    omitted (its value would be ``+inf``).
    """

    level: float
    eps: float
    down_sigmas: list = field(default_factory=list)
    down_taus: list = field(default_factory=list)
    up_sigmas: list = field(default_factory=list)
    up_taus: list = field(default_factory=list)

    @property
    def d(self) -> int:
        return len(self.down_sigmas) - 1

    @property
    def u(self) -> int:
        return len(self.up_sigmas) - 1

    @property
    def n(self) -> int:
        return self.d + self.u


def _window_indices(p: CadlagPath, window) -> tuple[int, int]:
    if window is None:
        return 0, len(p) - 1
    a, b = window
    if not a < b:
        raise ValueError(f"window must satisfy a < b, got {window!r}")
    if b > p.horizon:
        raise ValueError("window ends past the sampled horizon")
    return index_at(p, a), index_at(p, b)


def _alternate(x, start: int, first, second):
    """Alternating first-passage indices: tau_0, sigma_1, tau_1, sigma_2, ..."""
    taus, sigmas = [], []
    seeking_first = True
    for i in range(x.shape[0]):
        v = x[i]
        if seeking_first:
            if first(v):
                taus.append(start + i)
                seeking_first = False
        elif second(v):
            sigmas.append(start + i)
            seeking_first = True
    return taus, sigmas


def crossing_counts(p: CadlagPath, y: float, eps: float, window=None) -> CrossingTrace:
    """Full stopping-index trace at level ``y`` on ``window = (a, b)``.

    The window is read on the càdlàg extension: it starts with the sample
    in force at ``a`` and ends with the last sample at or before ``b``.
    """
    eps = float(eps)
    if not eps >= 0.0:
        raise ValueError(f"eps must be >= 0, got {eps!r}")
    i0, i1 = _window_indices(p, window)
    x = p.values[i0 : i1 + 1]
    y = float(y)
    hi = y + eps
    dt, ds = _alternate(x, i0, lambda v: v > hi, lambda v: v < y)
    ut, us = _alternate(x, i0, lambda v: v < y, lambda v: v > hi)
    return CrossingTrace(y, eps, [i0] + ds, dt, [i0] + us, ut)


def _breakpoint_levels(x: np.ndarray, eps: float):
    br = np.unique(np.concatenate((x, x - eps)))
    mids = 0.5 * (br[:-1] + br[1:])
    widths = np.diff(br)
    return mids, widths


def crossing_integrals(x, eps: float) -> tuple[float, float, float]:
    """``(int u dy, int d dy, int n dy)`` for a raw value array."""
    eps = float(eps)
    if not eps > 0.0:
        raise ValueError("crossing integrals need eps > 0")
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.size < 2:
        return 0.0, 0.0, 0.0
    mids, widths = _breakpoint_levels(x, eps)
    ups, downs = kernels.crossing_counts_levels(x, mids, eps)
    up = float(kernels.kahan_sum(ups * widths))
    down = float(kernels.kahan_sum(downs * widths))
    return up, down, float(kernels.kahan_sum((ups + downs) * widths))


def crossing_integral(p: CadlagPath, eps: float, which: str = "total", window=None) -> float:
    """Exact integral over all levels of the up, down or total crossing count."""
    i0, i1 = _window_indices(p, window)
    up, down, total = crossing_integrals(p.values[i0 : i1 + 1], eps)
    try:
        return {"up": up, "down": down, "total": total}[which]
    except KeyError:
        raise ValueError(f"which must be 'up', 'down' or 'total', got {which!r}") from None


def normalized_crossing_curve(p: CadlagPath, eps_list, grid) -> dict:
    """``eps * int (u, d, n) dy`` over ``[0, t]`` for every eps and grid time.

    Returns ``{eps: (up, down, total)}`` with one array per component. Cost
    is quadratic in the window length per grid point.
    """
    g = np.asarray(grid, dtype=np.float64)
    out = {}
    for eps in eps_list:
        eps = float(eps)
        curves = np.zeros((3, g.size))
        for k, t in enumerate(g):
            x = p.values[: index_at(p, t) + 1]
            curves[:, k] = crossing_integrals(x, eps)
        out[eps] = (eps * curves[0], eps * curves[1], eps * curves[2])
    return out
