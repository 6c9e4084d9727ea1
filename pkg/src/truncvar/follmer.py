"""Pathwise bracket and integrals built from finite-variation approximants.

A *family* maps ``(path, eps)`` to an :class:`~truncvar.skorohod.EnvelopePath`
whose follower ``y`` stays within ``eps`` of the path. The default is the play
operator (:func:`truncvar.skorohod.backlash`); :func:`truncvar.skorohod.identity_family`
(``y = x``) is the natural choice for paths of finite variation.

At a fixed ``eps`` everything here is a finite Lebesgue-Stieltjes sum:

* bracket ``<x>^eps_t = 2 * sum (x_i - y_i)(y_i - y_{i-1})``;
* ``integral_X``       ``= sum f(x_{i-1}) dy_i``;
* ``integral_Xprime``  ``= f(y_t) x_t - f(y_0) x_0 - sum x_{i-1} d f(y)_i - sum dx_i d f(y)_i``;
* ``integral_Xsecond`` ``= sum f(y_{i-1}) dy_i``.

The limits ``eps -> 0`` are assessed by sweeping an eps ladder, never claimed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .path import CadlagPath, PathError, index_at, jumps, make_path, same_grid
from .skorohod import EnvelopePath, backlash, energy_curve
from .stieltjes import IntegrandFunction, jump_compensator, ls_integral_left
from .variation import prefix_variation

Family = Callable[[CadlagPath, float], EnvelopePath]

FLOOR_FACTOR = 5.0


class EpsFloorWarning(UserWarning):
    """eps is too small for the sampling resolution of the path."""


def eps_floor(p: CadlagPath) -> float:
    """Smallest recommended eps: ``5 * median |increment|``."""
    d = np.abs(np.diff(p.values))
    d = d[d > 0]
    return FLOOR_FACTOR * float(np.median(d)) if d.size else 0.0


@dataclass
class QuadraticVariationCurve:
    """Bracket curve on a grid, plus per-eps curves and convergence diagnostics."""

    grid: np.ndarray
    values: np.ndarray
    eps: float | str
    curves: dict = field(default_factory=dict)
    cauchy: list = field(default_factory=list)
    crosscheck: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def final(self) -> float:
        return float(self.values[-1])


def _grid_index(p: CadlagPath, grid) -> tuple[np.ndarray, np.ndarray]:
    g = p.times if grid is None else np.asarray(grid, dtype=np.float64)
    if g.size > 1 and np.any(np.diff(g) < 0):
        raise ValueError("grid must be sorted in increasing order")
    if g.size and (g[0] < 0 or g[-1] > p.horizon):
        raise PathError("grid leaves the sampled horizon")
    return g, np.searchsorted(p.times, g, side="right") - 1


def bracket_samples(e: EnvelopePath) -> np.ndarray:
    """Fixed-eps bracket ``<x>^eps`` at every sample time."""
    return 2.0 * energy_curve(e)


def qv_bracket(p: CadlagPath, eps_list, grid=None, family: Family = backlash) -> QuadraticVariationCurve:
    """Bracket curves ``2 * int (x - y) dy`` along a decreasing eps ladder.

    The headline curve is the one for the smallest eps. Diagnostics:

    ``cauchy``
        ``sup_t |curve_k - curve_{k+1}|`` between consecutive ladder rungs.
    ``crosscheck``
        per eps, ``max_t |<x>^eps_t - 2 eps TTV(x, [0,t], 2 eps)|``, which the
        play operator keeps within ``4 eps**2``.
    """
    eps_arr = np.asarray([float(e) for e in eps_list])
    if eps_arr.size == 0:
        raise ValueError("eps_list is empty")
    if np.any(eps_arr <= 0):
        raise ValueError("eps values must be > 0")
    if np.any(np.diff(eps_arr) >= 0):
        raise ValueError("eps_list must be strictly decreasing")
    g, idx = _grid_index(p, grid)
    floor = eps_floor(p)
    out = QuadraticVariationCurve(g, np.zeros(g.size), float(eps_arr[-1]))
    prev = None
    for eps in eps_arr:
        if eps < floor:
            msg = f"eps={eps:g} is below the sampling floor {floor:.3g}"
            out.warnings.append(msg)
            warnings.warn(msg, EpsFloorWarning, stacklevel=2)
        e = family(p, float(eps))
        full = bracket_samples(e)
        curve = full[idx]
        out.curves[float(eps)] = curve
        if family is backlash:
            ttv2, _, _ = prefix_variation(p.values, 2.0 * eps)
            dev = float(np.max(np.abs(full - 2.0 * eps * ttv2)))
            out.crosscheck[float(eps)] = {"max_dev": dev, "bound": 4.0 * eps**2, "ok": dev <= 4.0 * eps**2 * (1 + 1e-9) + 1e-12}
        if prev is not None:
            out.cauchy.append(float(np.max(np.abs(curve - prev))))
        prev = curve
    out.values = prev
    return out


def richardson(curves: dict) -> np.ndarray:
    """First-order Richardson extrapolation from the two smallest eps (labelled, not ground truth)."""
    keys = sorted(curves)
    if len(keys) < 2:
        raise ValueError("need at least two eps levels")
    e1, e2 = keys[0], keys[1]
    c1, c2 = curves[e1], curves[e2]
    return c1 + (c1 - c2) * e1 / (e2 - e1)


def _envelope(p: CadlagPath, eps: float, family: Family) -> EnvelopePath:
    e = family(p, float(eps))
    if not same_grid(e.env, p):
        raise PathError("family returned an envelope on a different grid")
    return e


def integral_X(p: CadlagPath, fn: IntegrandFunction, eps: float, upto: float | None = None,
               family: Family = backlash) -> float:
    """``int_{0+}^t f(x_{s-}) dy_s`` at fixed eps."""
    e = _envelope(p, eps, family)
    return ls_integral_left(fn.f(p.values), e.env, upto)


def _xprime(p: CadlagPath, y: np.ndarray, fn: IntegrandFunction, k: int) -> float:
    x = p.values[:k]
    fy = np.asarray(fn.f(y[:k]), dtype=np.float64)
    fy_path = make_path(p.times[:k], fy)
    dx = np.diff(x)
    dfy = np.diff(fy)
    return float(fy[-1] * x[-1] - fy[0] * x[0] - ls_integral_left(x, fy_path) - np.sum(dx * dfy))


def integral_Xprime(p: CadlagPath, fn: IntegrandFunction, eps: float, upto: float | None = None,
                    family: Family = backlash) -> float:
    """``int_{0+}^t f(y_{s-}) dx_s`` defined through integration by parts.

    Every sample increment of the piecewise-constant path is a jump, so the
    correction sum runs over all of them.
    """
    e = _envelope(p, eps, family)
    k = len(p) if upto is None else index_at(p, upto) + 1
    return _xprime(p, e.env.values, fn, k)


def integral_Xsecond(p: CadlagPath, fn: IntegrandFunction, eps: float, upto: float | None = None,
                     family: Family = backlash) -> float:
    """``int_{0+}^t f(y_{s-}) dy_s`` at fixed eps."""
    e = _envelope(p, eps, family)
    return ls_integral_left(fn.f(e.env.values), e.env, upto)


@dataclass(frozen=True)
class IntegralReport:
    eps: float
    t: float
    I_X: float
    I_Xprime: float
    I_Xsecond: float
    bracket_term: float
    jump_term: float
    F_increment: float
    residual_thm2: float
    residual_prop1: float
    residual_relation: float
    gap_second_prime: float
    gap_x_second: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def identity_report(p: CadlagPath, fn: IntegrandFunction, eps: float, upto: float | None = None,
                    family: Family = backlash) -> IntegralReport:
    """All three integrals at one eps, with the change-of-variable residuals.

    ``residual_thm2 = F(x_t) - F(x_0) - (I_X - B + J)``,
    ``residual_prop1 = F(x_t) - F(x_0) - (I_Xprime + B + J)``,
    ``residual_relation = I_Xprime - (I_X - 2B)``, where
    ``B = 1/2 int f'(x_{s-}) d<x>^eps_s`` and ``J`` is the jump compensator.
    The two midpoint gaps are ``I_Xsecond - I_Xprime - B`` and
    ``I_X - I_Xsecond - B``.
    """
    e = _envelope(p, eps, family)
    k = len(p) if upto is None else index_at(p, upto) + 1
    t = float(p.times[k - 1])
    x = p.values
    y = e.env.values
    br = make_path(p.times, bracket_samples(e))
    B = 0.5 * ls_integral_left(fn.fprime(x), br, t)
    J = jump_compensator(p, fn, t)
    i_x = ls_integral_left(fn.f(x), e.env, t)
    i_xp = _xprime(p, y, fn, k)
    i_xs = ls_integral_left(fn.f(y), e.env, t)
    dF = float(fn.F(x[k - 1]) - fn.F(x[0]))
    return IntegralReport(
        eps=float(eps),
        t=t,
        I_X=i_x,
        I_Xprime=i_xp,
        I_Xsecond=i_xs,
        bracket_term=B,
        jump_term=J,
        F_increment=dF,
        residual_thm2=dF - (i_x - B + J),
        residual_prop1=dF - (i_xp + B + J),
        residual_relation=i_xp - (i_x - 2.0 * B),
        gap_second_prime=i_xs - i_xp - B,
        gap_x_second=i_x - i_xs - B,
    )


def covariation(px: CadlagPath, py: CadlagPath, eps: float, grid=None) -> QuadraticVariationCurve:
    """Polarized estimate ``eps * (TTV(x+y) - TTV(x-y)) / 4`` on ``[0, t]``."""
    if not same_grid(px, py):
        raise PathError("covariation needs both paths on the same grid")
    eps = float(eps)
    if not eps > 0:
        raise ValueError("eps must be > 0")
    g, idx = _grid_index(px, grid)
    s, _, _ = prefix_variation(px.values + py.values, eps)
    d, _, _ = prefix_variation(px.values - py.values, eps)
    vals = eps * (s[idx] - d[idx]) / 4.0
    return QuadraticVariationCurve(g, vals, eps, curves={eps: vals})


def realized_jump_square_sum(p: CadlagPath, upto: float | None = None) -> float:
    """``sum (dx_s)^2`` over the jumps in ``(0, t]``."""
    return jumps(p, p.horizon if upto is None else upto).sum_squares
