"""Lebesgue-Stieltjes sums against piecewise-constant integrators.

For a piecewise-constant integrator ``h`` the measure ``dh`` is a sum of
point masses at the sample times, so the integral of any integrand is a
finite sum. Two evaluation rules are kept apart on purpose:

* :func:`ls_integral_left` uses the left limit ``g(t_i-) = g_{i-1}``;
* :func:`ls_integral_cadlag` uses the post-jump value ``g(t_i) = g_i``.

Both integrate over ``(0, t]``: no mass sits at time 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .path import CadlagPath, PathError, index_at, jumps


@dataclass(frozen=True)
class IntegrandFunction:
    """A C^1 integrand with its derivative and an antiderivative."""

    f: Callable[[np.ndarray], np.ndarray]
    fprime: Callable[[np.ndarray], np.ndarray]
    F: Callable[[np.ndarray], np.ndarray]
    label: str = ""


def constant(c: float) -> IntegrandFunction:
    c = float(c)
    return IntegrandFunction(
        lambda x: np.full_like(np.asarray(x, dtype=float), c),
        lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        lambda x: c * np.asarray(x, dtype=float),
        f"const({c:g})",
    )


def monomial(k: int) -> IntegrandFunction:
    """``f(x) = x**k`` for ``k >= 0``."""
    k = int(k)
    if k < 0:
        raise ValueError("monomial degree must be >= 0")
    if k == 0:
        return constant(1.0)
    return IntegrandFunction(
        lambda x: np.asarray(x, dtype=float) ** k,
        lambda x: k * np.asarray(x, dtype=float) ** (k - 1),
        lambda x: np.asarray(x, dtype=float) ** (k + 1) / (k + 1),
        f"x^{k}",
    )


PRESETS = {
    "cos": IntegrandFunction(np.cos, lambda x: -np.sin(x), np.sin, "cos"),
    "sin": IntegrandFunction(np.sin, np.cos, lambda x: -np.cos(x), "sin"),
    "exp": IntegrandFunction(np.exp, np.exp, np.exp, "exp"),
    "x": monomial(1),
    "x2": monomial(2),
    "x3": monomial(3),
    "one": constant(1.0),
}


def preset(name: str) -> IntegrandFunction:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown integrand {name!r}; choose from {sorted(PRESETS)}") from None


def _as_values(g, h: CadlagPath) -> np.ndarray:
    if isinstance(g, CadlagPath):
        if g.times.shape != h.times.shape or not np.array_equal(g.times, h.times):
            raise PathError("integrand and integrator live on different grids")
        return g.values
    g = np.asarray(g, dtype=np.float64)
    if g.shape != h.values.shape:
        raise PathError(f"integrand has {g.size} samples, integrator has {len(h)}")
    return g


def _stop(h: CadlagPath, upto) -> int:
    return len(h) if upto is None else index_at(h, upto) + 1


def ls_integral_left(g, h: CadlagPath, upto: float | None = None) -> float:
    """``sum_{0 < t_i <= t} g_{i-1} (h_i - h_{i-1})``."""
    gv = _as_values(g, h)
    k = _stop(h, upto)
    return float(kernels.kahan_sum(gv[: k - 1] * np.diff(h.values[:k])))


def ls_integral_cadlag(g, h: CadlagPath, upto: float | None = None) -> float:
    """``sum_{0 < t_i <= t} g_i (h_i - h_{i-1})``."""
    gv = _as_values(g, h)
    k = _stop(h, upto)
    return float(kernels.kahan_sum(gv[1:k] * np.diff(h.values[:k])))


def ls_curve_left(g, h: CadlagPath) -> np.ndarray:
    """Running :func:`ls_integral_left` at every sample time."""
    gv = _as_values(g, h)
    terms = np.concatenate(([0.0], gv[:-1] * np.diff(h.values)))
    return kernels.kahan_cumsum(terms)


def jump_compensator(p: CadlagPath, fn: IntegrandFunction, upto: float | None = None) -> float:
    """``sum over jumps s <= t of F(x_s) - F(x_s-) - f(x_s-) * dx_s``.

    Only increments reported by :func:`truncvar.path.jumps` count, so a
    simulated diffusion (whose steps are not flagged as jumps) contributes 0.
    """
    t = p.horizon if upto is None else upto
    jl = jumps(p, t)
    if len(jl) == 0:
        return 0.0
    idx = np.searchsorted(p.times, jl.times)
    after = p.values[idx]
    before = p.values[idx - 1]
    terms = fn.F(after) - fn.F(before) - fn.f(before) * (after - before)
    return float(kernels.kahan_sum(np.asarray(terms, dtype=np.float64)))


def integration_by_parts_check(x: CadlagPath, h: CadlagPath, upto: float | None = None) -> float:
    """Residual of ``x_t h_t - x_0 h_0 = int x_- dh + int h_- dx + sum dx dh``."""
    if x.times.shape != h.times.shape or not np.array_equal(x.times, h.times):
        raise PathError("paths live on different grids")
    k = _stop(h, upto)
    xv = x.values[:k]
    hv = h.values[:k]
    lhs = xv[-1] * hv[-1] - xv[0] * hv[0]
    dx = np.diff(xv)
    dh = np.diff(hv)
    rhs = kernels.kahan_sum(xv[:-1] * dh) + kernels.kahan_sum(hv[:-1] * dx) + kernels.kahan_sum(dx * dh)
    return float(lhs - rhs)
