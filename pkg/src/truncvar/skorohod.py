"""Finite-variation envelopes of a sampled path.

:func:`backlash` is the play operator: the follower ``y`` stays put while
``x - y`` sits inside ``[-h, h]`` and is dragged along by the band edge
otherwise. Equivalently ``x - y`` is the two-sided Skorohod reflection of
``x - x[0]`` on ``[-h, h]``. :func:`jordan_envelope` builds the other
approximant, ``x[0] + UTV - DTV``, directly from running truncated
variations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .path import CadlagPath, index_at, make_path
from .variation import check_eps, prefix_variation, total_variation, variation_triple

CARRIER_TOL = 1e-12


class ForeignEnvelopeWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class EnvelopePath:
    """A path together with a finite-variation follower on the same grid.

    ``jump_domination`` is the constant ``K`` with ``|dy| <= K |dx|`` at
    every sample; it is 1 for the play operator. ``from_backlash`` records
    whether the carrier identities are guaranteed.
    """

    base: CadlagPath
    env: CadlagPath
    halfwidth: float
    jump_domination: float = 1.0
    from_backlash: bool = True
    remainder: np.ndarray | None = None

    def gap(self) -> np.ndarray:
        """``x - y`` at each sample."""
        return self.base.values - self.env.values


def backlash(p: CadlagPath, halfwidth: float) -> EnvelopePath:
    """Play-operator envelope with ``y[0] = x[0]``.

    ``y[i] = max(x[i] - h, min(x[i] + h, y[i-1]))``. Whenever ``y`` rises the
    gap ``x - y`` equals ``+h``; whenever it falls the gap equals ``-h``.
    """
    h = float(halfwidth)
    if not h > 0.0:
        raise ValueError(f"halfwidth must be > 0, got {halfwidth!r}")
    y = kernels.backlash(p.values, h)
    return EnvelopePath(p, make_path(p.times, y, jump_mask=p.jump_mask), h)


def identity_family(p: CadlagPath, eps: float = 0.0) -> EnvelopePath:
    """The trivial family ``x^eps = x``, admissible for finite-variation paths."""
    return EnvelopePath(p, p, float(eps), jump_domination=1.0, from_backlash=False)


def envelope_energy(e: EnvelopePath, upto: float | None = None) -> float:
    """``sum (x_i - y_i) * (y_i - y_{i-1})`` over ``0 < t_i <= upto``.

    The integrand is taken at ``t_i`` (after the jump). For a play-operator
    envelope this equals ``halfwidth * TV(y)``. Any other follower triggers
    :class:`ForeignEnvelopeWarning` since the identity is then not guaranteed.
    """
    if not e.from_backlash:
        warnings.warn("envelope not built by backlash; energy identity not guaranteed",
                      ForeignEnvelopeWarning, stacklevel=2)
    k = len(e.base) if upto is None else index_at(e.base, upto) + 1
    x = e.base.values[:k]
    y = e.env.values[:k]
    return float(kernels.kahan_sum((x[1:] - y[1:]) * np.diff(y)))


def energy_curve(e: EnvelopePath) -> np.ndarray:
    """Running :func:`envelope_energy` at every sample (0 at the first)."""
    x = e.base.values
    y = e.env.values
    terms = np.concatenate(([0.0], (x[1:] - y[1:]) * np.diff(y)))
    return kernels.kahan_cumsum(terms)


def carrier_violations(e: EnvelopePath, tol: float = CARRIER_TOL) -> int:
    """Number of samples where the follower moved with the gap off the band edge.

    A rise must happen with ``x - y = +h`` and a fall with ``x - y = -h``;
    ``tol`` is relative to ``max(1, |x|)``.
    """
    dy = np.diff(e.env.values)
    g = e.gap()[1:]
    scale = tol * np.maximum(1.0, np.abs(e.base.values[1:]))
    bad_up = (dy > 0) & (np.abs(g - e.halfwidth) > scale)
    bad_dn = (dy < 0) & (np.abs(g + e.halfwidth) > scale)
    return int(np.count_nonzero(bad_up | bad_dn))


def sandwich_check(p: CadlagPath, halfwidth: float, upto: float | None = None) -> tuple[float, float, float]:
    """``(TTV(x, 2h), TV(y), TTV(x, 2h) + 2h)`` for the play envelope ``y``.

    Raises AssertionError if the middle value leaves the bracket by more
    than accumulated rounding.
    """
    h = float(halfwidth)
    e = backlash(p, h)
    k = len(p) if upto is None else index_at(p, upto) + 1
    lower = variation_triple(p, 2.0 * h, upto).ttv
    mid = total_variation(e.env.values[:k])
    upper = lower + 2.0 * h
    slack = 1e-12 * k * max(1.0, mid)
    if not (lower - slack <= mid <= upper + slack):
        raise AssertionError(f"sandwich violated: {lower} <= {mid} <= {upper}")
    return lower, mid, upper


def jordan_envelope(p: CadlagPath, eps: float, grid=None) -> EnvelopePath:
    """``x[0] + UTV(x, [0, t]) - DTV(x, [0, t])`` with its remainder ``R = env - x``.

    With ``grid=None`` the envelope lives on the sample grid; otherwise both
    the base path and envelope are evaluated on ``grid``.
    """
    eps = check_eps(eps)
    if not eps > 0.0:
        raise ValueError("jordan_envelope needs eps > 0")
    _, utv, dtv = prefix_variation(p.values, eps)
    env = p.values[0] + utv - dtv
    if grid is None:
        times, base, env_v = p.times, p.values, env
    else:
        g = np.asarray(grid, dtype=np.float64)
        idx = np.searchsorted(p.times, g, side="right") - 1
        if np.any(idx < 0):
            raise ValueError("grid starts before the first sample")
        times, base, env_v = g, p.values[idx], env[idx]
    # grid need not start at 0, so skip make_path's origin check here
    base_path = p if grid is None else CadlagPath(times, base)
    return EnvelopePath(
        base_path,
        CadlagPath(times, env_v),
        eps,
        jump_domination=float("nan"),
        from_backlash=False,
        remainder=env_v - base,
    )
