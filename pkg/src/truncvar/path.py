"""Finitely sampled càdlàg paths.

A path is two parallel float64 arrays. Between samples it is read as the
piecewise-constant, right-continuous extension, so every supremum over
partitions of the continuum is attained at sample times and all downstream
quantities are exact for the sampled path.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class PathError(ValueError):
    """Raised when path data violate the sampling invariants."""


@dataclass(frozen=True, eq=False)
class CadlagPath:
    """Validated sampled path.

    Parameters
    ----------
    times : ndarray
        Strictly increasing, non-negative sample times starting at 0.
    values : ndarray
        Finite sample values, same length as ``times``.
    jump_mask : ndarray of bool, optional
        Marks which increments are genuine jumps of the underlying process.
        ``None`` (the default) means the literal piecewise-constant reading:
        every nonzero increment is a jump. Simulators of continuous
        processes set this so that diffusive steps are not reported as
        jumps.
    """

    times: np.ndarray
    values: np.ndarray
    jump_mask: Optional[np.ndarray] = field(default=None)

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def with_values(self, values, jump_mask=None) -> "CadlagPath":
        """Same grid, new values (used for sums, differences, envelopes)."""
        return make_path(self.times, values, jump_mask=jump_mask)

    def prefix(self, upto: float) -> "CadlagPath":
        """Restriction to samples with time <= ``upto``."""
        k = index_at(self, upto) + 1
        mask = None if self.jump_mask is None else self.jump_mask[:k]
        return CadlagPath(self.times[:k], self.values[:k], mask)


def make_path(times: Sequence[float], values: Sequence[float], jump_mask=None) -> CadlagPath:
    """Validate and freeze a sampled path.

    Raises
    ------
    PathError
        On empty input, length mismatch, non-finite entries, a first time
        other than 0, or times that are not strictly increasing. The message
        names the first offending index.
    """
    t = np.array(times, dtype=np.float64)
    x = np.array(values, dtype=np.float64)
    if t.ndim != 1 or x.ndim != 1:
        raise PathError("times and values must be one-dimensional")
    if t.size == 0:
        raise PathError("empty path")
    if t.size != x.size:
        raise PathError(f"length mismatch: {t.size} times vs {x.size} values")
    bad = np.flatnonzero(~np.isfinite(t))
    if bad.size:
        raise PathError(f"non-finite time at index {bad[0]}")
    bad = np.flatnonzero(~np.isfinite(x))
    if bad.size:
        raise PathError(f"non-finite value at index {bad[0]}")
    if t[0] != 0.0:
        raise PathError(f"first time must be 0, got {t[0]!r} at index 0")
    bad = np.flatnonzero(np.diff(t) <= 0.0)
    if bad.size:
        raise PathError(f"times not strictly increasing at index {bad[0] + 1}")
    mask = None
    if jump_mask is not None:
        mask = np.array(jump_mask, dtype=bool)
        if mask.shape != x.shape:
            raise PathError("jump_mask must have one entry per sample")
        mask[0] = False
        mask.flags.writeable = False
    t.flags.writeable = False
    x.flags.writeable = False
    return CadlagPath(t, x, mask)


def index_at(p: CadlagPath, t: float) -> int:
    """Index of the last sample at or before ``t``."""
    if not t >= p.times[0]:
        raise PathError(f"time {t!r} precedes the first sample")
    return int(np.searchsorted(p.times, t, side="right")) - 1


def value_at(p: CadlagPath, t: float) -> float:
    """Right-continuous evaluation: the value of the last sample at or before ``t``."""
    return float(p.values[index_at(p, t)])


def left_limit_at(p: CadlagPath, t: float, zero_before_start: bool = False) -> float:
    """Left limit ``x(t-)``: the value of the last sample strictly before ``t``.

    At ``t = 0`` there is no earlier sample; with ``zero_before_start`` the
    convention ``x(0-) = 0`` is used, otherwise this is an error.
    """
    if t < 0:
        raise PathError(f"time {t!r} is negative")
    k = int(np.searchsorted(p.times, t, side="left")) - 1
    if k < 0:
        if zero_before_start:
            return 0.0
        raise PathError("left limit at the first sample needs zero_before_start=True")
    return float(p.values[k])


def values_on_grid(p: CadlagPath, grid) -> np.ndarray:
    g = np.asarray(grid, dtype=np.float64)
    if g.size and g.min() < p.times[0]:
        raise PathError("grid starts before the first sample")
    return p.values[np.searchsorted(p.times, g, side="right") - 1]


@dataclass(frozen=True)
class JumpList:
    """Nonzero jumps ``(time, size)`` with their aggregate sums."""

    times: np.ndarray
    sizes: np.ndarray

    @property
    def sum_squares(self) -> float:
        return float(np.sum(self.sizes**2))

    @property
    def sum_abs(self) -> float:
        return float(np.sum(np.abs(self.sizes)))

    def __len__(self) -> int:
        return self.sizes.shape[0]

    def as_pairs(self) -> list:
        return list(zip(self.times.tolist(), self.sizes.tolist()))


def jumps(p: CadlagPath, t: float, include_origin: bool = False) -> JumpList:
    """Jumps on ``(0, t]``.

    With ``include_origin`` the jump at time 0 under ``x(0-) = 0`` is
    prepended when ``x(0) != 0``.
    """
    if t < 0:
        raise PathError(f"time {t!r} is negative")
    k = index_at(p, t)
    d = np.diff(p.values[: k + 1])
    keep = d != 0.0
    if p.jump_mask is not None:
        keep &= p.jump_mask[1 : k + 1]
    times = p.times[1 : k + 1][keep]
    sizes = d[keep]
    if include_origin and p.values[0] != 0.0:
        times = np.concatenate(([p.times[0]], times))
        sizes = np.concatenate(([p.values[0]], sizes))
    return JumpList(times, sizes)


def union_grid(p: CadlagPath, q: CadlagPath) -> tuple[CadlagPath, CadlagPath]:
    """Resample both paths onto the sorted union of their sample times."""
    grid = np.union1d(p.times, q.times)
    return (
        make_path(grid, values_on_grid(p, grid)),
        make_path(grid, values_on_grid(q, grid)),
    )


def same_grid(p: CadlagPath, q: CadlagPath) -> bool:
    return p.times.shape == q.times.shape and bool(np.array_equal(p.times, q.times))


def sup_distance(p: CadlagPath, q: CadlagPath, resample: bool = False) -> float:
    """``max |p - q|`` over the sample grid.

    Paths on different grids raise unless ``resample`` is set, in which case
    both are evaluated on the union grid (exact for piecewise-constant paths).
    """
    if not same_grid(p, q):
        if not resample:
            raise PathError("paths are sampled on different grids; pass resample=True")
        p, q = union_grid(p, q)
    return float(np.max(np.abs(p.values - q.values)))


def read_csv(path) -> CadlagPath:
    """Read a ``t,x`` CSV file. Unsorted or duplicated times are rejected.

    An optional third column ``jump`` (0/1) restores the jump mask written
    by :func:`write_path_csv`; without it every nonzero increment is a jump.
    """
    times, values, flags = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        names = [h.strip() for h in header] if header else []
        if names[:2] != ["t", "x"]:
            raise PathError(f"{path}: expected header 't,x'")
        has_mask = len(names) > 2 and names[2] == "jump"
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            try:
                times.append(float(row[0]))
                values.append(float(row[1]))
                if has_mask:
                    flags.append(float(row[2]) != 0.0)
            except (ValueError, IndexError) as exc:
                raise PathError(f"{path}:{lineno}: cannot parse row {row!r}") from exc
    return make_path(times, values, jump_mask=np.asarray(flags, bool) if has_mask else None)


def write_path_csv(path, p: CadlagPath) -> None:
    """Write ``t,x`` (plus ``jump`` when the path carries a jump mask)."""
    cols = {"t": p.times, "x": p.values}
    if p.jump_mask is not None:
        cols["jump"] = p.jump_mask.astype(np.float64)
    write_csv(path, cols)


def write_csv(path, columns: dict) -> None:
    """Write equal-length numeric columns with a header row.

    Floats use their shortest round-trip representation. ``path`` may be a
    filename or an open text stream.
    """
    names = list(columns)
    data = np.column_stack([np.asarray(columns[k], dtype=np.float64) for k in names])
    body = "".join(",".join(map(repr, row)) + "\n" for row in data.tolist())
    text = ",".join(names) + "\n" + body
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
