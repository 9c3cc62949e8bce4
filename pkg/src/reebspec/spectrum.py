"""Reeb action spectra of ellipsoid boundaries.

On the boundary of ``E(a_1, ..., a_n)`` the Reeb flow rotates the i-th
coordinate plane with period ``a_i``, so ``spec_+`` is the set of lattice
sums ``sum k_i a_i`` with ``k_i >= 0``.  Enumeration is exact: all axes are
brought to a common denominator ``D`` and every action is carried as an
integer pair ``(P, Q)`` standing for ``(P + Q*sqrt(d)) / D``.
"""

from __future__ import annotations

import csv
import io
import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cmp_to_key
from typing import NamedTuple, Optional

from .exact import Exact, FieldMismatchError, as_exact, quad_sign

__all__ = [
    "EllipsoidParams", "SimplePeriods", "SpectrumWindow", "GapStatistics",
    "ScaledAxes", "simple_periods", "spec_plus", "lattice_count", "gap_statistics",
    "nullset_diagnostic", "default_threads", "window_to_json", "window_to_csv",
]

THREADS_ENV = "REEBSPEC_THREADS"


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None


@dataclass(frozen=True)
class EllipsoidParams:
    """Axes ``0 < a_1 <= ... <= a_n`` of ``E_a``, all in one field Q(sqrt(d)).

    Axes are sorted on construction; the ellipsoid does not depend on
    their order.
    """

    axes: tuple

    def __post_init__(self):
        axes = tuple(as_exact(x) for x in self.axes)
        if not axes:
            raise ValueError("an ellipsoid needs at least one axis")
        fields = {x.d for x in axes if x.d != 1}
        if len(fields) > 1:
            raise FieldMismatchError(
                "axes mix quadratic fields " + ", ".join(f"Q(sqrt({d}))" for d in sorted(fields)))
        for x in axes:
            if x <= 0:
                raise ValueError(f"axis {x} is not positive")
        object.__setattr__(self, "axes", tuple(sorted(axes)))

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def d(self) -> int:
        return max(x.d for x in self.axes)

    @property
    def degenerate(self) -> bool:
        """Some pair of axes is rationally dependent, so orbits come in families."""
        ax = self.axes
        return any((ax[j] / ax[i]).is_rational
                   for i in range(len(ax)) for j in range(i + 1, len(ax)))

    def scaled(self, s) -> "EllipsoidParams":
        s = as_exact(s)
        return EllipsoidParams(tuple(s * x for x in self.axes))

    def __str__(self):
        return "(" + ", ".join(str(x) for x in self.axes) + ")"

    def to_json(self) -> list:
        return [x.to_json() for x in self.axes]


class SimplePeriods(NamedTuple):
    periods: list
    degenerate: bool


def simple_periods(a: EllipsoidParams) -> SimplePeriods:
    """Periods of the simple orbits in the coordinate planes.

    The Reeb field ``sum (2*pi/a_i)(p_i d/dq_i - q_i d/dp_i)`` turns the
    i-th plane at angular speed ``2*pi/a_i``, hence period ``a_i``.
    """
    return SimplePeriods(list(a.axes), a.degenerate)


class ScaledAxes:
    """Axes as integer pairs over a common denominator, for fast exact walks."""

    def __init__(self, a: EllipsoidParams):
        self.d = a.d
        self.D = math.lcm(*(x.c for x in a.axes))
        self.P = [x.a * (self.D // x.c) for x in a.axes]
        self.Q = [x.b * (self.D // x.c) for x in a.axes]
        self.rational = all(q == 0 for q in self.Q)

    def exact(self, P: int, Q: int) -> Exact:
        return Exact.from_parts(P, Q, self.D, self.d)

    def bound(self, L: Exact):
        """Predicate ``(P, Q) -> action <= L``."""
        d = self.d
        if L.d != 1 and L.d != d:
            if not self.rational:
                raise FieldMismatchError(f"cutoff {L} and axes lie in different fields")
            d = L.d
        La, Lb, Lc = L.a * self.D, L.b * self.D, L.c
        if Lb == 0 and self.rational:
            return lambda P, Q: P * Lc <= La
        return lambda P, Q: quad_sign(P * Lc - La, Q * Lc - Lb, d) <= 0

    def sort_keys(self, keys) -> list:
        if self.rational:
            return sorted(keys)
        d = self.d

        def cmp(x, y):
            return quad_sign(x[0] - y[0], x[1] - y[1], d)

        return sorted(keys, key=cmp_to_key(cmp))


@dataclass(frozen=True)
class SpectrumWindow:
    """``spec_+`` up to ``cutoff`` as a sorted list of ``(action, multiplicity)``."""

    cutoff: Exact
    entries: tuple
    include_zero: bool = True
    degenerate: bool = False

    def actions(self) -> list:
        return [v for v, _ in self.entries]

    def __contains__(self, value) -> bool:
        value = as_exact(value)
        lo, hi = 0, len(self.entries)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.entries[mid][0] < value:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(self.entries) and self.entries[lo][0] == value

    def total_count(self) -> int:
        return sum(m for _, m in self.entries)

    def __len__(self):
        return len(self.entries)


def _walk(ax: ScaledAxes, within, i: int, P: int, Q: int, counter: Counter) -> None:
    n = len(ax.P)
    Pi, Qi = ax.P[i], ax.Q[i]
    if i == n - 1:
        while within(P, Q):
            counter[(P, Q)] += 1
            P += Pi
            Q += Qi
        return
    while within(P, Q):
        _walk(ax, within, i + 1, P, Q, counter)
        P += Pi
        Q += Qi


def _lattice_counter(a: EllipsoidParams, L: Exact, threads: Optional[int] = None) -> tuple:
    ax = ScaledAxes(a)
    within = ax.bound(L)
    threads = default_threads() if threads is None else threads
    starts = []
    P = Q = 0
    while within(P, Q):
        starts.append((P, Q))
        P += ax.P[0]
        Q += ax.Q[0]

    def shard(chunk):
        c: Counter = Counter()
        for P0, Q0 in chunk:
            if len(ax.P) == 1:
                c[(P0, Q0)] += 1
            else:
                _walk(ax, within, 1, P0, Q0, c)
        return c

    if threads <= 1 or len(starts) < 2:
        total = shard(starts)
    else:
        chunks = [starts[k::threads] for k in range(threads)]
        total = Counter()
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(shard, chunks):
                total.update(part)
    return ax, total


def spec_plus(a: EllipsoidParams, L, include_zero: bool = True,
              threads: Optional[int] = None) -> SpectrumWindow:
    """All ``sum k_i a_i <= L`` with the number of lattice points hitting each value."""
    L = as_exact(L)
    if L <= 0:
        raise ValueError(f"cutoff must be positive, got {L}")
    ax, counter = _lattice_counter(a, L, threads)
    keys = ax.sort_keys(counter.keys())
    entries = tuple((ax.exact(P, Q), counter[(P, Q)]) for P, Q in keys
                    if include_zero or (P, Q) != (0, 0))
    return SpectrumWindow(L, entries, include_zero, a.degenerate)


def lattice_count(a: EllipsoidParams, L) -> int:
    """``#{k in Z_{>=0}^n : sum k_i a_i <= L}`` without materializing actions."""
    L = as_exact(L)
    if L < 0:
        return 0
    ax = ScaledAxes(a)
    within = ax.bound(L)
    n = len(ax.P)
    if ax.rational and L.is_rational:
        # innermost coordinate counted in closed form
        LD = L * ax.D  # rational here
        bound_num, bound_den = LD.a, LD.c

        def rec(i, P):
            if i == n - 1:
                # largest k with (P + k*P_i) * den <= num
                return (bound_num - P * bound_den) // (ax.P[i] * bound_den) + 1
            total = 0
            while P * bound_den <= bound_num:
                total += rec(i + 1, P)
                P += ax.P[i]
            return total

        return rec(0, 0)

    def rec_q(i, P, Q):
        total = 0
        while within(P, Q):
            total += 1 if i == n - 1 else rec_q(i + 1, P, Q)
            P += ax.P[i]
            Q += ax.Q[i]
        return total

    return rec_q(0, 0, 0)


@dataclass(frozen=True)
class GapStatistics:
    min_gap: Exact
    gaps: list


def gap_statistics(w: SpectrumWindow) -> GapStatistics:
    acts = w.actions()
    if len(acts) < 2:
        raise ValueError("gap statistics need at least two distinct actions")
    gaps = sorted(y - x for x, y in zip(acts, acts[1:]))
    return GapStatistics(gaps[0], gaps)


def nullset_diagnostic(w: SpectrumWindow, eps) -> Exact:
    """Length of the union of ``(x - eps, x + eps)`` over window actions, clipped to ``[0, L]``."""
    eps = as_exact(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    L = w.cutoff
    zero = Exact(0)
    total = zero
    cur_lo = cur_hi = None
    for x, _ in w.entries:
        lo = max(x - eps, zero)
        hi = min(x + eps, L)
        if lo >= hi:
            continue
        if cur_hi is not None and lo <= cur_hi:
            cur_hi = max(cur_hi, hi)
            continue
        if cur_hi is not None:
            total = total + (cur_hi - cur_lo)
        cur_lo, cur_hi = lo, hi
    if cur_hi is not None:
        total = total + (cur_hi - cur_lo)
    return total


def window_to_json(a: EllipsoidParams, w: SpectrumWindow) -> dict:
    return {
        "axes": a.to_json(),
        "cutoff": w.cutoff.to_json(),
        "degenerate": w.degenerate,
        "entries": [{"action": v.to_json(), "multiplicity": m} for v, m in w.entries],
    }


def window_to_csv(w: SpectrumWindow, digits: int = 12) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["action_num", "action_quad_coeff", "d", "multiplicity"])
    for v, m in w.entries:
        writer.writerow([Exact(v.rational_part).decimal(digits),
                         Exact(v.sqrt_coeff).decimal(digits), v.d, m])
    return buf.getvalue()
