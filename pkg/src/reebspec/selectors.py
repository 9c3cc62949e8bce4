"""Lattice capacity families on ellipsoids and checks of the selector axioms.

The k-th capacity of ``E_a`` is the k-th smallest (0-indexed, with
multiplicity) element of ``{sum m_i a_i : m in Z_{>=0}^n}``.  Capacities
are produced by a best-first heap walk over the lattice, which never
consults a cutoff, so comparing them with :func:`spec_plus` windows is a
genuine cross-check of two enumeration routes.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .exact import Exact, as_exact, quad_sign
from .spectrum import EllipsoidParams, ScaledAxes, spec_plus

__all__ = [
    "ECH_LATTICE", "CH_LATTICE", "SelectorFamily", "CapacityTable", "Verdict",
    "capacity", "capacities", "verify_spectrality", "verify_conformality",
    "verify_monotonicity", "continuity_sandwich", "locality_check",
    "random_rational_ellipsoid", "run_axiom_trials", "AXIOMS",
]

ECH_LATTICE = "ech"
CH_LATTICE = "ch"


class _QKey:
    __slots__ = ("P", "Q", "d")

    def __init__(self, P, Q, d):
        self.P, self.Q, self.d = P, Q, d

    def __lt__(self, other):
        return quad_sign(self.P - other.P, self.Q - other.Q, self.d) < 0

    def __eq__(self, other):
        return self.P == other.P and self.Q == other.Q


def _lattice_prefix(a: EllipsoidParams, K: int) -> list:
    """The K+1 smallest lattice actions as ``(P, Q)`` pairs over ``ScaledAxes(a).D``."""
    ax = ScaledAxes(a)
    n = len(ax.P)
    d = ax.d
    out = []
    # (key, seq, P, Q, first admissible coordinate): each lattice point is
    # reached once, by raising coordinates in nondecreasing index order
    if ax.rational:
        heap = [(0, 0, 0, 0, 0)]
    else:
        heap = [(_QKey(0, 0, d), 0, 0, 0, 0)]
    seq = 1
    while len(out) <= K:
        _, _, P, Q, t = heapq.heappop(heap)
        out.append((P, Q))
        for i in range(t, n):
            nP, nQ = P + ax.P[i], Q + ax.Q[i]
            key = nP if ax.rational else _QKey(nP, nQ, d)
            heapq.heappush(heap, (key, seq, nP, nQ, i))
            seq += 1
    return [ax.exact(P, Q) for P, Q in out]


@lru_cache(maxsize=256)
def _cached_prefix(a: EllipsoidParams, K: int) -> tuple:
    return tuple(_lattice_prefix(a, K))


@dataclass(frozen=True)
class CapacityTable:
    params: EllipsoidParams
    values: tuple

    @property
    def K(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, k):
        return self.values[k]


@dataclass(frozen=True)
class SelectorFamily:
    """An indexed capacity family ``c_0 = 0 <= c_1 <= ...`` with shift weights.

    ``shift_weight(j)`` is the level of the j-th shift, by default the j-th
    capacity of the round sphere ``(1, ..., 1)`` in the family's dimension.
    Pass ``weights`` to override (index 0 is ignored).
    """

    kind: str = ECH_LATTICE
    weights: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in (ECH_LATTICE, CH_LATTICE):
            raise ValueError(f"unknown selector kind {self.kind!r}")
        if self.weights is not None:
            w = tuple(as_exact(x) for x in self.weights)
            if any(x <= 0 for x in w[1:]) or any(y < x for x, y in zip(w[1:], w[2:])):
                raise ValueError("shift weights must be positive and nondecreasing")
            object.__setattr__(self, "weights", w)

    def check_params(self, a: EllipsoidParams) -> None:
        if self.kind == ECH_LATTICE and a.n != 2:
            raise ValueError(f"the ECH lattice selector needs n = 2, got n = {a.n}")

    def capacities(self, a: EllipsoidParams, K: int) -> CapacityTable:
        self.check_params(a)
        if K < 0:
            raise ValueError("K must be nonnegative")
        return CapacityTable(a, _cached_prefix(a, K))

    def shift_weights(self, n: int, J: int) -> list:
        """``[|alpha_1|, ..., |alpha_J|]``."""
        if self.weights is not None:
            if len(self.weights) <= J:
                raise ValueError(f"only {len(self.weights) - 1} shift weights configured")
            return list(self.weights[1:J + 1])
        sphere = EllipsoidParams((1,) * n)
        return list(_cached_prefix(sphere, J)[1:])


def capacity(f: SelectorFamily, a: EllipsoidParams, k: int) -> Exact:
    return f.capacities(a, k)[k]


def capacities(f: SelectorFamily, a: EllipsoidParams, K: int) -> CapacityTable:
    return f.capacities(a, K)


@dataclass
class Verdict:
    axiom: str
    passed: bool
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "passed": self.passed, "failures": self.failures}


def _failure(inp, k, lhs, rhs) -> dict:
    return {"input": inp, "k": k, "lhs": str(lhs), "rhs": str(rhs)}


def verify_spectrality(f, a: EllipsoidParams, K: int) -> Verdict:
    if K < 1:
        raise ValueError("K must be at least 1")
    table = f.capacities(a, K)
    top = max(table.values)
    window = spec_plus(a, top if top > 0 else Exact(1))
    fails = [_failure(str(a), k, c, "spec_+") for k, c in enumerate(table.values)
             if c not in window]
    return Verdict("spectrality", not fails, fails)


def verify_conformality(f, a: EllipsoidParams, s, K: int) -> Verdict:
    s = as_exact(s)
    if s <= 0:
        raise ValueError("scale factor must be positive")
    base = f.capacities(a, K)
    scaled = f.capacities(a.scaled(s), K)
    fails = [_failure(f"{a} * {s}", k, scaled[k], s * base[k])
             for k in range(K + 1) if scaled[k] != s * base[k]]
    return Verdict("conformality", not fails, fails)


def verify_monotonicity(f, a: EllipsoidParams, a2: EllipsoidParams, K: int) -> Verdict:
    if a.n != a2.n or any(x > y for x, y in zip(a.axes, a2.axes)):
        raise ValueError(f"{a} is not componentwise below {a2}")
    lo, hi = f.capacities(a, K), f.capacities(a2, K)
    fails = [_failure(f"{a} <= {a2}", k, lo[k], hi[k])
             for k in range(K + 1) if lo[k] > hi[k]]
    return Verdict("monotonicity", not fails, fails)


def continuity_sandwich(f, a: EllipsoidParams, a2: EllipsoidParams, K: int) -> Verdict:
    """``m c_k(a) <= c_k(a2) <= M c_k(a)`` with ``m, M`` the extreme axis ratios."""
    if a.n != a2.n:
        raise ValueError("ellipsoids of different dimension")
    ratios = [y / x for x, y in zip(a.axes, a2.axes)]
    m, M = min(ratios), max(ratios)
    c, c2 = f.capacities(a, K), f.capacities(a2, K)
    fails = []
    for k in range(K + 1):
        if m * c[k] > c2[k]:
            fails.append(_failure(f"{a} ~ {a2}", k, m * c[k], c2[k]))
        if c2[k] > M * c[k]:
            fails.append(_failure(f"{a} ~ {a2}", k, c2[k], M * c[k]))
    return Verdict("continuity", not fails, fails)


def locality_check(f, a: EllipsoidParams, x, y) -> Verdict:
    """If ``[x, y]`` misses ``spec_+``, no capacity may land in ``[x, y]``."""
    x, y = as_exact(x), as_exact(y)
    if not 0 < x < y:
        raise ValueError("need 0 < x < y")
    window = spec_plus(a, y)
    if any(x <= v for v in window.actions()):
        return Verdict("locality", True)
    # the number of capacities <= y equals the lattice count in the window
    K = window.total_count()
    table = f.capacities(a, K)
    fails = [_failure(f"{a} on [{x}, {y}]", k, c, "spec_+-free interval")
             for k, c in enumerate(table.values) if x <= c <= y]
    return Verdict("locality", not fails, fails)


AXIOMS = ("spectrality", "conformality", "monotonicity", "continuity", "locality")


def random_rational_ellipsoid(rng: random.Random, n: Optional[int] = None,
                              max_num: int = 12, max_den: int = 6) -> EllipsoidParams:
    n = rng.randint(1, 3) if n is None else n
    return EllipsoidParams(tuple(Fraction(rng.randint(1, max_num), rng.randint(1, max_den))
                                 for _ in range(n)))


def run_axiom_trials(axiom: str, trials: int, seed: int = 0, K: int = 50,
                     kind: str = CH_LATTICE) -> Verdict:
    """Check one axiom on ``trials`` seeded random rational ellipsoids with ``n <= 3``."""
    if axiom not in AXIOMS:
        raise ValueError(f"unknown axiom {axiom!r}; expected one of {', '.join(AXIOMS)}")
    rng = random.Random(seed)
    f = SelectorFamily(kind)
    fails = []
    for _ in range(trials):
        a = random_rational_ellipsoid(rng, 2 if kind == ECH_LATTICE else None)
        if axiom == "spectrality":
            v = verify_spectrality(f, a, K)
        elif axiom == "conformality":
            s = Fraction(rng.randint(1, 20), rng.randint(1, 20))
            v = verify_conformality(f, a, s, K)
        elif axiom == "monotonicity":
            a2 = EllipsoidParams(tuple(x + Fraction(rng.randint(0, 6), rng.randint(1, 6))
                                       for x in a.axes))
            v = verify_monotonicity(f, a, a2, K)
        elif axiom == "continuity":
            a2 = EllipsoidParams(tuple(x * (1 + Fraction(rng.randint(-10, 10), 100))
                                       for x in a.axes))
            v = continuity_sandwich(f, a, a2, K)
        else:
            x, y = _random_gap_interval(rng, a)
            v = locality_check(f, a, x, y)
        fails.extend(v.failures)
    return Verdict(axiom, not fails, fails)


def _random_gap_interval(rng: random.Random, a: EllipsoidParams):
    """A random closed interval inside a gap of ``spec_+(a)``."""
    window = spec_plus(a, 6 * a.axes[-1])
    acts = window.actions()
    i = rng.randrange(len(acts) - 1)
    lo, hi = acts[i], acts[i + 1]
    t1, t2 = sorted(rng.sample(range(1, 100), 2))
    x = lo + (hi - lo) * Fraction(t1, 100)
    y = lo + (hi - lo) * Fraction(t2, 100)
    return x, y
