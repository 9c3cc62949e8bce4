"""Filtered Z/2-graded chain complexes and their filtered homology.

Homology is computed by left-to-right column reduction over the basis
sorted by level, which produces an action-minimizing basis: the i-th
smallest class level equals ``inf{a : dim F^a H >= i}``.  An independent
rank-based routine (:func:`filtered_homology_dim`) computes the same
dimensions straight from the definition and backs :func:`kunneth_check`.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .exact import Exact
from .fvect import (F2, QQ, Field, FilteredSpace, Generator, Vector, field_by_name,
                    level, space_from_json, space_to_json, tensor, tensor_vectors)
from .linalg import Echelon, rank

__all__ = [
    "FilteredComplex", "Violation", "InvalidComplexError", "HomologyPresentation",
    "check_complex", "homology", "filtered_homology_dim", "tensor_complex",
    "kunneth_check", "KunnethReport", "random_complex", "complex_to_json",
    "complex_from_json", "kunneth_trials",
]


class InvalidComplexError(ValueError):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str  # "d_squared", "degree" or "filtration"
    generator: object
    detail: str


class FilteredComplex:
    """A filtered space with a boundary given on generators.

    ``boundary`` maps a generator label to its boundary, either a
    :class:`Vector` or a mapping ``label -> coefficient``.  Missing labels
    are cycles.
    """

    def __init__(self, space: FilteredSpace, boundary: Optional[Mapping] = None):
        self.space = space
        bd = {}
        for label, img in (boundary or {}).items():
            space.generator(label)
            if not isinstance(img, Vector):
                img = Vector(space, img)
            elif img.parent is not space:
                raise ValueError("boundary image lives in a different space")
            if not img.is_zero():
                bd[label] = img
        self.boundary = bd

    @property
    def field(self) -> Field:
        return self.space.field

    def d_gen(self, label) -> Vector:
        return self.boundary.get(label) or self.space.zero()

    def d(self, v: Vector) -> Vector:
        K = self.field
        out: dict = {}
        for label, c in v.coeffs.items():
            img = self.boundary.get(label)
            if img is None:
                continue
            for k, x in img.coeffs.items():
                out[k] = K.add(out.get(k, K.zero()), K.mul(c, x))
        return Vector(self.space, out)

    def __repr__(self):
        return f"FilteredComplex(dim={len(self.space)}, field={self.field})"


def check_complex(C: FilteredComplex) -> list[Violation]:
    """All violations of d^2 = 0, degree reversal and filtration preservation."""
    out = []
    V = C.space
    for g in V.generators:
        img = C.d_gen(g.label)
        if img.is_zero():
            continue
        for k in img.coeffs:
            if V.degree_of(k) == g.degree:
                out.append(Violation("degree", g.label,
                                     f"d({g.label}) has a term {k!r} of the same degree {g.degree}"))
        top = level(img)
        if top > g.level:
            out.append(Violation("filtration", g.label,
                                 f"|d({g.label})| = {top} exceeds |{g.label}| = {g.level}"))
        dd = C.d(img)
        if not dd.is_zero():
            out.append(Violation("d_squared", g.label, f"d(d({g.label})) = {dd!r}"))
    return out


@dataclass
class HomologyPresentation:
    """Action-minimizing basis of ``H_*``.

    ``space`` has one generator per class, labelled by the chain generator
    at which the class is born; ``cycle_reps`` maps that label to a cycle of
    the same level representing it.  ``bars`` lists the finite pairs
    ``(born, killed_by)`` for reference.
    """

    space: FilteredSpace
    cycle_reps: dict
    bars: list = field(default_factory=list)

    def dim_below(self, a, degree: Optional[int] = None) -> int:
        return sum(1 for g in self.space.generators
                   if g.level < a and (degree is None or g.degree == degree))

    def levels(self, degree: Optional[int] = None) -> list:
        return sorted(g.level for g in self.space.generators
                      if degree is None or g.degree == degree)


def homology(C: FilteredComplex) -> HomologyPresentation:
    problems = check_complex(C)
    if problems:
        raise InvalidComplexError("; ".join(p.detail for p in problems))
    V = C.space
    K = C.field
    order = V.sorted_labels()
    pos = {label: i for i, label in enumerate(order)}

    reduced: list[dict] = []
    combos: list[dict] = []
    pivot_col: dict[int, int] = {}
    bars = []
    for j, label in enumerate(order):
        col = {pos[k]: c for k, c in C.d_gen(label).coeffs.items()}
        combo = {j: K.one()}
        while col:
            low = max(col)
            other = pivot_col.get(low)
            if other is None:
                break
            factor = K.div(col[low], reduced[other][low])
            _axpy(K, col, factor, reduced[other])
            _axpy(K, combo, factor, combos[other])
        reduced.append(col)
        combos.append(combo)
        if col:
            low = max(col)
            pivot_col[low] = j
            bars.append((order[low], label))

    killed = {born for born, _ in bars}
    gens = []
    reps = {}
    for j, label in enumerate(order):
        if reduced[j] or label in killed:
            continue
        g = V.generator(label)
        gens.append(Generator(label, g.level, g.degree))
        reps[label] = Vector(V, {order[i]: c for i, c in combos[j].items()})
    return HomologyPresentation(FilteredSpace(tuple(gens), K), reps, bars)


def _axpy(K: Field, target: dict, factor, source: dict) -> None:
    """``target -= factor * source`` in place, dropping zeros."""
    for i, c in source.items():
        nc = K.sub(target.get(i, K.zero()), K.mul(factor, c))
        if nc:
            target[i] = nc
        else:
            target.pop(i, None)


def filtered_homology_dim(C: FilteredComplex, a, degree: Optional[int] = None) -> int:
    """``dim F^a H_*`` from ranks: ``dim(Z cap F^a) - dim(B cap F^a)``."""
    V = C.space
    K = C.field
    order = {label: i for i, label in enumerate(V.labels)}
    degrees = (0, 1) if degree is None else (degree,)
    total = 0
    for deg in degrees:
        below = [g.label for g in V.generators if g.level < a and g.degree == deg]
        if not below:
            continue
        cycles = len(below) - rank((C.d_gen(x).coeffs for x in below), K, order)
        bounds = [C.d_gen(g.label).coeffs for g in V.generators if g.degree != deg]
        rank_b = rank(bounds, K, order)
        rank_sum = rank(bounds + [{x: K.one()} for x in below], K, order)
        total += cycles - (rank_b + len(below) - rank_sum)
    return total


def tensor_complex(C1: FilteredComplex, C2: FilteredComplex) -> FilteredComplex:
    """``d(v (x) w) = dv (x) w + (-1)^deg(v) v (x) dw``."""
    if C1.field is not C2.field:
        raise ValueError(f"cannot tensor complexes over {C1.field} and {C2.field}")
    K = C1.field
    VW = tensor(C1.space, C2.space)
    bd = {}
    for e in C1.space.generators:
        de = C1.d_gen(e.label)
        sgn = K.sign(e.degree)
        for f in C2.space.generators:
            df = C2.d_gen(f.label)
            out: dict = {}
            for x, c in de.coeffs.items():
                out[(x, f.label)] = K.add(out.get((x, f.label), K.zero()), c)
            for y, c in df.coeffs.items():
                out[(e.label, y)] = K.add(out.get((e.label, y), K.zero()), K.mul(sgn, c))
            if any(out.values()):
                bd[(e.label, f.label)] = out
    return FilteredComplex(VW, bd)


@dataclass
class KunnethReport:
    passed: bool
    # (a, dim F^a H(C1 (x) C2), dim of the span of products of classes below a)
    rows: list

    def to_json(self) -> dict:
        return {"passed": self.passed,
                "rows": [{"a": a.to_json(), "direct": d, "product_span": p}
                         for a, d, p in self.rows]}


def _grid(values: list[Exact]) -> list[Exact]:
    """Midpoints between consecutive distinct values plus one point on each side."""
    vals = sorted(set(values))
    if not vals:
        return [Exact(1)]
    gaps = [y - x for x, y in zip(vals, vals[1:])]
    half = min(gaps) / 2 if gaps else Exact(Fraction(1, 2))
    pts = [vals[0] - half]
    pts += [(x + y) / 2 for x, y in zip(vals, vals[1:])]
    pts.append(vals[-1] + half)
    return pts


def kunneth_check(C1: FilteredComplex, C2: FilteredComplex) -> KunnethReport:
    """Compare ``F^a H(C1 (x) C2)`` with the span of ``F^b H(C1) (x) F^c H(C2)``, ``b + c <= a``.

    Both sides are evaluated on a grid that sees every jump of the
    piecewise-constant dimension functions.  The product span is computed
    as an actual subspace of ``H(C1 (x) C2)`` from tensor products of cycle
    representatives; since it is contained in the filtration step by
    construction, equal dimensions mean equal subspaces.
    """
    T = tensor_complex(C1, C2)
    K = T.field
    H1, H2 = homology(C1), homology(C2)
    order = {label: i for i, label in enumerate(T.space.labels)}
    boundaries = [T.d_gen(label).coeffs for label in T.space.labels]
    base = Echelon(K, order)
    for b in boundaries:
        base.add(b)
    rank_b = len(base)

    products = []
    for g in H1.space.generators:
        for h in H2.space.generators:
            z = tensor_vectors(H1.cycle_reps[g.label], H2.cycle_reps[h.label], T.space)
            products.append((g.level + h.level, z))

    sums = [e.level + f.level for e in C1.space.generators for f in C2.space.generators]
    rows = []
    passed = True
    for a in _grid(sums):
        direct = filtered_homology_dim(T, a)
        ech = Echelon(K, order)
        ech.rows = dict(base.rows)
        for lvl, z in products:
            if lvl < a:
                ech.add(z.coeffs)
        span = len(ech) - rank_b
        rows.append((a, direct, span))
        passed = passed and direct == span
    return KunnethReport(passed, rows)


def random_complex(rng: random.Random, dim: int, K: Field = QQ,
                   levels: Optional[list] = None, prefix: str = "e") -> FilteredComplex:
    """A random valid complex of dimension ``dim``.

    A random pairing ``d(c) = b`` (with ``|b| <= |c|`` and opposite degrees)
    is conjugated by a random degree-preserving unitriangular change of
    basis in level order, so the boundary matrix is dense but still squares
    to zero and preserves the filtration.
    """
    if levels is None:
        pool = [Fraction(k, 2) for k in range(1, 9)]
        levels = [rng.choice(pool) for _ in range(dim)]
    degrees = [rng.randrange(2) for _ in range(dim)]
    labels = [f"{prefix}{i}" for i in range(dim)]
    space = FilteredSpace(tuple(Generator(l, lv, dg) for l, lv, dg in zip(labels, levels, degrees)), K)
    order = space.sorted_labels()
    n = len(order)
    idx = {label: i for i, label in enumerate(order)}
    deg = [space.degree_of(l) for l in order]

    def rnd_nonzero():
        if K is F2:
            return 1
        return Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))

    def rnd():
        if K is F2:
            return rng.randrange(2)
        return Fraction(rng.randint(-2, 2))

    # D[i][j]: coefficient of order[i] in d(order[j])
    D = [[K.zero()] * n for _ in range(n)]
    free = list(range(n))
    rng.shuffle(free)
    used = set()
    for j in free:
        if j in used or rng.random() < 0.3:
            continue
        candidates = [i for i in range(j) if i not in used and deg[i] != deg[j]]
        if not candidates:
            continue
        i = rng.choice(candidates)
        D[i][j] = rnd_nonzero()
        used.update((i, j))

    T = [[K.one() if i == j else K.zero() for j in range(n)] for i in range(n)]
    for j in range(n):
        for i in range(j):
            if deg[i] == deg[j]:
                T[i][j] = rnd()
    Tinv = _unitriangular_inverse(K, T)
    M = _matmul(K, _matmul(K, T, D), Tinv)
    bd = {}
    for j in range(n):
        col = {order[i]: M[i][j] for i in range(n) if M[i][j]}
        if col:
            bd[order[j]] = col
    return FilteredComplex(space, bd)


def _matmul(K: Field, A: list, B: list) -> list:
    n, m, p = len(A), len(B), len(B[0]) if B else 0
    out = [[K.zero()] * p for _ in range(n)]
    for i in range(n):
        for k in range(m):
            a = A[i][k]
            if not a:
                continue
            row = B[k]
            for j in range(p):
                if row[j]:
                    out[i][j] = K.add(out[i][j], K.mul(a, row[j]))
    return out


def _unitriangular_inverse(K: Field, T: list) -> list:
    n = len(T)
    inv = [[K.one() if i == j else K.zero() for j in range(n)] for i in range(n)]
    # back substitution column by column: T * X = I, T upper unitriangular
    for j in range(n):
        for i in range(j - 1, -1, -1):
            s = K.zero()
            for k in range(i + 1, j + 1):
                if T[i][k] and inv[k][j]:
                    s = K.add(s, K.mul(T[i][k], inv[k][j]))
            inv[i][j] = K.neg(s)
    return inv


def complex_to_json(C: FilteredComplex) -> dict:
    from .fvect import _label_to_json
    obj = space_to_json(C.space)
    obj["boundary"] = [
        {"from": _label_to_json(label),
         "to": [{"label": _label_to_json(k), "coeff": C.field.format(c)}
                for k, c in C.boundary[label].coeffs.items()]}
        for label in C.space.labels if label in C.boundary
    ]
    return obj


def complex_from_json(obj) -> FilteredComplex:
    if isinstance(obj, str):
        obj = json.loads(obj)
    space = space_from_json(obj)
    K = field_by_name(obj["field"])
    bd = {entry["from"]: {t["label"]: K.coerce(Fraction(t["coeff"])) for t in entry["to"]}
          for entry in obj.get("boundary", [])}
    return FilteredComplex(space, bd)


def kunneth_trials(trials: int, max_dim: int, K: Field, seed: int = 0) -> dict:
    """Run :func:`kunneth_check` on seeded random pairs with factor dimensions ``<= max_dim``."""
    rng = random.Random(seed)
    failures = []
    for t in range(trials):
        C1 = random_complex(rng, rng.randint(1, max_dim), K, prefix="v")
        C2 = random_complex(rng, rng.randint(1, max_dim), K, prefix="w")
        report = kunneth_check(C1, C2)
        if not report.passed:
            failures.append({"trial": t, "left": complex_to_json(C1),
                             "right": complex_to_json(C2), "report": report.to_json()})
    return {"trials": trials, "max_dim": max_dim, "field": K.name, "seed": seed,
            "passed": not failures, "failures": failures}
