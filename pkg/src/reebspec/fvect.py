"""Filtered, Z/2-graded vector spaces presented by level-adapted bases.

A space is a finite list of generators, each carrying a positive level and
a degree in Z/2.  The filtration is ``F^a V = span{e : level(e) < a}``;
the inequality is strict, so a vector never lies in the filtration step
indexed by its own level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Any, Hashable, Iterable, Mapping, Optional

from .exact import Exact, as_exact

__all__ = [
    "Field", "QQ", "F2", "field_by_name",
    "BOTTOM", "TOP",
    "Generator", "FilteredSpace", "Vector", "Functional",
    "level", "membership", "spec", "dual_level", "tensor", "contract",
    "tensor_vectors", "space_to_json", "space_from_json",
]


class Field:
    """Coefficient field; instances are the singletons :data:`QQ` and :data:`F2`."""

    def __init__(self, name: str, characteristic: int):
        self.name = name
        self.characteristic = characteristic

    def coerce(self, x) -> Any:
        if self.characteristic == 2:
            if type(x) is int:
                return x & 1
            if isinstance(x, str):
                x = int(x)
            if Fraction(x).denominator != 1:
                raise ValueError(f"{x!r} is not an element of F2")
            return int(x) % 2
        if type(x) is Fraction:
            return x
        return Fraction(x)

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def add(self, x, y):
        return (x + y) % 2 if self.characteristic == 2 else x + y

    def sub(self, x, y):
        return (x + y) % 2 if self.characteristic == 2 else x - y

    def mul(self, x, y):
        return (x * y) % 2 if self.characteristic == 2 else x * y

    def neg(self, x):
        return x if self.characteristic == 2 else -x

    def div(self, x, y):
        if not y:
            raise ZeroDivisionError("division by zero in field")
        return x if self.characteristic == 2 else x / y

    def sign(self, degree: int):
        """``(-1)**degree`` as a field element."""
        return self.neg(self.one()) if degree % 2 else self.one()

    def format(self, x) -> str:
        return str(x)

    def __repr__(self):
        return self.name


QQ = Field("Q", 0)
F2 = Field("F2", 2)


def field_by_name(name: str) -> Field:
    try:
        return {"Q": QQ, "F2": F2}[name]
    except KeyError:
        raise ValueError(f"unknown field {name!r}; expected 'Q' or 'F2'") from None


class _Extreme:
    """The levels -inf (|0|) and +inf (|phi| for phi = 0)."""

    __slots__ = ("_sign", "_name")

    def __init__(self, sign: int, name: str):
        self._sign = sign
        self._name = name

    def __lt__(self, other):
        if other is self:
            return False
        return self._sign < 0

    def __le__(self, other):
        return other is self or self._sign < 0

    def __gt__(self, other):
        if other is self:
            return False
        return self._sign > 0

    def __ge__(self, other):
        return other is self or self._sign > 0

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash(self._name)

    def __repr__(self):
        return self._name


BOTTOM = _Extreme(-1, "BOTTOM")
TOP = _Extreme(1, "TOP")


@dataclass(frozen=True)
class Generator:
    label: Hashable
    level: Exact
    degree: int = 0


@dataclass(frozen=True, eq=False)
class FilteredSpace:
    generators: tuple[Generator, ...]
    field: Field = QQ
    # (V, W) when this space is V (x) W with generator labels (e, f)
    factors: Optional[tuple["FilteredSpace", "FilteredSpace"]] = None
    _index: dict = dc_field(init=False, repr=False, compare=False)
    _rank: dict = dc_field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gens = tuple(
            g if isinstance(g, Generator) else Generator(*g) for g in self.generators)
        gens = tuple(Generator(g.label, as_exact(g.level), int(g.degree)) for g in gens)
        index = {}
        for i, g in enumerate(gens):
            if g.label in index:
                raise ValueError(f"duplicate generator label {g.label!r}")
            if g.level <= 0:
                raise ValueError(f"generator {g.label!r} has nonpositive level {g.level}")
            if g.degree not in (0, 1):
                raise ValueError(f"generator {g.label!r} has degree {g.degree}, expected 0 or 1")
            index[g.label] = i
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "_index", index)
        ranked = sorted(range(len(gens)), key=lambda i: (gens[i].level, i))
        object.__setattr__(self, "_rank", {gens[i].label: r for r, i in enumerate(ranked)})

    @classmethod
    def build(cls, gens: Iterable, field: Field = QQ) -> "FilteredSpace":
        """Convenience constructor from ``(label, level[, degree])`` tuples."""
        return cls(tuple(Generator(*g) for g in gens), field)

    def __len__(self):
        return len(self.generators)

    def __contains__(self, label):
        return label in self._index

    @property
    def labels(self) -> list:
        return [g.label for g in self.generators]

    def generator(self, label) -> Generator:
        try:
            return self.generators[self._index[label]]
        except KeyError:
            raise KeyError(f"no generator {label!r} in space") from None

    def level_of(self, label) -> Exact:
        return self.generator(label).level

    def degree_of(self, label) -> int:
        return self.generator(label).degree

    def index_of(self, label) -> int:
        return self._index[label]

    def gen(self, label) -> "Vector":
        self.generator(label)
        return Vector(self, {label: self.field.one()})

    def zero(self) -> "Vector":
        return Vector(self, {})

    def vector(self, coeffs: Mapping) -> "Vector":
        return Vector(self, coeffs)

    def functional(self, coeffs: Mapping) -> "Functional":
        return Functional(self, coeffs)

    def dual_basis(self, label) -> "Functional":
        return Functional(self, {label: self.field.one()})

    def basis_below(self, a) -> list:
        """Labels spanning ``F^a V``."""
        return [g.label for g in self.generators if g.level < a]

    def sorted_labels(self) -> list:
        """Labels in nondecreasing level order, ties broken by label."""
        return [g.label for g in sorted(self.generators, key=lambda g: (g.level, g.label))]


class Vector:
    __slots__ = ("parent", "coeffs")

    def __init__(self, parent: FilteredSpace, coeffs: Mapping):
        K = parent.field
        clean = {}
        for label, c in coeffs.items():
            if label not in parent:
                raise KeyError(f"no generator {label!r} in space")
            c = K.coerce(c)
            if c:
                clean[label] = c
        self.parent = parent
        self.coeffs = clean

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "Vector"):
        if other.parent is not self.parent:
            raise ValueError("vectors live in different spaces")

    def __add__(self, other: "Vector") -> "Vector":
        self._check(other)
        K = self.parent.field
        out = dict(self.coeffs)
        for label, c in other.coeffs.items():
            out[label] = K.add(out.get(label, K.zero()), c)
        return Vector(self.parent, out)

    def __neg__(self) -> "Vector":
        K = self.parent.field
        return Vector(self.parent, {k: K.neg(c) for k, c in self.coeffs.items()})

    def __sub__(self, other: "Vector") -> "Vector":
        return self + (-other)

    def __rmul__(self, scalar) -> "Vector":
        K = self.parent.field
        s = K.coerce(scalar)
        return Vector(self.parent, {k: K.mul(s, c) for k, c in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, Vector):
            return NotImplemented
        return self.parent is other.parent and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*{k}" for k, c in self.coeffs.items())


class Functional:
    __slots__ = ("parent", "coeffs")

    def __init__(self, parent: FilteredSpace, coeffs: Mapping):
        K = parent.field
        clean = {}
        for label, c in coeffs.items():
            if label not in parent:
                raise KeyError(f"no generator {label!r} in space")
            c = K.coerce(c)
            if c:
                clean[label] = c
        self.parent = parent
        self.coeffs = clean

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, v: Vector):
        if v.parent is not self.parent:
            raise ValueError("functional and vector live in different spaces")
        K = self.parent.field
        total = K.zero()
        for label, c in v.coeffs.items():
            phi = self.coeffs.get(label)
            if phi:
                total = K.add(total, K.mul(phi, c))
        return total

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*{k}^" for k, c in self.coeffs.items())


def level(v: Vector):
    """``|v|``: BOTTOM for the zero vector, else the top level in its support."""
    if not v.coeffs:
        return BOTTOM
    space = v.parent
    return space.level_of(max(v.coeffs, key=space._rank.__getitem__))


def membership(v: Vector, a) -> bool:
    """Whether ``v`` lies in ``F^a V``."""
    if not v.coeffs:
        return True
    if a is TOP:
        return True
    if a is BOTTOM:
        return False
    return level(v) < a


def spec(V: FilteredSpace) -> list[Exact]:
    return sorted({g.level for g in V.generators})


def dual_level(phi: Functional):
    """``|phi|``: the largest ``a`` with ``phi`` vanishing on ``F^a V``; TOP for ``phi = 0``."""
    if not phi.coeffs:
        return TOP
    space = phi.parent
    return space.level_of(min(phi.coeffs, key=space._rank.__getitem__))


def tensor(V: FilteredSpace, W: FilteredSpace) -> FilteredSpace:
    if V.field is not W.field:
        raise ValueError(f"cannot tensor spaces over {V.field} and {W.field}")
    gens = tuple(
        Generator((e.label, f.label), e.level + f.level, (e.degree + f.degree) % 2)
        for e in V.generators for f in W.generators)
    return FilteredSpace(gens, V.field, factors=(V, W))


def tensor_vectors(v: Vector, w: Vector, VW: FilteredSpace) -> Vector:
    """``v (x) w`` as a vector of the tensor space ``VW``."""
    if VW.factors is None or VW.factors[0] is not v.parent or VW.factors[1] is not w.parent:
        raise ValueError("target is not the tensor product of the vectors' spaces")
    K = VW.field
    return Vector(VW, {(e, f): K.mul(c, d)
                       for e, c in v.coeffs.items() for f, d in w.coeffs.items()})


def contract(phi: Functional, x: Vector) -> Vector:
    """Apply ``v (x) w -> phi(v) w`` to ``x``, landing in the right tensor factor."""
    VW = x.parent
    if VW.factors is None or VW.factors[0] is not phi.parent:
        raise ValueError("vector does not live in a tensor product with the functional's space")
    W = VW.factors[1]
    K = VW.field
    out: dict = {}
    for (e, f), c in x.coeffs.items():
        s = phi.coeffs.get(e)
        if s:
            out[f] = K.add(out.get(f, K.zero()), K.mul(s, c))
    return Vector(W, out)


def _label_to_json(label) -> str:
    if isinstance(label, tuple):
        return "(" + ",".join(_label_to_json(x) for x in label) + ")"
    return str(label)


def space_to_json(V: FilteredSpace) -> dict:
    return {
        "field": V.field.name,
        "generators": [
            {"label": _label_to_json(g.label), "level": g.level.to_level_json(),
             "degree": g.degree}
            for g in V.generators
        ],
    }


def space_from_json(obj) -> FilteredSpace:
    if isinstance(obj, str):
        obj = json.loads(obj)
    K = field_by_name(obj["field"])
    gens = tuple(
        Generator(g["label"], Exact.from_level_json(g["level"]), int(g["degree"]))
        for g in obj["generators"])
    return FilteredSpace(gens, K)
