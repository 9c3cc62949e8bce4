"""Exact Gaussian elimination over QQ or F2 on sparse dict vectors."""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping

from .fvect import Field

__all__ = ["rank", "Echelon"]


class Echelon:
    """Incrementally maintained row-echelon basis of a span.

    Vectors are mappings from coordinate keys to field elements; ``order``
    fixes which coordinate is used as the pivot.
    """

    def __init__(self, K: Field, order: Mapping[Hashable, int]):
        self.K = K
        self.order = order
        self.rows: dict[int, dict] = {}

    def _pivot(self, vec: dict) -> int:
        return max(self.order[k] for k in vec)

    def reduce(self, vec: Mapping) -> dict:
        K = self.K
        v = {k: c for k, c in vec.items() if c}
        while v:
            p = self._pivot(v)
            row = self.rows.get(p)
            if row is None:
                return v
            key = next(k for k in row if self.order[k] == p)
            factor = K.div(v[key], row[key])
            for k, c in row.items():
                nc = K.sub(v.get(k, K.zero()), K.mul(factor, c))
                if nc:
                    v[k] = nc
                else:
                    v.pop(k, None)
        return v

    def add(self, vec: Mapping) -> bool:
        """Insert ``vec``; return True if it enlarged the span."""
        v = self.reduce(vec)
        if not v:
            return False
        self.rows[self._pivot(v)] = v
        return True

    def __len__(self):
        return len(self.rows)


def rank(vectors: Iterable[Mapping], K: Field, order: Mapping[Hashable, int] | None = None) -> int:
    vectors = [dict(v) for v in vectors]
    if order is None:
        keys = sorted({k for v in vectors for k in v}, key=repr)
        order = {k: i for i, k in enumerate(keys)}
    ech = Echelon(K, order)
    for v in vectors:
        ech.add(v)
    return len(ech)
