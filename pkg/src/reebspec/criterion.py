"""Gap functional, Weyl-law deviations and Dirichlet near-collisions.

The normalized gap of a capacity family over a horizon ``K`` is

    min over 1 <= j <= k <= K of (c_k - c_{k-j}) / |alpha_j|,

the shift ``alpha_j`` lowering the index by ``j``.  Its vanishing is the
closing criterion; for two axes it is driven by near-collisions
``q*a_2 ~ p*a_1`` coming from continued-fraction convergents of
``a_2/a_1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .exact import Exact, quad_sign
from .selectors import CH_LATTICE, ECH_LATTICE, SelectorFamily
from .spectrum import EllipsoidParams, spec_plus

__all__ = [
    "UGap", "GapReport", "WeylReport", "DirichletWitness",
    "u_gap", "normalized_gap", "weyl_check", "dirichlet_near_collisions",
    "continued_fraction", "closing_evidence", "default_family",
]


def default_family(a: EllipsoidParams) -> SelectorFamily:
    return SelectorFamily(ECH_LATTICE if a.n == 2 else CH_LATTICE)


def exact_json(x: Exact) -> dict:
    lo, hi = x.interval(13)
    out = x.to_json()
    out["decimal"] = x.decimal(12)
    out["interval"] = [str(lo), str(hi)]
    return out


@dataclass(frozen=True)
class UGap:
    value: Exact
    witnesses: tuple  # every k < K with c_{k+1} - c_k equal to the minimum


def u_gap(f: SelectorFamily, a: EllipsoidParams, K: int) -> UGap:
    """``min_{k < K} c_{k+1} - c_k``."""
    if K < 1:
        raise ValueError("K must be at least 1")
    c = f.capacities(a, K).values
    diffs = [c[k + 1] - c[k] for k in range(K)]
    best = min(diffs)
    return UGap(best, tuple(k for k, x in enumerate(diffs) if x == best))


@dataclass
class GapReport:
    params: EllipsoidParams
    K: int
    u_gaps: list
    normalized_inf: Exact
    witness: tuple  # (k, j) attaining the infimum, first in scan order
    # (horizon, value, k, j) each time the running infimum strictly drops
    records: list = field(default_factory=list)

    def to_json(self, include_u_gaps: bool = True) -> dict:
        out = {
            "horizon": self.K,
            "normalized_inf": exact_json(self.normalized_inf),
            "witness": {"k": self.witness[0], "j": self.witness[1]},
            "records": [{"horizon": h, "value": exact_json(v), "k": k, "j": j}
                        for h, v, k, j in self.records],
        }
        if include_u_gaps:
            out["u_gaps"] = [g.to_json() for g in self.u_gaps]
        return out


def normalized_gap(f: SelectorFamily, a: EllipsoidParams, K: int) -> GapReport:
    if K < 1:
        raise ValueError("K must be at least 1")
    c = f.capacities(a, K).values
    w = f.shift_weights(a.n, K)
    d = max([x.d for x in c] + [x.d for x in w])
    D = math.lcm(*(x.c for x in c))
    P = [x.a * (D // x.c) for x in c]
    Q = [x.b * (D // x.c) for x in c]

    best = (c[1] - c[0]) / w[0]
    witness = (1, 1)
    records = [(1, best, 1, 1)]
    # thresholds[j-1] = D * w_j * best as integer parts; term_j < best iff
    # (P_k - P_{k-j}) + (Q_k - Q_{k-j}) sqrt(d) < threshold_j
    thresholds = _thresholds(w, best, D)
    for k in range(2, K + 1):
        if best.sign() == 0:
            break
        Pk, Qk = P[k], Q[k]
        for j in range(1, k + 1):
            ta, tb, tc = thresholds[j - 1]
            if quad_sign((Pk - P[k - j]) * tc - ta, (Qk - Q[k - j]) * tc - tb, d) < 0:
                best = (c[k] - c[k - j]) / w[j - 1]
                witness = (k, j)
                thresholds = _thresholds(w, best, D)
        if best < records[-1][1]:
            records.append((k, best, *witness))
    u_gaps = [c[k + 1] - c[k] for k in range(K)]
    return GapReport(a, K, u_gaps, best, witness, records)


def _thresholds(w: Sequence[Exact], best: Exact, D: int) -> list:
    out = []
    for x in w:
        t = x * best * D
        out.append((t.a, t.b, t.c))
    return out


@dataclass
class WeylReport:
    params: EllipsoidParams
    limit: Exact
    # (k, c_k, |c_k^2/k - limit|)
    rows: list

    @property
    def max_deviation(self) -> Exact:
        return max(dev for _, _, dev in self.rows)

    @property
    def decreasing(self) -> bool:
        devs = [dev for _, _, dev in self.rows]
        return all(y < x for x, y in zip(devs, devs[1:]))

    def to_json(self) -> dict:
        return {
            "limit": exact_json(self.limit),
            "checkpoints": [{"k": k, "capacity": ck.to_json(), "deviation": exact_json(dev)}
                            for k, ck, dev in self.rows],
            "max_deviation": exact_json(self.max_deviation),
            "decreasing": self.decreasing,
        }


def weyl_check(f: SelectorFamily, a: EllipsoidParams, checkpoints: Sequence[int]) -> WeylReport:
    """Deviation of ``c_k^2 / k`` from ``2 a_1 a_2`` at each checkpoint."""
    if a.n != 2:
        raise ValueError(f"the Weyl check is for n = 2, got n = {a.n}")
    ks = [int(k) for k in checkpoints]
    if not ks or any(k < 1 for k in ks) or any(y <= x for x, y in zip(ks, ks[1:])):
        raise ValueError("checkpoints must be positive and strictly increasing")
    c = f.capacities(a, ks[-1]).values
    limit = 2 * a.axes[0] * a.axes[1]
    rows = [(k, c[k], abs(c[k] * c[k] / k - limit)) for k in ks]
    return WeylReport(a, limit, rows)


def continued_fraction(x: Exact, max_terms: int = 10_000):
    """Yield partial quotients of a positive exact number; stops if it is rational."""
    for _ in range(max_terms):
        t = math.floor(x)
        yield t
        frac = x - t
        if frac.sign() == 0:
            return
        x = frac.inverse()


@dataclass(frozen=True)
class DirichletWitness:
    p: int
    q: int
    residual: Exact   # |q a_2 - p a_1|
    bound: Exact      # a_1 / q
    within_q_bound: bool  # residual < a_1 / Q

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "residual": exact_json(self.residual),
                "bound": exact_json(self.bound), "within_q_bound": self.within_q_bound}


def dirichlet_near_collisions(a: EllipsoidParams, Q: int) -> list:
    """Convergents ``p/q`` of ``a_2/a_1`` with ``q <= Q`` and their action residuals."""
    if a.n < 2:
        raise ValueError("need at least two axes")
    if Q < 1:
        raise ValueError("Q must be at least 1")
    a1, a2 = a.axes[0], a.axes[1]
    ratio = a2 / a1
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    out = []
    for t in continued_fraction(ratio):
        p_prev, p = p, t * p + p_prev
        q_prev, q = q, t * q + q_prev
        if q > Q:
            break
        residual = abs(q * a2 - p * a1)
        out.append(DirichletWitness(p, q, residual, a1 / q, residual < a1 / Q))
    return out


def closing_evidence(a: EllipsoidParams, K: int, Q: int,
                     f: Optional[SelectorFamily] = None,
                     checkpoints: Optional[Sequence[int]] = None,
                     seed: int = 0) -> dict:
    """One JSON-ready document with gap trend, Dirichlet witnesses and Weyl deviations."""
    f = f or default_family(a)
    ug = u_gap(f, a, K)
    report = normalized_gap(f, a, K)
    doc = {
        "schema": "reebspec.evidence/1",
        "axes": [str(x) for x in a.axes],
        "params": a.to_json(),
        "selector": f.kind,
        "shift_weights": "round-sphere capacities" if f.weights is None else "configured",
        "horizon": K,
        "max_q": Q,
        "seed": seed,
        "degenerate": a.degenerate,
        "u_gap": {"value": exact_json(ug.value), "witnesses": list(ug.witnesses)},
        "normalized_gap": report.to_json(include_u_gaps=False),
    }
    if a.n >= 2:
        wit = dirichlet_near_collisions(a, Q)
        pairs = [(w.q * a.axes[1], w.p * a.axes[0]) for w in wit]
        window = spec_plus(a, max(max(x, y) for x, y in pairs))
        doc["dirichlet"] = {
            "ratio": str(a.axes[1] / a.axes[0]),
            "witnesses": [dict(w.to_json(), actions_in_spectrum=(x in window and y in window))
                          for w, (x, y) in zip(wit, pairs)],
            "guarantee_met": any(w.within_q_bound for w in wit),
        }
    else:
        doc["dirichlet"] = None
    if a.n == 2:
        if checkpoints is None:
            checkpoints = [10 ** e for e in range(1, 7) if 10 ** e <= K] or [K]
        doc["weyl"] = weyl_check(f, a, checkpoints).to_json()
    else:
        doc["weyl"] = None
    doc["implication"] = {
        "chain": [
            "normalized gap infimum over all horizons is 0",
            "closing criterion holds for this selector model",
            "strong closing property of the ellipsoid boundary",
        ],
        "finite_horizon_inf_is_zero": report.normalized_inf.sign() == 0,
        "status": "numerical evidence at a finite horizon, not a proof",
    }
    return doc
