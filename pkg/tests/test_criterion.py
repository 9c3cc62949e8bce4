import math
import random
from fractions import Fraction

import mpmath
import pytest

from reebspec.criterion import (closing_evidence, continued_fraction, default_family,
                                dirichlet_near_collisions, normalized_gap, u_gap, weyl_check)
from reebspec.exact import Exact
from reebspec.selectors import CH_LATTICE, ECH_LATTICE, SelectorFamily
from reebspec.spectrum import EllipsoidParams, spec_plus

SQRT2 = Exact(0, 1, 2)
ECH = SelectorFamily(ECH_LATTICE)
CH = SelectorFamily(CH_LATTICE)


def E(*axes):
    return EllipsoidParams(axes)


def round_sphere_capacity(k):
    """c_k(1,1): the smallest d with (d+1)(d+2)/2 > k."""
    d = max(0, math.isqrt(2 * k) - 2)
    while (d + 1) * (d + 2) // 2 <= k:
        d += 1
    return d


def brute_normalized(c, w, K):
    return min((c[k] - c[k - j]) / w[j - 1] for k in range(1, K + 1) for j in range(1, k + 1))


# -- u_gap --------------------------------------------------------------------

def test_u_gap_examples():
    g = u_gap(ECH, E(1, 1), 5)
    assert g.value == 0 and 1 in g.witnesses
    assert u_gap(CH, E(1), 5).value == 1
    g = u_gap(ECH, E(1, 2), 8)
    assert g.value == 0 and 2 in g.witnesses
    with pytest.raises(ValueError):
        u_gap(ECH, E(1, 2), 0)


@pytest.mark.parametrize("ratio", [Fraction(3, 2), Fraction(5, 3), Fraction(7, 4), Fraction(2, 5),
                                   Fraction(9, 7), 3])
def test_commensurate_u_gap_vanishes_in_time(ratio):
    r = Fraction(ratio)
    bound = (r.numerator + r.denominator) ** 2
    assert u_gap(ECH, E(1, r), bound).value == 0


def test_quadratic_u_gap_positive():
    assert u_gap(ECH, E(1, SQRT2), 300).value > 0


# -- normalized gap ----------------------------------------------------------------

def test_normalized_gap_examples():
    r = normalized_gap(ECH, E(1, 1), 10)
    assert r.normalized_inf == 0 and r.witness == (2, 1)
    for axes in [(1, 2), (1, SQRT2), (Fraction(3, 2), Fraction(5, 2))]:
        a = EllipsoidParams(axes)
        one = normalized_gap(ECH, a, 1)
        assert one.normalized_inf == ECH.capacities(a, 1)[1] / ECH.shift_weights(2, 1)[0]
    assert normalized_gap(ECH, E(1, SQRT2), 200).normalized_inf <= 5 * SQRT2 - 7


@pytest.mark.parametrize("axes,K", [((1, SQRT2), 80), ((1, Fraction(7, 5)), 60),
                                    ((Fraction(2, 3), 1, Exact(Fraction(5, 4))), 60)])
def test_normalized_gap_matches_brute_force(axes, K):
    a = EllipsoidParams(axes)
    f = default_family(a)
    c = f.capacities(a, K).values
    w = f.shift_weights(a.n, K)
    assert normalized_gap(f, a, K).normalized_inf == brute_normalized(c, w, K)


def test_normalized_gap_invariants():
    a = E(1, SQRT2)
    prev = None
    for K in (1, 5, 20, 60, 150):
        r = normalized_gap(ECH, a, K)
        assert r.normalized_inf >= 0
        assert r.normalized_inf <= min(r.u_gaps) / ECH.shift_weights(2, 1)[0]
        if prev is not None:
            assert r.normalized_inf <= prev
        prev = r.normalized_inf


def test_records_strictly_decrease_for_sqrt2():
    r = normalized_gap(ECH, E(1, SQRT2), 1000)
    vals = [v for _, v, _, _ in r.records]
    assert all(y < x for x, y in zip(vals, vals[1:]))
    assert vals[:4] == [1, SQRT2 - 1, 3 - 2 * SQRT2, 5 * SQRT2 - 7]
    assert vals[-1] == r.normalized_inf
    # each record horizon reproduces the same value on its own
    for h, v, _, _ in r.records[:5]:
        assert normalized_gap(ECH, E(1, SQRT2), h).normalized_inf == v


# -- Weyl ---------------------------------------------------------------------

def test_weyl_closed_form_oracle():
    c = ECH.capacities(E(1, 1), 5000).values
    assert all(c[k] == round_sphere_capacity(k) for k in range(5001))


def test_weyl_examples():
    r = weyl_check(ECH, E(1, 1), [1000, 100000])
    (_, c3, d3), (_, c5, d5) = r.rows
    assert (c3, c5) == (44, 446)
    assert d3 == Fraction(64, 1000)
    assert abs(abs(mpmath.mpf(446) ** 2 / 10**5 - 2) - mpmath.mpf(d5.decimal(15))) < 1e-14
    assert d5 < Fraction(11, 1000) and r.decreasing
    assert weyl_check(ECH, E(1, 2), [10000]).max_deviation < Fraction(1, 10)


def test_weyl_deviation_shrinks_by_hundredfold_k():
    for k in (10, 100, 1000):
        r = weyl_check(ECH, E(1, 1), [k, 100 * k])
        assert r.rows[1][2] < r.rows[0][2]
        assert r.rows[0][1] == round_sphere_capacity(k)


def test_weyl_errors():
    with pytest.raises(ValueError):
        weyl_check(CH, E(1, 2, 3), [10])
    with pytest.raises(ValueError):
        weyl_check(ECH, E(1, 2), [100, 10])


# -- Dirichlet ----------------------------------------------------------------

def test_continued_fraction_sqrt2_and_rational():
    it = continued_fraction(SQRT2)
    assert [next(it) for _ in range(8)] == [1, 2, 2, 2, 2, 2, 2, 2]
    assert list(continued_fraction(Exact(Fraction(43, 30)))) == [1, 2, 3, 4]
    gen = continued_fraction(Exact(0, 1, 7))
    assert [next(gen) for _ in range(9)] == [2, 1, 1, 1, 4, 1, 1, 1, 4]


def test_dirichlet_examples():
    w5 = dirichlet_near_collisions(E(1, SQRT2), 5)
    assert (w5[-1].p, w5[-1].q) == (7, 5) and w5[-1].residual == 5 * SQRT2 - 7
    w29 = dirichlet_near_collisions(E(1, SQRT2), 29)
    last = w29[-1]
    assert (last.p, last.q) == (41, 29)
    assert last.residual == 29 * SQRT2 - 41 and last.residual < Fraction(1, 29)
    assert last.within_q_bound
    exact = dirichlet_near_collisions(E(1, 2), 10)
    assert [(w.p, w.q) for w in exact] == [(2, 1)] and exact[0].residual == 0


@pytest.mark.parametrize("axes", [(1, SQRT2), (Fraction(2, 3), Fraction(2, 3) * Exact(1, 1, 5)),
                                  (1, Exact(0, 1, 7)), (Exact(1, 1, 3), Exact(5, 0, 3))])
def test_convergent_residuals(axes):
    a = EllipsoidParams(axes)
    a1 = a.axes[0]
    wit = dirichlet_near_collisions(a, 500)
    res = [w.residual for w in wit]
    assert all(y < x for x, y in zip(res[1:], res[2:]))
    for w in wit:
        assert w.q <= 500 and w.residual < a1 / w.q and w.bound == a1 / w.q
    assert any(w.within_q_bound for w in wit)


def test_dirichlet_guarantee_by_brute_force():
    # best approximations of the second kind are convergents, so brute force agrees
    a = E(1, SQRT2)
    for Q in (3, 10, 40):
        wit = dirichlet_near_collisions(a, Q)
        best = min(abs(q * SQRT2 - round(q * 1.4142135623730951)) for q in range(1, Q + 1))
        assert min(w.residual for w in wit) == best


def test_near_collisions_are_in_spectrum():
    a = E(Fraction(3, 2), Fraction(3, 2) * SQRT2)
    window = spec_plus(a, 62)
    for w in dirichlet_near_collisions(a, 29):
        assert w.q * a.axes[1] in window and w.p * a.axes[0] in window


# -- evidence -----------------------------------------------------------------

def test_closing_evidence_documents():
    doc = closing_evidence(E(1, 1), 10, 5)
    assert doc["normalized_gap"]["normalized_inf"]["decimal"] == "0.000000000000"
    assert doc["implication"]["finite_horizon_inf_is_zero"]
    doc = closing_evidence(E(1, Fraction(3, 2)), 20, 5)
    assert doc["u_gap"]["value"]["p"] == 0
    assert doc["dirichlet"]["witnesses"][-1]["residual"]["p"] == 0
    doc = closing_evidence(E(1, SQRT2), 300, 29)
    recs = doc["normalized_gap"]["records"]
    assert len(recs) >= 4
    assert all(w["actions_in_spectrum"] for w in doc["dirichlet"]["witnesses"])
    assert doc["weyl"]["checkpoints"][0]["k"] == 10


def test_closing_evidence_three_axes():
    doc = closing_evidence(E(1, Fraction(4, 3), 2), 50, 10)
    assert doc["selector"] == CH_LATTICE and doc["weyl"] is None
    assert doc["dirichlet"]["guarantee_met"]


def test_closing_evidence_single_axis():
    doc = closing_evidence(E(3), 10, 5)
    assert doc["dirichlet"] is None and doc["weyl"] is None


def test_random_rational_pairs_reach_zero_gap():
    rng = random.Random(4)
    for _ in range(15):
        r = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        bound = (r.numerator + r.denominator) ** 2
        a = E(1, r)
        assert normalized_gap(ECH, a, bound).normalized_inf == 0
