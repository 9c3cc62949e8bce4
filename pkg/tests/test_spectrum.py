import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp

from reebspec.exact import Exact, FieldMismatchError
from reebspec.spectrum import (EllipsoidParams, gap_statistics, lattice_count, nullset_diagnostic,
                               simple_periods, spec_plus, window_to_csv, window_to_json)

SQRT2 = Exact(0, 1, 2)


def brute_window(axes, L):
    """Enumerate lattice sums with plain Exact arithmetic and itertools."""
    axes = [Exact(0) + x for x in axes]
    bounds = [math.floor(L / x) for x in axes]
    counts = Counter()
    for k in itertools.product(*(range(b + 1) for b in bounds)):
        v = sum((ki * x for ki, x in zip(k, axes)), Exact(0))
        if v <= L:
            counts[v] += 1
    return sorted(counts.items())


# -- Reeb flow oracle -----------------------------------------------------------

def reeb_field(axes):
    a = np.array(axes, dtype=float)

    def f(t, z):
        n = len(a)
        q, p = z[:n], z[n:]
        w = 2 * np.pi / a
        return np.concatenate([w * p, -w * q])

    return f


@pytest.mark.parametrize("axes", [(1.0, 2.0), (1.0, math.sqrt(2)), (0.5, 1.3, 2.2)])
def test_simple_period_by_flow_integration(axes):
    n = len(axes)
    f = reeb_field(axes)
    for i, ai in enumerate(axes):
        z0 = np.zeros(2 * n)
        z0[i] = math.sqrt(ai / math.pi)  # on the boundary: pi (q_i^2 + p_i^2) / a_i = 1
        sol = solve_ivp(f, (0, 1.5 * ai), z0, rtol=1e-11, atol=1e-12, dense_output=True)
        ts = np.linspace(0.05 * ai, 1.5 * ai, 3001)
        dist = np.linalg.norm(sol.sol(ts) - z0[:, None], axis=0)
        first_return = ts[np.argmin(np.where(ts < 1.4 * ai, dist, np.inf))]
        assert abs(first_return - ai) < 1e-3 * ai
        assert dist[ts < 0.9 * ai].min() > 1e-2


def test_reeb_field_normalization():
    rng = np.random.default_rng(0)
    axes = np.array([1.0, 1.7, 3.1])
    for _ in range(20):
        z = rng.normal(size=6)
        q, p = z[:3], z[3:]
        z /= math.sqrt(np.sum(np.pi * (q**2 + p**2) / axes))
        q, p = z[:3], z[3:]
        R = reeb_field(axes)(0, z)
        # lambda = sum (p dq - q dp) / 2 evaluated on R equals 1 on the boundary
        assert abs(np.sum(p * R[:3] - q * R[3:]) / 2 - 1) < 1e-12


def test_simple_periods_examples():
    assert simple_periods(EllipsoidParams((1,))).periods == [1]
    assert simple_periods(EllipsoidParams((2, 1))).periods == [1, 2]
    sp = simple_periods(EllipsoidParams((1, 1)))
    assert sp.periods == [1, 1] and sp.degenerate
    assert not simple_periods(EllipsoidParams((1, SQRT2))).degenerate


# -- spec_plus ----------------------------------------------------------------

def test_spec_plus_examples():
    assert spec_plus(EllipsoidParams((1, 1)), 2).entries == ((0, 1), (1, 2), (2, 3))
    assert spec_plus(EllipsoidParams((1, 2)), 4).entries == ((0, 1), (1, 1), (2, 2), (3, 2), (4, 3))
    assert spec_plus(EllipsoidParams((1,)), 3).entries == ((0, 1), (1, 1), (2, 1), (3, 1))


@pytest.mark.parametrize("axes,L", [
    ((1, SQRT2), 8),
    ((Fraction(3, 2), Fraction(5, 3), 2), 9),
    ((SQRT2, 1 + SQRT2, Fraction(7, 3)), 8),
    ((Fraction(1, 3), Fraction(1, 2)), 5),
])
def test_spec_plus_matches_brute_force(axes, L):
    w = spec_plus(EllipsoidParams(axes), L)
    assert list(w.entries) == brute_window(axes, Exact(L))


def test_thread_sharding_is_deterministic():
    a = EllipsoidParams((1, SQRT2, Fraction(5, 3)))
    ref = window_to_json(a, spec_plus(a, 12, threads=1))
    for t in (2, 3, 4, 7):
        assert window_to_json(a, spec_plus(a, 12, threads=t)) == ref


def test_env_thread_count(monkeypatch):
    a = EllipsoidParams((1, SQRT2))
    ref = spec_plus(a, 10, threads=1)
    monkeypatch.setenv("REEBSPEC_THREADS", "4")
    assert spec_plus(a, 10) == ref


rational_axes = st.lists(st.fractions(min_value=Fraction(1, 3), max_value=4, max_denominator=5)
                         .filter(lambda x: x > 0), min_size=1, max_size=3)


@settings(max_examples=40, deadline=None)
@given(rational_axes, st.fractions(min_value=Fraction(1, 4), max_value=5, max_denominator=7))
def test_scaling_invariance(axes, s):
    a = EllipsoidParams(tuple(axes))
    L = Exact(6)
    base = spec_plus(a, L)
    scaled = spec_plus(a.scaled(s), L * s)
    assert [(s * v, m) for v, m in base.entries] == list(scaled.entries)


@settings(max_examples=40, deadline=None)
@given(rational_axes, st.lists(st.fractions(min_value=0, max_value=2, max_denominator=4),
                               min_size=3, max_size=3))
def test_monotone_cumulative_counts(axes, bumps):
    a = EllipsoidParams(tuple(axes))
    a2 = EllipsoidParams(tuple(x + b for x, b in zip(a.axes, bumps)))
    for v in (Fraction(1, 2), 1, 2, Fraction(7, 2), 5):
        assert lattice_count(a, v) >= lattice_count(a2, v)


@settings(max_examples=40, deadline=None)
@given(rational_axes, st.fractions(min_value=Fraction(1, 2), max_value=7, max_denominator=3))
def test_window_count_equals_lattice_count(axes, L):
    a = EllipsoidParams(tuple(axes))
    w = spec_plus(a, L)
    assert w.total_count() == lattice_count(a, L)
    acts = w.actions()
    assert all(x < y for x, y in zip(acts, acts[1:]))
    assert all(m >= 1 for _, m in w.entries) and acts[-1] <= L


def test_lattice_count_quadratic():
    a = EllipsoidParams((1, SQRT2))
    for L in (3, 7, 12):
        assert lattice_count(a, L) == sum(m for _, m in brute_window((1, SQRT2), Exact(L)))


def test_exclude_zero():
    w = spec_plus(EllipsoidParams((1, 2)), 3, include_zero=False)
    assert w.actions()[0] == 1


def test_invalid_params():
    with pytest.raises(ValueError):
        EllipsoidParams((1, 0))
    with pytest.raises(FieldMismatchError):
        EllipsoidParams((Exact(0, 1, 2), Exact(0, 1, 3)))
    with pytest.raises(ValueError):
        spec_plus(EllipsoidParams((1,)), 0)


# -- gaps and null-set diagnostic ---------------------------------------------

def test_gap_statistics_examples():
    assert gap_statistics(spec_plus(EllipsoidParams((1, 1)), 3)).min_gap == 1
    g = gap_statistics(spec_plus(EllipsoidParams((1, SQRT2)), 8))
    assert g.min_gap <= 5 * SQRT2 - 7
    acts = [v for v, _ in brute_window((1, SQRT2), Exact(8))]
    assert g.min_gap == min(y - x for x, y in zip(acts, acts[1:]))
    with pytest.raises(ValueError):
        gap_statistics(spec_plus(EllipsoidParams((5,)), 1))


def test_nullset_examples():
    w = spec_plus(EllipsoidParams((1,)), 3)
    # (-1/4,1/4), (3/4,5/4), (7/4,9/4), (11/4,13/4) clipped to [0,3]
    assert nullset_diagnostic(w, Fraction(1, 4)) == Fraction(3, 2)
    assert nullset_diagnostic(w, 5) == 3
    assert nullset_diagnostic(w, Fraction(1, 10**6)) == Fraction(6, 10**6)


def test_nullset_decreasing_in_eps():
    w = spec_plus(EllipsoidParams((1, SQRT2)), 20)
    vals = [nullset_diagnostic(w, Fraction(1, 2**k)) for k in range(1, 12)]
    assert all(y <= x for x, y in zip(vals, vals[1:]))
    assert vals[-1] < 2 * Fraction(1, 2**11) * len(w)


def test_nullset_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        nullset_diagnostic(spec_plus(EllipsoidParams((1,)), 3), 0)


def test_csv_view():
    text = window_to_csv(spec_plus(EllipsoidParams((1, SQRT2)), 2))
    lines = text.strip().splitlines()
    assert lines[0] == "action_num,action_quad_coeff,d,multiplicity"
    assert lines[2] == "1.000000000000,0.000000000000,1,1"
    assert lines[3] == "0.000000000000,1.000000000000,2,1"
