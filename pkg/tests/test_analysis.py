import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from domrt import analysis as an
from domrt import tail_bounds as tb
from domrt.algorithms import SampleSet
from domrt.dist_core import (DiscreteDist, DomainError, GatedGeomSpec, Term, exact_dist,
                             geometric_dist, sample_spec_many, spec_mean)
from domrt.operators import MutationOp


def test_fitness_level_spec_examples():
    d = exact_dist(an.fitness_level_spec([1.0]))
    assert d.lo == 1 and d.pmf.tolist() == [1.0]
    mean = spec_mean(an.preset_spec("onemax", n=10))
    assert mean == pytest.approx(10 * math.e * tb.harmonic_number(10), rel=1e-13)
    with pytest.raises(DomainError):
        an.fitness_level_spec([])
    with pytest.raises(DomainError):
        an.LevelSpec((0.5, 0.0))


def test_preset_examples():
    assert an.preset_levels("onemax", n=2).probs == pytest.approx((2 / (2 * math.e), 1 / (2 * math.e)))
    assert an.preset_spec("general", n=3, p=0.5).terms == (Term(1.0, 0.125),)
    assert an.jump_success_prob(4, 2) == pytest.approx(9 / 256, rel=1e-15)
    assert an.preset_levels("jump", n=4, k=2).probs[-1] == pytest.approx(9 / 256)
    sorting = an.preset_levels("sorting", n=4).probs
    assert len(sorting) == 6 and sorting[0] == pytest.approx(1 / (6 * math.e))
    assert len(an.preset_levels("eulerian", m=9)) == 3
    with pytest.raises(DomainError):
        an.preset_levels("1+lambda", n=10, lam=2)
    with pytest.raises(DomainError):
        an.preset_levels("unknown", n=3)


def test_mu_plus_one_leadingones_preset():
    n, mu = 20, 5
    M = min(math.ceil(n / math.log(math.e * n)), mu)
    probs = an.preset_levels("mu1-lo", n=n, mu=mu).probs
    assert len(probs) == n * M
    assert probs[0] == pytest.approx(1 / mu) and probs[M - 1] == pytest.approx(M / mu / n)
    # the level sum stays below the closed-form guarantee e n (2 mu ln(en) + n)
    assert sum(1 / p for p in probs) <= math.e * n * (2 * mu * math.log(math.e * n) + n)


def test_one_plus_lambda_layout():
    t, L, big, small = an.one_plus_lambda_layout(20, 8)
    assert t == 1 and L == math.floor(20 - 20 / math.log(8))
    levels = an.preset_levels("1+lambda", n=20, lam=8).probs
    assert levels[:big] == (1 - 1 / math.e,) * big and len(levels) == big + small


def test_q_kbit_examples():
    for n in (3, 7):
        assert all(an.q_kbit(n, 1, i) == pytest.approx(1 / n) for i in range(n))
        assert an.q_kbit(n, n, 0) == 1.0
    assert an.q_kbit_exact(4, 2, 1) == Fraction(1, 3)
    assert an.q_kbit(5, 4, 3) == 0.0
    with pytest.raises(DomainError):
        an.q_kbit(4, 5, 0)


def test_q_kbit_by_enumeration():
    # fitness i string 1..1 0 ? ?: improvement iff bit i+1 flips and none of the first i
    import itertools
    n = 6
    for k in range(1, n + 1):
        for i in range(n):
            good = sum(1 for S in itertools.combinations(range(n), k)
                       if i in S and all(j not in S for j in range(i)))
            assert an.q_kbit_exact(n, k, i) == Fraction(good, math.comb(n, k))


def test_optimal_k_examples():
    assert [an.optimal_k(10, i) for i in (0, 4, 9)] == [10, 2, 1]


def test_lo_exact_spec_examples():
    assert spec_mean(an.lo_exact_spec([0.1] * 10)) == pytest.approx(50.0)
    assert spec_mean(an.lo_exact_spec(an.lo_q_for_operator(MutationOp.standard_bit(0.5), 1))) == 1.0
    n, p = 30, 1 / 30
    mean = spec_mean(an.lo_exact_spec(an.lo_q_for_operator(MutationOp.standard_bit(), n)))
    closed = (1 / (2 * p * p)) * ((1 - p) ** (1 - n) - (1 - p))
    direct = 0.5 * math.fsum((1 - p) ** -i / p for i in range(n))
    assert mean == pytest.approx(closed, rel=1e-12) == pytest.approx(direct, rel=1e-12)
    assert mean == pytest.approx(767.78, abs=0.01)
    assert an.lo_expected_runtime(n, p) == pytest.approx(closed, rel=1e-12)
    with pytest.raises(an.InfiniteRuntimeError):
        an.lo_exact_spec([0.5, 0.0])


def test_lo_target_spec_examples():
    q = an.lo_q_for_operator(MutationOp.one_bit(), 10)
    assert an.lo_target_spec(q, 0) == GatedGeomSpec(0, ())
    assert an.lo_target_spec(q, 10) == an.lo_exact_spec(q)
    assert spec_mean(an.lo_target_spec(q, 4)) == pytest.approx(20.0)
    with pytest.raises(DomainError):
        an.lo_target_spec(q, 11)


def test_lo_q_for_operator_examples():
    assert an.lo_q_for_operator(MutationOp.one_bit(), 5) == [0.2] * 5
    assert an.lo_q_for_operator(MutationOp.standard_bit(0.5), 2) == [0.5, 0.25]
    assert an.lo_q_for_operator(MutationOp.mixed_one_two(1.0), 6) == pytest.approx([1 / 6] * 6)
    q = an.lo_q_for_operator(MutationOp.fitness_dependent_rate(), 4)
    assert q[0] == 1.0 and q[1] == pytest.approx(0.25)
    heavy = an.lo_q_for_operator(MutationOp.heavy_tailed(2.0), 8)
    parts = [an.lo_q_for_operator(MutationOp.standard_bit(a / 8), 8) for a in range(1, 5)]
    w = MutationOp.heavy_tailed(2.0).heavy_weights(8)
    assert heavy == pytest.approx(list(np.dot(w, parts)))


def test_optimal_static_rate():
    n = 500
    p = an.optimal_static_rate(n)
    assert 1.55 <= p * n <= 1.65
    e = an.lo_expected_runtime(n, p)
    assert e <= an.lo_expected_runtime(n, 1 / n)
    assert abs(e / n**2 - 0.77) <= 0.03 * 0.77
    # no grid point does better than the search result
    grid = np.linspace(1.0, 2.5, 301) / n
    assert e <= min(an.lo_expected_runtime(n, g) for g in grid) * (1 + 1e-9)


def test_static_unbiased_audit_examples():
    r = np.zeros(11)
    r[1] = 1
    e, ok = an.static_unbiased_audit(10, r)
    assert e == pytest.approx(50.0, abs=1e-9) and ok
    r = np.zeros(11)
    r[2] = 1
    e2, ok2 = an.static_unbiased_audit(10, r)
    assert e2 > 50 and ok2
    # two-bit flips can never fix the last bit: q(10, 2, 9) = 0
    assert an.q_kbit(10, 2, 9) == 0 and e2 == math.inf
    r = np.zeros(11)
    r[1], r[2] = 0.5, 0.5
    q = [0.5 * an.q_kbit(10, 1, i) + 0.5 * an.q_kbit(10, 2, i) for i in range(10)]
    assert an.static_unbiased_audit(10, r).expected_runtime == pytest.approx(
        0.5 * math.fsum(1 / v for v in q))
    r = np.zeros(11)
    r[0] = 1
    assert an.static_unbiased_audit(10, r).expected_runtime == math.inf
    with pytest.raises(DomainError):
        an.static_unbiased_audit(10, np.full(11, 0.5))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=11, max_size=11).filter(lambda v: sum(v[1:]) > 1e-3))
def test_prop_audit_never_beats_rls(r):
    r = np.array(r) / math.fsum(r)
    r[-1] = max(0.0, 1.0 - math.fsum(r[:-1]))
    r = r / math.fsum(r)
    e, ok = an.static_unbiased_audit(10, r)
    assert ok and e >= 50 - 1e-6


def test_mutation_monotone_examples():
    assert an.mutation_monotone_check(6, 0.3, 3, 3)
    assert an.mutation_monotone_check(6, 0.3, 2, 4)
    for a in range(5):
        assert an.mutation_monotone_check(4, 0.5, a, 4)
    uni = an.offspring_ones_dist(4, 0.5, 1)
    assert uni.pmf == pytest.approx(stats.binom.pmf(np.arange(5), 4, 0.5))


def test_offspring_ones_dist_by_simulation():
    gen = np.random.default_rng(0)
    n, p, a = 8, 0.3, 5
    x = np.zeros(n, dtype=bool)
    x[:a] = True
    ones = ((gen.random((50_000, n)) < p) ^ x).sum(axis=1)
    d = an.offspring_ones_dist(n, p, a)
    freq = np.bincount(ones, minlength=n + 1) / ones.size
    assert np.max(np.abs(freq - d.pmf)) < 0.01


def test_dkw_and_empirical_dominates_examples():
    assert an.dkw_band(10**5, 0.01) == pytest.approx(math.sqrt(math.log(200) / 2e5))
    s = SampleSet(sample_spec_many(GatedGeomSpec.geometric_sum([0.2]), 1, 10**5))
    assert an.empirical_dominates(s, s, 0.01)
    g8, g2 = geometric_dist(0.8, 1e-12), geometric_dist(0.2, 1e-12)
    v = an.empirical_dominates(s, g8, 0.01)
    assert not v and v.at == 1 and v.gap > 0.5
    assert an.empirical_dominates(g8, g2, 0.01)
    with pytest.raises(DomainError):
        an.empirical_dominates(s, g8, 0.7)
    cens = SampleSet(np.array([1, 2]), meta={"censored_dropped": 1})
    with pytest.raises(DomainError):
        an.empirical_dominates(cens, g8)


def test_counterexample_examples():
    assert an.counterexample_probs("rs_le2", 4) == 0.12109375
    assert an.counterexample_probs("ea_le2", 4) == pytest.approx(0.125 - 0.75**4 * 0.0625)
    assert round(an.counterexample_probs("ea_le2", 4), 6) == 0.105225
    assert an.counterexample_probs("fitprop", 10, mu=2) == 0.9
    with pytest.raises(DomainError):
        an.counterexample_probs("fitprop", 7, mu=2)


def test_fitprop_examples():
    assert an.fitprop_select_prob([8, 0], 8) == 1.0
    assert an.fitprop_select_prob([9, 1], 8) == 0.9
    assert an.fitprop_select_prob([3, 1, 2], 0) == 1.0
    with pytest.raises(DomainError):
        an.fitprop_select_prob([0, 0], 1)


def test_sssp_params_examples():
    par = an.sssp_theorem_params(8, 7)
    ratio = 4 * math.log(7) / 6
    assert par.delta == pytest.approx(max(ratio, math.sqrt(ratio)))
    assert round(par.delta, 4) == 1.2973
    assert par.p == pytest.approx(1 / (math.e * 42))
    assert par.mean_bound / par.T0 == pytest.approx(1 + 1 / math.log(7))
    assert par.tail(0.0) == 1.0 and par.tail(1.0) == pytest.approx(1 / 7)
    with pytest.raises(DomainError):
        an.sssp_theorem_params(3, 2)


def test_sssp_dominating_dist_is_union_bound():
    d = an.sssp_dominating_dist(8, 7)
    par = an.sssp_theorem_params(8, 7)
    one = stats.nbinom(7, par.p)
    for lam in (500, 2000, 4000):
        assert d.cdf_at(lam) == pytest.approx(max(0.0, 1 - 7 * one.sf(lam - 7)), abs=1e-8)


def test_jump_lower_spec_examples():
    spec = an.jump_lower_spec(8, 2)
    (term,) = spec.terms
    assert term.gate == pytest.approx(1 - math.exp(-1))
    assert term.succ == pytest.approx(8**-2 * (7 / 8) ** 6, rel=1e-15)
    assert round(term.succ, 7) == 0.0070124
    with pytest.raises(DomainError):
        an.jump_lower_spec(8, 3)
    with pytest.raises(DomainError):
        an.jump_lower_spec(8, 1)


def test_rls_monotone_dist_mean():
    n = 6
    d = an.rls_monotone_dist(n)
    expected = math.fsum(stats.binom.pmf(x, n, 0.5) * math.fsum(n / (n - i) for i in range(x, n))
                         for x in range(n + 1))
    assert d.mean == pytest.approx(expected, rel=1e-8)


def test_preset_dist_dispatch():
    assert isinstance(an.preset_dist("sssp", n=8, ell=7), DiscreteDist)
    assert an.preset_spec("lo-exact", n=5) == an.lo_exact_spec([0.2] * 5)
    with pytest.raises(DomainError):
        an.preset_spec("sssp", n=8, ell=7)
