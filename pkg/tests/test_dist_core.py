import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from domrt.dist_core import (DiscreteDist, DomainError, GatedGeomSpec, ResourceError, Term,
                             TruncatedTailError, dominates_exact, exact_dist, format_spec,
                             geom_pmf, geom_tail, geometric_dist, mixture, parse_spec,
                             quantile_couple, sample_spec, sample_spec_many, spec_mean,
                             spec_variance)


def brute_pmf(spec: GatedGeomSpec, kmax: int) -> np.ndarray:
    """Enumerate gate patterns and geometric values directly (independent of exact_dist)."""
    out = np.zeros(kmax + 1)
    terms = spec.terms
    for fired in itertools.product((0, 1), repeat=len(terms)):
        w = math.prod(t.gate if f else 1 - t.gate for t, f in zip(terms, fired))
        if w == 0:
            continue
        live = [t.succ for t, f in zip(terms, fired) if f]
        for vals in itertools.product(range(1, kmax + 1), repeat=len(live)):
            s = spec.offset + sum(vals)
            if s <= kmax:
                out[s] += w * math.prod((1 - p) ** (v - 1) * p for p, v in zip(live, vals))
    return out


def test_geom_pmf_and_tail_values():
    assert geom_pmf(0.5, 1) == 0.5
    assert geom_pmf(1.0, 1) == 1.0
    assert geom_pmf(0.5, 3) == 0.125
    assert geom_tail(0.5, 1) == 1.0
    assert geom_tail(0.5, 4) == 0.125
    assert geom_tail(0.25, 2) == 0.75
    for bad in [(0.0, 1), (1.5, 1), (0.5, 0)]:
        with pytest.raises(DomainError):
            geom_pmf(*bad)
        with pytest.raises(DomainError):
            geom_tail(*bad)


def test_geom_tail_matches_summed_pmf():
    p = 0.2
    for k in (1, 3, 10):
        s = math.fsum(geom_pmf(p, j) for j in range(k, 400))
        assert abs(s - geom_tail(p, k)) < 1e-12


def test_spec_mean_examples():
    assert spec_mean(GatedGeomSpec(0, [Term(0.5, 0.1)] * 10)) == pytest.approx(50.0, rel=1e-12)
    assert spec_mean(GatedGeomSpec(7, ())) == 7
    assert spec_mean(GatedGeomSpec.geometric_sum([0.25])) == 4


def test_spec_variance_examples():
    assert spec_variance(GatedGeomSpec.geometric_sum([0.5])) == pytest.approx(2.0)
    # gated term: 0.5 E[G^2] - (0.5 E[G])^2 = 0.5 * 6 - 1 = 2
    assert spec_variance(GatedGeomSpec(0, (Term(0.5, 0.5),))) == pytest.approx(2.0)
    assert spec_variance(GatedGeomSpec(0, (Term(0.0, 0.9),))) == 0.0


def test_spec_variance_against_truncated_second_moment():
    g = np.arange(1, 200)
    pmf = 0.5 ** g
    m1, m2 = np.dot(g, pmf), np.dot(g * g, pmf)
    assert spec_variance(GatedGeomSpec(0, (Term(0.5, 0.5),))) == pytest.approx(0.5 * m2 - (0.5 * m1) ** 2)


def test_invalid_terms_and_offset():
    with pytest.raises(DomainError):
        Term(1.2, 0.5)
    with pytest.raises(DomainError):
        Term(0.5, 0.0)
    with pytest.raises(DomainError):
        GatedGeomSpec(-1, ())


def test_exact_dist_examples():
    d = exact_dist(GatedGeomSpec.geometric_sum([1.0]))
    assert d.lo == 1 and d.pmf.tolist() == [1.0] and d.tail_mass == 0.0
    d = exact_dist(GatedGeomSpec.geometric_sum([0.5, 0.5]))
    assert d.lo == 2
    assert d.pmf[:3] == pytest.approx([0.25, 0.25, 0.1875], abs=1e-15)
    d = exact_dist(GatedGeomSpec(0, (Term(0.5, 1.0),)))
    assert d.lo == 0 and d.pmf.tolist() == pytest.approx([0.5, 0.5])


def test_exact_dist_matches_negative_binomial():
    p, r = 0.3, 4
    d = exact_dist(GatedGeomSpec.geometric_sum([p] * r), eps=1e-12)
    k = d.support
    ref = stats.nbinom.pmf(k - r, r, p)
    assert np.max(np.abs(d.pmf - ref)) < 1e-14
    assert d.tail_mass <= 1e-12


def test_exact_dist_matches_brute_force_with_gates():
    spec = GatedGeomSpec(2, (Term(0.4, 0.6), Term(1.0, 0.7), Term(0.8, 0.5)))
    d = exact_dist(spec, eps=1e-10)
    ref = brute_pmf(spec, 18)
    assert np.max(np.abs(d.cdf_at(np.arange(19)) - np.cumsum(ref))) < 1e-9


def test_exact_dist_errors():
    spec = GatedGeomSpec.geometric_sum([1e-6])
    with pytest.raises(ResourceError):
        exact_dist(spec, eps=1e-9)
    with pytest.raises(DomainError):
        exact_dist(GatedGeomSpec.geometric_sum([0.5]), eps=0.5)
    with pytest.raises(DomainError):
        exact_dist(GatedGeomSpec.geometric_sum([0.5]), eps=0.0)


def test_discrete_dist_invariants_checked():
    with pytest.raises(DomainError):
        DiscreteDist(0, [0.5, 0.4])
    with pytest.raises(DomainError):
        DiscreteDist(0, [0.5, 0.4], tail_mass=0.1, eps=0.01)
    with pytest.raises(DomainError):
        DiscreteDist(0, [1.5, -0.5])


def test_distribution_csv_roundtrip():
    d = exact_dist(GatedGeomSpec(3, (Term(0.5, 0.4), Term(1.0, 0.9))), eps=1e-8)
    text = d.to_csv(["spec=test"])
    assert "np.float64" not in text
    lines = text.splitlines()
    assert lines[1] == "k,pmf,cdf" and lines[-1].startswith("# tail_mass=")
    back = DiscreteDist.from_csv(text)
    assert back.lo == d.lo and np.array_equal(back.pmf, d.pmf)
    assert back.tail_mass == d.tail_mass and back.eps == d.eps


def test_parse_and_format_spec():
    s = parse_spec("3 + 1:0.5 + 2*0.5:0.25 + 4*0.3 + 0.5")
    assert s.offset == 3
    assert s.terms == (Term(1, 0.5), Term(0.5, 0.25), Term(0.5, 0.25)) + (Term(1, 0.3),) * 4 \
        + (Term(1, 0.5),)
    assert parse_spec(format_spec(s)) == s
    with pytest.raises(DomainError):
        parse_spec("1 + x:0.5")


def test_sample_spec_examples():
    assert sample_spec(GatedGeomSpec.geometric_sum([1.0]), 12345) == 1
    spec = GatedGeomSpec(1, (Term(0.5, 0.3), Term(1.0, 0.2)))
    assert sample_spec(spec, 99) == sample_spec(spec, 99)
    assert np.array_equal(sample_spec_many(spec, 5, 50), sample_spec_many(spec, 5, 50))
    # inverse transform: ceil(ln 0.3 / ln 0.5) = 2
    assert math.ceil(math.log(0.3) / math.log(0.5)) == 2


def test_dominates_exact_examples():
    a = geometric_dist(0.6, eps=1e-12)
    b = geometric_dist(0.3, eps=1e-12)
    assert dominates_exact(a, a, 1e-9)
    assert dominates_exact(a, b, 1e-9)
    v = dominates_exact(b, a, 1e-9)
    assert not v and v.at == 1 and v.gap == pytest.approx(0.3 - 1e-9)
    with pytest.raises(DomainError):
        dominates_exact(a, b, 0.0)


def test_quantile_couple_examples():
    g5 = geometric_dist(0.5, eps=1e-12)
    g25 = geometric_dist(0.25, eps=1e-12)
    assert quantile_couple(g5, g5, 0.6) == (2, 2)
    assert quantile_couple(g5, g25, 0.7) == (2, 5)
    assert quantile_couple(g5, g25, 0.001) == (1, 1)
    with pytest.raises(TruncatedTailError):
        quantile_couple(g5, g25, 1 - 1e-14)


def test_mixture_weights_and_tails():
    m = mixture([0.25, 0.75], [DiscreteDist.point_mass(2), DiscreteDist.point_mass(5)])
    assert m.lo == 2 and m.pmf.tolist() == [0.25, 0, 0, 0.75]
    assert m.mean == pytest.approx(4.25)


# ---------------------------------------------------------------------------
# properties

probs = st.floats(0.05, 1.0)
gates = st.floats(0.0, 1.0)
small_spec = st.builds(
    lambda off, ts: GatedGeomSpec(off, tuple(Term(g, p) for g, p in ts)),
    st.integers(0, 3), st.lists(st.tuples(gates, probs), min_size=0, max_size=4))


@settings(max_examples=60, deadline=None)
@given(small_spec)
def test_prop_dist_invariants_and_moments(spec):
    eps = 1e-10
    d = exact_dist(spec, eps=eps)
    assert np.all(d.pmf >= 0)
    assert abs(d.pmf.sum() + d.tail_mass - 1) <= 1e-12
    assert d.tail_mass <= eps and d.cdf[-1] >= 1 - eps
    assert np.all(np.diff(d.cdf) >= -1e-15)
    assert d.lo == spec.offset + sum(1 for t in spec.terms if t.gate >= 1.0)
    span = d.hi - d.lo + 1
    assert abs(d.mean - spec_mean(spec)) <= 10 * eps * span * span + 1e-9
    assert abs(d.variance - spec_variance(spec)) <= 1e-6 * max(1.0, spec_variance(spec))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(gates, probs, st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=4))
def test_prop_sum_closure(rows):
    # term-wise: A has larger success probability and smaller gate than B
    a = GatedGeomSpec(0, tuple(Term(g * s, p) for g, p, s, _ in rows))
    b = GatedGeomSpec(0, tuple(Term(g, p * (0.2 + 0.8 * r)) for g, p, _, r in rows))
    da, db = exact_dist(a, 1e-11), exact_dist(b, 1e-11)
    v = dominates_exact(da, db, 1e-9)
    assert v
    assert da.mean <= db.mean + 1e-6


@settings(max_examples=30, deadline=None)
@given(small_spec, small_spec)
def test_prop_coupling_consistent_with_domination(sa, sb):
    da, db = exact_dist(sa, 1e-12), exact_dist(sb, 1e-12)
    if not dominates_exact(da, db, 4e-12):
        return
    for u in np.linspace(1e-3, 1 - 1e-3, 1000):
        qa, qb = quantile_couple(da, db, float(u))
        assert qa <= qb


@settings(max_examples=30, deadline=None)
@given(small_spec, small_spec, small_spec)
def test_prop_domination_reflexive_transitive(sa, sb, sc):
    ds = [exact_dist(s, 1e-12) for s in (sa, sb, sc)]
    assert dominates_exact(ds[0], ds[0], 4e-12)
    if dominates_exact(ds[0], ds[1], 4e-12) and dominates_exact(ds[1], ds[2], 4e-12):
        assert dominates_exact(ds[0], ds[2], 8e-12)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_sampler_within_dkw_band(seed):
    gen = np.random.default_rng(seed)
    m = int(gen.integers(1, 6))
    spec = GatedGeomSpec(int(gen.integers(0, 3)),
                         tuple(Term(float(gen.uniform()), float(gen.uniform(0.05, 1))) for _ in range(m)))
    d = exact_dist(spec, 1e-10)
    x = np.sort(sample_spec_many(spec, seed, 100_000))
    grid = np.arange(d.lo, d.hi + 1)
    ecdf = np.searchsorted(x, grid, side="right") / x.size
    band = math.sqrt(math.log(2 / 1e-3) / (2 * x.size))
    assert np.max(np.abs(ecdf - d.cdf_at(grid))) <= band
