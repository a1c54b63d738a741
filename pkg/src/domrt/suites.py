"""Reproducible check suites behind ``domrt report`` and the acceptance tests.

Each suite returns a :class:`SuiteResult`: rows ``suite,check,expected,observed,
tolerance,pass`` plus optional CDF-overlay data ``lambda,cdf_empirical,cdf_model,band``.
``scale`` shrinks the Monte Carlo run counts for quick smoke runs; the
documented run counts correspond to ``scale=1``.
"""
from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import analysis as an
from . import tail_bounds as tb
from .algorithms import CensoredRunsError, RunConfig, SampleSet, collect_samples
from .benchmarks import WeightedGraph
from .dist_core import DiscreteDist, GatedGeomSpec, exact_dist, spec_mean
from .operators import MutationOp

BASE_SEED = 20_190_801


@dataclass
class Row:
    check: str
    expected: str
    observed: str
    tolerance: str
    passed: bool


@dataclass
class SuiteResult:
    suite: str
    rows: list[Row] = field(default_factory=list)
    overlay: list[tuple[str, int, float, float, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(r.passed for r in self.rows)

    def add(self, check, expected, observed, tolerance, passed) -> bool:
        self.rows.append(Row(check, str(expected), str(observed), str(tolerance), bool(passed)))
        return bool(passed)

    def add_overlay(self, label: str, samples: SampleSet, model: DiscreteDist,
                    alpha: float = 1e-3, max_points: int = 400) -> None:
        grid = np.unique(samples.values)
        if grid.size > max_points:
            grid = np.unique(np.quantile(samples.values, np.linspace(0, 1, max_points),
                                         method="inverted_cdf")).astype(np.int64)
        band = an.dkw_band(samples.n_samples, alpha)
        for lam, fe, fm in zip(grid, samples.ecdf(grid), model.cdf_at(grid)):
            self.overlay.append((label, int(lam), float(fe), float(fm), band))

    def rows_csv(self) -> str:
        buf = io.StringIO()
        buf.write("suite,check,expected,observed,tolerance,pass\n")
        for r in self.rows:
            cells = [self.suite, r.check, r.expected, r.observed, r.tolerance,
                     "true" if r.passed else "false"]
            buf.write(",".join(_csv_cell(c) for c in cells) + "\n")
        return buf.getvalue()

    def overlay_csv(self) -> str:
        buf = io.StringIO()
        buf.write("series,lambda,cdf_empirical,cdf_model,band\n")
        for label, lam, fe, fm, band in self.overlay:
            buf.write(f"{_csv_cell(label)},{lam},{fe!r},{fm!r},{band!r}\n")
        return buf.getvalue()


def _csv_cell(text: str) -> str:
    text = str(text)
    if any(c in text for c in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def _runs(n: int, scale: float) -> int:
    return max(10, int(round(n * scale)))


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


# ---------------------------------------------------------------------------


def suite_rls_lo(scale: float = 1.0) -> SuiteResult:
    res = SuiteResult("rls-lo")
    n = 50
    model_spec = an.lo_exact_spec(an.lo_q_for_operator(MutationOp.one_bit(), n))
    mean = spec_mean(model_spec)
    res.add("model mean = n^2/2", 1250, repr(mean), "1e-9 rel", _rel(mean, 1250) <= 1e-9)
    t = time.perf_counter()
    runs = _runs(10_000, scale)
    s = collect_samples(RunConfig("rls", "leadingones", n), runs, BASE_SEED + 1)
    elapsed = time.perf_counter() - t
    res.add(f"empirical mean ({runs} runs)", 1250, f"{s.mean():.3f}", "2% rel",
            _rel(s.mean(), 1250) <= 0.02)
    res.add("simulation wall time [s]", "< 60", f"{elapsed:.2f}", "60 s", elapsed < 60)
    res.add_overlay("rls leadingones n=50", s, exact_dist(model_spec))
    return res


def suite_ea_lo(scale: float = 1.0) -> SuiteResult:
    res = SuiteResult("ea-lo")
    n, p = 50, 1 / 50
    spec = an.lo_exact_spec(an.lo_q_for_operator(MutationOp.standard_bit(), n))
    mean = spec_mean(spec)
    closed = an.lo_expected_runtime(n, p)
    res.add("spec_mean vs closed form", repr(closed), repr(mean), "1e-9 rel",
            _rel(mean, closed) <= 1e-9)
    runs = _runs(10_000, scale)
    s = collect_samples(RunConfig("ea", "leadingones", n), runs, BASE_SEED + 2)
    res.add(f"empirical mean ({runs} runs)", f"{closed:.3f}", f"{s.mean():.3f}", "2% rel",
            _rel(s.mean(), closed) <= 0.02)
    ratio = closed / n**2
    res.add("E[T]/n^2", "[0.82, 0.90]", f"{ratio:.5f}", "interval", 0.82 <= ratio <= 0.90)
    res.add_overlay("ea leadingones n=50", s, exact_dist(spec))
    return res


def suite_static_rate(scale: float = 1.0) -> SuiteResult:
    res = SuiteResult("static-rate")
    n = 500
    p = an.optimal_static_rate(n)
    e_opt = an.lo_expected_runtime(n, p)
    res.add("optimal rate * n", "[1.55, 1.65]", f"{p * n:.6f}", "interval", 1.55 <= p * n <= 1.65)
    res.add("E[T](p*)/n^2", "[0.74, 0.80]", f"{e_opt / n**2:.6f}", "interval",
            0.74 <= e_opt / n**2 <= 0.80)
    e_std = an.lo_expected_runtime(n, 1 / n)
    res.add("E[T](p*) <= E[T](1/n)", f"<= {e_std:.3f}", f"{e_opt:.3f}", "exact", e_opt <= e_std)
    return res


def suite_rls_optimality(scale: float = 1.0) -> SuiteResult:
    res = SuiteResult("rls-optimality")
    n = 10
    gen = np.random.default_rng(BASE_SEED + 4)
    mixtures = [gen.dirichlet(np.ones(n + 1)) for _ in range(800)]
    for eta in np.logspace(-8, -1, 100):
        r = eta * gen.dirichlet(np.ones(n + 1))
        r[1] += 1.0 - eta
        mixtures.append(r)
    for k in range(n + 1):
        mixtures.append(np.eye(n + 1)[k])
    sparse = gen.dirichlet(np.full(n + 1, 0.2), size=1000 - len(mixtures))
    mixtures.extend(sparse)
    low, bad_equal = math.inf, 0
    for r in mixtures:
        r = r / r.sum()
        r[-1] = 1.0 - math.fsum(r[:-1])
        if r[-1] < 0:
            r[-1] = 0.0
            r = r / math.fsum(r)
        e, holds = an.static_unbiased_audit(n, r)
        low = min(low, e)
        if not holds:
            bad_equal += 1
        if abs(e - 50.0) <= 1e-9 and abs(r[1] - 1.0) > 1e-9:
            bad_equal += 1
    res.add(f"min E[T] over {len(mixtures)} mixtures", ">= 50", repr(low), "1e-6",
            low >= 50 - 1e-6)
    res.add("E[T] = 50 only at r_1 = 1", 0, bad_equal, "1e-9", bad_equal == 0)
    wrong = 0
    for nn in range(1, 51):
        for i in range(nn):
            best = max(an.q_kbit_exact(nn, k, i) for k in range(1, nn + 1))
            if an.q_kbit_exact(nn, an.optimal_k(nn, i), i) != best:
                wrong += 1
    res.add("optimal_k is an argmax for n <= 50", 0, wrong, "exact", wrong == 0)
    return res


def suite_kbit_identity(scale: float = 1.0) -> SuiteResult:
    res = SuiteResult("kbit-identity")
    worst = 0.0
    for n in range(1, 21):
        for k in range(1, n + 1):
            total = math.fsum(an.q_kbit(n, k, i) for i in range(n))
            worst = max(worst, abs(total - 1.0))
    res.add("max |sum_i q(n,k,i) - 1|, n <= 20", 0, repr(worst), "1e-12", worst <= 1e-12)
    return res


def suite_fitness_level(scale: float = 1.0) -> SuiteResult:
    res = SuiteResult("fitness-level")
    n, alpha = 20, 1e-3
    runs = _runs(10_000, scale)
    s = collect_samples(RunConfig("ea", "onemax", n), runs, BASE_SEED + 6)
    model = an.preset_dist("onemax", n=n)
    v = an.empirical_dominates(s, model, alpha)
    res.add("samples dominated by onemax level model", "consistent", str(v), f"alpha={alpha}",
            bool(v))
    band = an.dkw_band(runs, alpha)
    for delta in (0.5, 1.0):
        thr = (1 + delta) * math.e * n * math.log(n)
        frac = s.frac_at_least(thr)
        bound = n**-delta
        res.add(f"Pr[T >= (1+{delta}) e n ln n]", f"<= {bound:.5f} + {band:.5f}",
                f"{frac:.5f}", "DKW band", frac <= bound + band)
    res.add_overlay("ea onemax n=20", s, model)
    return res


LO_OPERATORS = (
    MutationOp.one_bit(),
    MutationOp.k_bit(2),
    MutationOp.standard_bit(),
    MutationOp.mixed_one_two(0.5),
    MutationOp.fitness_dependent_k(),
    MutationOp.fitness_dependent_rate(),
)


def suite_lo_exactness(scale: float = 1.0) -> SuiteResult:
    res = SuiteResult("lo-exactness")
    n, alpha = 12, 1e-3
    runs = _runs(20_000, scale)
    for j, op in enumerate(LO_OPERATORS):
        q = an.lo_q_for_operator(op, n)
        try:
            model = exact_dist(an.lo_exact_spec(q))
        except an.InfiniteRuntimeError as exc:
            probe = _runs(200, scale)
            cfg = RunConfig("ea", "leadingones", n, op=op, budget=100_000)
            try:
                collect_samples(cfg, probe, BASE_SEED + 70 + j)
                stuck = 0
            except CensoredRunsError as err:
                stuck = err.count
            res.add(f"{op}: two-sided DKW agreement", "consistent both ways",
                    f"model infinite ({exc}); {stuck}/{probe} runs censored at budget 1e5",
                    f"alpha={alpha}", False)
            # a level with q_i = 0 is visited with probability 1/2 and never left
            never = 1.0 - 0.5 ** sum(1 for v in q if v == 0.0)
            se = math.sqrt(never * (1 - never) / probe)
            res.add(f"{op}: fraction of runs that never finish (supplementary)",
                    f"{never:.4f}", f"{stuck / probe:.4f}", f"3 SE = {3 * se:.4f}",
                    abs(stuck / probe - never) <= 3 * se)
            a = n - 1
            tgt = exact_dist(an.lo_target_spec(q, a))
            s = collect_samples(RunConfig("ea", "leadingones", n, op=op, target=a), runs,
                                BASE_SEED + 80 + j)
            up, down = an.two_sided_agreement(s, tgt, alpha)
            res.add(f"{op}: time to fitness {a}, two-sided DKW agreement (supplementary)",
                    "consistent both ways", f"{up}; {down}", f"alpha={alpha}",
                    bool(up) and bool(down))
            continue
        s = collect_samples(RunConfig("ea", "leadingones", n, op=op), runs, BASE_SEED + 70 + j)
        up, down = an.two_sided_agreement(s, model, alpha)
        res.add(f"{op}: two-sided DKW agreement ({runs} runs)", "consistent both ways",
                f"{up}; {down}", f"alpha={alpha}", bool(up) and bool(down))
        res.add_overlay(f"{op} leadingones n=12", s, model)
    return res


def bound_battery(count: int = 50, seed: int = BASE_SEED + 8) -> list[GatedGeomSpec]:
    """Fixed randomized battery of plain geometric sums with 1..12 terms."""
    gen = np.random.default_rng(seed)
    specs = []
    for j in range(count):
        terms = j % 12 + 1
        if j % 5 == 0:
            probs = [float(gen.uniform(0.05, 1.0))] * terms
        else:
            probs = [float(v) for v in gen.uniform(0.05, 1.0, terms)]
        specs.append(GatedGeomSpec.geometric_sum(probs))
    return specs


UPPER_DELTAS = (0.1, 0.25, 0.5, 1.0, 2.0)
LOWER_DELTAS = (0.1, 0.25, 0.5, 0.9, 1.0)
WITT_FRACTIONS = (0.1, 0.5, 1.0, 2.0)


def suite_bound_soundness(scale: float = 1.0) -> SuiteResult:
    res = SuiteResult("bound-soundness")
    stats: dict[str, list] = {}
    for spec in bound_battery():
        mu = spec_mean(spec)
        for fam in tb.applicable_families(spec):
            if fam in ("witt", "witt-lower"):
                params = [f * mu for f in WITT_FRACTIONS]
            elif fam in ("janson-lower", "middle", "scheideler-lower"):
                params = LOWER_DELTAS
            else:
                params = UPPER_DELTAS
            for prm in params:
                v = tb.check_family(fam, spec, prm)
                st = stats.setdefault(fam, [0, 0, 0.0, ""])
                st[0] += 1
                if not v:
                    st[1] += 1
                    if v.gap > st[2]:
                        st[2] = v.gap
                        st[3] = f"{len(spec)} terms, param {prm:g}: {v.label}"
    for fam in sorted(stats):
        total, fails, gap, where = stats[fam]
        obs = f"{fails}/{total} fail" + (f"; worst gap {gap:.4g} ({where})" if fails else "")
        res.add(f"{fam} sound on 50-spec battery", "0 failures", obs, "10 eps", fails == 0)

    gen = np.random.default_rng(BASE_SEED + 88)
    up_bad = lo_bad = 0
    for _ in range(1000):
        n = int(gen.integers(1, 51))
        p = float(10 ** gen.uniform(-3, 0))
        mu = n / p
        d = float(gen.uniform(0, 5))
        vals = [tb.geom_sum_upper(f, n, p, mu, d) for f in ("janson1", "janson2", "scheideler",
                                                            "weak")]
        if any(a > b * (1 + 1e-12) + 1e-300 for a, b in zip(vals, vals[1:])):
            up_bad += 1
        dl = float(gen.uniform(0, 1))
        low = [tb.geom_sum_lower(f, p, mu, dl) for f in tb.LOWER_FAMILIES]
        if any(a > b * (1 + 1e-12) + 1e-300 for a, b in zip(low, low[1:])):
            lo_bad += 1
    res.add("janson1 <= janson2 <= scheideler <= weak on 1000 points", 0, up_bad, "1e-12 rel",
            up_bad == 0)
    res.add("lower janson <= middle <= scheideler on 1000 points", 0, lo_bad, "1e-12 rel",
            lo_bad == 0)
    return res


def suite_coupon(scale: float = 1.0) -> SuiteResult:
    res = SuiteResult("coupon")
    n, m, k = 10, 3, 10
    spec = tb.coupon_spec(n, m, k)
    mean, _ = tb.coupon_sum_bound(n, m, k, 0.0)
    exact_mean = 3 * 10 * tb.harmonic_number(10)
    res.add("E[Y] = m n H_k vs spec_mean", repr(exact_mean), repr(spec_mean(spec)), "1e-9",
            abs(spec_mean(spec) - exact_mean) <= 1e-9 and abs(mean - exact_mean) <= 1e-9)
    for delta in (0.5, 1.0, 2.0):
        thr = tb.coupon_threshold(n, m, k, delta)
        bound = tb.coupon_sum_bound(n, m, k, delta)[1]
        v = tb.validate_bound(spec, thr, bound)
        res.add(f"tail bound >= exact tail, delta={delta}", f"bound {bound:.6f}", v.label,
                "10 eps", bool(v))
    return res


def suite_onemax_easiest(scale: float = 1.0) -> SuiteResult:
    res = SuiteResult("onemax-easiest")
    n, mu, p, alpha = 8, 3, 1 / 8, 1e-3
    runs = _runs(10_000, scale)
    ref = collect_samples(RunConfig("ea-best-of-mu", "onemax", n, rate=p, mu=mu), runs,
                          BASE_SEED + 10, "evaluations")
    for j, bench in enumerate(("leadingones", "jump2")):
        other = collect_samples(RunConfig("mu+1", bench, n, rate=p, mu=mu), runs,
                                BASE_SEED + 100 + j, "evaluations")
        v = an.empirical_dominates(ref, other, alpha)
        res.add(f"(1+1) EA_mu on onemax dominated by (3+1) EA on {bench}", "consistent",
                str(v), f"alpha={alpha}", bool(v))
    fails = total = 0
    for nn in range(1, 11):
        for pp in np.arange(1, 11) * 0.05:
            for a in range(nn + 1):
                for b in range(a, nn + 1):
                    total += 1
                    if not an.mutation_monotone_check(nn, float(pp), a, b):
                        fails += 1
    res.add(f"mutation monotonicity, n <= 10 ({total} cases)", 0, fails, "1e-12", fails == 0)
    return res


def suite_counterexample(scale: float = 1.0) -> SuiteResult:
    res = SuiteResult("counterexample")
    n = 4
    runs = _runs(1_000_000, scale)
    obs = {}
    for j, (key, algo) in enumerate((("rs_le2", "rs"), ("ea_le2", "ea"))):
        s = collect_samples(RunConfig(algo, "onemax", n), runs, BASE_SEED + 110 + j,
                            "evaluations")
        frac = float(s.ecdf(2))
        exact = an.counterexample_probs(key, n)
        se = math.sqrt(exact * (1 - exact) / runs)
        obs[key] = frac
        res.add(f"{algo}: Pr[evaluations <= 2]", f"{exact:.8f}", f"{frac:.6f}",
                f"3 SE = {3 * se:.6f}", abs(frac - exact) <= 3 * se)
    res.add("random search beats the EA at 2 evaluations", "rs > ea",
            f"{obs['rs_le2']:.6f} vs {obs['ea_le2']:.6f}", "strict",
            obs["rs_le2"] > obs["ea_le2"])
    bad = 0
    for mu in range(2, 51):
        pop = [9.0] + [1.0] * (mu - 1)  # n = 10 after the +0.1n shift
        if an.fitprop_select_prob(pop, 8.0) != 9.0 / (mu + 8) or \
                an.fitprop_select_prob([8.0] + [0.0] * (mu - 1), 8.0) != 1.0:
            bad += 1
    res.add("fitness-proportional selection = 9/(mu+8), mu in [2..50]", 0, bad, "exact",
            bad == 0)
    return res


def suite_sssp(scale: float = 1.0) -> SuiteResult:
    res = SuiteResult("sssp")
    n, alpha = 8, 1e-3
    g = WeightedGraph.path(n)
    ell = g.hop_radius()
    par = an.sssp_theorem_params(n, ell)
    runs = _runs(1_000, scale)
    t = time.perf_counter()
    s = collect_samples(RunConfig("sssp", graph=g), runs, BASE_SEED + 12)
    elapsed = time.perf_counter() - t
    res.add("empirical mean <= (1 + 1/ln(n-1)) T0", f"<= {par.mean_bound:.2f}",
            f"{s.mean():.2f}", "exact", s.mean() <= par.mean_bound)
    band = an.dkw_band(runs, alpha)
    for eps in (0.5, 1.0):
        frac = s.frac_at_least((1 + eps) * par.T0)
        res.add(f"Pr[T >= (1+{eps}) T0]", f"<= {par.tail(eps):.5f} + {band:.5f}",
                f"{frac:.5f}", "DKW band", frac <= par.tail(eps) + band)
    res.add("simulation wall time [s]", "< 300", f"{elapsed:.2f}", "300 s", elapsed < 300)
    res.add_overlay("sssp path n=8", s, an.sssp_dominating_dist(n, ell))
    return res


def suite_jump_sandwich(scale: float = 1.0) -> SuiteResult:
    res = SuiteResult("jump-sandwich")
    n, k, alpha = 8, 2, 1e-3
    runs = _runs(1_000, scale)
    s = collect_samples(RunConfig("ea", "jump2", n, budget=10**7), runs, BASE_SEED + 13)
    lower = exact_dist(an.jump_lower_spec(n, k))
    upper = an.preset_dist("jump", n=n, k=k)
    v_lo = an.empirical_dominates(lower, s, alpha)
    v_up = an.empirical_dominates(s, upper, alpha)
    res.add("lower model dominated by samples", "consistent", str(v_lo), f"alpha={alpha}",
            bool(v_lo))
    res.add("samples dominated by jump level model", "consistent", str(v_up), f"alpha={alpha}",
            bool(v_up))
    res.add_overlay("jump2 n=8 vs lower model", s, lower)
    res.add_overlay("jump2 n=8 vs level model", s, upper)
    return res


SUITES: dict[str, Callable[[float], SuiteResult]] = {
    "rls-lo": suite_rls_lo,
    "ea-lo": suite_ea_lo,
    "static-rate": suite_static_rate,
    "rls-optimality": suite_rls_optimality,
    "kbit-identity": suite_kbit_identity,
    "fitness-level": suite_fitness_level,
    "lo-exactness": suite_lo_exactness,
    "bound-soundness": suite_bound_soundness,
    "coupon": suite_coupon,
    "onemax-easiest": suite_onemax_easiest,
    "counterexample": suite_counterexample,
    "sssp": suite_sssp,
    "jump-sandwich": suite_jump_sandwich,
}


def run_suite(name: str, scale: float = 1.0) -> SuiteResult:
    try:
        fn = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; valid: list, {', '.join(SUITES)}") from None
    return fn(scale)
