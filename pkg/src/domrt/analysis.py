"""Runtime models: fitness-level presets, exact LeadingOnes distributions,
optimality checks for mutation operators, and empirical domination tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.stats import binom

from .algorithms import SampleSet
from .dist_core import (
    DiscreteDist,
    DomainError,
    GatedGeomSpec,
    Term,
    Verdict,
    dominates_exact,
    exact_dist,
    mixture,
)
from .operators import MutationOp


class InfiniteRuntimeError(DomainError):
    """Some level can never be left, so the expected runtime is infinite."""


@dataclass(frozen=True)
class LevelSpec:
    """Lower bounds p_1..p_{m-1} on the probability of leaving each non-optimal level."""

    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if not probs:
            raise DomainError("a level spec needs at least one level")
        for p in probs:
            if not 0.0 < p <= 1.0:
                raise DomainError(f"level probability {p!r} outside (0, 1]")
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return len(self.probs)


def fitness_level_spec(levels: LevelSpec | Sequence[float]) -> GatedGeomSpec:
    """Dominating runtime sum_i Geom(p_i)."""
    if not isinstance(levels, LevelSpec):
        levels = LevelSpec(tuple(levels))
    return GatedGeomSpec.geometric_sum(levels.probs)


# ---------------------------------------------------------------------------
# presets

PRESET_IDS = ("onemax", "sorting", "mu1-lo", "jump", "general", "eulerian", "1+lambda",
              "sssp", "jump-lower", "lo-exact", "rls-monotone")


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


def jump_success_prob(n: int, k: int) -> float:
    """P_k = n^-k (1 - 1/n)^(n-k): the probability of jumping the gap from n - k ones."""
    return n ** -k * (1.0 - 1.0 / n) ** (n - k)


def one_plus_lambda_layout(n: int, lam: int) -> tuple[int, int, int, int]:
    """(t, L, number of Geom(1 - 1/e) terms, number of small-probability terms).

    t = floor((ln lam - 1) / (2 ln ln lam)) is clamped to at least 1; it is 0 for
    lam below about 35, where grouping t = 0 levels is meaningless.
    """
    _need(lam >= 3, "the (1+lambda) preset needs lambda >= 3")
    _need(n >= 2, "n must be >= 2")
    ll = math.log(lam)
    t = max(1, math.floor((ll - 1.0) / (2.0 * math.log(ll))))
    L = math.floor(n - n / ll)
    en_l = math.e * n / lam
    t0 = math.ceil(L / t) + math.ceil(n / ll) - math.ceil(en_l) + 1
    tail_terms = max(0, math.ceil(en_l - 1.0))
    return t, L, max(0, t0), tail_terms


def preset_levels(name: str, n: int = 0, k: int = 0, p: float | None = None, mu: int = 1,
                  lam: int = 0, m: int = 0) -> LevelSpec:
    """Level-leaving probability lower bounds of a named fitness-level argument."""
    if name == "onemax":
        _need(n >= 1, "n must be >= 1")
        return LevelSpec(tuple((n - i) / (math.e * n) for i in range(n)))
    if name == "sorting":
        _need(n >= 2, "sorting needs n >= 2")
        N = math.comb(n, 2)
        return LevelSpec(tuple(i / (math.e * N) for i in range(1, N + 1)))
    if name == "mu1-lo":
        _need(n >= 1 and mu >= 1, "need n >= 1 and mu >= 1")
        M = min(math.ceil(n / math.log(math.e * n)), mu)
        probs = []
        for a in range(n):
            keep = (1.0 - 1.0 / n) ** a
            probs += [b / mu * keep for b in range(1, M)]
            probs.append(M / mu / n * keep)
        return LevelSpec(tuple(probs))
    if name == "jump":
        _need(n >= 1 and 1 <= k <= n, "jump needs 1 <= k <= n")
        en = math.e * n
        probs = [(n - i) / en for i in range(1, k)]
        probs += [(n - i) / en for i in range(n - k)]
        probs.append(jump_success_prob(n, k))
        return LevelSpec(tuple(probs))
    if name == "general":
        _need(n >= 1, "n must be >= 1")
        _need(p is not None and 0.0 < p <= 0.5, "general preset needs 0 < p <= 1/2")
        return LevelSpec((p ** n,))
    if name == "eulerian":
        _need(m >= 3, "eulerian preset needs m >= 3 edges")
        return LevelSpec(tuple(i / (2 * math.e * m) for i in range(1, m // 3 + 1)))
    if name == "1+lambda":
        _, _, big, small = one_plus_lambda_layout(n, lam)
        probs = [1.0 - 1.0 / math.e] * big
        probs += [min(1.0, 0.5 * lam * i / (math.e * n)) for i in range(1, small + 1)]
        return LevelSpec(tuple(probs))
    raise DomainError(f"unknown level preset {name!r}; valid: {', '.join(PRESET_IDS)}")


def preset_spec(name: str, **params) -> GatedGeomSpec:
    """Gated-geometric spec of any preset except ``sssp`` (which is not a sum)."""
    if name == "jump-lower":
        return jump_lower_spec(params.get("n", 0), params.get("k", 0))
    if name == "lo-exact":
        op = params.get("op") or MutationOp.one_bit()
        return lo_exact_spec(lo_q_for_operator(op, params.get("n", 0)))
    if name == "sssp":
        raise DomainError("the sssp preset is a maximum, not a sum; use preset_dist")
    if name == "rls-monotone":
        raise DomainError("the rls-monotone preset is a mixture; use preset_dist")
    keys = ("n", "k", "p", "mu", "lam", "m")
    return fitness_level_spec(preset_levels(name, **{k: params[k] for k in keys if k in params}))


def preset_dist(name: str, eps: float = 1e-9, **params) -> DiscreteDist:
    if name == "sssp":
        return sssp_dominating_dist(params.get("n", 0), params.get("ell", 0), eps)
    if name == "rls-monotone":
        return rls_monotone_dist(params.get("n", 0), eps)
    return exact_dist(preset_spec(name, **params), eps)


# ---------------------------------------------------------------------------
# LeadingOnes


def q_kbit_exact(n: int, k: int, i: int) -> Fraction:
    """C(n-i-1, k-1) / C(n, k): flip bit i+1 and none of the first i with k distinct flips."""
    _need(1 <= k <= n, f"k={k} outside [1..{n}]")
    _need(0 <= i <= n - 1, f"i={i} outside [0..{n - 1}]")
    if k - 1 > n - i - 1:
        return Fraction(0)
    return Fraction(math.comb(n - i - 1, k - 1), math.comb(n, k))


def q_kbit(n: int, k: int, i: int) -> float:
    return float(q_kbit_exact(n, k, i))


def optimal_k(n: int, i: int) -> int:
    """Number of bits maximizing q_kbit(n, ., i): floor(n / (i+1))."""
    _need(n >= 1 and 0 <= i <= n - 1, f"i={i} outside [0..{n - 1}]")
    return n // (i + 1)


def lo_exact_spec(q: Sequence[float]) -> GatedGeomSpec:
    """Runtime of an unbiased elitist algorithm on LeadingOnes: sum_i X_i Geom(q_i), X_i ~ Bern(1/2)."""
    q = [float(v) for v in q]
    _need(len(q) >= 1, "need at least one improvement probability")
    for i, v in enumerate(q):
        if v == 0.0:
            raise InfiniteRuntimeError(f"q_{i} = 0: expected runtime is infinite")
        _need(0.0 < v <= 1.0, f"q_{i}={v!r} outside (0, 1]")
    return GatedGeomSpec(0, tuple(Term(0.5, v) for v in q))


def lo_target_spec(q: Sequence[float], a: int) -> GatedGeomSpec:
    """Time until fitness at least a is reached."""
    _need(0 <= a <= len(q), f"a={a} outside [0..{len(q)}]")
    if a == 0:
        return GatedGeomSpec(0, ())
    return lo_exact_spec(list(q)[:a])


def lo_q_for_operator(op: MutationOp, n: int) -> list[float]:
    """Improvement probabilities q_0..q_{n-1} of ``op`` on LeadingOnes."""
    _need(n >= 1, "n must be >= 1")
    op.validate_for(n)
    idx = range(n)
    if op.kind == "onebit":
        return [1.0 / n] * n
    if op.kind == "kbit":
        return [q_kbit(n, op.k, i) for i in idx]
    if op.kind == "sbm":
        p = op.rate(n)
        return [(1.0 - p) ** i * p for i in idx]
    if op.kind == "posdep":
        return list(op.probs)
    if op.kind == "posdep-ea":
        out, keep = [], 1.0
        for pi in op.probs:
            out.append(keep * pi)
            keep *= 1.0 - pi
        return out
    if op.kind == "fdk":
        return [q_kbit(n, optimal_k(n, i), i) for i in idx]
    if op.kind == "fdrate":
        return [(1.0 - 1.0 / (i + 1)) ** i / (i + 1) for i in idx]
    if op.kind == "mixed":
        P = op.rate(n)
        if n == 1:
            return [1.0]
        return [P / n + 2.0 * (1.0 - P) * (n - i - 1) / (n * (n - 1)) for i in idx]
    if op.kind == "heavy":
        w = op.heavy_weights(n)
        rates = np.arange(1, w.size + 1) / n
        return [float(np.dot(w, (1.0 - rates) ** i * rates)) for i in idx]
    raise DomainError(f"no LeadingOnes model for operator {op.kind!r}")


def lo_expected_runtime(n: int, p: float) -> float:
    """(1/(2p^2)) ((1-p)^(1-n) - (1-p)) for standard-bit mutation with rate p."""
    _need(n >= 1 and 0.0 < p < 1.0, "need n >= 1 and 0 < p < 1")
    return (1.0 - p) * math.expm1(-n * math.log1p(-p)) / (2.0 * p * p)


def optimal_static_rate(n: int, tol: float = 1e-6) -> float:
    """Mutation rate in (0, 1/2] minimizing the expected LeadingOnes runtime.

    Golden-section search on [1e-9, 1/2], assuming unimodality there, stopped
    once the bracket is below ``tol`` relative to its midpoint.
    """
    _need(n >= 2, "n must be >= 2")
    f = lambda p: lo_expected_runtime(n, p)  # noqa: E731
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = 1e-9, 0.5
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol * 0.5 * (a + b):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    best = 0.5 * (a + b)
    return 0.5 if f(0.5) < f(best) else best


class AuditResult(NamedTuple):
    expected_runtime: float
    lower_bound_holds: bool


def static_unbiased_audit(n: int, r: Sequence[float]) -> AuditResult:
    """Expected LeadingOnes runtime of the operator flipping k bits with probability r_k."""
    _need(n >= 1, "n must be >= 1")
    r = np.asarray(r, dtype=float)
    _need(r.shape == (n + 1,), f"mixture needs n+1 = {n + 1} weights")
    _need(bool(np.all(r >= 0)), "mixture weights must be non-negative")
    _need(abs(math.fsum(r) - 1.0) <= 1e-12, "mixture weights must sum to 1")
    qk = np.array([[q_kbit(n, k, i) for i in range(n)] for k in range(1, n + 1)])
    q = r[1:] @ qk
    ident = abs(math.fsum(q) - math.fsum(r[1:]))
    if ident > 1e-10:
        raise ArithmeticError(f"sum_i q_i differs from sum_(k>=1) r_k by {ident:.3g}")
    if np.any(q <= 0.0):
        return AuditResult(math.inf, True)
    with np.errstate(over="ignore"):  # q_i below ~1e-308 means an infinite runtime anyway
        e = 0.5 * math.fsum(1.0 / q)
    return AuditResult(e, e >= 0.5 * n * n - 1e-6)


def offspring_ones_dist(n: int, p: float, a: int) -> DiscreteDist:
    """Exact law of |x'|_1 when x has a ones and every bit flips with probability p."""
    _need(0 <= a <= n, f"a={a} outside [0..{n}]")
    lose = binom.pmf(np.arange(a + 1), a, p)[::-1]  # ones kept: a - Bin(a, p)
    gain = binom.pmf(np.arange(n - a + 1), n - a, p)
    pmf = np.convolve(lose, gain)
    pmf = pmf / math.fsum(pmf)
    return DiscreteDist(0, pmf)


def mutation_monotone_check(n: int, p: float, a: int, b: int, slack: float = 1e-12) -> Verdict:
    """Exact check that a <= b ones implies |x'|_1 is dominated by |y'|_1."""
    _need(0 <= a <= b <= n, "need 0 <= a <= b <= n")
    _need(0.0 < p <= 0.5, "need 0 < p <= 1/2")
    return dominates_exact(offspring_ones_dist(n, p, a), offspring_ones_dist(n, p, b), slack)


# ---------------------------------------------------------------------------
# empirical domination


def dkw_band(n_samples: int, alpha: float) -> float:
    """Half-width sqrt(ln(2/alpha) / (2N)) of the two-sided DKW confidence band."""
    _need(0.0 < alpha < 1.0, "alpha must lie in (0, 1)")
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n_samples))


def _cdf_and_band(x, alpha):
    if isinstance(x, SampleSet):
        if "censored_dropped" in x.meta:
            raise DomainError("sample set had censored runs")
        return x.ecdf, dkw_band(x.n_samples, alpha), x.values
    if isinstance(x, DiscreteDist):
        return x.cdf_at, x.eps, x.support
    raise DomainError(f"expected SampleSet or DiscreteDist, got {type(x).__name__}")


def empirical_dominates(a, b, alpha: float = 1e-3) -> Verdict:
    """Test a <= b (stochastically) with DKW bands; refuted iff F_a + e_a < F_b - e_b somewhere.

    A consistent verdict is not a proof of domination.
    """
    _need(0.0 < alpha < 0.5, "alpha must lie in (0, 1/2)")
    fa, ea, pa = _cdf_and_band(a, alpha)
    fb, eb, pb = _cdf_and_band(b, alpha)
    grid = np.union1d(pa, pb)
    gap = (fb(grid) - eb) - (fa(grid) + ea)
    bad = np.flatnonzero(gap > 0)
    if bad.size:
        i = int(bad[np.argmax(gap[bad])])
        return Verdict(False, int(grid[i]), float(gap[i]), "refuted")
    return Verdict(True, label="consistent")


def two_sided_agreement(a, b, alpha: float = 1e-3) -> tuple[Verdict, Verdict]:
    return empirical_dominates(a, b, alpha), empirical_dominates(b, a, alpha)


# ---------------------------------------------------------------------------
# counterexamples, selection, shortest paths, jump lower bound


def counterexample_probs(name: str, n: int = 4, mu: int = 2) -> float:
    """rs_le2, ea_le2: Pr[at most two evaluations] for random search / (1+1) EA;
    fitprop: probability that fitness-proportional selection keeps the fitter point."""
    if name == "rs_le2":
        _need(n >= 2, "n must be >= 2")
        return 2.0 ** (1 - n) - 2.0 ** (-2 * n)
    if name == "ea_le2":
        _need(n >= 2, "n must be >= 2")
        return 2.0 ** (1 - n) - (1.0 - 1.0 / n) ** n * 2.0 ** (-n)
    if name == "fitprop":
        _need(mu >= 2, "mu must be >= 2")
        _need(n % 10 == 0, "n must be a multiple of 10")
        return 9.0 / (mu + 8.0)
    raise DomainError(f"unknown counterexample {name!r}; valid: rs_le2, ea_le2, fitprop")


def fitprop_select_prob(fitnesses: Sequence[float], threshold: float) -> float:
    """Probability that fitness-proportional selection picks an individual with f >= threshold."""
    f = np.asarray(fitnesses, dtype=float)
    _need(bool(np.all(f >= 0)), "fitness values must be non-negative")
    total = math.fsum(f)
    if total <= 0:
        raise DomainError("selection undefined: all fitness values are zero")
    return math.fsum(f[f >= threshold]) / total


class SsspParams(NamedTuple):
    delta: float
    p: float
    T0: float
    mean_bound: float
    tail: Callable[[float], float]


def sssp_theorem_params(n: int, ell: int) -> SsspParams:
    """Runtime guarantee for the pointer-array EA on n vertices with hop radius ell."""
    _need(n >= 4, "n must be >= 4")
    _need(ell >= 2, "ell must be >= 2")
    ratio = 4.0 * math.log(n - 1) / (ell - 1)
    delta = max(ratio, math.sqrt(ratio))
    p = 1.0 / (math.e * (n - 1) * (n - 2))
    T0 = (1.0 + delta) * ell / p
    mean_bound = (1.0 + 1.0 / math.log(n - 1)) * T0

    def tail(eps: float) -> float:
        _need(eps >= 0, "eps must be >= 0")
        return min(1.0, (n - 1) ** -eps)

    return SsspParams(delta, p, T0, mean_bound, tail)


def sssp_dominating_dist(n: int, ell: int, eps: float = 1e-9) -> DiscreteDist:
    """Union-bound law dominating max of n-1 (dependent) sums of ell Geom(p) variables."""
    par = sssp_theorem_params(n, ell)
    one = exact_dist(GatedGeomSpec.geometric_sum([par.p] * ell), eps / (n - 1))
    cdf = np.maximum(0.0, 1.0 - (n - 1) * (1.0 - one.cdf))
    pmf = np.diff(np.concatenate(([0.0], cdf)))
    tail = max(0.0, 1.0 - math.fsum(pmf))
    return DiscreteDist(one.lo, pmf, tail, max(eps, tail))


def jump_lower_spec(n: int, k: int) -> GatedGeomSpec:
    """X * Geom(P_k) with Pr[X = 1] = 1 - exp(-n/8); dominated by the Jump_k runtime."""
    _need(2 <= k and 4 * k <= n, f"need 2 <= k <= n/4, got n={n}, k={k}")
    return GatedGeomSpec(0, (Term(1.0 - math.exp(-n / 8.0), jump_success_prob(n, k)),))


def rls_monotone_dist(n: int, eps: float = 1e-9) -> DiscreteDist:
    """RLS runtime on a strictly monotone function: sum_{i >= X} Geom((n-i)/n), X ~ Bin(n, 1/2)."""
    _need(n >= 1, "n must be >= 1")
    weights = binom.pmf(np.arange(n + 1), n, 0.5)
    dists = [exact_dist(GatedGeomSpec.geometric_sum([(n - i) / n for i in range(x, n)]), eps)
             for x in range(n + 1)]
    return mixture(weights / math.fsum(weights), dists)
