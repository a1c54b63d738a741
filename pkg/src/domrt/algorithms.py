"""Simulators for elitist evolutionary algorithms and the sample-collection harness.

Runtime conventions
-------------------
* ``iterations`` is the index of the iteration that generates the first optimum;
  0 when an initial individual is already optimal.
* ``evaluations`` counts every fitness evaluation including initial individuals.
  Populations are initialised sequentially, so an optimal j-th initial
  individual stops the run after j evaluations.
* A censored run has ``iterations == budget``.

Each algorithm is a numba kernel driven by one SplitMix64 state; a batch
kernel maps it over an array of seeds with the GIL released, and
:func:`run_batch` spreads chunks of seeds over a thread pool.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from numba import njit

from . import rng
from .benchmarks import (
    Bench,
    WeightedGraph,
    as_bench,
    fitness_kernel,
    inversions_kernel,
    sssp_fitness_kernel,
)
from .dist_core import DomainError
from .operators import MutationOp, flip_k_distinct, mutate_kernel, parse_op

DEFAULT_BUDGET = 10**8

ALGOS = ("ea", "rls", "rs", "mu+1", "1+lambda", "ollga", "ea-best-of-mu", "sssp", "sorting")
_ALGO_ALIASES = {
    "one-plus-one": "ea",
    "1+1": "ea",
    "random-search": "rs",
    "mu-plus-one": "mu+1",
    "one-plus-lambda": "1+lambda",
    "1+(lambda,lambda)": "ollga",
    "ea-mu": "ea-best-of-mu",
    "best-of-mu": "ea-best-of-mu",
}


class CensoredRunsError(RuntimeError):
    """Some runs hit the budget; ``count`` of them."""

    def __init__(self, count: int, total: int):
        super().__init__(f"censored runs present: {count} of {total} hit the budget")
        self.count = count
        self.total = total


@dataclass(frozen=True)
class RunRecord:
    algo_id: str
    bench_id: str
    n: int
    seed: int
    iterations: int
    evaluations: int
    censored: bool
    budget: int
    rng: str = rng.GENERATOR

    def value(self, metric: str) -> int:
        return self.iterations if metric == "iterations" else self.evaluations


# ---------------------------------------------------------------------------
# kernels


@njit(cache=True, nogil=True)
def _random_bits(x, state):
    for i in range(x.size):
        x[i] = np.uint8(rng.next_u64(state) >> np.uint64(63))


@njit(cache=True, nogil=True)
def one_plus_one_kernel(n, bcode, bk, target, code, k, p, table, budget, state):
    x = np.empty(n, dtype=np.uint8)
    y = np.empty(n, dtype=np.uint8)
    scratch = np.arange(n)
    _random_bits(x, state)
    fx = fitness_kernel(x, bcode, bk)
    if fx >= target:
        return 0, 1, False
    for t in range(1, budget + 1):
        mutate_kernel(x, y, code, k, p, table, fx, scratch, state)
        fy = fitness_kernel(y, bcode, bk)
        if fy >= target:
            return t, t + 1, False
        if fy >= fx:
            x, y = y, x
            fx = fy
    return budget, budget + 1, True


@njit(cache=True, nogil=True)
def random_search_kernel(n, bcode, bk, target, budget, state):
    x = np.empty(n, dtype=np.uint8)
    for t in range(budget + 1):
        _random_bits(x, state)
        if fitness_kernel(x, bcode, bk) >= target:
            return t, t + 1, False
    return budget, budget + 1, True


@njit(cache=True, nogil=True)
def _init_population(pop, fits, bcode, bk, target, state):
    """Sequential initialisation; returns j >= 1 if individual j is optimal, else 0."""
    for j in range(pop.shape[0]):
        _random_bits(pop[j], state)
        fits[j] = fitness_kernel(pop[j], bcode, bk)
        if fits[j] >= target:
            return j + 1
    return 0


@njit(cache=True, nogil=True)
def _uniform_argbest(fits, state, want_max):
    """Index of a uniformly chosen maximal (or minimal) entry."""
    best = 0
    ties = 1
    for j in range(1, fits.size):
        better = fits[j] > fits[best] if want_max else fits[j] < fits[best]
        if better:
            best = j
            ties = 1
        elif fits[j] == fits[best]:
            ties += 1
            if rng.randint(state, ties) == 0:
                best = j
    return best


@njit(cache=True, nogil=True)
def mu_plus_one_kernel(n, mu, bcode, bk, target, code, k, p, table, budget, state):
    pop = np.empty((mu, n), dtype=np.uint8)
    fits = np.empty(mu, dtype=np.int64)
    y = np.empty(n, dtype=np.uint8)
    scratch = np.arange(n)
    hit = _init_population(pop, fits, bcode, bk, target, state)
    if hit > 0:
        return 0, hit, False
    for t in range(1, budget + 1):
        j = rng.randint(state, mu)
        mutate_kernel(pop[j], y, code, k, p, table, fits[j], scratch, state)
        fy = fitness_kernel(y, bcode, bk)
        if fy >= target:
            return t, mu + t, False
        w = _uniform_argbest(fits, state, False)
        if fy >= fits[w]:
            pop[w, :] = y
            fits[w] = fy
    return budget, mu + budget, True


@njit(cache=True, nogil=True)
def one_plus_lambda_kernel(n, lam, bcode, bk, target, code, k, p, table, budget, state):
    x = np.empty(n, dtype=np.uint8)
    y = np.empty(n, dtype=np.uint8)
    best = np.empty(n, dtype=np.uint8)
    scratch = np.arange(n)
    _random_bits(x, state)
    fx = fitness_kernel(x, bcode, bk)
    if fx >= target:
        return 0, 1, False
    for t in range(1, budget + 1):
        fbest = np.int64(-1)
        ties = 0
        for _ in range(lam):
            mutate_kernel(x, y, code, k, p, table, fx, scratch, state)
            fy = fitness_kernel(y, bcode, bk)
            if fy > fbest:
                fbest = fy
                ties = 1
                best[:] = y
            elif fy == fbest:
                ties += 1
                if rng.randint(state, ties) == 0:
                    best[:] = y
        if fbest >= target:
            return t, 1 + lam * t, False
        if fbest >= fx:
            x[:] = best
            fx = fbest
    return budget, 1 + lam * budget, True


@njit(cache=True, nogil=True)
def ollga_kernel(n, lam, bcode, bk, target, budget, state):
    x = np.empty(n, dtype=np.uint8)
    y = np.empty(n, dtype=np.uint8)
    xm = np.empty(n, dtype=np.uint8)
    best = np.empty(n, dtype=np.uint8)
    scratch = np.arange(n)
    rate = min(1.0, lam / n)
    bias = 1.0 / lam
    _random_bits(x, state)
    fx = fitness_kernel(x, bcode, bk)
    if fx >= target:
        return 0, 1, False
    evals = 1
    for t in range(1, budget + 1):
        ell = rng.binomial(state, n, rate)
        # mutation phase: lam mutants, each flipping the same number ell of bits
        fm = np.int64(-1)
        ties = 0
        for _ in range(lam):
            y[:] = x
            flip_k_distinct(y, ell, scratch, state)
            fy = fitness_kernel(y, bcode, bk)
            if fy > fm:
                fm = fy
                ties = 1
                xm[:] = y
            elif fy == fm:
                ties += 1
                if rng.randint(state, ties) == 0:
                    xm[:] = y
        evals += lam
        if fm >= target:
            return t, evals, False
        # crossover phase: take each bit from the best mutant with probability 1/lam
        fc = np.int64(-1)
        ties = 0
        for _ in range(lam):
            for i in range(n):
                y[i] = xm[i] if rng.uniform(state) < bias else x[i]
            fy = fitness_kernel(y, bcode, bk)
            if fy > fc:
                fc = fy
                ties = 1
                best[:] = y
            elif fy == fc:
                ties += 1
                if rng.randint(state, ties) == 0:
                    best[:] = y
        evals += lam
        if fc >= target:
            return t, evals, False
        if fc >= fx:
            x[:] = best
            fx = fc
    return budget, evals, True


@njit(cache=True, nogil=True)
def ea_best_of_mu_kernel(n, mu, bcode, bk, target, code, k, p, table, budget, state):
    pop = np.empty((mu, n), dtype=np.uint8)
    fits = np.empty(mu, dtype=np.int64)
    y = np.empty(n, dtype=np.uint8)
    scratch = np.arange(n)
    hit = _init_population(pop, fits, bcode, bk, target, state)
    if hit > 0:
        return 0, hit, False
    j = _uniform_argbest(fits, state, True)
    x = pop[j].copy()
    fx = fits[j]
    for t in range(1, budget + 1):
        mutate_kernel(x, y, code, k, p, table, fx, scratch, state)
        fy = fitness_kernel(y, bcode, bk)
        if fy >= target:
            return t, mu + t, False
        if fy >= fx:
            x, y = y, x
            fx = fy
    return budget, mu + budget, True


@njit(cache=True, nogil=True)
def _sssp_is_optimal(fit, dist):
    for v in range(fit.size):
        if fit[v] != dist[v]:
            return False
    return True


@njit(cache=True, nogil=True)
def _sssp_new_target(v, n, weights, adjacent_only, state):
    if not adjacent_only:
        t = rng.randint(state, n - 1)
        return t + 1 if t >= v else t
    deg = 0
    for u in range(n):
        if weights[v, u] > 0:
            deg += 1
    r = rng.randint(state, deg)
    for u in range(n):
        if weights[v, u] > 0:
            if r == 0:
                return u
            r -= 1
    return -1


@njit(cache=True, nogil=True)
def sssp_ea_kernel(weights, source, dist, with_replacement, adjacent_only, budget, state):
    n = weights.shape[0]
    ptr = np.empty(n, dtype=np.int64)
    child = np.empty(n, dtype=np.int64)
    fit = np.empty(n)
    cfit = np.empty(n)
    others = np.empty(n - 1, dtype=np.int64)
    j = 0
    for v in range(n):
        if v != source:
            others[j] = v
            j += 1
    ptr[source] = -1
    for v in others:
        ptr[v] = _sssp_new_target(v, n, weights, adjacent_only, state)
    sssp_fitness_kernel(weights, source, ptr, fit)
    if _sssp_is_optimal(fit, dist):
        return 0, 1, False
    for t in range(1, budget + 1):
        child[:] = ptr
        changes = rng.poisson_one(state) + 1
        if not with_replacement and changes > n - 1:
            changes = n - 1
        for c in range(changes):
            if with_replacement:
                v = others[rng.randint(state, n - 1)]
            else:
                r = c + rng.randint(state, n - 1 - c)
                tmp = others[c]
                others[c] = others[r]
                others[r] = tmp
                v = others[c]
            child[v] = _sssp_new_target(v, n, weights, adjacent_only, state)
        sssp_fitness_kernel(weights, source, child, cfit)
        ok = True
        for v in range(n):
            if cfit[v] > fit[v]:
                ok = False
                break
        if ok:
            ptr, child = child, ptr
            fit, cfit = cfit, fit
            if _sssp_is_optimal(fit, dist):
                return t, t + 1, False
    return budget, budget + 1, True


@njit(cache=True, nogil=True)
def sorting_ea_kernel(n, budget, state):
    perm = np.arange(n)
    for i in range(n - 1, 0, -1):
        j = rng.randint(state, i + 1)
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
    fx = inversions_kernel(perm)
    if fx == 0:
        return 0, 1, False
    child = np.empty(n, dtype=np.int64)
    for t in range(1, budget + 1):
        child[:] = perm
        for _ in range(rng.poisson_one(state) + 1):
            a = rng.randint(state, n)
            b = rng.randint(state, n - 1)
            if b >= a:
                b += 1
            tmp = child[a]
            child[a] = child[b]
            child[b] = tmp
        fy = inversions_kernel(child)
        if fy == 0:
            return t, t + 1, False
        if fy <= fx:
            perm, child = child, perm
            fx = fy
    return budget, budget + 1, True


@njit(cache=True, nogil=True)
def _batch_kernel(kind, seeds, iints, ffloat, table, weights, dist, out_it, out_ev, out_cens):
    """Run ``kind`` once per seed; integer parameters packed in ``iints``."""
    n, bcode, bk, target, code, k, budget, size, flag1, flag2 = (
        iints[0], iints[1], iints[2], iints[3], iints[4], iints[5], iints[6], iints[7],
        iints[8], iints[9],
    )
    p = ffloat
    state = np.empty(1, dtype=np.uint64)
    for r in range(seeds.size):
        state[0] = seeds[r]
        if kind == 0:
            res = one_plus_one_kernel(n, bcode, bk, target, code, k, p, table, budget, state)
        elif kind == 1:
            res = random_search_kernel(n, bcode, bk, target, budget, state)
        elif kind == 2:
            res = mu_plus_one_kernel(n, size, bcode, bk, target, code, k, p, table, budget, state)
        elif kind == 3:
            res = one_plus_lambda_kernel(n, size, bcode, bk, target, code, k, p, table, budget,
                                         state)
        elif kind == 4:
            res = ollga_kernel(n, size, bcode, bk, target, budget, state)
        elif kind == 5:
            res = ea_best_of_mu_kernel(n, size, bcode, bk, target, code, k, p, table, budget,
                                       state)
        elif kind == 6:
            res = sssp_ea_kernel(weights, bk, dist, flag1 != 0, flag2 != 0, budget, state)
        else:
            res = sorting_ea_kernel(n, budget, state)
        out_it[r] = res[0]
        out_ev[r] = res[1]
        out_cens[r] = res[2]


# ---------------------------------------------------------------------------
# configuration and drivers

_KIND = {"ea": 0, "rls": 0, "rs": 1, "mu+1": 2, "1+lambda": 3, "ollga": 4,
         "ea-best-of-mu": 5, "sssp": 6, "sorting": 7}


def canonical_algo(name: str) -> str:
    key = name.strip().lower()
    key = _ALGO_ALIASES.get(key, key)
    if key not in _KIND:
        raise DomainError(f"unknown algorithm {name!r}; valid: {', '.join(ALGOS)}")
    return key


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines the runtime distribution of one simulator.

    ``op`` defaults to one-bit mutation for ``rls`` and to standard-bit mutation
    with rate ``rate`` (``None`` = 1/n) otherwise.  ``target`` turns a run into a
    time-to-target measurement: it stops at the first fitness >= target.
    """

    algo: str
    bench: Bench | None = None
    n: int = 0
    op: MutationOp | None = None
    rate: float | None = None
    mu: int = 1
    lam: int = 1
    budget: int = DEFAULT_BUDGET
    target: int | None = None
    graph: WeightedGraph | None = field(default=None, compare=False)
    with_replacement: bool = True
    adjacent_only: bool = False

    def __post_init__(self):
        algo = canonical_algo(self.algo)
        object.__setattr__(self, "algo", algo)
        if isinstance(self.bench, str):
            object.__setattr__(self, "bench", as_bench(self.bench))
        if isinstance(self.op, str):
            object.__setattr__(self, "op", parse_op(self.op))
        if self.budget < 1:
            raise DomainError("budget must be >= 1")
        if self.mu < 1 or self.lam < 1:
            raise DomainError("population sizes must be >= 1")
        if algo == "sssp":
            if self.graph is None:
                raise DomainError("the sssp algorithm needs a graph")
            object.__setattr__(self, "n", self.graph.n_vertices)
            return
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if algo == "sorting":
            return
        if self.bench is None:
            raise DomainError(f"algorithm {algo} needs a benchmark")
        self.bench.optimum(self.n)  # range checks
        if self.op is None:
            op = MutationOp.one_bit() if algo == "rls" else MutationOp.standard_bit(self.rate)
            object.__setattr__(self, "op", op)
        elif algo == "rls" and self.op.kind != "onebit":
            raise DomainError("rls uses one-bit mutation; use algo 'ea' for other operators")
        self.op.validate_for(self.n)

    @property
    def bench_id(self) -> str:
        if self.algo == "sssp":
            return "sssp"
        if self.algo == "sorting":
            return "inversions"
        return self.bench.ident

    @property
    def algo_id(self) -> str:
        if self.algo in ("mu+1", "ea-best-of-mu"):
            return f"{self.algo}[mu={self.mu}]"
        if self.algo in ("1+lambda", "ollga"):
            return f"{self.algo}[lambda={self.lam}]"
        if self.algo == "ea":
            return f"ea[{self.op}]"
        return self.algo

    def describe(self) -> dict[str, str]:
        """Flat key/value description echoed into output files."""
        d = {"algo": self.algo_id, "bench": self.bench_id, "n": str(self.n),
             "budget": str(self.budget), "rng": rng.GENERATOR}
        if self.op is not None and self.algo not in ("rs", "ollga", "sssp", "sorting"):
            d["op"] = str(self.op)
        if self.target is not None:
            d["target"] = str(self.target)
        if self.algo == "sssp":
            d["with_replacement"] = str(self.with_replacement).lower()
            d["adjacent_only"] = str(self.adjacent_only).lower()
        return d

    def _kernel_args(self):
        kind = _KIND[self.algo]
        code, k, p, table = (0, 0, 0.0, np.zeros(1))
        if self.op is not None and self.algo not in ("rs", "ollga", "sssp", "sorting"):
            code, k, p, table = self.op.encode(self.n)
        bcode = bk = target = 0
        weights = np.zeros((1, 1), dtype=np.int64)
        dist = np.zeros(1)
        size = self.mu if self.algo in ("mu+1", "ea-best-of-mu") else self.lam
        if self.algo == "sssp":
            weights = self.graph.weight_matrix()
            dist = self.graph.distances()
            bk = self.graph.source
        elif self.algo != "sorting":
            bcode, bk = self.bench.code, self.bench.k
            target = self.bench.optimum(self.n) if self.target is None else self.target
        iints = np.array([self.n, bcode, bk, target, code, k, self.budget, size,
                          int(self.with_replacement), int(self.adjacent_only)], dtype=np.int64)
        return kind, iints, float(p), np.asarray(table, dtype=float), weights, dist


def _thread_count() -> int:
    env = os.environ.get("DOMRT_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            return max(1, min(int(env), 256))
        except ValueError:
            pass
    return cap


def run_batch(config: RunConfig, seeds) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(iterations, evaluations, censored) arrays, one entry per seed.

    Results depend only on the seeds, never on how they are split over threads.
    """
    seeds = np.asarray(seeds, dtype=np.uint64)
    m = seeds.size
    it = np.empty(m, dtype=np.int64)
    ev = np.empty(m, dtype=np.int64)
    cens = np.empty(m, dtype=np.bool_)
    kind, iints, p, table, weights, dist = config._kernel_args()

    def work(lo, hi):
        _batch_kernel(kind, seeds[lo:hi], iints, p, table, weights, dist,
                      it[lo:hi], ev[lo:hi], cens[lo:hi])

    threads = min(_thread_count(), max(1, m // 64))
    if threads <= 1:
        work(0, m)
    else:
        bounds = np.linspace(0, m, 4 * threads + 1).astype(int)
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(work, bounds[:-1], bounds[1:]))
    return it, ev, cens


def run(config: RunConfig, seed: int) -> RunRecord:
    it, ev, cens = run_batch(config, [int(seed) & rng.MASK64])
    return RunRecord(config.algo_id, config.bench_id, config.n, int(seed) & rng.MASK64,
                     int(it[0]), int(ev[0]), bool(cens[0]), config.budget)


def run_one_plus_one(bench, op: MutationOp, n: int, seed: int, budget: int = DEFAULT_BUDGET,
                     target: int | None = None) -> RunRecord:
    return run(RunConfig("ea", as_bench(bench), n, op=op, budget=budget, target=target), seed)


def run_rls(bench, n: int, seed: int, budget: int = DEFAULT_BUDGET) -> RunRecord:
    return run(RunConfig("rls", as_bench(bench), n, budget=budget), seed)


def run_random_search(bench, n: int, seed: int, budget: int = DEFAULT_BUDGET) -> RunRecord:
    return run(RunConfig("rs", as_bench(bench), n, budget=budget), seed)


def run_mu_plus_one(bench, mu: int, p: float | None, n: int, seed: int,
                    budget: int = DEFAULT_BUDGET) -> RunRecord:
    return run(RunConfig("mu+1", as_bench(bench), n, rate=p, mu=mu, budget=budget), seed)


def run_one_plus_lambda(bench, lam: int, p: float | None, n: int, seed: int,
                        budget: int = DEFAULT_BUDGET) -> RunRecord:
    return run(RunConfig("1+lambda", as_bench(bench), n, rate=p, lam=lam, budget=budget), seed)


def run_ollga(bench, lam: int, n: int, seed: int, budget: int = DEFAULT_BUDGET) -> RunRecord:
    return run(RunConfig("ollga", as_bench(bench), n, lam=lam, budget=budget), seed)


def run_ea_best_of_mu(bench, mu: int, p: float | None, n: int, seed: int,
                      budget: int = DEFAULT_BUDGET) -> RunRecord:
    return run(RunConfig("ea-best-of-mu", as_bench(bench), n, rate=p, mu=mu, budget=budget),
               seed)


def run_sssp_ea(g: WeightedGraph, seed: int, budget: int = DEFAULT_BUDGET,
                with_replacement: bool = True, adjacent_only: bool = False) -> RunRecord:
    return run(RunConfig("sssp", graph=g, budget=budget, with_replacement=with_replacement,
                         adjacent_only=adjacent_only), seed)


def run_sorting_ea(n: int, seed: int, budget: int = DEFAULT_BUDGET) -> RunRecord:
    return run(RunConfig("sorting", n=n, budget=budget), seed)


# ---------------------------------------------------------------------------
# sample sets


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Sorted uncensored runtimes with provenance metadata."""

    values: np.ndarray
    metric: str = "iterations"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.metric not in ("iterations", "evaluations"):
            raise DomainError(f"metric must be iterations or evaluations, not {self.metric!r}")
        vals = np.sort(np.asarray(self.values, dtype=np.int64))
        if vals.ndim != 1 or vals.size == 0:
            raise DomainError("a sample set needs at least one value")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def n_samples(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n_samples

    def __eq__(self, other) -> bool:
        return (isinstance(other, SampleSet) and self.metric == other.metric
                and np.array_equal(self.values, other.values) and self.meta == other.meta)

    def mean(self) -> float:
        return float(self.values.mean())

    def std_error(self) -> float:
        if self.n_samples < 2:
            return 0.0
        return float(self.values.std(ddof=1) / np.sqrt(self.n_samples))

    def ecdf(self, lam) -> np.ndarray:
        """Fraction of values <= lam."""
        return np.searchsorted(self.values, np.asarray(lam), side="right") / self.n_samples

    def frac_at_least(self, t: float) -> float:
        return float(1.0 - np.searchsorted(self.values, t, side="left") / self.n_samples)

    def to_csv(self, extra_comments: dict | None = None) -> str:
        lines = []
        meta = {"metric": self.metric, **self.meta, "n_samples": self.n_samples}
        for key, val in {**meta, **(extra_comments or {})}.items():
            lines.append(f"# {key}={val}")
        lines.append("runtime")
        lines.extend(str(int(v)) for v in self.values)
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path, extra_comments: dict | None = None) -> None:
        Path(path).write_text(self.to_csv(extra_comments))

    @classmethod
    def from_csv(cls, text: str) -> "SampleSet":
        meta: dict[str, str] = {}
        values = []
        header_seen = False
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, sep, val = line[1:].strip().partition("=")
                if sep:
                    meta[key.strip()] = val.strip()
                continue
            if not header_seen:
                if line != "runtime":
                    raise DomainError(f"not a sample-set CSV (header {line!r})")
                header_seen = True
                continue
            try:
                values.append(int(line))
            except ValueError as exc:
                raise DomainError(f"malformed runtime value {line!r}") from exc
        if not header_seen:
            raise DomainError("not a sample-set CSV (missing 'runtime' header)")
        if str(meta.get("censored", "0")) not in ("0", ""):
            raise DomainError("sample set contains censored runs")
        metric = meta.pop("metric", "iterations")
        declared = meta.pop("n_samples", None)
        if declared is not None and int(declared) != len(values):
            raise DomainError(f"n_samples={declared} but {len(values)} values present")
        return cls(np.array(values, dtype=np.int64), metric, meta)

    @classmethod
    def read(cls, path: str | Path) -> "SampleSet":
        return cls.from_csv(Path(path).read_text())


def collect_samples(config: RunConfig, runs: int, master_seed: int,
                    metric: str = "iterations", allow_censored: bool = False) -> SampleSet:
    """Run ``runs`` independent simulations with seeds derived from ``master_seed``.

    Raises :class:`CensoredRunsError` if any run hits the budget, unless
    ``allow_censored`` (then censored runs are dropped and counted in the metadata).
    """
    if runs < 1:
        raise DomainError("runs must be >= 1")
    if metric not in ("iterations", "evaluations"):
        raise DomainError(f"metric must be iterations or evaluations, not {metric!r}")
    seeds = rng.derive_seeds(master_seed, runs)
    it, ev, cens = run_batch(config, seeds)
    n_cens = int(cens.sum())
    if n_cens and not allow_censored:
        raise CensoredRunsError(n_cens, runs)
    vals = (it if metric == "iterations" else ev)[~cens]
    if vals.size == 0:
        raise CensoredRunsError(n_cens, runs)
    meta = {**config.describe(), "master_seed": int(master_seed) & rng.MASK64}
    if n_cens:
        meta["censored_dropped"] = n_cens
    return SampleSet(vals, metric, meta)


def with_budget(config: RunConfig, budget: int) -> RunConfig:
    return replace(config, budget=budget)
