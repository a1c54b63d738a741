"""Objective functions: pseudo-Boolean benchmarks, inversions, pointer-array SSSP.

Bit strings are 1-d ``uint8`` arrays.  The ``*_kernel`` functions are the
compiled evaluators the simulators call; the public wrappers accept anything
array-like (including strings such as ``"1101"``).
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .dist_core import DomainError

ONEMAX, LEADINGONES, JUMP, BINVAL, CONST = 0, 1, 2, 3, 4
BENCH_CODES = {
    "onemax": ONEMAX,
    "leadingones": LEADINGONES,
    "jump": JUMP,
    "binval": BINVAL,
    "const": CONST,
}


def as_bits(x) -> np.ndarray:
    if isinstance(x, str):
        x = [int(c) for c in x.strip()]
    arr = np.asarray(x, dtype=np.uint8)
    if arr.ndim != 1 or arr.size < 1 or np.any(arr > 1):
        raise DomainError("a bit string is a non-empty 1-d sequence over {0, 1}")
    return arr


@njit(cache=True, nogil=True)
def onemax_kernel(x):
    s = 0
    for b in x:
        s += b
    return s


@njit(cache=True, nogil=True)
def leadingones_kernel(x):
    i = 0
    while i < x.size and x[i] == 1:
        i += 1
    return i


@njit(cache=True, nogil=True)
def jump_kernel(x, k):
    n = x.size
    om = onemax_kernel(x)
    if om <= n - k or om == n:
        return om + k
    return n - om


@njit(cache=True, nogil=True)
def binval_kernel(x):
    # sum_i 2^(n-1-i) x_i; strictly monotonic, exact for n <= 62
    v = 0
    for b in x:
        v = 2 * v + b
    return v


@njit(cache=True, nogil=True)
def fitness_kernel(x, code, k):
    if code == ONEMAX:
        return onemax_kernel(x)
    if code == LEADINGONES:
        return leadingones_kernel(x)
    if code == JUMP:
        return jump_kernel(x, k)
    if code == BINVAL:
        return binval_kernel(x)
    return 0


def onemax(x) -> int:
    return int(onemax_kernel(as_bits(x)))


def leadingones(x) -> int:
    return int(leadingones_kernel(as_bits(x)))


def jump(x, k: int) -> int:
    bits = as_bits(x)
    if not 1 <= k <= bits.size:
        raise DomainError(f"jump gap k={k} must lie in [1..{bits.size}]")
    return int(jump_kernel(bits, k))


def binval(x) -> int:
    bits = as_bits(x)
    if bits.size > 62:
        raise DomainError("binval is limited to n <= 62")
    return int(binval_kernel(bits))


@dataclass(frozen=True)
class Bench:
    """A pseudo-Boolean benchmark by name, with the jump gap where relevant."""

    name: str
    k: int = 0

    def __post_init__(self):
        if self.name not in BENCH_CODES:
            raise DomainError(
                f"unknown benchmark {self.name!r}; valid: {', '.join(BENCH_CODES)}"
            )
        if self.name == "jump" and self.k < 1:
            raise DomainError("jump needs a gap k >= 1")

    @property
    def code(self) -> int:
        return BENCH_CODES[self.name]

    @property
    def ident(self) -> str:
        return f"jump{self.k}" if self.name == "jump" else self.name

    def optimum(self, n: int) -> int:
        if self.name == "jump" and self.k > n:
            raise DomainError(f"jump gap k={self.k} exceeds n={n}")
        if self.name == "binval" and n > 62:
            raise DomainError("binval is limited to n <= 62")
        return {
            "onemax": n,
            "leadingones": n,
            "jump": n + self.k,
            "binval": (1 << n) - 1,
            "const": 1,  # never reached: every point has fitness 0
        }[self.name]

    def __call__(self, x) -> int:
        return int(fitness_kernel(as_bits(x), self.code, self.k))


def as_bench(bench: "Bench | str", k: int = 0) -> Bench:
    """Accept ``Bench``, ``"onemax"``, ``"jump"`` (with ``k``), ``"jump2"`` or ``"jump:2"``."""
    if isinstance(bench, Bench):
        return bench
    name = bench.strip().lower()
    if name.startswith("jump") and name != "jump":
        return Bench("jump", int(name[4:].lstrip(":=k")))
    return Bench(name, k)


def inversions(perm: Sequence[int]) -> int:
    """Number of pairs i < j with perm[i] > perm[j]; accepts 0- or 1-based permutations."""
    arr = np.asarray(perm, dtype=np.int64)
    n = arr.size
    base = arr.min() if n else 0
    if n == 0 or base not in (0, 1) or not np.array_equal(np.sort(arr), np.arange(base, base + n)):
        raise DomainError("argument is not a permutation of [1..n] (or [0..n-1])")
    return int(inversions_kernel(arr))


@njit(cache=True, nogil=True)
def inversions_kernel(perm):
    n = perm.size
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if perm[i] > perm[j]:
                count += 1
    return count


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Connected undirected graph with positive integer weights, 0-based vertex ids."""

    n_vertices: int
    edges: tuple[tuple[int, int, int], ...]
    source: int = 0

    def __post_init__(self):
        n = self.n_vertices
        if n < 2:
            raise DomainError("a graph needs at least two vertices")
        if not 0 <= self.source < n:
            raise DomainError(f"source {self.source} is not a vertex")
        edges = tuple((int(u), int(v), int(w)) for u, v, w in self.edges)
        for u, v, w in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"edge ({u}, {v}) has an invalid endpoint")
            if u == v:
                raise DomainError(f"self-loop at vertex {u}")
            if w < 1:
                raise DomainError(f"edge ({u}, {v}) has weight {w} < 1")
        object.__setattr__(self, "edges", edges)
        ncomp, _ = connected_components(self._sparse(), directed=False)
        if ncomp != 1:
            raise DomainError("graph is not connected")

    def weight_matrix(self) -> np.ndarray:
        """Dense symmetric weights, 0 where there is no edge (parallel edges keep the lightest)."""
        w = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        for u, v, c in self.edges:
            if w[u, v] == 0 or c < w[u, v]:
                w[u, v] = w[v, u] = c
        return w

    def _sparse(self) -> csr_matrix:
        return csr_matrix(self.weight_matrix().astype(float))

    def distances(self) -> np.ndarray:
        """Shortest-path distances from the source (Dijkstra)."""
        return dijkstra(self._sparse(), directed=False, indices=self.source)

    def hop_radius(self) -> int:
        """Max over vertices of the fewest edges on any shortest path to the source."""
        w = self.weight_matrix()
        dist = self.distances()
        hops = np.full(self.n_vertices, np.inf)
        hops[self.source] = 0
        for v in np.argsort(dist, kind="stable"):
            for u in np.flatnonzero(w[v]):
                if dist[u] + w[u, v] == dist[v]:
                    hops[v] = min(hops[v], hops[u] + 1)
        return int(hops.max())

    @classmethod
    def path(cls, n: int, weight: int = 1) -> "WeightedGraph":
        """Path 0 - 1 - ... - (n-1) with the source at vertex 0."""
        return cls(n, tuple((i, i + 1, weight) for i in range(n - 1)), 0)

    @classmethod
    def from_text(cls, text: str) -> "WeightedGraph":
        """``n m source`` then ``m`` lines ``u v w`` with 1-based vertex ids."""
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        try:
            n, m, s = (int(v) for v in rows[0])
            edges = tuple((int(u) - 1, int(v) - 1, int(w)) for u, v, w in rows[1:1 + m])
        except (ValueError, IndexError) as exc:
            raise DomainError("malformed graph file") from exc
        if len(edges) != m:
            raise DomainError(f"graph file declares {m} edges but lists {len(edges)}")
        return cls(n, edges, s - 1)

    @classmethod
    def read(cls, path: str | Path) -> "WeightedGraph":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        lines = [f"{self.n_vertices} {len(self.edges)} {self.source + 1}"]
        lines += [f"{u + 1} {v + 1} {w}" for u, v, w in self.edges]
        return "\n".join(lines) + "\n"


def check_pointers(g: WeightedGraph, ptr: Sequence[int]) -> np.ndarray:
    """Validate a pointer array (entry at the source ignored) and return it as int64."""
    arr = np.asarray(ptr, dtype=np.int64).copy()
    if arr.shape != (g.n_vertices,):
        raise DomainError(f"pointer array must have length {g.n_vertices}")
    arr[g.source] = -1
    for v, t in enumerate(arr):
        if v == g.source:
            continue
        if not 0 <= t < g.n_vertices or t == v:
            raise DomainError(f"vertex {v} points to invalid target {t}")
    return arr


@njit(cache=True, nogil=True)
def sssp_fitness_kernel(weights, source, ptr, out):
    """Fill ``out[v]`` with the pointer-walk length from v to the source (inf if none).

    Walks are resolved once per vertex: ``state`` marks unresolved (0), on the
    current walk (1) and resolved (2) vertices, so cycles are found in O(n).
    """
    n = ptr.size
    state = np.zeros(n, dtype=np.int8)
    stack = np.empty(n, dtype=np.int64)
    out[source] = 0.0
    state[source] = 2
    for start in range(n):
        if state[start] == 2:
            continue
        depth = 0
        v = start
        tail_value = np.inf
        while True:
            if state[v] == 2:
                tail_value = out[v]
                break
            if state[v] == 1:
                break  # cycle
            state[v] = 1
            stack[depth] = v
            depth += 1
            t = ptr[v]
            if weights[v, t] == 0:
                break  # pointer along a non-edge
            v = t
        for j in range(depth - 1, -1, -1):
            u = stack[j]
            if tail_value < np.inf:
                tail_value += weights[u, ptr[u]]
            out[u] = tail_value
            state[u] = 2
    return out


def sssp_fitness(g: WeightedGraph, ind: Sequence[int]) -> np.ndarray:
    """Fitness vector (walk length or inf) of all vertices except the source, in id order."""
    ptr = check_pointers(g, ind)
    out = np.empty(g.n_vertices)
    sssp_fitness_kernel(g.weight_matrix(), g.source, ptr, out)
    return np.delete(out, g.source)


def vector_at_least_as_good(child: Sequence[float], parent: Sequence[float]) -> bool:
    """Componentwise ``child <= parent`` (minimisation, inf allowed)."""
    c = np.asarray(child, dtype=float)
    p = np.asarray(parent, dtype=float)
    if c.shape != p.shape:
        raise DomainError(f"length mismatch: {c.shape} vs {p.shape}")
    return bool(np.all(c <= p))
