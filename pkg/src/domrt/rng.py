"""SplitMix64 random streams usable from numba kernels and plain Python.

Every simulated run owns one 64-bit state word.  The state advances by the
golden-ratio Weyl increment and each output is a bijective mix of the state,
so a stream is a pure function of (seed, draw index).  Per-trial seeds are the
outputs of a SplitMix64 stream started at the master seed.

Kernels keep the state in a length-1 ``uint64`` array so it can be mutated
in place.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

GENERATOR = "splitmix64"

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

MASK64 = (1 << 64) - 1


@njit(cache=True, nogil=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def next_u64(state):
    state[0] += _GAMMA
    return mix64(state[0])


@njit(cache=True, nogil=True)
def uniform(state):
    """Uniform double strictly inside (0, 1)."""
    return (np.float64(next_u64(state) >> _S11) + 0.5) * _INV53


@njit(cache=True, nogil=True)
def randint(state, n):
    """Uniform integer in [0, n)."""
    r = np.int64(uniform(state) * n)
    if r >= n:
        r = n - 1
    return r


@njit(cache=True, nogil=True)
def bernoulli(state, p):
    return uniform(state) < p


@njit(cache=True, nogil=True)
def geometric_from_uniform(u, p):
    """Inverse transform ceil(ln u / ln(1 - p)) of a uniform u in (0, 1)."""
    if p >= 1.0:
        return np.int64(1)
    g = np.ceil(math.log(u) / math.log1p(-p))
    if g < 1.0:
        return np.int64(1)
    if g > 9.0e18:
        return np.int64(9_000_000_000_000_000_000)
    return np.int64(g)


@njit(cache=True, nogil=True)
def geometric(state, p):
    """Number of trials up to and including the first success."""
    return geometric_from_uniform(uniform(state), p)


@njit(cache=True, nogil=True)
def poisson_one(state):
    """Poisson(1) by inversion with cumulative products."""
    u = uniform(state)
    k = 0
    term = math.exp(-1.0)
    cdf = term
    while u > cdf and k < 60:
        k += 1
        term /= k
        cdf += term
    return k


@njit(cache=True, nogil=True)
def binomial(state, n, p):
    """Bin(n, p) by geometric skipping; O(1 + n p) uniforms."""
    if p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    count = 0
    pos = geometric(state, p)
    while pos <= n:
        count += 1
        pos += geometric(state, p)
    return count


@njit(cache=True, nogil=True)
def derive_seeds_kernel(master, count):
    out = np.empty(count, dtype=np.uint64)
    state = np.empty(1, dtype=np.uint64)
    state[0] = master
    for i in range(count):
        out[i] = next_u64(state)
    return out


def derive_seeds(master_seed: int, count: int) -> np.ndarray:
    """Per-trial seeds: the first ``count`` SplitMix64 outputs from ``master_seed``."""
    return derive_seeds_kernel(np.uint64(int(master_seed) & MASK64), int(count))


def new_state(seed: int) -> np.ndarray:
    return np.array([int(seed) & MASK64], dtype=np.uint64)
