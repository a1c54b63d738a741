"""Mutation operators on bit strings.

:class:`MutationOp` is a tagged description; :func:`mutate_kernel` is the
compiled implementation every simulator shares.  Operators never look at bit
values, only at positions (and, for the fitness-dependent variants, at the
parent's fitness).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import rng
from .dist_core import DomainError

ONE_BIT, K_BIT, STANDARD_BIT, POS_ONE, POS_EA, FIT_K, FIT_RATE, MIXED, HEAVY = range(9)

_KINDS = {
    "onebit": ONE_BIT,
    "kbit": K_BIT,
    "sbm": STANDARD_BIT,
    "posdep": POS_ONE,
    "posdep-ea": POS_EA,
    "fdk": FIT_K,
    "fdrate": FIT_RATE,
    "mixed": MIXED,
    "heavy": HEAVY,
}


@dataclass(frozen=True)
class MutationOp:
    """One of the supported mutation operators.

    ``p`` is the rate of standard-bit mutation (``None`` means 1/n) or the
    one-bit probability P of the mixed operator.  ``probs`` are the per-position
    probabilities of the position-dependent variants; with ``independent`` they
    are independent flip rates, otherwise exactly one bit i is flipped w.p. probs[i].
    """

    kind: str
    k: int = 0
    p: float | None = None
    probs: tuple[float, ...] = ()
    independent: bool = False
    beta: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown operator {self.kind!r}; valid: {', '.join(_KINDS)}")
        if self.kind == "kbit" and self.k < 1:
            raise DomainError("k-bit mutation needs k >= 1")
        if self.kind in ("sbm", "mixed") and self.p is not None and not 0.0 <= self.p <= 1.0:
            raise DomainError(f"probability {self.p!r} outside [0, 1]")
        if self.kind.startswith("posdep"):
            probs = tuple(float(q) for q in self.probs)
            if not probs or any(not 0.0 <= q <= 1.0 for q in probs):
                raise DomainError("position-dependent probabilities must lie in [0, 1]")
            if not self.independent and math.fsum(probs) > 1.0 + 1e-12:
                raise DomainError("one-bit position-dependent probabilities must sum to <= 1")
            object.__setattr__(self, "probs", probs)
        if self.kind == "heavy" and not self.beta > 1.0:
            raise DomainError(f"heavy-tailed exponent beta={self.beta!r} must exceed 1")

    @classmethod
    def one_bit(cls):
        return cls("onebit")

    @classmethod
    def k_bit(cls, k: int):
        return cls("kbit", k=k)

    @classmethod
    def standard_bit(cls, p: float | None = None):
        return cls("sbm", p=p)

    @classmethod
    def position_dependent(cls, probs, independent: bool = False):
        return cls("posdep-ea" if independent else "posdep", probs=tuple(probs),
                   independent=independent)

    @classmethod
    def fitness_dependent_k(cls):
        return cls("fdk")

    @classmethod
    def fitness_dependent_rate(cls):
        return cls("fdrate")

    @classmethod
    def mixed_one_two(cls, P: float):
        return cls("mixed", p=P)

    @classmethod
    def heavy_tailed(cls, beta: float = 1.5):
        return cls("heavy", beta=beta)

    @property
    def code(self) -> int:
        return _KINDS[self.kind]

    def rate(self, n: int) -> float:
        return 1.0 / n if self.p is None else float(self.p)

    def validate_for(self, n: int) -> None:
        if self.kind == "kbit" and self.k > n:
            raise DomainError(f"k={self.k} exceeds n={n}")
        if self.kind == "mixed" and n < 2 and self.rate(n) < 1.0:
            raise DomainError("two-bit flips need n >= 2")
        if self.kind.startswith("posdep") and len(self.probs) != n:
            raise DomainError(f"need {n} position probabilities, got {len(self.probs)}")

    def heavy_weights(self, n: int) -> np.ndarray:
        """Pr[alpha = a] proportional to a^-beta on a = 1..max(1, n//2)."""
        a = np.arange(1, max(1, n // 2) + 1, dtype=float)
        w = a ** -self.beta
        return w / w.sum()

    def encode(self, n: int):
        """(code, k, p, table) arguments of :func:`mutate_kernel`."""
        self.validate_for(n)
        if self.kind.startswith("posdep"):
            probs = np.array(self.probs)
            table = probs if self.independent else np.cumsum(probs)
        elif self.kind == "heavy":
            table = np.cumsum(self.heavy_weights(n))
        else:
            table = np.zeros(1)
        p = self.rate(n) if self.kind in ("sbm", "mixed") else 0.0
        return self.code, int(self.k), float(p), table

    def __str__(self) -> str:
        if self.kind == "kbit":
            return f"kbit:{self.k}"
        if self.kind in ("sbm", "mixed") and self.p is not None:
            return f"{self.kind}:{self.p!r}"
        if self.kind == "heavy":
            return f"heavy:{self.beta!r}"
        if self.kind.startswith("posdep"):
            return f"{self.kind}:" + ",".join(repr(q) for q in self.probs)
        return self.kind


def parse_op(text: str) -> MutationOp:
    """``onebit``, ``kbit:2``, ``sbm``, ``sbm:0.1``, ``mixed:0.5``, ``fdk``, ``fdrate``,
    ``heavy:1.5``, ``posdep:0.2,0.3,...`` or ``posdep-ea:...``."""
    kind, _, arg = text.strip().lower().partition(":")
    try:
        if kind == "kbit":
            return MutationOp.k_bit(int(arg))
        if kind in ("sbm", "mixed"):
            return MutationOp(kind, p=float(arg) if arg else None)
        if kind == "heavy":
            return MutationOp.heavy_tailed(float(arg) if arg else 1.5)
        if kind in ("posdep", "posdep-ea"):
            probs = [float(v) for v in arg.split(",") if v]
            return MutationOp.position_dependent(probs, independent=kind == "posdep-ea")
    except ValueError as exc:
        raise DomainError(f"cannot parse operator {text!r}") from exc
    return MutationOp(kind)


@njit(cache=True, nogil=True)
def flip_standard(y, p, state):
    """Flip every bit independently with probability p (geometric skips)."""
    n = y.size
    if p <= 0.0:
        return
    if p >= 1.0:
        for i in range(n):
            y[i] ^= 1
        return
    pos = rng.geometric(state, p) - 1
    while pos < n:
        y[pos] ^= 1
        pos += rng.geometric(state, p)


@njit(cache=True, nogil=True)
def flip_k_distinct(y, k, scratch, state):
    """Flip k distinct uniformly chosen positions; ``scratch`` holds a permutation of 0..n-1.

    The chosen positions end up in ``scratch[:k]``.
    """
    n = y.size
    for j in range(k):
        r = j + rng.randint(state, n - j)
        t = scratch[j]
        scratch[j] = scratch[r]
        scratch[r] = t
        y[scratch[j]] ^= 1


@njit(cache=True, nogil=True)
def mutate_kernel(x, y, code, k, p, table, fit, scratch, state):
    """Write the offspring of ``x`` into ``y``."""
    n = x.size
    for i in range(n):
        y[i] = x[i]
    if code == ONE_BIT:
        y[rng.randint(state, n)] ^= 1
    elif code == K_BIT:
        flip_k_distinct(y, k, scratch, state)
    elif code == STANDARD_BIT:
        flip_standard(y, p, state)
    elif code == POS_ONE:
        u = rng.uniform(state)
        if u < table[n - 1]:
            j = np.searchsorted(table, u, side="right")
            y[j] ^= 1
    elif code == POS_EA:
        for i in range(n):
            if rng.uniform(state) < table[i]:
                y[i] ^= 1
    elif code == FIT_K:
        kk = n // (fit + 1)
        if kk < 1:
            kk = 1
        if kk > n:
            kk = n
        flip_k_distinct(y, kk, scratch, state)
    elif code == FIT_RATE:
        flip_standard(y, 1.0 / (fit + 1.0), state)
    elif code == MIXED:
        if rng.uniform(state) < p:
            y[rng.randint(state, n)] ^= 1
        else:
            flip_k_distinct(y, 2, scratch, state)
    elif code == HEAVY:
        alpha = np.searchsorted(table, rng.uniform(state), side="right") + 1
        flip_standard(y, alpha / n, state)


def mutate(x, op: MutationOp, current_fitness: int = 0, state: np.ndarray | None = None,
           seed: int | None = None) -> np.ndarray:
    """Offspring of ``x`` under ``op``; ``x`` is left unchanged.

    Pass either a SplitMix64 ``state`` array (advanced in place) or a ``seed``.
    """
    from .benchmarks import as_bits

    bits = as_bits(x)
    n = bits.size
    if state is None:
        state = rng.new_state(0 if seed is None else seed)
    code, k, p, table = op.encode(n)
    out = np.empty_like(bits)
    mutate_kernel(bits, out, code, k, p, table, int(current_fitness),
                  np.arange(n, dtype=np.int64), state)
    return out
