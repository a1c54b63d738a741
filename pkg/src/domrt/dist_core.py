"""Geometric distributions, gated geometric sums and exact domination checks.

A :class:`GatedGeomSpec` describes ``offset + sum_i X_i * Geom(succ_i)`` with
independent Bernoulli gates ``X_i``.  :func:`exact_dist` turns it into a
:class:`DiscreteDist`, an explicit PMF on a finite window plus a bounded amount
of probability mass beyond the window.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numba import njit
from scipy.signal import lfilter

from . import rng

DEFAULT_SUPPORT_CAP = 10_000_000


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class ResourceError(RuntimeError):
    """The requested exact computation exceeds the configured size cap."""


class TruncatedTailError(ValueError):
    """A quantile falls into the probability mass cut off by truncation."""


def _check_prob(p: float, name: str = "p", allow_zero: bool = False) -> None:
    lo_ok = p >= 0.0 if allow_zero else p > 0.0
    if not (lo_ok and p <= 1.0) or math.isnan(p):
        interval = "[0, 1]" if allow_zero else "(0, 1]"
        raise DomainError(f"{name}={p!r} must lie in {interval}")


def geom_pmf(p: float, k: int) -> float:
    """Pr[Geom(p) = k] = (1-p)^(k-1) p."""
    _check_prob(p)
    if k < 1:
        raise DomainError(f"k={k} must be a positive integer")
    return (1.0 - p) ** (k - 1) * p


def geom_tail(p: float, k: int) -> float:
    """Pr[Geom(p) >= k] = (1-p)^(k-1)."""
    _check_prob(p)
    if k < 1:
        raise DomainError(f"k={k} must be a positive integer")
    return (1.0 - p) ** (k - 1)


@dataclass(frozen=True)
class Term:
    gate: float
    succ: float

    def __post_init__(self):
        _check_prob(self.gate, "gate", allow_zero=True)
        _check_prob(self.succ, "succ")


@dataclass(frozen=True)
class GatedGeomSpec:
    """``offset + sum_i X_i * Geom(succ_i)`` with independent gates and geometrics."""

    offset: int = 0
    terms: tuple[Term, ...] = ()

    def __post_init__(self):
        if int(self.offset) != self.offset or self.offset < 0:
            raise DomainError(f"offset={self.offset!r} must be a non-negative integer")
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(
            self, "terms",
            tuple(t if isinstance(t, Term) else Term(*t) for t in self.terms),
        )

    @classmethod
    def geometric_sum(cls, succs: Iterable[float], offset: int = 0) -> "GatedGeomSpec":
        """Plain sum of independent geometrics (all gates 1)."""
        return cls(offset, tuple(Term(1.0, float(p)) for p in succs))

    @property
    def gates(self) -> np.ndarray:
        return np.array([t.gate for t in self.terms], dtype=float)

    @property
    def succs(self) -> np.ndarray:
        return np.array([t.succ for t in self.terms], dtype=float)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "GatedGeomSpec") -> "GatedGeomSpec":
        return GatedGeomSpec(self.offset + other.offset, self.terms + other.terms)


def spec_mean(spec: GatedGeomSpec) -> float:
    return spec.offset + math.fsum(t.gate / t.succ for t in spec.terms)


def spec_variance(spec: GatedGeomSpec) -> float:
    # Var[X G] = g E[G^2] - g^2 E[G]^2 with E[G^2] = (2 - p) / p^2
    return math.fsum(
        (t.gate * (2.0 - t.succ) - t.gate**2) / t.succ**2 for t in spec.terms
    )


def parse_spec(text: str) -> GatedGeomSpec:
    """Parse ``"3 + 1:0.5 + 11*0.5:0.25 + 4*0.3"``.

    Integers add to the offset, ``gate:succ`` is a gated term, a bare decimal
    ``succ`` an ungated one, and ``count*`` repeats a term.
    """
    offset = 0
    terms: list[Term] = []
    for raw in text.replace(",", "+").split("+"):
        tok = raw.strip()
        if not tok:
            continue
        try:
            count = 1
            if "*" in tok:
                c, tok = tok.split("*", 1)
                count = int(c)
                tok = tok.strip()
            if ":" in tok:
                gate, succ = (float(v) for v in tok.split(":"))
            elif count == 1 and "." not in tok and "e" not in tok.lower():
                offset += int(tok)
                continue
            else:
                gate, succ = 1.0, float(tok)
        except ValueError as exc:
            raise DomainError(f"cannot parse spec token {raw!r}") from exc
        terms.extend([Term(gate, succ)] * count)
    return GatedGeomSpec(offset, tuple(terms))


def format_spec(spec: GatedGeomSpec) -> str:
    parts = [str(spec.offset)] + [f"{t.gate!r}:{t.succ!r}" for t in spec.terms]
    return " + ".join(parts)


@dataclass(frozen=True, eq=False)
class DiscreteDist:
    """PMF on ``lo, lo+1, ...`` plus ``tail_mass`` beyond the last point.

    ``eps`` is the truncation budget the distribution was computed with;
    ``tail_mass <= eps`` always holds.
    """

    lo: int
    pmf: np.ndarray
    tail_mass: float = 0.0
    eps: float = 0.0
    _cdf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pmf = np.array(self.pmf, dtype=float)
        if pmf.ndim != 1 or pmf.size == 0:
            raise DomainError("pmf must be a non-empty 1-d sequence")
        if np.any(pmf < 0) or not np.all(np.isfinite(pmf)):
            raise DomainError("pmf entries must be finite and non-negative")
        total = math.fsum(pmf) + self.tail_mass
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"pmf + tail_mass sums to {total!r}, not 1")
        if self.tail_mass < 0 or self.tail_mass > self.eps:
            raise DomainError(f"tail_mass={self.tail_mass!r} exceeds eps={self.eps!r}")
        pmf.setflags(write=False)
        cdf = np.cumsum(pmf)
        cdf.setflags(write=False)
        object.__setattr__(self, "lo", int(self.lo))
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "_cdf", cdf)

    @classmethod
    def point_mass(cls, k: int) -> "DiscreteDist":
        return cls(k, np.ones(1))

    @property
    def hi(self) -> int:
        return self.lo + self.pmf.size - 1

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    @property
    def cdf(self) -> np.ndarray:
        return self._cdf

    def cdf_at(self, lam) -> np.ndarray | float:
        """Pr[X <= lam] as far as the window resolves it (beyond: 1 - tail_mass)."""
        lam_arr = np.floor(np.asarray(lam, dtype=float))
        idx = np.clip(lam_arr - self.lo, -1, self.pmf.size - 1).astype(np.int64)
        out = np.where(idx < 0, 0.0, self._cdf[np.maximum(idx, 0)])
        return float(out) if out.ndim == 0 else out

    def tail_at(self, k: int) -> float:
        """Pr[X >= k], counting the truncated mass as lying above ``k``."""
        return max(0.0, 1.0 - float(self.cdf_at(k - 1)))

    @property
    def mean(self) -> float:
        return float(np.dot(self.support, self.pmf))

    @property
    def variance(self) -> float:
        centred = self.support - self.mean
        return float(np.dot(centred * centred, self.pmf))

    def quantile(self, u: float) -> int:
        """Smallest support point whose CDF is at least ``u``."""
        if not 0.0 < u < 1.0:
            raise DomainError(f"u={u!r} must lie in (0, 1)")
        if u > self._cdf[-1]:
            raise TruncatedTailError(f"quantile {u!r} in truncated tail")
        return self.lo + int(np.searchsorted(self._cdf, u, side="left"))

    def to_csv(self, header_comments: Sequence[str] = ()) -> str:
        buf = io.StringIO()
        for line in header_comments:
            buf.write(f"# {line}\n")
        buf.write("k,pmf,cdf\n")
        for k, p, c in zip(range(self.lo, self.hi + 1), self.pmf, self._cdf):
            buf.write(f"{k},{float(p)!r},{float(c)!r}\n")
        buf.write(f"# eps={self.eps!r}\n")
        buf.write(f"# tail_mass={self.tail_mass!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DiscreteDist":
        meta: dict[str, str] = {}
        ks: list[int] = []
        ps: list[float] = []
        header_seen = False
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, sep, value = line[1:].strip().partition("=")
                if sep:
                    meta[key.strip()] = value.strip()
                continue
            if not header_seen:
                if line.replace(" ", "") != "k,pmf,cdf":
                    raise DomainError(f"expected header 'k,pmf,cdf', got {line!r}")
                header_seen = True
                continue
            k, p, _ = line.split(",")
            ks.append(int(k))
            ps.append(float(p))
        if not ks:
            raise DomainError("distribution CSV has no rows")
        if ks != list(range(ks[0], ks[0] + len(ks))):
            raise DomainError("support points must be consecutive integers")
        tail = float(meta.get("tail_mass", 0.0))
        eps = float(meta.get("eps", tail))
        return cls(ks[0], np.array(ps), tail, eps)


def _truncation_point(succ: float, share: float) -> int:
    """Smallest K with (1-succ)^K <= share."""
    if succ >= 1.0:
        return 1
    if share <= 0.0:
        raise DomainError("eps=0 requires every fired term to have succ=1")
    return max(1, math.ceil(math.log(share) / math.log1p(-succ)))


def exact_dist(
    spec: GatedGeomSpec, eps: float = 1e-9, cap: int = DEFAULT_SUPPORT_CAP
) -> DiscreteDist:
    """Exact PMF of ``spec`` on a window that misses at most ``eps`` mass.

    Each geometric term gets a truncation point at its ``1 - eps/(2m)``
    quantile; the window is the sum of those points, so the mass beyond it is
    at most ``eps/2``.  Inside the window the PMF is exact: convolving with a
    geometric is the first-order recursion r[k] = (1-p) r[k-1] + p x[k-1].
    """
    if not (0.0 <= eps <= 0.1) or math.isnan(eps):
        raise DomainError(f"eps={eps!r} must lie in [0, 0.1]")
    live = [t for t in spec.terms if t.gate > 0.0]
    m = max(1, len(live))
    share = eps / (2 * m)
    width = 1 + sum(_truncation_point(t.succ, share) for t in live)
    if width > cap:
        raise ResourceError(f"support of {width} points exceeds cap {cap}")

    cur = np.zeros(width)
    cur[0] = 1.0
    for t in live:
        shifted = lfilter([0.0, t.succ], [1.0, -(1.0 - t.succ)], cur)
        cur = shifted if t.gate >= 1.0 else (1.0 - t.gate) * cur + t.gate * shifted

    first = sum(1 for t in live if t.gate >= 1.0)
    pmf = np.clip(cur[first:], 0.0, None)
    tail = min(max(0.0, 1.0 - math.fsum(pmf)), eps)
    return DiscreteDist(spec.offset + first, pmf, tail, eps)


def geometric_dist(p: float, eps: float = 1e-9) -> DiscreteDist:
    return exact_dist(GatedGeomSpec(0, (Term(1.0, p),)), eps)


def mixture(weights: Sequence[float], dists: Sequence[DiscreteDist]) -> DiscreteDist:
    """Finite mixture; tail masses combine with the same weights."""
    if len(weights) != len(dists) or not dists:
        raise DomainError("weights and dists must be non-empty and of equal length")
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise DomainError("mixture weights must be non-negative and sum to 1")
    lo = min(d.lo for d in dists)
    hi = max(d.hi for d in dists)
    pmf = np.zeros(hi - lo + 1)
    for wi, d in zip(w, dists):
        pmf[d.lo - lo: d.hi - lo + 1] += wi * d.pmf
    tail = float(np.dot(w, [d.tail_mass for d in dists]))
    return DiscreteDist(lo, pmf, tail, max(d.eps for d in dists))


@njit(cache=True, nogil=True)
def _sample_spec_kernel(offset, gates, succs, seed, size):
    out = np.empty(size, dtype=np.int64)
    state = np.empty(1, dtype=np.uint64)
    state[0] = seed
    for s in range(size):
        total = offset
        for i in range(gates.size):
            if rng.uniform(state) < gates[i]:
                total += rng.geometric(state, succs[i])
        out[s] = total
    return out


def sample_spec_many(spec: GatedGeomSpec, seed: int, size: int) -> np.ndarray:
    """``size`` consecutive draws from one SplitMix64 stream seeded with ``seed``."""
    return _sample_spec_kernel(
        np.int64(spec.offset), spec.gates, spec.succs,
        np.uint64(int(seed) & rng.MASK64), int(size),
    )


def sample_spec(spec: GatedGeomSpec, seed: int) -> int:
    """One draw: gate by gate, each fired geometric by inverse transform."""
    return int(sample_spec_many(spec, seed, 1)[0])


@dataclass(frozen=True)
class Verdict:
    """Outcome of a domination test; truthy when the relation was not refuted."""

    holds: bool
    at: int | None = None
    gap: float | None = None
    label: str = ""

    def __bool__(self) -> bool:
        return self.holds

    def __str__(self) -> str:
        if self.holds:
            return self.label or "holds"
        return f"{self.label or 'fails'} at {self.at} (gap {self.gap:.6g})"


def _joint_cdfs(a: DiscreteDist, b: DiscreteDist):
    lo = min(a.lo, b.lo)
    hi = max(a.hi, b.hi)
    grid = np.arange(lo, hi + 1)
    return grid, a.cdf_at(grid), b.cdf_at(grid)


def dominates_exact(a: DiscreteDist, b: DiscreteDist, slack: float = 0.0) -> Verdict:
    """Test ``a`` is dominated by ``b``: CDF_a >= CDF_b - slack everywhere."""
    if a.eps > slack / 4 or b.eps > slack / 4:
        raise DomainError(
            f"truncation budgets ({a.eps!r}, {b.eps!r}) exceed slack/4={slack / 4!r}"
        )
    grid, fa, fb = _joint_cdfs(a, b)
    gap = fb - slack - fa
    bad = np.flatnonzero(gap > 0)
    if bad.size:
        i = int(bad[0])
        return Verdict(False, int(grid[i]), float(gap[i]), "fails")
    return Verdict(True, label="holds")


def quantile_couple(a: DiscreteDist, b: DiscreteDist, u: float) -> tuple[int, int]:
    """Common-uniform coupling: both generalized inverse CDFs evaluated at ``u``."""
    return a.quantile(u), b.quantile(u)
