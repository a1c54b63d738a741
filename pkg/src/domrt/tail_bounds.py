"""Chernoff-type tail bounds for sums of independent geometric random variables.

Every bound is returned clamped to [0, 1].  :func:`validate_bound` and
:func:`validate_lower_bound` check a bound against the exact tail computed by
:func:`domrt.dist_core.exact_dist`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .dist_core import DomainError, GatedGeomSpec, Verdict, exact_dist

UPPER_FAMILIES = ("janson1", "janson2", "scheideler", "weak", "equal")
LOWER_FAMILIES = ("janson", "middle", "scheideler")
FAMILY_IDS = ("janson1", "janson2", "scheideler", "weak", "equal", "janson-lower", "middle",
              "scheideler-lower", "witt", "witt-lower", "harmonic", "harmonic-sum", "coupon")


def _clamp(x: float) -> float:
    if math.isnan(x):
        raise DomainError("bound evaluated to NaN")
    return min(1.0, max(0.0, x))


def _check_p(p: float) -> None:
    if not 0.0 < p <= 1.0:
        raise DomainError(f"success probability {p!r} outside (0, 1]")


def harmonic_number(n: int) -> float:
    """H_n by compensated summation."""
    if n < 0:
        raise DomainError("harmonic numbers need n >= 0")
    return math.fsum(1.0 / i for i in range(1, n + 1))


def geom_sum_upper(family: str, n: int, p_min: float, mu: float, delta: float) -> float:
    """Bound on Pr[X >= (1+delta) mu] for X a sum of n independent geometric variables.

    ``equal`` assumes all success probabilities coincide (not checked).
    """
    if delta < 0 or math.isnan(delta):
        raise DomainError(f"delta={delta!r} must be >= 0")
    _check_p(p_min)
    if n < 1 or mu < n:
        raise DomainError("need n >= 1 and mu >= n")
    if delta == 0:
        return 1.0
    lg = delta - math.log1p(delta)
    x = delta * mu * p_min
    if family == "janson1":
        if p_min == 1.0:
            return 0.0
        return _clamp(math.exp(mu * lg * math.log1p(-p_min)) / (1.0 + delta))
    if family == "janson2":
        return _clamp(math.exp(-p_min * mu * lg))
    if family == "scheideler":
        return _clamp(math.exp(n * math.log1p(x / n) - x))
    if family == "weak":
        return _clamp(math.exp(-x * x / (2.0 * n * (1.0 + x / n))))
    if family == "equal":
        return _clamp(math.exp(-0.5 * delta * delta * (n - 1) / (1.0 + delta)))
    raise DomainError(f"unknown upper-tail family {family!r}; valid: {', '.join(UPPER_FAMILIES)}")


def geom_sum_lower(family: str, p_min: float, mu: float, delta: float) -> float:
    """Bound on Pr[X <= (1-delta) mu]."""
    if not 0.0 <= delta <= 1.0:
        raise DomainError(f"delta={delta!r} must lie in [0, 1]")
    _check_p(p_min)
    if delta == 0:
        return 1.0
    a = p_min * mu
    if family == "janson":
        if delta == 1.0:
            return 0.0
        # (1-delta)^a e^{delta a} = exp(-a (-delta - ln(1-delta))) <= 1
        return _clamp(math.exp(a * (math.log1p(-delta) + delta)))
    if family == "middle":
        return _clamp(math.exp(-delta * delta * a / (2.0 - 4.0 * delta / 3.0)))
    if family == "scheideler":
        return _clamp(math.exp(-0.5 * delta * delta * a))
    raise DomainError(f"unknown lower-tail family {family!r}; valid: {', '.join(LOWER_FAMILIES)}")


def witt_bounds(s: float, p_min: float, expect: float, lam: float) -> tuple[float, float]:
    """(bound on Pr[X >= E[X] + lam], bound on Pr[X <= E[X] - lam]); s = sum of 1/p_i^2."""
    if s < 0 or lam < 0 or expect < 0:
        raise DomainError("s, expect and lambda must be >= 0")
    _check_p(p_min)
    if lam == 0:
        return 1.0, 1.0
    if s == 0:
        return _clamp(math.exp(-0.25 * lam * p_min)), 0.0
    upper = math.exp(-0.25 * min(lam * lam / s, lam * p_min))
    lower = math.exp(-lam * lam / (2.0 * s))
    return _clamp(upper), _clamp(lower)


def harmonic_bound(n: int, C: float, delta: float) -> tuple[float, float, GatedGeomSpec]:
    """For n geometric variables with p_i >= C i / n.

    Returns (bound on E[X], bound on Pr[X >= (1+delta)(1/C) n ln n], a dominating
    spec ``ceil((1/C) n ln n) + Geom(C/n)``).
    """
    if n < 2:
        raise DomainError("harmonic bound needs n >= 2")
    if not 0.0 < C <= 1.0:
        raise DomainError(f"C={C!r} must lie in (0, 1]")
    if delta < 0:
        raise DomainError("delta must be >= 0")
    mean_bound = n * harmonic_number(n) / C
    tail = _clamp(n ** -delta)
    offset = math.ceil(n * math.log(n) / C - 1e-12)
    return mean_bound, tail, GatedGeomSpec.geometric_sum([C / n], offset=offset)


def harmonic_threshold(n: int, C: float, delta: float) -> float:
    return (1.0 + delta) * n * math.log(n) / C


def harmonic_sum_bound(n: int, m: int, C: float, lam: float) -> float:
    """Bound on Pr[Y >= (1/C)(ln n + 1) n m + lam] for a sum Y of m harmonic-type sums."""
    if n < 2 or m < 1:
        raise DomainError("need n >= 2 and m >= 1")
    if not 0.0 < C <= 1.0:
        raise DomainError(f"C={C!r} must lie in (0, 1]")
    if lam < 0:
        raise DomainError("lambda must be >= 0")
    lc = lam * C
    return _clamp(math.exp(-lc * lc / (2.0 * n * n * m * (1.0 + lc / (n * m)))))


def harmonic_sum_threshold(n: int, m: int, C: float, lam: float) -> float:
    return (math.log(n) + 1.0) * n * m / C + lam


def coupon_sum_bound(n: int, m: int, k: int, delta: float) -> tuple[float, float]:
    """(E[Y], bound on Pr[Y >= m n (ln k + 1) + delta n]) for Y a sum of m copies of D_n^k."""
    if not 1 <= k <= n:
        raise DomainError(f"k={k} must lie in [1..n={n}]")
    if m < 1:
        raise DomainError("m must be >= 1")
    if delta < 0:
        raise DomainError("delta must be >= 0")
    mean = m * n * harmonic_number(k)
    return mean, _clamp(math.exp(-delta * delta / (2.0 * m * (1.0 + delta / m))))


def coupon_threshold(n: int, m: int, k: int, delta: float) -> float:
    return m * n * (math.log(k) + 1.0) + delta * n


def coupon_spec(n: int, m: int, k: int) -> GatedGeomSpec:
    """Sum of m independent copies of sum_{i=1}^k Geom(i/n)."""
    if not 1 <= k <= n or m < 1:
        raise DomainError("need 1 <= k <= n and m >= 1")
    return GatedGeomSpec.geometric_sum([i / n for i in range(1, k + 1)] * m)


def validate_bound(spec: GatedGeomSpec, threshold: float, bound: float,
                   eps: float = 1e-9) -> Verdict:
    """Holds iff the exact Pr[X >= threshold] (unresolved tail counted) <= bound + 10 eps."""
    dist = exact_dist(spec, eps=eps)
    t = math.ceil(threshold - 1e-9)
    exact = dist.tail_at(t) if math.isfinite(t) else 0.0
    gap = exact - bound
    return Verdict(gap <= 10 * eps, t, max(gap, 0.0), f"Pr[X >= {t}] = {exact:.6g} vs {bound:.6g}")


def validate_lower_bound(spec: GatedGeomSpec, threshold: float, bound: float,
                         eps: float = 1e-9) -> Verdict:
    """Holds iff the exact Pr[X <= threshold] <= bound + 10 eps."""
    dist = exact_dist(spec, eps=eps)
    t = math.floor(threshold + 1e-9)
    exact = dist.cdf_at(t)
    gap = exact - bound
    return Verdict(gap <= 10 * eps, t, max(gap, 0.0), f"Pr[X <= {t}] = {exact:.6g} vs {bound:.6g}")


@dataclass(frozen=True)
class SpecSummary:
    """The parameters the bound families read off a plain geometric sum."""

    n: int
    p_min: float
    mu: float
    s: float
    equal: bool
    C: float

    @classmethod
    def of(cls, spec: GatedGeomSpec) -> "SpecSummary":
        if spec.offset != 0 or any(t.gate != 1.0 for t in spec.terms) or not spec.terms:
            raise DomainError("bound families apply to plain sums of geometric variables")
        ps = sorted(t.succ for t in spec.terms)
        n = len(ps)
        mu = math.fsum(1.0 / p for p in ps)
        s = math.fsum(1.0 / (p * p) for p in ps)
        C = min(1.0, min(p * n / (i + 1) for i, p in enumerate(ps)))
        return cls(n, ps[0], mu, s, ps[0] == ps[-1], C)


def family_bound(family: str, spec: GatedGeomSpec, param: float) -> tuple[str, float, float]:
    """Evaluate ``family`` on a plain geometric sum.

    Returns ``(side, threshold, bound)``: side ``"upper"`` bounds Pr[X >= threshold],
    ``"lower"`` bounds Pr[X <= threshold].  ``param`` is delta (lambda for the Witt
    families).  ``harmonic-sum`` treats the spec as one block (m = 1); use
    :func:`harmonic_sum_bound` directly for several blocks.
    """
    S = SpecSummary.of(spec)
    if family in UPPER_FAMILIES:
        if family == "equal" and not S.equal:
            raise DomainError("the equal family needs identical success probabilities")
        return "upper", (1 + param) * S.mu, geom_sum_upper(family, S.n, S.p_min, S.mu, param)
    if family in ("janson-lower", "middle", "scheideler-lower"):
        name = family.removesuffix("-lower")
        return "lower", (1 - param) * S.mu, geom_sum_lower(name, S.p_min, S.mu, param)
    if family in ("witt", "witt-lower"):
        up, lo = witt_bounds(S.s, S.p_min, S.mu, param)
        if family == "witt":
            return "upper", S.mu + param, up
        return "lower", S.mu - param, lo
    if family == "harmonic":
        if S.n < 2:
            raise DomainError("harmonic family needs n >= 2 terms")
        _, tail, _ = harmonic_bound(S.n, S.C, param)
        return "upper", harmonic_threshold(S.n, S.C, param), tail
    if family == "harmonic-sum":
        if S.n < 2:
            raise DomainError("harmonic-sum family needs n >= 2 terms")
        return "upper", harmonic_sum_threshold(S.n, 1, S.C, param), \
            harmonic_sum_bound(S.n, 1, S.C, param)
    raise DomainError(f"unknown family {family!r}; valid: {', '.join(FAMILY_IDS)}")


def check_family(family: str, spec: GatedGeomSpec, param: float, eps: float = 1e-9) -> Verdict:
    side, threshold, bound = family_bound(family, spec, param)
    if side == "upper":
        return validate_bound(spec, threshold, bound, eps)
    return validate_lower_bound(spec, threshold, bound, eps)


def applicable_families(spec: GatedGeomSpec) -> list[str]:
    S = SpecSummary.of(spec)
    fams = [f for f in FAMILY_IDS if f not in ("coupon", "equal", "harmonic", "harmonic-sum")]
    if S.equal:
        fams.append("equal")
    if S.n >= 2:
        fams += ["harmonic", "harmonic-sum"]
    return fams
