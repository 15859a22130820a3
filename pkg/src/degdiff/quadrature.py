"""Adaptive quadrature and improper-integral convergence classification.

Two layers:

* :func:`integrate` — adaptive bisection with an embedded Gauss(7)/Kronrod(15)
  rule pair; the error estimate of a panel is the difference between the two
  rules, which is conservative for smooth integrands.
* :func:`improper_limit` / :func:`limit_at_boundary` — geometric stages toward
  a (possibly infinite) endpoint.  The sequence of partial integrals (or of
  function values) is classified as Finite / Infinite / Inconclusive from the
  behavior of its increments.  Inconclusive is a first-class outcome: tails
  whose estimated exponent sits inside a small band around the critical value
  are never forced into a verdict.
"""

from __future__ import annotations

import bisect
import math
import threading
from dataclasses import dataclass
from heapq import heappush, heappop
from typing import Callable, Sequence

__all__ = [
    "QuadratureResult",
    "ImproperVerdict",
    "StageEvidence",
    "LimitPolicy",
    "EvaluationError",
    "UnsupportedIntegrandError",
    "integrate",
    "improper_limit",
    "limit_at_boundary",
    "CachedIntegral",
]


class EvaluationError(ArithmeticError):
    """The integrand returned a non-finite value; carries the offending abscissa."""

    def __init__(self, x: float, value: float):
        super().__init__(f"integrand not finite at x={x!r}: {value!r}")
        self.x = x
        self.value = value


class UnsupportedIntegrandError(ValueError):
    """The integrand/function does not meet a precondition (sign change, non-monotone)."""


# 15-point Kronrod abscissae (positive half) and weights; the embedded 7-point
# Gauss rule uses the odd-indexed abscissae.
_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    subdivisions: int
    converged: bool


def _gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """One Gauss-Kronrod panel on [a, b]: returns (kronrod value, error estimate)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fc = f(mid)
    if not math.isfinite(fc):
        raise EvaluationError(mid, fc)
    ik = _WGK[7] * fc
    ig = _WG[3] * fc
    for j in range(7):
        dx = half * _XGK[j]
        x1, x2 = mid - dx, mid + dx
        f1, f2 = f(x1), f(x2)
        if not math.isfinite(f1):
            raise EvaluationError(x1, f1)
        if not math.isfinite(f2):
            raise EvaluationError(x2, f2)
        both = f1 + f2
        ik += _WGK[j] * both
        if j % 2 == 1:
            ig += _WG[j // 2] * both
    ik *= half
    ig *= half
    return ik, abs(ik - ig)


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    max_subdivisions: int = 2048,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod integration of ``f`` over the finite interval [a, b].

    Bisects the panel with the largest error estimate until the summed estimate
    drops below ``max(tol, tol*|value|)`` or the subdivision cap is hit (in
    which case ``converged`` is False).  Non-finite integrand values raise
    :class:`EvaluationError` with the offending abscissa.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integrate requires finite bounds")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0, True)
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    val, err = _gk15(f, a, b)
    # heap of (-panel_error, a, b, panel_value)
    heap: list[tuple[float, float, float, float]] = [(-err, a, b, val)]
    total, total_err = val, err
    n = 1
    while total_err > tol * max(1.0, abs(total)) and n < max_subdivisions:
        neg_e, pa, pb, pv = heappop(heap)
        pm = 0.5 * (pa + pb)
        if pm == pa or pm == pb:  # interval at floating-point resolution
            heappush(heap, (neg_e, pa, pb, pv))
            break
        v1, e1 = _gk15(f, pa, pm)
        v2, e2 = _gk15(f, pm, pb)
        total += v1 + v2 - pv
        total_err += e1 + e2 + neg_e
        heappush(heap, (-e1, pa, pm, v1))
        heappush(heap, (-e2, pm, pb, v2))
        n += 1
    total_err = max(total_err, 0.0)
    converged = total_err <= tol * max(1.0, abs(total))
    return QuadratureResult(sign * total, total_err, n, converged)


# ---------------------------------------------------------------------------
# improper limits


@dataclass(frozen=True)
class LimitPolicy:
    """Tolerances for the geometric-stage limit scheme.

    ``stage_ratio`` is the geometric factor by which the stage points approach
    a finite endpoint (or recede toward an infinite one, with factor
    1/stage_ratio).  ``exponent_band`` is the half-width of the Inconclusive
    band around the critical tail exponent -1.
    """

    stages: int = 12
    stage_ratio: float = 0.25
    cauchy_tol: float = 1e-8
    divergence_threshold: float = 1e8
    exponent_band: float = 0.05
    critical_tol: float = 1e-6
    quad_tol: float = 1e-11
    max_subdivisions: int = 2048


@dataclass(frozen=True)
class StageEvidence:
    """Stage points, partial values and the increment analysis behind a verdict."""

    points: tuple[float, ...]
    partials: tuple[float, ...]
    increments: tuple[float, ...] = ()
    mean_ratio: float | None = None
    tail_exponent: float | None = None
    note: str = ""


@dataclass(frozen=True)
class ImproperVerdict:
    kind: str  # "finite" | "infinite" | "inconclusive"
    value: float | None = None
    error_estimate: float | None = None
    evidence: StageEvidence | None = None

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def is_infinite(self) -> bool:
        return self.kind == "infinite"

    @property
    def is_inconclusive(self) -> bool:
        return self.kind == "inconclusive"


def _classify_stages(
    points: Sequence[float],
    values: Sequence[float],
    shrink: float,
    policy: LimitPolicy,
    quad_err: float = 0.0,
    note: str = "",
    exponent_offset: float = 1.0,
) -> ImproperVerdict:
    """Classify a sequence of stage values as Finite / Infinite / Inconclusive.

    ``values[k]`` is the partial integral (or function value) at stage ``k``;
    ``shrink`` is the geometric factor by which the stage distances to the
    endpoint contract (pass 1/Q for stages receding to infinity by factor Q).
    Increments of a partial integral of x^alpha scale like shrink^(alpha+1), so
    the evidence exponent is log(ratio)/log(shrink) - ``exponent_offset``; pass
    offset 0 when classifying raw function values.
    """
    values = [float(v) for v in values]
    thresh = policy.divergence_threshold

    def evidence(increments=(), ratio=None, extra="") -> StageEvidence:
        exp = None
        if ratio is not None and ratio > 0:
            exp = math.log(ratio) / math.log(shrink) - exponent_offset
        return StageEvidence(
            tuple(points[: len(values)]), tuple(values), tuple(increments),
            ratio, exp, (note + " " + extra).strip(),
        )

    # 1. hard divergence threshold (checked by the stage driver too, for early exit)
    if any(abs(v) >= thresh for v in values):
        return ImproperVerdict("infinite", evidence=evidence(extra="threshold"))

    incs = [v2 - v1 for v1, v2 in zip(values[:-1], values[1:])]
    if not incs:
        return ImproperVerdict("inconclusive", evidence=evidence())

    # 2. Cauchy: the last relative increments are below tolerance
    scale = max(1.0, abs(values[-1]))
    ncheck = min(3, len(incs))
    if all(abs(d) <= policy.cauchy_tol * scale for d in incs[-ncheck:]):
        err = abs(incs[-1]) + quad_err
        return ImproperVerdict("finite", values[-1], err, evidence(incs, extra="cauchy"))

    tail = incs[-min(5, len(incs)):]
    signs = {math.copysign(1.0, d) for d in tail if d != 0.0}
    if len(signs) != 1 or any(d == 0.0 for d in tail):
        return ImproperVerdict("inconclusive", evidence=evidence(incs, extra="mixed-sign increments"))

    ratios = [b / a for a, b in zip(tail[:-1], tail[1:])]
    log_r = [math.log(r) for r in ratios]
    mean_lr = sum(log_r) / len(log_r)
    r_bar = math.exp(mean_lr)
    spread = max(abs(lr - mean_lr) for lr in log_r)
    band = policy.exponent_band * abs(math.log(shrink))  # band width in log-ratio units

    # non-decreasing increments along the geometric ladder cannot sum to a
    # finite limit: covers growing tails and the exactly-critical (logarithmic)
    # divergence in one decisive rule
    if all(r >= 1.0 - policy.critical_tol for r in ratios):
        return ImproperVerdict("infinite", evidence=evidence(incs, r_bar, "non-decreasing increments"))

    power_like = spread <= max(0.02, 2.0 * policy.critical_tol)
    if power_like:
        if abs(mean_lr) <= band:
            return ImproperVerdict("inconclusive", evidence=evidence(incs, r_bar, "exponent band"))
        if r_bar > 1.0:
            return ImproperVerdict("infinite", evidence=evidence(incs, r_bar, "growing increments"))
        # geometric tail extrapolation, exact for pure power tails
        tail_now = tail[-1] * r_bar / (1.0 - r_bar)
        est_now = values[-1] + tail_now
        est_prev = values[-2] + tail[-1] / (1.0 - r_bar) if len(values) >= 2 else est_now
        err = abs(est_now - est_prev) + quad_err
        return ImproperVerdict("finite", est_now, err, evidence(incs, r_bar, "extrapolated"))

    # not power-like: decide only on uniform behavior of the ratios
    r_lo, r_hi = math.exp(-band), math.exp(band)
    if all(r <= r_lo for r in ratios):
        r_max = max(ratios)
        tail_bound = abs(tail[-1]) * r_max / (1.0 - r_max)
        est = values[-1] + math.copysign(tail_bound, tail[-1])
        return ImproperVerdict("finite", est, tail_bound + quad_err, evidence(incs, r_bar, "fast decay"))
    if all(r >= r_hi for r in ratios):
        return ImproperVerdict("infinite", evidence=evidence(incs, r_bar, "fast growth"))
    return ImproperVerdict("inconclusive", evidence=evidence(incs, r_bar, "irregular increments"))


def _stage_points(endpoint: float, c: float, policy: LimitPolicy) -> list[float]:
    q = policy.stage_ratio
    if math.isfinite(endpoint):
        gap = abs(c - endpoint)
        side = 1.0 if c > endpoint else -1.0
        return [endpoint + side * gap * q ** (k + 1) for k in range(policy.stages)]
    base = max(abs(c), 1.0)
    side = 1.0 if endpoint > 0 else -1.0
    return [side * base * (1.0 / q) ** (k + 1) for k in range(policy.stages)]


def _check_constant_sign(f: Callable[[float], float], pts: Sequence[float]) -> None:
    sgn = 0.0
    n_finite = 0
    for x in pts:
        v = f(x)
        if not math.isfinite(v):
            continue  # overflow far out is handled by the stage loop
        n_finite += 1
        if v == 0.0:
            continue
        s = math.copysign(1.0, v)
        if sgn == 0.0:
            sgn = s
        elif s != sgn:
            raise UnsupportedIntegrandError(
                f"integrand changes sign near the endpoint (at x={x!r})"
            )
    if n_finite == 0:
        raise EvaluationError(pts[0], float("nan"))


def improper_limit(
    f: Callable[[float], float],
    endpoint: float,
    c: float,
    policy: LimitPolicy = LimitPolicy(),
) -> ImproperVerdict:
    """Classify the improper integral of ``f`` between ``c`` and ``endpoint``.

    Partial integrals are accumulated over geometric stages approaching the
    endpoint.  The reported Finite value carries a geometric tail
    extrapolation, exact for power-law tails.  Requires ``f`` of constant sign
    near the endpoint (sampled check).
    """
    if math.isfinite(endpoint) and endpoint == c:
        raise ValueError("reference point must differ from the endpoint")
    pts = _stage_points(endpoint, c, policy)
    shrink = policy.stage_ratio if math.isfinite(endpoint) else 1.0 / policy.stage_ratio
    _check_constant_sign(f, pts[len(pts) // 2 :])

    partials: list[float] = []
    quad_err = 0.0
    prev = c
    total = 0.0
    for k, t in enumerate(pts):
        try:
            r = integrate(f, prev, t, policy.quad_tol, policy.max_subdivisions)
        except EvaluationError:
            if len(partials) >= 3:
                d = [b - a for a, b in zip(partials[:-1], partials[1:])]
                if all(x > 0 for x in d) or all(x < 0 for x in d):
                    if all(abs(b) >= abs(a) * (1 - 1e-9) for a, b in zip(d[:-1], d[1:])):
                        return ImproperVerdict(
                            "infinite",
                            evidence=StageEvidence(tuple(pts[:k]), tuple(partials),
                                                   note="integrand overflow near endpoint"),
                        )
            raise
        total += r.value
        quad_err += r.error_estimate
        partials.append(total)
        prev = t
        if abs(total) >= policy.divergence_threshold:
            break
    verdict = _classify_stages(pts, partials, shrink, policy, quad_err)
    if verdict.is_finite:
        # report in the natural left-to-right orientation: the stage loop
        # integrated from c toward the endpoint, which flips the sign when the
        # endpoint lies to the left of c
        value = verdict.value if endpoint > c else -verdict.value
        return ImproperVerdict("finite", value, verdict.error_estimate, verdict.evidence)
    return verdict


def limit_at_boundary(
    p: Callable[[float], float],
    endpoint: float,
    c: float,
    policy: LimitPolicy = LimitPolicy(),
) -> ImproperVerdict:
    """Finite/Infinite/Inconclusive verdict on ``lim p(x)`` as x approaches the endpoint.

    Uses the same geometric-stage classification applied to function values.
    Requires ``p`` monotone over the sampled stages.
    """
    pts = _stage_points(endpoint, c, policy)
    values: list[float] = []
    for t in pts:
        v = p(t)
        if not math.isfinite(v):
            if values and abs(values[-1]) >= 0.01 * policy.divergence_threshold:
                return ImproperVerdict(
                    "infinite",
                    evidence=StageEvidence(tuple(pts[: len(values)]), tuple(values),
                                           note="value overflow near endpoint"),
                )
            raise EvaluationError(t, v)
        values.append(v)
        if abs(v) >= policy.divergence_threshold:
            break
    diffs = [b - a for a, b in zip(values[:-1], values[1:])]
    if any(d > 0 for d in diffs) and any(d < 0 for d in diffs):
        raise UnsupportedIntegrandError("function is not monotone over the stage points")
    shrink = policy.stage_ratio if math.isfinite(endpoint) else 1.0 / policy.stage_ratio
    return _classify_stages(pts, values, shrink, policy, note="values", exponent_offset=0.0)


# ---------------------------------------------------------------------------
# memoized incremental integrals


class CachedIntegral:
    """Memoized x -> integral of f from base to x, built incrementally.

    Each new query integrates from the nearest previously computed anchor, so
    repeated evaluations (quadrature nodes, stage schemes) stay cheap.  Insert
    and lookup are guarded by a lock; values are plain floats, safe to read
    concurrently once computed.
    """

    def __init__(
        self,
        f: Callable[[float], float],
        base: float,
        tol: float = 1e-11,
        max_subdivisions: int = 2048,
        domain: tuple[float, float] | None = None,
    ):
        self.f = f
        self.base = float(base)
        self.tol = tol
        self.max_subdivisions = max_subdivisions
        self.domain = domain
        self._xs: list[float] = [self.base]
        self._vals: dict[float, float] = {self.base: 0.0}
        self._lock = threading.Lock()

    def __call__(self, x: float) -> float:
        x = float(x)
        if self.domain is not None and not (self.domain[0] < x < self.domain[1]):
            raise ValueError(
                f"point {x!r} outside the table's subinterval {self.domain}; "
                "analyse each subinterval with its own table"
            )
        with self._lock:
            v = self._vals.get(x)
            if v is not None:
                return v
            i = bisect.bisect_left(self._xs, x)
            cands = [j for j in (i - 1, i) if 0 <= j < len(self._xs)]
            x0 = min((self._xs[j] for j in cands), key=lambda a: abs(a - x))
            v0 = self._vals[x0]
        r = integrate(self.f, x0, x, self.tol, self.max_subdivisions)
        v = v0 + r.value
        with self._lock:
            if x not in self._vals:
                bisect.insort(self._xs, x)
                self._vals[x] = v
        return v
