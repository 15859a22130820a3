"""Scale function, speed measure, exit problems and boundary-nature classification.

For an SDE ``dX = b(X)dt + sigma(X)dB`` on an open interval where sigma does
not vanish, the scale function ``p`` and the speed density ``m`` are

    p'(x) = exp(-int_c^x 2b/sigma^2),   p(x) = int_c^x p',   m = 2/(sigma^2 p'),

for a reference point ``c``.  Every quantity here is computed by memoized
adaptive quadrature.  A degenerate interior point splits the state space; a
:class:`ScaleSpeedTable` is always bound to a single non-degenerate
subinterval.

The nature of an endpoint is read off the limits:

* ``lim p`` finite        -> attractive;
* ``lim |p| = inf``       -> repulsive;
* repulsive and the speed measure integrable near the endpoint
                          -> strongly repulsive.

An attractive endpoint is additionally probed for attainability (finite limit
of the expected exit time as the bracket approaches it).  Inconclusive numeric
sub-verdicts make the overall nature Unknown rather than a guess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .model import DiffusionSpec, Interval
from .quadrature import (
    CachedIntegral,
    ImproperVerdict,
    LimitPolicy,
    improper_limit,
    integrate,
    limit_at_boundary,
)

__all__ = [
    "Nature",
    "Attainability",
    "ErgodicKind",
    "ScaleSpeedTable",
    "BoundaryVerdict",
    "ErgodicVerdict",
    "build_scale_speed",
    "default_reference",
    "hitting_probability",
    "expected_exit_time",
    "green_exit_time",
    "classify_boundary",
    "classify_powerlaw",
    "classify_subinterval",
    "ergodic_verdict",
]


class Nature(Enum):
    ATTRACTIVE = "attractive"
    REPULSIVE = "repulsive"
    STRONGLY_REPULSIVE = "strongly_repulsive"
    UNKNOWN = "unknown"

    @property
    def is_repulsive(self) -> bool:
        return self in (Nature.REPULSIVE, Nature.STRONGLY_REPULSIVE)


class Attainability(Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class ErgodicKind(Enum):
    CONVERGE_TO_LEFT = "converge_to_left"
    CONVERGE_TO_RIGHT = "converge_to_right"
    RANDOM_BOUNDARY_LIMIT = "random_boundary_limit"
    POSITIVE_RECURRENT = "positive_recurrent"
    NULL_RECURRENT_DIRAC = "null_recurrent_dirac"
    NULL_RECURRENT_BOUNDARY_SUPPORT = "null_recurrent_boundary_support"
    UNDETERMINED = "undetermined"


class ScaleSpeedTable:
    """Memoized scale function / speed density on one non-degenerate subinterval.

    Queries are read-only and internally synchronized, so a built table can be
    shared across threads.
    """

    def __init__(self, spec: DiffusionSpec, sub: Interval, c: float, policy: LimitPolicy):
        if not sub.contains(c):
            raise ValueError(f"reference point {c} not interior to {sub}")
        if c in spec.degenerate_points:
            raise ValueError("reference point must not be a degenerate point")
        self.spec = spec
        self.sub = sub
        self.c = float(c)
        self.policy = policy
        dom = (sub.left, sub.right)

        def log_slope(z: float) -> float:
            s2 = spec.sigma2(z)
            if s2 <= 0.0:
                raise ZeroDivisionError(
                    f"sigma vanishes at x={z!r}: the integration path touches a "
                    "degenerate point; analyse each subinterval separately"
                )
            return 2.0 * spec.drift(z) / s2

        self._exponent = CachedIntegral(log_slope, c, policy.quad_tol, domain=dom)
        self.p = CachedIntegral(self.p_prime, c, policy.quad_tol, domain=dom)
        self._m_cumulative = CachedIntegral(self.m, c, policy.quad_tol, domain=dom)
        self._pm_cumulative = CachedIntegral(
            lambda y: self.p(y) * self.m(y), c, policy.quad_tol, domain=dom
        )

    def p_prime(self, x: float) -> float:
        """Derivative of the scale function; positive, equals 1 at the reference point."""
        e = -self._exponent(x)
        if e > 709.0:  # exp overflow: propagate as a non-finite evaluation
            return math.inf
        return math.exp(e)

    def p_second(self, x: float) -> float:
        """p'' from the defining ODE: p'' = -(2b/sigma^2) p'."""
        return -2.0 * self.spec.drift(x) / self.spec.sigma2(x) * self.p_prime(x)

    def m(self, x: float) -> float:
        """Speed density 2 / (sigma^2 p')."""
        return 2.0 / (self.spec.sigma2(x) * self.p_prime(x))

    def m_cumulative(self, x: float) -> float:
        """Integral of the speed density from the reference point to x."""
        return self._m_cumulative(x)

    def pm_cumulative(self, x: float) -> float:
        """Integral of p * m from the reference point to x."""
        return self._pm_cumulative(x)


def default_reference(sub: Interval) -> float:
    """Midpoint for finite subintervals, unit offset from a finite end for half-lines, else 0."""
    lf, rf = math.isfinite(sub.left), math.isfinite(sub.right)
    if lf and rf:
        return 0.5 * (sub.left + sub.right)
    if lf:
        return sub.left + 1.0
    if rf:
        return sub.right - 1.0
    return 0.0


def build_scale_speed(
    spec: DiffusionSpec,
    c: float | None = None,
    policy: LimitPolicy = LimitPolicy(),
) -> ScaleSpeedTable:
    """Build the scale/speed table for the subinterval containing ``c``.

    With ``c`` omitted and no degenerate points, the default reference of the
    full interval is used; with degenerate points, ``c`` selects which
    subinterval is analysed.
    """
    subs = spec.subintervals()
    if c is None:
        if len(subs) > 1:
            raise ValueError(
                "spec has degenerate points; pass a reference point to select a subinterval"
            )
        c = default_reference(subs[0])
    for sub in subs:
        if sub.contains(c):
            return ScaleSpeedTable(spec, sub, c, policy)
    raise ValueError(f"reference point {c} outside every subinterval")


def _require_bracket(table: ScaleSpeedTable, x: float, a: float, b: float) -> None:
    if not a < x < b:
        raise ValueError(f"need a < x < b, got a={a}, x={x}, b={b}")
    if not (table.sub.left < a and b < table.sub.right):
        raise ValueError(f"[{a}, {b}] not inside the table's subinterval {table.sub}")


def hitting_probability(table: ScaleSpeedTable, x: float, a: float, b: float) -> float:
    """Probability that the diffusion started at x reaches b before a."""
    if x == a:
        return 0.0
    if x == b:
        return 1.0
    _require_bracket(table, x, a, b)
    pa, px, pb = table.p(a), table.p(x), table.p(b)
    u = (px - pa) / (pb - pa)
    return min(1.0, max(0.0, u))


def expected_exit_time(table: ScaleSpeedTable, x: float, a: float, b: float) -> float:
    """Expected exit time of ]a, b[ starting from x, via scale and speed.

    E[T] = (1-u) int_a^x (p(y)-p(a)) m(y) dy + u int_x^b (p(b)-p(y)) m(y) dy
    with u the probability of exiting through b.
    """
    if x == a or x == b:
        return 0.0
    _require_bracket(table, x, a, b)
    u = hitting_probability(table, x, a, b)
    pa, pb = table.p(a), table.p(b)
    tol = table.policy.quad_tol
    left = integrate(lambda y: (table.p(y) - pa) * table.m(y), a, x, tol)
    right = integrate(lambda y: (pb - table.p(y)) * table.m(y), x, b, tol)
    return (1.0 - u) * left.value + u * right.value


def green_exit_time(table: ScaleSpeedTable, x: float, a: float, b: float) -> float:
    """Expected exit time via the Green function of the scale-transformed process.

    Computes int_a^b G(p(x), p(z)) m(z) dz with
    G(y, z) = (y^z - pa)(pb - yvz)/(pb - pa); cross-checks
    :func:`expected_exit_time`.
    """
    if x == a or x == b:
        return 0.0
    _require_bracket(table, x, a, b)
    pa, pb, px = table.p(a), table.p(b), table.p(x)
    denom = pb - pa

    def g_left(z: float) -> float:  # z <= x: p(z) <= p(x)
        return (table.p(z) - pa) * (pb - px) / denom * table.m(z)

    def g_right(z: float) -> float:  # z >= x
        return (px - pa) * (pb - table.p(z)) / denom * table.m(z)

    tol = table.policy.quad_tol
    return integrate(g_left, a, x, tol).value + integrate(g_right, x, b, tol).value


@dataclass(frozen=True)
class BoundaryVerdict:
    """Nature of one endpoint plus the numeric evidence that produced it."""

    endpoint: float
    nature: Nature
    attainable: Attainability
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        def verd(v) -> dict | float | None:
            if not isinstance(v, ImproperVerdict):
                return v
            d = {"kind": v.kind, "value": v.value, "error_estimate": v.error_estimate}
            if v.evidence is not None:
                d["stage_points"] = list(v.evidence.points)
                d["partials"] = list(v.evidence.partials)
                d["tail_exponent"] = v.evidence.tail_exponent
                d["note"] = v.evidence.note
            return d

        return {
            "endpoint": self.endpoint if math.isfinite(self.endpoint) else
            ("inf" if self.endpoint > 0 else "-inf"),
            "nature": self.nature.value,
            "attainable": self.attainable.value,
            "evidence": {k: verd(v) for k, v in self.evidence.items()},
        }


def _exit_time_limit(table: ScaleSpeedTable, endpoint: float, policy: LimitPolicy) -> ImproperVerdict:
    """Stage scheme on expected exit times as the bracket end approaches the endpoint.

    The bracket is (b_k, x, c) with b_k the geometric stage points; the
    endpoint-side integral of the exit-time formula is expressed through the
    table's cumulative integrals of m and p*m, so each stage only extends those
    caches over the fresh sliver instead of re-integrating the whole bracket.
    """
    c = table.c
    q = policy.stage_ratio
    if math.isfinite(endpoint):
        gap = abs(c - endpoint)
        side = 1.0 if c > endpoint else -1.0
        x = endpoint + side * gap * math.sqrt(q)  # fixed interior start between stages and c
        pts = [endpoint + side * gap * q ** (k + 1) for k in range(policy.stages)]
    else:
        base = max(abs(c), 1.0)
        side = 1.0 if endpoint > 0 else -1.0
        x = side * base * (1.0 / q) ** 0.5
        pts = [side * base * (1.0 / q) ** (k + 1) for k in range(policy.stages)]

    px, pc = table.p(x), table.p(c)
    mx, pmx = table.m_cumulative(x), table.pm_cumulative(x)
    # the c-side integral of the exit-time formula does not depend on the stage
    fixed = integrate(
        lambda y: abs(pc - table.p(y)) * table.m(y), min(x, c), max(x, c), policy.quad_tol
    ).value

    values = []
    for b in pts:
        pb = table.p(b)
        # int between b and x of (p(y) - p(b)) m(y) dy, via cumulative integrals
        moving = abs((pmx - table.pm_cumulative(b)) - pb * (mx - table.m_cumulative(b)))
        u_far = abs(px - pb) / abs(pc - pb)  # probability of exiting on the c side
        values.append((1.0 - u_far) * moving + u_far * fixed)
        if abs(values[-1]) >= policy.divergence_threshold:
            break
    from .quadrature import _classify_stages  # same increment analysis

    shrink = q if math.isfinite(endpoint) else 1.0 / q
    return _classify_stages(pts, values, shrink, policy, note="exit-time", exponent_offset=0.0)


def classify_boundary(
    table: ScaleSpeedTable,
    endpoint: float,
    policy: LimitPolicy | None = None,
) -> BoundaryVerdict:
    """Classify one endpoint of the table's subinterval.

    ``lim p`` finite -> attractive (then attainability is probed through the
    exit-time limit); infinite -> repulsive, upgraded to strongly repulsive
    when the speed measure is integrable near the endpoint.  Any inconclusive
    sub-verdict for the nature yields Unknown.
    """
    policy = policy or table.policy
    if endpoint not in (table.sub.left, table.sub.right):
        raise ValueError(f"{endpoint} is not an endpoint of {table.sub}")

    evidence: dict[str, ImproperVerdict] = {}
    p_lim = limit_at_boundary(table.p, endpoint, table.c, policy)
    evidence["scale_limit"] = p_lim

    if p_lim.is_inconclusive:
        return BoundaryVerdict(endpoint, Nature.UNKNOWN, Attainability.UNKNOWN, evidence)

    if p_lim.is_infinite:
        m_verdict = improper_limit(table.m, endpoint, table.c, policy)
        evidence["speed_integral"] = m_verdict
        if m_verdict.is_inconclusive:
            return BoundaryVerdict(endpoint, Nature.UNKNOWN, Attainability.UNKNOWN, evidence)
        nature = Nature.STRONGLY_REPULSIVE if m_verdict.is_finite else Nature.REPULSIVE
        # a repulsive endpoint is never reached from the interior
        return BoundaryVerdict(endpoint, nature, Attainability.NO, evidence)

    exit_lim = _exit_time_limit(table, endpoint, policy)
    evidence["exit_time_limit"] = exit_lim
    if exit_lim.is_finite:
        att = Attainability.YES
    elif exit_lim.is_infinite:
        att = Attainability.NO
    else:
        att = Attainability.UNKNOWN
    return BoundaryVerdict(endpoint, Nature.ATTRACTIVE, att, evidence)


def classify_powerlaw(profile) -> BoundaryVerdict:
    """Exact exponent arithmetic for the nature of a degenerate point with local power laws.

    With b ~ sgn(x-d) c_b |x-d|^beta and sigma ~ c_sigma |x-d|^varsigma, the
    sign of s = 1 + beta - 2*varsigma and the comparison of c_sigma with
    sqrt(2 c_b) decide the covered cases:

    * s > 0                                   -> attractive;
    * s = 0, c_sigma > sqrt(2 c_b)            -> attractive;
    * s = 0, c_sigma < sqrt(2 c_b), beta = 1  -> strongly repulsive;
    * s < 0, c_sigma <= sqrt(2 c_b), beta <= 1 -> strongly repulsive;
    * anything else                           -> Unknown.
    """
    s = 1.0 + profile.beta - 2.0 * profile.varsigma
    crit = math.sqrt(2.0 * profile.c_b)
    if s > 0:
        nature = Nature.ATTRACTIVE
    elif s == 0 and profile.c_sigma > crit:
        nature = Nature.ATTRACTIVE
    elif s == 0 and profile.c_sigma < crit and profile.beta == 1.0:
        nature = Nature.STRONGLY_REPULSIVE
    elif s < 0 and profile.c_sigma <= crit and 0.0 < profile.beta <= 1.0:
        nature = Nature.STRONGLY_REPULSIVE
    else:
        nature = Nature.UNKNOWN
    if nature is Nature.UNKNOWN:
        att = Attainability.UNKNOWN
    else:
        # in every covered attractive case (p - p(delta)) m ~ y^(1-2*varsigma)
        # near delta, non-integrable for varsigma >= 1: never attainable
        att = Attainability.NO
    return BoundaryVerdict(profile.delta, nature, att, {"exponent_gap": s})


@dataclass(frozen=True)
class ErgodicVerdict:
    """Long-run behavior of the diffusion on one subinterval."""

    kind: ErgodicKind
    prob_left: Callable[[float], float] | None = None
    prob_left_at_x0: float | None = None
    dirac_at: float | None = None
    speed_mass: float | None = None  # normalizer of the speed measure when finite

    def to_json(self) -> dict:
        dirac = self.dirac_at
        if dirac is not None and not math.isfinite(dirac):
            dirac = "inf" if dirac > 0 else "-inf"
        return {
            "kind": self.kind.value,
            "prob_left_at_x0": self.prob_left_at_x0,
            "dirac_at": dirac,
            "speed_mass": self.speed_mass,
        }


def ergodic_verdict(
    left: BoundaryVerdict,
    right: BoundaryVerdict,
    table: ScaleSpeedTable,
    x0: float | None = None,
) -> ErgodicVerdict:
    """Combine two boundary verdicts into the ergodic behavior on the subinterval.

    Decision table (A attractive, R repulsive, SR strongly repulsive):
    (A, R/SR) -> converge to the left end; (R/SR, A) -> right end;
    (A, A) -> random boundary limit with P(lim = left) read off the scale
    limits; (SR, SR) -> positive recurrent with the normalized speed measure;
    (SR, R) / (R, SR) -> null recurrent with empirical measures collapsing on
    the simply-repulsive end; (R, R) -> null recurrent with boundary-supported
    weak limits.  Any Unknown input gives Undetermined.
    """
    ln, rn = left.nature, right.nature
    if ln is Nature.UNKNOWN or rn is Nature.UNKNOWN:
        return ErgodicVerdict(ErgodicKind.UNDETERMINED)
    if ln is Nature.ATTRACTIVE and rn.is_repulsive:
        return ErgodicVerdict(ErgodicKind.CONVERGE_TO_LEFT, dirac_at=left.endpoint)
    if rn is Nature.ATTRACTIVE and ln.is_repulsive:
        return ErgodicVerdict(ErgodicKind.CONVERGE_TO_RIGHT, dirac_at=right.endpoint)
    if ln is Nature.ATTRACTIVE and rn is Nature.ATTRACTIVE:
        p_l = left.evidence["scale_limit"].value
        p_r = right.evidence["scale_limit"].value

        def prob_left(x: float, _pl=p_l, _pr=p_r) -> float:
            return (_pr - table.p(x)) / (_pr - _pl)

        at_x0 = prob_left(x0) if x0 is not None else None
        return ErgodicVerdict(ErgodicKind.RANDOM_BOUNDARY_LIMIT, prob_left, at_x0)
    if ln is Nature.STRONGLY_REPULSIVE and rn is Nature.STRONGLY_REPULSIVE:
        mass = (
            left.evidence["speed_integral"].value
            + right.evidence["speed_integral"].value
        )
        return ErgodicVerdict(ErgodicKind.POSITIVE_RECURRENT, speed_mass=mass)
    if ln is Nature.STRONGLY_REPULSIVE and rn is Nature.REPULSIVE:
        return ErgodicVerdict(ErgodicKind.NULL_RECURRENT_DIRAC, dirac_at=right.endpoint)
    if rn is Nature.STRONGLY_REPULSIVE and ln is Nature.REPULSIVE:
        return ErgodicVerdict(ErgodicKind.NULL_RECURRENT_DIRAC, dirac_at=left.endpoint)
    return ErgodicVerdict(ErgodicKind.NULL_RECURRENT_BOUNDARY_SUPPORT)


def classify_subinterval(
    spec: DiffusionSpec,
    c: float | None = None,
    policy: LimitPolicy = LimitPolicy(),
    x0: float | None = None,
) -> tuple[ScaleSpeedTable, BoundaryVerdict, BoundaryVerdict, ErgodicVerdict]:
    """Convenience wrapper: build the table, classify both ends, combine."""
    table = build_scale_speed(spec, c, policy)
    left = classify_boundary(table, table.sub.left, policy)
    right = classify_boundary(table, table.sub.right, policy)
    return table, left, right, ergodic_verdict(left, right, table, x0)
