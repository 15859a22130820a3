"""Grid verification of Lyapunov-style criteria for boundary natures.

The nature of a degenerate boundary point can be certified by a nonnegative
C^2 function v with v(delta) = 0, through pointwise inequalities between the
generator Av = b v' + sigma^2 v''/2 and sigma^2 (v')^2 / (2v):

* repulsive           Av >= sigma^2 (v')^2 / (2v)
* strongly repulsive  Av >= sigma^2 (v')^2 / (2v) + eps * v   (some eps > 0)
* attractive          Av <  sigma^2 (v')^2 / (2v)

These are checked on grids accumulating toward delta.  The module also builds
the two canonical certificates from the scale/speed table (V = p - p(c) with
AV = 0, and the speed-weighted primitive with AV = -1) and verifies the
hypotheses under which the Euler scheme stops crossing delta (convexity,
v'b >= 0 and |v' sigma| <= c_sigma v).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import DiffusionSpec, Interval
from .feller import Nature, ScaleSpeedTable
from .quadrature import CachedIntegral, improper_limit

__all__ = [
    "LyapunovCandidate",
    "ConditionReport",
    "generator_apply",
    "default_grid",
    "check_repulsive",
    "check_strongly_repulsive",
    "check_attractive",
    "check_euler_hypotheses",
    "canonical_repulsive_V",
    "canonical_strong_V",
    "lyapunov_classification",
]


@dataclass(frozen=True)
class LyapunovCandidate:
    """A candidate certificate: v with analytic first and second derivatives."""

    v: Callable[[float], float]
    v_prime: Callable[[float], float]
    v_second: Callable[[float], float]
    neighborhood: Interval
    name: str = "candidate"


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of a grid check: worst margin and where it occurs."""

    condition: str
    holds: bool
    worst_margin: float
    worst_point: float
    epsilon: float | None = None

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "holds": self.holds,
            "worst_margin": self.worst_margin,
            "worst_point": self.worst_point,
            "epsilon": self.epsilon,
        }


def generator_apply(
    spec: DiffusionSpec,
    f: Callable[[float], float],
    f_prime: Callable[[float], float],
    f_second: Callable[[float], float],
    x: float,
) -> float:
    """Infinitesimal generator: b(x) f'(x) + sigma^2(x) f''(x) / 2."""
    return spec.drift(x) * f_prime(x) + 0.5 * spec.sigma2(x) * f_second(x)


def default_grid(delta: float, radius: float, n: int = 2048, inner_frac: float = 1e-4) -> np.ndarray:
    """Logarithmically spaced grid accumulating toward delta over (delta, delta+radius).

    Pass a negative radius for the left side.  The innermost point sits at
    ``inner_frac * |radius|`` from delta: the conditions are tightest near the
    degenerate point but their margins vanish there, so the grid stops short
    of the float floor.
    """
    rs = np.geomspace(abs(radius) * inner_frac, abs(radius), n)
    return delta + math.copysign(1.0, radius) * rs


def _margins(
    candidate: LyapunovCandidate,
    spec: DiffusionSpec,
    grid: np.ndarray,
    epsilon: float = 0.0,
) -> np.ndarray:
    out = np.empty(len(grid))
    for i, x in enumerate(grid):
        x = float(x)
        vx = candidate.v(x)
        if vx == 0.0:
            raise ZeroDivisionError(f"candidate v vanishes at grid point x={x!r}")
        lhs = generator_apply(spec, candidate.v, candidate.v_prime, candidate.v_second, x)
        vp = candidate.v_prime(x)
        rhs = 0.5 * spec.sigma2(x) * vp * vp / vx + epsilon * vx
        out[i] = lhs - rhs
    return out


def _report(condition: str, margins: np.ndarray, grid: np.ndarray,
            holds: bool, epsilon: float | None = None) -> ConditionReport:
    i = int(np.argmin(margins))
    return ConditionReport(condition, holds, float(margins[i]), float(grid[i]), epsilon)


def check_repulsive(candidate: LyapunovCandidate, spec: DiffusionSpec, grid) -> ConditionReport:
    """Check Av >= sigma^2 (v')^2 / (2v) on the grid (one-sided v, v(delta) = 0)."""
    grid = np.asarray(grid, dtype=float)
    margins = _margins(candidate, spec, grid)
    return _report("repulsive", margins, grid, bool(np.min(margins) >= 0.0))


def check_strongly_repulsive(
    candidate: LyapunovCandidate, spec: DiffusionSpec, grid, epsilon: float
) -> ConditionReport:
    """Check Av >= sigma^2 (v')^2 / (2v) + epsilon * v on the grid."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    grid = np.asarray(grid, dtype=float)
    margins = _margins(candidate, spec, grid, epsilon)
    return _report("strongly_repulsive", margins, grid, bool(np.min(margins) >= 0.0), epsilon)


_STRICT = 1e-12  # floating-point realization of the strict inequality


def check_attractive(candidate: LyapunovCandidate, spec: DiffusionSpec, grid) -> ConditionReport:
    """Check the strict inequality Av < sigma^2 (v')^2 / (2v) at every grid point."""
    grid = np.asarray(grid, dtype=float)
    margins = _margins(candidate, spec, grid)
    worst = float(np.max(margins))
    i = int(np.argmax(margins))
    return ConditionReport("attractive", worst < -_STRICT, worst, float(grid[i]))


def check_euler_hypotheses(
    candidate: LyapunovCandidate,
    spec: DiffusionSpec,
    u_delta: Interval,
    n: int = 2048,
) -> ConditionReport:
    """Verify the no-more-crossing hypotheses on a two-sided neighborhood of delta.

    Needs v convex (v'' >= 0), v'b >= 0 and a finite c_sigma with
    |v' sigma| <= c_sigma v off delta.  The report's ``epsilon`` field carries
    the smallest valid c_sigma (the grid maximum of |v' sigma| / v); the check
    fails when that ratio grows unboundedly toward delta.
    """
    delta = 0.5 * (u_delta.left + u_delta.right)
    half = 0.5 * (u_delta.right - u_delta.left)
    right = default_grid(delta, half * (1 - 1e-9), n // 2)
    left = default_grid(delta, -half * (1 - 1e-9), n // 2)
    grid = np.concatenate([left[::-1], right])

    ratios = np.empty(len(grid))
    worst_margin = math.inf
    worst_point = float(grid[0])
    ok = True
    for i, x in enumerate(grid):
        x = float(x)
        vx = candidate.v(x)
        if vx == 0.0:
            raise ZeroDivisionError(f"candidate v vanishes at grid point x={x!r}")
        conv = candidate.v_second(x)
        drift_align = candidate.v_prime(x) * spec.drift(x)
        m = min(conv, drift_align)
        if m < worst_margin:
            worst_margin, worst_point = m, x
        if m < 0.0:
            ok = False
        ratios[i] = abs(candidate.v_prime(x) * spec.sigma(x)) / vx

    # detect an unbounded ratio: compare the maxima over the innermost and
    # next decade of grid distances; growth toward delta means no valid c_sigma
    dist = np.abs(grid - delta)
    dmin = dist.min()
    inner = ratios[dist <= dmin * 10.0]
    outer = ratios[(dist > dmin * 10.0) & (dist <= dmin * 100.0)]
    unbounded = outer.size > 0 and inner.max() > 2.0 * outer.max()
    if unbounded:
        ok = False
        c_sigma = None
    else:
        c_sigma = float(ratios.max())
    return ConditionReport("euler_hypotheses", ok, float(worst_margin), worst_point, c_sigma)


# ---------------------------------------------------------------------------
# canonical constructions from the scale/speed table


def canonical_repulsive_V(table: ScaleSpeedTable, delta: float, c: float | None = None) -> LyapunovCandidate:
    """V = +-(p - p(c)) on the side of c toward delta; satisfies AV = 0.

    Nonnegative and increasing toward the endpoint; unbounded exactly when the
    endpoint is repulsive.
    """
    c = table.c if c is None else c
    pc = table.p(c)
    sign = 1.0 if delta > c else -1.0  # orient so V >= 0 toward the endpoint

    def v(x: float) -> float:
        return sign * (table.p(x) - pc)

    def v_prime(x: float) -> float:
        return sign * table.p_prime(x)

    def v_second(x: float) -> float:
        return sign * table.p_second(x)

    nb = Interval(c, delta) if delta > c else Interval(delta, c)
    return LyapunovCandidate(v, v_prime, v_second, nb, "scale-shift")


def canonical_strong_V(table: ScaleSpeedTable, delta: float, c: float | None = None) -> LyapunovCandidate:
    """Speed-weighted primitive with AV = -1 toward a strongly repulsive endpoint.

    V(x) = int_c^x p'(y) M(y) dy with M(y) the speed mass between y and the
    endpoint; requires that mass to be finite (raises otherwise).
    """
    c = table.c if c is None else c
    m_tail = improper_limit(table.m, delta, c, table.policy)
    if not m_tail.is_finite:
        raise ValueError(
            f"speed measure not integrable toward {delta}: endpoint is not strongly repulsive"
        )
    total = m_tail.value
    sign = 1.0 if delta > c else -1.0

    def mass_toward(y: float) -> float:
        # mass of the speed measure between y and the endpoint
        return total - sign * table.m_cumulative(y)

    def integrand(y: float) -> float:
        return table.p_prime(y) * mass_toward(y)

    primitive = CachedIntegral(integrand, c, table.policy.quad_tol,
                               domain=(table.sub.left, table.sub.right))

    def v(x: float) -> float:
        return sign * primitive(x)

    def v_prime(x: float) -> float:
        return sign * integrand(x)

    def v_second(x: float) -> float:
        return sign * (table.p_second(x) * mass_toward(x) - table.p_prime(x) * table.m(x) * sign)

    nb = Interval(c, delta) if delta > c else Interval(delta, c)
    return LyapunovCandidate(v, v_prime, v_second, nb, "speed-primitive")


def lyapunov_classification(
    spec: DiffusionSpec,
    candidates: dict[str, LyapunovCandidate],
    grids: dict[str, np.ndarray],
    epsilon: float,
) -> Nature:
    """Strongest-first ladder over the three grid checks.

    ``candidates``/``grids`` map condition names ('strongly_repulsive',
    'repulsive', 'attractive') to the certificate and grid to use; missing
    entries skip that rung.  Returns the nature certified by the first rung
    that holds, Unknown if none does.
    """
    if "strongly_repulsive" in candidates:
        r = check_strongly_repulsive(candidates["strongly_repulsive"], spec,
                                     grids["strongly_repulsive"], epsilon)
        if r.holds:
            return Nature.STRONGLY_REPULSIVE
    if "repulsive" in candidates:
        r = check_repulsive(candidates["repulsive"], spec, grids["repulsive"])
        if r.holds:
            return Nature.REPULSIVE
    if "attractive" in candidates:
        r = check_attractive(candidates["attractive"], spec, grids["attractive"])
        if r.holds:
            return Nature.ATTRACTIVE
    return Nature.UNKNOWN
