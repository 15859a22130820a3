"""Weighted empirical measures, reference invariant densities and comparison metrics.

The weighted empirical measure of a scheme charges the pre-step positions:
nu_n = (1/H_n) sum_k eta_k delta_{X_{k-1}} with H_n the cumulated weights.
:class:`WeightedHistogram` accumulates it over fixed bins, tracks out-of-range
mass explicitly (mass conservation is an invariant, not an accident) and
merges exactly across parallel replicas.

:class:`ReferenceDensity` wraps the normalized speed density of a subinterval,
which is the predicted invariant law in the positive-recurrent case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .model import DiffusionSpec
from .feller import ScaleSpeedTable
from .lyapunov import ConditionReport
from .quadrature import improper_limit, integrate

__all__ = [
    "WeightSequence",
    "WeightedHistogram",
    "ReferenceDensity",
    "HistogramObserver",
    "RatioObserver",
    "l1_distance",
    "side_l1_distance",
    "side_mass",
    "ratio_ergodic_estimate",
    "stability_check",
]


@dataclass(frozen=True)
class WeightSequence:
    """Weights eta_n: constant eta, or polynomial eta0 * n^-s with s in [0, 1].

    The exponent cap keeps H_n divergent, which the empirical-measure
    normalization requires.
    """

    family: str = "constant"  # "constant" | "polynomial"
    eta0: float = 1.0
    s: float = 0.0

    def __post_init__(self):
        if self.family not in ("constant", "polynomial"):
            raise ValueError(f"unknown weight family {self.family!r}")
        if self.eta0 <= 0:
            raise ValueError("eta0 must be positive")
        if self.family == "polynomial" and not 0.0 <= self.s <= 1.0:
            raise ValueError("polynomial weights need s in [0, 1] so that H_n diverges")

    def eta(self, n: int) -> float:
        if self.family == "constant":
            return self.eta0
        return self.eta0 * float(n) ** (-self.s)

    def eta_block(self, start: int, count: int) -> np.ndarray:
        if self.family == "constant":
            return np.full(count, self.eta0)
        ns = np.arange(start, start + count, dtype=float)
        return self.eta0 * ns ** (-self.s)


class WeightedHistogram:
    """Streaming weighted histogram over fixed bins on [lo, hi].

    Bins are left-closed; the last bin also includes ``hi``.  Out-of-range
    observations accumulate in ``out_of_range_weight`` so that the total mass
    is conserved exactly.
    """

    def __init__(self, lo: float, hi: float, bins: int):
        if not lo < hi or bins < 1:
            raise ValueError("need lo < hi and at least one bin")
        self.lo = float(lo)
        self.hi = float(hi)
        self.bins = int(bins)
        self.bin_width = (self.hi - self.lo) / self.bins
        self.weights = np.zeros(self.bins)
        self.out_of_range_weight = 0.0
        self.total_weight = 0.0

    def _index(self, x: float) -> int:
        if x == self.hi:
            return self.bins - 1
        return int((x - self.lo) // self.bin_width)

    def observe(self, x: float, eta: float = 1.0) -> "WeightedHistogram":
        if eta <= 0:
            raise ValueError("weights must be positive")
        self.total_weight += eta
        if self.lo <= x <= self.hi:
            self.weights[self._index(x)] += eta
        else:
            self.out_of_range_weight += eta
        return self

    def observe_block(self, xs: np.ndarray, etas: np.ndarray) -> None:
        xs = np.asarray(xs)
        etas = np.asarray(etas)
        self.total_weight += float(etas.sum())
        inside = (xs >= self.lo) & (xs <= self.hi)
        if not inside.all():
            self.out_of_range_weight += float(etas[~inside].sum())
            xs = xs[inside]
            etas = etas[inside]
        if len(xs):
            idx = ((xs - self.lo) // self.bin_width).astype(np.int64)
            np.clip(idx, 0, self.bins - 1, out=idx)  # x == hi lands in the last bin
            self.weights += np.bincount(idx, weights=etas, minlength=self.bins)

    def merge(self, other: "WeightedHistogram") -> "WeightedHistogram":
        """Bin-by-bin sum with another histogram over the same bins."""
        if (self.lo, self.hi, self.bins) != (other.lo, other.hi, other.bins):
            raise ValueError("histograms have different bin layouts")
        out = WeightedHistogram(self.lo, self.hi, self.bins)
        out.weights = self.weights + other.weights
        out.out_of_range_weight = self.out_of_range_weight + other.out_of_range_weight
        out.total_weight = self.total_weight + other.total_weight
        return out

    def bin_edges(self) -> np.ndarray:
        return self.lo + self.bin_width * np.arange(self.bins + 1)

    def densities(self) -> np.ndarray:
        """Per-bin density estimates weight / (H_n * width); integrate to <= 1."""
        if self.total_weight == 0:
            return np.zeros(self.bins)
        return self.weights / (self.total_weight * self.bin_width)

    def mass_between(self, a: float, b: float) -> float:
        """In-range mass fraction of [a, b], splitting partially covered bins pro rata."""
        if self.total_weight == 0:
            return 0.0
        edges = self.bin_edges()
        left = np.clip(edges[:-1], a, b)
        right = np.clip(edges[1:], a, b)
        frac = (right - left) / self.bin_width
        return float((self.weights * frac).sum() / self.total_weight)


@dataclass
class ReferenceDensity:
    """Normalized speed density m / int m on one subinterval."""

    table: ScaleSpeedTable
    normalizer: float

    @classmethod
    def from_table(cls, table: ScaleSpeedTable) -> "ReferenceDensity":
        """Normalize the speed density over the table's subinterval.

        The normalizer combines improper integrals toward both ends; raises if
        either diverges (then no invariant probability exists on the
        subinterval).
        """
        z = 0.0
        for endpoint in (table.sub.left, table.sub.right):
            v = improper_limit(table.m, endpoint, table.c, table.policy)
            if not v.is_finite:
                raise ValueError(
                    f"speed measure not integrable toward {endpoint}: "
                    "no normalized reference density"
                )
            z += v.value
        return cls(table, z)

    def density(self, x: float) -> float:
        return self.table.m(x) / self.normalizer

    def mass_between(self, a: float, b: float, tol: float = 1e-9) -> float:
        lo = max(a, self.table.sub.left)
        hi = min(b, self.table.sub.right)
        if not lo < hi:
            return 0.0
        return integrate(self.density, lo, hi, tol).value


def l1_distance(hist: WeightedHistogram, ref: ReferenceDensity) -> float:
    """L1 distance between the histogram and the reference, in [0, 2].

    Per bin the reference is averaged; the histogram's out-of-range mass and
    the reference mass outside the histogram window both count as discrepancy.
    """
    edges = hist.bin_edges()
    dens = hist.densities()
    total = 0.0
    ref_inside = 0.0
    for i in range(hist.bins):
        r = ref.mass_between(float(edges[i]), float(edges[i + 1]))
        ref_inside += r
        total += abs(dens[i] * hist.bin_width - r)
    oor = hist.out_of_range_weight / hist.total_weight if hist.total_weight else 0.0
    return total + oor + max(0.0, 1.0 - ref_inside)


def side_mass(hist: WeightedHistogram, delta: float) -> tuple[float, float]:
    """Fractions of the in-range mass strictly left/right of delta.

    The bin containing delta is split pro rata by overlap length.  Fractions
    are relative to the in-range weight; they sum to 1 when any in-range mass
    exists.
    """
    in_range = float(hist.weights.sum())
    if in_range == 0.0:
        return (0.0, 0.0)
    left = hist.mass_between(hist.lo, min(max(delta, hist.lo), hist.hi))
    total = hist.total_weight
    left_abs = left * total
    right_abs = in_range - left_abs
    return (left_abs / in_range, right_abs / in_range)


def side_l1_distance(
    hist: WeightedHistogram, ref: ReferenceDensity, delta: float, side: int
) -> float:
    """L1 distance between the histogram renormalized to one side of delta and the reference.

    ``side`` is +1 for the part right of delta, -1 for left.  Bins straddling
    delta contribute pro rata.  Out-of-range histogram mass and reference mass
    outside the window count as discrepancy, as in :func:`l1_distance`.
    """
    edges = hist.bin_edges()
    lo_cut, hi_cut = (delta, hist.hi) if side > 0 else (hist.lo, delta)
    left = np.clip(edges[:-1], lo_cut, hi_cut)
    right = np.clip(edges[1:], lo_cut, hi_cut)
    frac = (right - left) / hist.bin_width
    side_weights = hist.weights * frac
    w_side = float(side_weights.sum())
    if w_side == 0.0:
        return 2.0
    total = 0.0
    ref_inside = 0.0
    for i in range(hist.bins):
        if frac[i] == 0.0:
            continue
        r = ref.mass_between(float(left[i]), float(right[i]))
        ref_inside += r
        total += abs(side_weights[i] / w_side - r)
    oor = hist.out_of_range_weight / hist.total_weight if hist.total_weight else 0.0
    return total + oor + max(0.0, 1.0 - ref_inside)


# ---------------------------------------------------------------------------
# streaming observers for euler.simulate


class HistogramObserver:
    """Feeds pre-step positions into a weighted histogram."""

    def __init__(self, hist: WeightedHistogram, weights: WeightSequence = WeightSequence()):
        self.hist = hist
        self.weights = weights

    def record_block(self, pre: np.ndarray, start_index: int) -> None:
        self.hist.observe_block(pre, self.weights.eta_block(start_index, len(pre)))


class RatioObserver:
    """Accumulates sum eta_k f(X_{k-1}) and sum eta_k g(X_{k-1}) for the ratio estimate.

    ``f`` and ``g`` must accept numpy arrays.
    """

    def __init__(self, f, g, weights: WeightSequence = WeightSequence()):
        self.f = f
        self.g = g
        self.weights = weights
        self.sum_f = 0.0
        self.sum_g = 0.0

    def record_block(self, pre: np.ndarray, start_index: int) -> None:
        etas = self.weights.eta_block(start_index, len(pre))
        self.sum_f += float((etas * self.f(pre)).sum())
        self.sum_g += float((etas * self.g(pre)).sum())

    def value(self) -> float:
        if self.sum_g == 0.0:
            raise ZeroDivisionError("ratio estimate undefined: zero denominator")
        return self.sum_f / self.sum_g


def ratio_ergodic_estimate(
    positions: Iterable[float],
    f: Callable[[np.ndarray], np.ndarray],
    g: Callable[[np.ndarray], np.ndarray],
    weights: WeightSequence = WeightSequence(),
) -> float:
    """(sum eta_k f(X_{k-1})) / (sum eta_k g(X_{k-1})) over a finished trajectory.

    The discrete analogue of the ratio ergodic limit int f dnu / int g dnu.
    """
    xs = np.asarray(list(positions) if not isinstance(positions, np.ndarray) else positions,
                    dtype=float)
    obs = RatioObserver(f, g, weights)
    obs.record_block(xs, 1)
    return obs.value()


def stability_check(
    spec: DiffusionSpec,
    alpha: float | None,
    M: float,
    grid_size: int = 2048,
    x_max: float | None = None,
) -> ConditionReport:
    """Check the confinement condition x b(x) + sigma^2(x)/2 <= -alpha x^2 for |x| >= M.

    The report's ``epsilon`` field carries the best feasible alpha over the
    grid (the infimum of -(x b + sigma^2/2)/x^2); with ``alpha=None`` the check
    holds iff that value is positive.
    """
    if M <= 0:
        raise ValueError("M must be positive")
    x_max = x_max if x_max is not None else 100.0 * M
    xs = np.geomspace(M, x_max, grid_size // 2)
    pts = [x for x in np.concatenate([-xs[::-1], xs]) if spec.interval.contains(float(x))]
    best = math.inf
    worst_point = M
    for x in pts:
        x = float(x)
        val = x * spec.drift(x) + 0.5 * spec.sigma2(x)
        feasible = -val / (x * x)
        if feasible < best:
            best, worst_point = feasible, x
    if not pts:
        raise ValueError("no grid points with |x| >= M inside the interval")
    target = alpha if alpha is not None else 0.0
    margin = best - target  # >= 0 iff the requested alpha (or positivity) is feasible
    holds = margin > 0.0 if alpha is None else margin >= 0.0
    return ConditionReport("stability", holds, float(margin), worst_point,
                           float(best) if math.isfinite(best) else None)
