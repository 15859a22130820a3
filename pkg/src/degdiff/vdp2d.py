"""Two-dimensional demo: noise-perturbed Van der Pol system with truncated drift.

The system (x', y') = (y, (1 - x^2) y - x) gets multiplicative diagonal noise
sigma(x, y) = diag(c x, c y), which vanishes at the origin only: the origin is
the degenerate point competing with the limit cycle for the invariant mass.
The drift is truncated, (1 - min(x^2, 4)) y - x, to keep the decreasing-step
Euler scheme stable.  Occupation is accumulated in a 2D weighted histogram.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .euler import DIVERGENCE_GUARD, DivergenceError, StepSequence

__all__ = [
    "VdpConfig",
    "Histogram2D",
    "VdpSummary",
    "vdp_drift_truncated",
    "vdp_sigma",
    "simulate_vdp",
]


def vdp_drift_truncated(x: float, y: float) -> tuple[float, float]:
    """Truncated Van der Pol drift (y, (1 - x^2 ^ 4) y - x)."""
    return y, (1.0 - min(x * x, 4.0)) * y - x


def vdp_sigma(x: float, y: float, c: float) -> tuple[float, float]:
    """Diagonal noise amplitudes (c x, c y)."""
    return c * x, c * y


@dataclass(frozen=True)
class VdpConfig:
    """Run parameters.

    Defaults: gamma_n = 0.5 n^(-1/3), start (1, 1), a million steps, histogram
    cells of side 0.2 on [-3, 3]^2.
    """

    c: float
    gamma0: float = 0.5
    r: float = 1.0 / 3.0
    n_steps: int = 1_000_000
    x0: tuple[float, float] = (1.0, 1.0)
    hist_lo: float = -3.0
    hist_hi: float = 3.0
    cell: float = 0.2

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("noise level c must be >= 0")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if not self.hist_lo < self.hist_hi or self.cell <= 0:
            raise ValueError("bad histogram window")


class Histogram2D:
    """Weighted 2D histogram over square cells; same mass accounting as the 1D one."""

    def __init__(self, lo: float, hi: float, cell: float):
        self.lo = float(lo)
        self.hi = float(hi)
        self.cell = float(cell)
        self.n = int(round((hi - lo) / cell))
        if self.n < 1 or abs(self.n * cell - (hi - lo)) > 1e-9 * (hi - lo):
            raise ValueError("window must be an integer number of cells")
        self.weights = np.zeros((self.n, self.n))
        self.out_of_range_weight = 0.0
        self.total_weight = 0.0

    def observe_block(self, xs: np.ndarray, ys: np.ndarray, etas: np.ndarray) -> None:
        self.total_weight += float(etas.sum())
        inside = (xs >= self.lo) & (xs <= self.hi) & (ys >= self.lo) & (ys <= self.hi)
        if not inside.all():
            self.out_of_range_weight += float(etas[~inside].sum())
            xs, ys, etas = xs[inside], ys[inside], etas[inside]
        if len(xs):
            ix = np.minimum(((xs - self.lo) // self.cell).astype(np.int64), self.n - 1)
            iy = np.minimum(((ys - self.lo) // self.cell).astype(np.int64), self.n - 1)
            flat = np.bincount(ix * self.n + iy, weights=etas, minlength=self.n * self.n)
            self.weights += flat.reshape(self.n, self.n)

    def merge(self, other: "Histogram2D") -> "Histogram2D":
        if (self.lo, self.hi, self.cell) != (other.lo, other.hi, other.cell):
            raise ValueError("histograms have different cell layouts")
        out = Histogram2D(self.lo, self.hi, self.cell)
        out.weights = self.weights + other.weights
        out.out_of_range_weight = self.out_of_range_weight + other.out_of_range_weight
        out.total_weight = self.total_weight + other.total_weight
        return out

    def densities(self) -> np.ndarray:
        if self.total_weight == 0:
            return np.zeros_like(self.weights)
        return self.weights / (self.total_weight * self.cell * self.cell)

    def cell_index(self, x: float, y: float) -> tuple[int, int]:
        ix = min(int((x - self.lo) // self.cell), self.n - 1)
        iy = min(int((y - self.lo) // self.cell), self.n - 1)
        return ix, iy

    def cell_mass(self, x: float, y: float) -> float:
        ix, iy = self.cell_index(x, y)
        return float(self.weights[ix, iy] / self.total_weight) if self.total_weight else 0.0

    def block_mass(self, x: float, y: float, k: int = 3) -> float:
        """Mass of the k x k cell block centered on the cell containing (x, y)."""
        ix, iy = self.cell_index(x, y)
        h = k // 2
        sl = self.weights[max(0, ix - h) : ix + h + 1, max(0, iy - h) : iy + h + 1]
        return float(sl.sum() / self.total_weight) if self.total_weight else 0.0


@dataclass
class VdpSummary:
    final: tuple[float, float]
    n_steps: int
    origin_cell_mass: float
    origin_block_mass: float
    max_cell_mass: float
    out_of_window_fraction: float
    min_distance_to_origin: float


def simulate_vdp(config: VdpConfig, seed: int = 0, replica: int = 0) -> tuple[Histogram2D, VdpSummary]:
    """Run the truncated scheme and accumulate the occupation histogram.

    The recursion uses gamma_{n+1} and two independent standard Gaussian noise
    components per step; occupation charges the pre-step position with unit
    weights.
    """
    steps = StepSequence("polynomial", config.gamma0, config.r)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(replica), 2))
    rng = np.random.Generator(np.random.PCG64(ss))
    hist = Histogram2D(config.hist_lo, config.hist_hi, config.cell)
    x, y = float(config.x0[0]), float(config.x0[1])
    c = config.c
    guard = DIVERGENCE_GUARD
    min_r2 = x * x + y * y

    block = 8192
    done = 0
    n0 = 0
    while done < config.n_steps:
        k = min(block, config.n_steps - done)
        gam = steps.gamma_block(n0 + 1, k)
        sqg = np.sqrt(gam)
        u = rng.standard_normal(2 * k)
        pre_x = np.empty(k)
        pre_y = np.empty(k)
        g_l = gam.tolist()
        s_l = sqg.tolist()
        u_l = u.tolist()
        for i in range(k):
            pre_x[i] = x
            pre_y[i] = y
            g = g_l[i]
            s = s_l[i]
            dx = y
            dy = (1.0 - min(x * x, 4.0)) * y - x
            x = x + g * dx + s * c * x * u_l[2 * i]
            y = y + g * dy + s * c * y * u_l[2 * i + 1]
            r2 = x * x + y * y
            if r2 < min_r2:
                min_r2 = r2
            if not (-guard < x < guard and -guard < y < guard):
                raise DivergenceError(n0 + i + 1, (x, y))
        hist.observe_block(pre_x, pre_y, np.ones(k))
        n0 += k
        done += k

    if np.isnan(hist.weights).any():
        raise ArithmeticError("histogram contains NaN")
    dens_masses = hist.weights / hist.total_weight if hist.total_weight else hist.weights
    summary = VdpSummary(
        final=(x, y),
        n_steps=config.n_steps,
        origin_cell_mass=hist.cell_mass(0.0, 0.0),
        origin_block_mass=hist.block_mass(0.0, 0.0, 3),
        max_cell_mass=float(dens_masses.max()),
        out_of_window_fraction=hist.out_of_range_weight / hist.total_weight,
        min_distance_to_origin=math.sqrt(min_r2),
    )
    return hist, summary
