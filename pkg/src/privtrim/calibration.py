"""Free-parameter selection: the LLN shape cubic and grid search over t.

At fixed eps and t the LLN shape sigma minimizing the noise variance
2 g^2 / (e^{-5 sigma^2} (eps - t/sigma)^2) solves the cubic
(5 eps / t) sigma^3 - 5 sigma^2 - 1 = 0, which has exactly one real root,
bracketed in (t/eps, max{2t/eps, 1/2}]. The remaining free parameters
(smoothing t, and through it the scale s) are chosen by searching a
log-spaced grid, 150 points from 1e-9 to 9 by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import CalibrationError, InfeasibleError, ParameterError
from .noise import NoiseFamily, NoiseSpec, calibrate_scale
from . import noise as noise_mod

DEFAULT_T_GRID_COUNT = 150
DEFAULT_T_MIN = 1e-9
DEFAULT_T_MAX = 9.0

# fixed shape choices per family; LLN's sigma is optimized per t instead
FIXED_SHAPES = {
    NoiseFamily.ULN: math.sqrt(2.0),
    NoiseFamily.ARSINH_NORMAL: 2.0 / math.sqrt(3.0),
    NoiseFamily.STUDENT_T: 3.0,
    NoiseFamily.LAPLACE: 1.0,
    NoiseFamily.GAUSSIAN: 1.0,
}


def lln_cubic(eps: float, t: float, sigma: float) -> float:
    return 5.0 * eps / t * sigma ** 3 - 5.0 * sigma ** 2 - 1.0


def optimize_lln_sigma(eps: float, t: float) -> float:
    """The unique positive root of the shape cubic, by bisection plus Newton polish."""
    if eps <= 0 or t <= 0:
        raise ParameterError(f"need eps > 0 and t > 0, got eps={eps}, t={t}")
    lo = t / eps
    hi = max(2.0 * t / eps, 0.5)
    # cubic is -1 at lo and strictly positive at hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if lln_cubic(eps, t, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    sigma = 0.5 * (lo + hi)
    for _ in range(4):
        deriv = 15.0 * eps / t * sigma ** 2 - 10.0 * sigma
        step = lln_cubic(eps, t, sigma) / deriv
        sigma -= step
        if sigma <= t / eps:  # Newton must not leave the feasible region
            sigma = math.nextafter(t / eps, math.inf)
    return sigma


def shape_for(family: NoiseFamily, eps: float, t: float) -> float:
    """Per-family shape rule used by the experiments."""
    if family is NoiseFamily.LLN:
        return optimize_lln_sigma(eps, t)
    return FIXED_SHAPES[family]


@dataclass(frozen=True)
class CalibrationProblem:
    eps: float
    family: NoiseFamily
    t_grid: np.ndarray = field(
        default_factory=lambda: default_t_grid(DEFAULT_T_GRID_COUNT)
    )
    delta: Optional[float] = None
    omega: Optional[float] = None

    def __post_init__(self):
        if self.eps <= 0:
            raise ParameterError(f"eps must be > 0, got {self.eps}")
        grid = np.asarray(self.t_grid, dtype=float)
        if grid.size < 1 or np.any(grid <= 0):
            raise ParameterError("t grid must be nonempty with positive entries")
        object.__setattr__(self, "t_grid", grid)


def default_t_grid(count: int = DEFAULT_T_GRID_COUNT, t_min: float = DEFAULT_T_MIN,
                   t_max: float = DEFAULT_T_MAX) -> np.ndarray:
    """Log-uniform grid, both endpoints included."""
    if count < 1:
        raise ParameterError(f"grid count must be >= 1, got {count}")
    if count == 1:
        return np.asarray([t_max])
    return np.geomspace(t_min, t_max, count)


@dataclass(frozen=True)
class GridSearchResult:
    t: float
    s: float
    shape: float
    value: float


def grid_search(
    problem: CalibrationProblem,
    objective: Callable[[float, float, float], float],
) -> GridSearchResult:
    """Argmin of objective(t, s, shape) over the t grid.

    s is the largest scale meeting the eps target at each t and the shape
    follows the per-family rule. Infeasible grid points are skipped; if all
    are infeasible the search raises. Ties resolve to the smallest t, so the
    result does not depend on evaluation order.
    """
    best: Optional[GridSearchResult] = None
    for t in np.sort(problem.t_grid):
        try:
            shape = shape_for(problem.family, problem.eps, float(t))
            spec = NoiseSpec(problem.family, shape)
            s = calibrate_scale(spec, float(t), problem.eps, delta=problem.delta, omega=problem.omega)
            if s <= 0:
                continue
        except (InfeasibleError, CalibrationError):
            continue
        value = float(objective(float(t), s, shape))
        if best is None or value < best.value:
            best = GridSearchResult(t=float(t), s=s, shape=shape, value=value)
    if best is None:
        raise InfeasibleError(
            f"no feasible grid point for {problem.family.value} at eps={problem.eps}"
        )
    return best


def noise_variance_for(family: NoiseFamily, shape: float) -> float:
    return noise_mod.variance(NoiseSpec(family, shape))
