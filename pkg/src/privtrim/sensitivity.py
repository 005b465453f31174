"""Local, distance-k, and smooth sensitivity of the trimmed mean.

Two truncation styles are supported. With input truncation the dataset lives
in [a, b] and the smooth sensitivity is computed exactly from order
statistics with out-of-range padding (entries below index 1 read as a, above
index n as b). With output truncation only the estimate is clamped and a
certified upper bound on the smooth sensitivity is used instead.

A brute-force enumerator over grid-valued neighbours is included as the
testing oracle for the exact formula; it treats the statistic as a black box.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ContractViolationError, EnumerationBudgetError, ParameterError


class TruncationMode(Enum):
    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True, eq=False)
class SortedDataset:
    """n real values stored in nondecreasing order."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ParameterError("dataset must be a nonempty 1-D array")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("dataset values must be finite")
        object.__setattr__(self, "values", np.sort(arr))

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class TrimSpec:
    """Per-side trim count m, truncation interval [a, b], and truncation mode."""

    m: int
    a: float
    b: float
    mode: TruncationMode = TruncationMode.INPUT

    def __post_init__(self):
        if self.m < 0 or int(self.m) != self.m:
            raise ParameterError(f"trim count m must be a nonnegative integer, got {self.m}")
        if not self.a < self.b:
            raise ParameterError(f"truncation interval needs a < b, got [{self.a}, {self.b}]")


@dataclass(frozen=True, eq=False)
class SensitivityReport:
    local: float
    per_distance: np.ndarray  # LS^k for k = 0..n
    smooth: float
    t: float
    argmax_k: int

    def to_dict(self) -> dict:
        return {
            "local": self.local,
            "per_distance": [float(v) for v in self.per_distance],
            "smooth": self.smooth,
            "t": self.t,
            "argmax_k": self.argmax_k,
        }


def trimmed_mean(x, m: int) -> float:
    """Mean of the middle n - 2m order statistics."""
    values = x.values if isinstance(x, SortedDataset) else np.sort(np.asarray(x, dtype=float))
    n = values.size
    if not n > 2 * m >= 0:
        raise ParameterError(f"need n > 2m >= 0, got n={n}, m={m}")
    return float(values[m : n - m].mean())


def padded_order_stats(rows: np.ndarray, a: float, b: float) -> np.ndarray:
    """Order statistics of each row extended with pads: index i <= 0 reads a, i > n reads b.

    Input rows must already be sorted ascending along axis 1. Output column
    j stores order statistic i = j - n for i in [-n, 2n + 2].
    """
    rows = np.atleast_2d(rows)
    r, n = rows.shape
    out = np.empty((r, 3 * n + 3), dtype=float)
    out[:, : n + 1] = a
    out[:, n + 1 : 2 * n + 1] = rows
    out[:, 2 * n + 1 :] = b
    return out


def saturation_distance(n: int, m: int) -> int:
    """Smallest k at which LS^k hits its cap (b - a)/(n - 2m) for every dataset.

    At k = 2m + 1 the inner max can pair the b-pad against the a-pad
    (l = m + 1), so LS^k is exactly the cap from there on; only k up to this
    point carries dataset-dependent information.
    """
    return min(n, 2 * m + 1)


def distance_table_from_padded(padded: np.ndarray, n: int, m: int, k_max: Optional[int] = None) -> np.ndarray:
    """LS^k of the input-truncated trimmed mean for k = 0..k_max, one row per dataset.

    Implements the double max over (k, l): for each k the candidates pair
    order statistic m - k + j against n - m + j for j = 0..k + 1, using the
    padding convention baked into `padded`. Columns past the saturation
    distance are filled with the cap without being searched.
    """
    if not n > 2 * m >= 0:
        raise ParameterError(f"need n > 2m >= 0, got n={n}, m={m}")
    if k_max is None:
        k_max = n
    r = padded.shape[0]
    off = n  # order statistic i lives at column i + n
    span = padded[0, -1] - padded[0, 0]
    table = np.empty((r, k_max + 1), dtype=float)
    k_search = min(k_max, saturation_distance(n, m))
    for k in range(k_search + 1):
        lo = padded[:, off + m - k : off + m + 2]
        hi = padded[:, off + n - m : off + n - m + k + 2]
        table[:, k] = (hi - lo).max(axis=1)
    table[:, k_search + 1 :] = span
    return table / (n - 2 * m)


def smooth_over_t(table: np.ndarray, t_grid: np.ndarray) -> np.ndarray:
    """max_k e^(-kt) LS^k for every t in the grid; shape (rows, len(t_grid))."""
    r, kk = table.shape
    k = np.arange(kk, dtype=float)
    out = np.empty((r, len(t_grid)), dtype=float)
    with np.errstate(under="ignore"):
        for j, t in enumerate(t_grid):
            out[:, j] = (table * np.exp(-t * k)).max(axis=1)
    return out


def smooth_over_t_compact(
    padded: np.ndarray, n: int, m: int, t_grid: np.ndarray
) -> np.ndarray:
    """Smooth sensitivity at every t, searching only the unsaturated distances.

    Equivalent to smooth_over_t(distance_table_from_padded(padded, n, m), t),
    using the analytic tail max over the saturated run k > 2m + 1.
    """
    kc = saturation_distance(n, m)
    table = distance_table_from_padded(padded, n, m, k_max=kc)
    out = smooth_over_t(table, t_grid)
    if kc < n:
        cap = (padded[0, -1] - padded[0, 0]) / (n - 2 * m)
        with np.errstate(under="ignore"):
            np.maximum(out, cap * np.exp(-(kc + 1) * np.asarray(t_grid))[None, :], out=out)
    return out


def smooth_sensitivity_input_trunc(x: SortedDataset, spec: TrimSpec, t: float) -> SensitivityReport:
    """Exact smooth sensitivity of the trimmed mean on [a, b]-truncated inputs."""
    if t < 0:
        raise ParameterError(f"smoothing parameter t must be >= 0, got {t}")
    n = x.n
    if not n > 2 * spec.m >= 0:
        raise ParameterError(f"need n > 2m >= 0, got n={n}, m={spec.m}")
    if x.values[0] < spec.a or x.values[-1] > spec.b:
        raise ContractViolationError(
            f"input truncation contract violated: values outside [{spec.a}, {spec.b}]"
        )
    padded = padded_order_stats(x.values[None, :], spec.a, spec.b)
    table = distance_table_from_padded(padded, n, spec.m)[0]
    with np.errstate(under="ignore"):
        weighted = table * np.exp(-t * np.arange(n + 1))
    k_star = int(np.argmax(weighted))
    return SensitivityReport(
        local=float(table[0]),
        per_distance=table,
        smooth=float(weighted[k_star]),
        t=t,
        argmax_k=k_star,
    )


def smooth_sensitivity_output_trunc(x: SortedDataset, spec: TrimSpec, t: float) -> float:
    """Certified upper bound max{(x_(n) - x_(1))/(n - 2m), e^(-mt) (b - a)} for output truncation."""
    if t < 0:
        raise ParameterError(f"smoothing parameter t must be >= 0, got {t}")
    n = x.n
    if not n > 2 * spec.m >= 0:
        raise ParameterError(f"need n > 2m >= 0, got n={n}, m={spec.m}")
    spread = float(x.values[-1] - x.values[0]) / (n - 2 * spec.m)
    return max(spread, math.exp(-spec.m * t) * (spec.b - spec.a))


def _enumeration_count(n: int, g: int, max_distance: int) -> int:
    total = 0
    for j in range(max_distance + 1):
        total += math.comb(n, j) * math.comb(g + j - 1, j) * (n * g + 1)
    return total


def level_local_sensitivities(
    f: Callable[[np.ndarray], float],
    values: Sequence[float],
    domain_grid: Sequence[float],
    max_distance: int,
    *,
    budget: int = 50_000_000,
    batch_f: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    stop_below: Optional[Callable[[int, float], bool]] = None,
) -> np.ndarray:
    """Grid-restricted max local sensitivity at each exact distance 0..max_distance.

    Neighbour datasets replace a subset of entries with grid values
    (multisets; the statistic is assumed symmetric in its arguments, which
    holds for anything defined through order statistics). `batch_f`, when
    given, evaluates a 2-D array of candidate datasets in one call.
    `stop_below(k, best)` may end the search early once deeper levels cannot
    matter; skipped levels report -inf.
    """
    base = np.sort(np.asarray(values, dtype=float))
    n = base.size
    grid = np.asarray(sorted(set(float(v) for v in domain_grid)), dtype=float)
    g = grid.size
    if g == 0:
        raise ParameterError("domain grid must be nonempty")
    if _enumeration_count(n, g, max_distance) > budget:
        raise EnumerationBudgetError(
            f"enumeration would need {_enumeration_count(n, g, max_distance)} evaluations,"
            f" budget is {budget}"
        )

    # neighbour templates: candidate q replaces entry pos_idx[q] with grid[val_idx[q]]
    pos_idx = np.repeat(np.arange(n), g)
    new_vals = np.tile(grid, n)
    width = n * g + 1

    def eval_rows(rows: np.ndarray) -> np.ndarray:
        if batch_f is not None:
            return np.asarray(batch_f(rows), dtype=float)
        return np.fromiter((f(row) for row in rows), dtype=float, count=rows.shape[0])

    levels = np.full(max_distance + 1, -np.inf)
    running = -np.inf
    for j in range(max_distance + 1):
        keep_list = list(itertools.combinations(range(n), n - j))
        ins_list = list(itertools.combinations_with_replacement(range(g), j))
        keep = np.asarray(keep_list, dtype=int).reshape(len(keep_list), n - j)
        ins = np.asarray(ins_list, dtype=int).reshape(len(ins_list), j)
        x_prime = np.concatenate(
            [np.repeat(base[keep], len(ins), axis=0), np.tile(grid[ins], (len(keep), 1))],
            axis=1,
        )
        step = max(1, 4_000_000 // (width * n))
        best = -np.inf
        for lo in range(0, x_prime.shape[0], step):
            block = x_prime[lo : lo + step]
            c = block.shape[0]
            cand = np.broadcast_to(block[:, None, :], (c, width - 1, n)).copy()
            cand[:, np.arange(width - 1), pos_idx] = new_vals[None, :]
            rows = np.concatenate([block[:, None, :], cand], axis=1).reshape(-1, n)
            vals = eval_rows(rows).reshape(c, width)
            best = max(best, float(np.abs(vals[:, 1:] - vals[:, :1]).max()))
        levels[j] = best
        running = max(running, best)
        if stop_below is not None and stop_below(j, running):
            break
    return levels


def smooth_from_levels(levels: np.ndarray, t: float) -> float:
    """Fold exact-distance sensitivities into the smooth max over k."""
    ls_k = np.maximum.accumulate(levels)
    k = np.arange(len(levels), dtype=float)
    with np.errstate(under="ignore", invalid="ignore"):
        weighted = np.where(np.isfinite(ls_k), ls_k * np.exp(-t * k), -np.inf)
    return float(np.max(weighted))


def brute_force_smooth_sensitivity(
    f: Callable[[np.ndarray], float],
    values: Sequence[float],
    domain_grid: Sequence[float],
    t: float,
    max_distance: int,
    *,
    budget: int = 5_000_000,
    batch_f: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    value_bound: Optional[float] = None,
) -> float:
    """Grid-restricted smooth sensitivity of a black-box statistic by exhaustion.

    A lower bound on the true smooth sensitivity that converges as the grid
    refines. `value_bound`, an a-priori cap on |f(x'') - f(x')| over adjacent
    grid datasets, enables sound early termination for t > 0.
    """
    if t < 0:
        raise ParameterError(f"smoothing parameter t must be >= 0, got {t}")
    stop = None
    if value_bound is not None and t > 0:
        def stop(k: int, best: float) -> bool:
            return math.exp(-t * (k + 1)) * value_bound <= best
    levels = level_local_sensitivities(
        f, values, domain_grid, max_distance, budget=budget, batch_f=batch_f, stop_below=stop
    )
    return smooth_from_levels(levels, t)
