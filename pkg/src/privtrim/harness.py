"""Monte Carlo experiment engine for the private trimmed-mean estimators.

For every (algorithm, m) cell the engine reports the normalized excess
variance n * MSE - 1, using the best smoothing parameter from a log-spaced
t grid. Privacy budgets are paired at a common eps: pure DP for StudentT,
eps^2/2-CDP for LLN/ULN/ArsinhNormal, (eps^2/2, 10)-tCDP for Gaussian and
(eps, 1e-6)-DP for Laplace.

Replicates are processed in fixed-size chunks; every stream is derived from
(master seed, purpose tag, chunk index), so results are reproducible and
invariant to the parallel schedule. Data replicates are shared across
algorithms, trim levels, and the t grid as common random numbers, which
tightens every comparison between rows.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .bounds import lower_bound_variance
from .budgets import CDP, ApproxDP, PrivacyBudget, PureDP, TCDP
from .calibration import default_t_grid, shape_for
from .errors import CalibrationError, InfeasibleError, ParameterError
from .noise import NoiseFamily, NoiseSpec, calibrate_scale, standard_laplace, variance
from .sensitivity import TruncationMode, padded_order_stats, smooth_over_t_compact

DEFAULT_DELTA = 1e-6
DEFAULT_OMEGA = 10.0

_DATA_TAG = 0
_NOISE_TAG = 1000


class DataFamily(Enum):
    GAUSSIAN = "gaussian"
    LAPLACE = "laplace"
    GAUSSIAN_MIXTURE = "gaussian_mixture"


@dataclass(frozen=True)
class DataModel:
    family: DataFamily = DataFamily.GAUSSIAN
    mu: float = 0.0
    sigma2: float = 1.0        # Gaussian variance / first mixture component
    scale: float = 1.0         # Laplace scale
    mix_sigma2: float = 9.0    # second mixture component variance
    mix_weight: float = 0.9    # weight on the first component

    def __post_init__(self):
        if self.sigma2 <= 0 or self.scale <= 0 or self.mix_sigma2 <= 0:
            raise ParameterError("data model scales must be positive")
        if not 0.0 < self.mix_weight < 1.0:
            raise ParameterError(f"mixture weight must be in (0, 1), got {self.mix_weight}")

    def variance(self) -> float:
        if self.family is DataFamily.GAUSSIAN:
            return self.sigma2
        if self.family is DataFamily.LAPLACE:
            return 2.0 * self.scale ** 2
        return self.mix_weight * self.sigma2 + (1.0 - self.mix_weight) * self.mix_sigma2


def generate(model: DataModel, n: int, rng: np.random.Generator, reps: Optional[int] = None) -> np.ndarray:
    """i.i.d. draws from the data model; shape (n,) or (reps, n)."""
    size = (n,) if reps is None else (reps, n)
    if model.family is DataFamily.GAUSSIAN:
        return model.mu + math.sqrt(model.sigma2) * rng.standard_normal(size)
    if model.family is DataFamily.LAPLACE:
        return model.mu + model.scale * np.asarray(standard_laplace(rng, size))
    pick_second = rng.random(size) >= model.mix_weight
    sd = np.where(pick_second, math.sqrt(model.mix_sigma2), math.sqrt(model.sigma2))
    return model.mu + sd * rng.standard_normal(size)


class Algorithm(Enum):
    LLN = "lln"
    ULN = "uln"
    ARSINH_NORMAL = "arsinh_normal"
    STUDENT_T = "student_t"
    LAPLACE = "laplace"
    GAUSSIAN = "gaussian"
    TRIM_NONPRIVATE = "trim_nonprivate"
    GLOBAL_SENS = "global_sens"
    LOWER_BOUND = "lower_bound"


_NOISE_ALGS = {
    Algorithm.LLN: NoiseFamily.LLN,
    Algorithm.ULN: NoiseFamily.ULN,
    Algorithm.ARSINH_NORMAL: NoiseFamily.ARSINH_NORMAL,
    Algorithm.STUDENT_T: NoiseFamily.STUDENT_T,
    Algorithm.LAPLACE: NoiseFamily.LAPLACE,
    Algorithm.GAUSSIAN: NoiseFamily.GAUSSIAN,
}


def paired_budget(algorithm: Algorithm, eps: float,
                  delta: float = DEFAULT_DELTA, omega: float = DEFAULT_OMEGA) -> PrivacyBudget:
    """The budget each algorithm is held to when comparing at a common eps."""
    if algorithm is Algorithm.STUDENT_T:
        return PureDP(eps)
    if algorithm in (Algorithm.LLN, Algorithm.ULN, Algorithm.ARSINH_NORMAL):
        return CDP(0.5 * eps * eps)
    if algorithm is Algorithm.GAUSSIAN:
        return TCDP(0.5 * eps * eps, omega)
    if algorithm is Algorithm.LAPLACE:
        return ApproxDP(eps, delta)
    raise ParameterError(f"{algorithm} carries no privacy budget")


@dataclass(frozen=True)
class ExperimentSpec:
    data: DataModel
    n: int
    reps: int
    eps: float
    algorithms: tuple
    m_grid: tuple
    a: float
    b: float
    seed: int
    t_grid: np.ndarray = field(default_factory=default_t_grid)
    mode: TruncationMode = TruncationMode.INPUT
    delta: float = DEFAULT_DELTA
    omega: float = DEFAULT_OMEGA
    chunk: int = 2048

    def __post_init__(self):
        if self.reps < 1:
            raise ParameterError(f"reps must be >= 1, got {self.reps}")
        if len(self.m_grid) == 0 or len(self.algorithms) == 0:
            raise ParameterError("algorithm list and m grid must be nonempty")
        if not self.a < self.data.mu < self.b:
            raise ParameterError(
                f"truncation interval must contain the mean, got mu={self.data.mu}, [{self.a}, {self.b}]"
            )
        for m in self.m_grid:
            if not self.n > 2 * m >= 0:
                raise ParameterError(f"need n > 2m >= 0, got n={self.n}, m={m}")
        object.__setattr__(self, "algorithms", tuple(Algorithm(a) for a in self.algorithms))
        object.__setattr__(self, "m_grid", tuple(int(m) for m in self.m_grid))
        object.__setattr__(self, "t_grid", np.sort(np.asarray(self.t_grid, dtype=float)))


@dataclass(frozen=True)
class CellResult:
    algorithm: str
    n: int
    eps: float
    m: int
    t_best: Optional[float]
    s: Optional[float]
    shape: Optional[float]
    excess_var: float
    stderr: float
    reps: int
    seed: int


@dataclass(frozen=True)
class ExperimentResult:
    rows: tuple

    def cell(self, algorithm: Algorithm, m: int) -> Optional[CellResult]:
        for row in self.rows:
            if row.algorithm == algorithm.value and row.m == m:
                return row
        return None


@dataclass(frozen=True)
class _NoisePlan:
    """Per-algorithm calibration over the t grid: feasible mask, s, shape, Var(Z)."""

    algorithm: Algorithm
    feasible: np.ndarray
    s: np.ndarray
    shape: np.ndarray
    noise_var: np.ndarray


def _calibrate_plans(spec: ExperimentSpec) -> dict:
    plans = {}
    for alg in spec.algorithms:
        fam = _NOISE_ALGS.get(alg)
        if fam is None:
            continue
        tt = spec.t_grid
        feasible = np.zeros(len(tt), dtype=bool)
        s_arr = np.full(len(tt), np.nan)
        shape_arr = np.full(len(tt), np.nan)
        var_arr = np.full(len(tt), np.nan)
        for j, t in enumerate(tt):
            try:
                shape = shape_for(fam, spec.eps, float(t))
                s = calibrate_scale(
                    NoiseSpec(fam, shape), float(t), spec.eps, delta=spec.delta, omega=spec.omega
                )
            except (InfeasibleError, CalibrationError):
                continue
            if s <= 0:
                continue
            feasible[j] = True
            s_arr[j] = s
            shape_arr[j] = shape
            var_arr[j] = variance(NoiseSpec(fam, shape))
        plans[alg] = _NoisePlan(alg, feasible, s_arr, shape_arr, var_arr)
    return plans


def _noise_rng(spec: ExperimentSpec, alg_index: int, chunk_index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence((spec.seed, _NOISE_TAG + alg_index, chunk_index))
    )


def _chunk_stats(spec: ExperimentSpec, plans: dict, chunk_index: int, start: int, stop: int) -> dict:
    """Sums and sums-of-squares of per-replicate squared errors for one chunk.

    Returns {(algorithm, m): (count, sum over t grid, sum of squares over t grid)}.
    """
    c = stop - start
    n, mu = spec.n, spec.data.mu
    tt = spec.t_grid
    data_rng = np.random.default_rng(np.random.SeedSequence((spec.seed, _DATA_TAG, chunk_index)))
    x = generate(spec.data, n, data_rng, reps=c)
    if spec.mode is TruncationMode.INPUT:
        x_sorted = np.sort(np.clip(x, spec.a, spec.b), axis=1)
    else:
        x_sorted = np.sort(x, axis=1)
    cs = np.concatenate([np.zeros((c, 1)), np.cumsum(x_sorted, axis=1)], axis=1)

    needs_ss = any(alg in _NOISE_ALGS or alg is Algorithm.LOWER_BOUND for alg in spec.algorithms)
    padded = padded_order_stats(x_sorted, spec.a, spec.b) if needs_ss else None

    noise_draws = {}
    for alg_index, alg in enumerate(spec.algorithms):
        fam = _NOISE_ALGS.get(alg)
        rng = _noise_rng(spec, alg_index, chunk_index)
        if fam is NoiseFamily.LLN:
            # shape varies with t; keep the construction parts for reuse
            noise_draws[alg] = (np.asarray(standard_laplace(rng, c)), rng.standard_normal(c))
        elif fam is NoiseFamily.ULN:
            u = 2.0 * rng.random(c) - 1.0
            noise_draws[alg] = u * np.exp(math.sqrt(2.0) * rng.standard_normal(c))
        elif fam is NoiseFamily.ARSINH_NORMAL:
            sg = 2.0 / math.sqrt(3.0)
            noise_draws[alg] = np.sinh(sg * rng.standard_normal(c)) / sg
        elif fam is NoiseFamily.STUDENT_T:
            g = rng.standard_normal((4, c))
            noise_draws[alg] = g[0] / np.sqrt(np.mean(g[1:] ** 2, axis=0))
        elif fam is NoiseFamily.LAPLACE:
            noise_draws[alg] = np.asarray(standard_laplace(rng, c))
        elif fam is NoiseFamily.GAUSSIAN:
            noise_draws[alg] = rng.standard_normal(c)
        elif alg is Algorithm.GLOBAL_SENS:
            noise_draws[alg] = rng.standard_normal(c)

    lb_g = None
    if Algorithm.LOWER_BOUND in spec.algorithms:
        lb_g = np.asarray([lower_bound_variance(1.0, float(t), spec.eps) for t in tt])

    out = {}
    span = spec.b - spec.a
    for m in spec.m_grid:
        w = n - 2 * m
        trim_err = (cs[:, n - m] - cs[:, m]) / w - mu
        if spec.mode is TruncationMode.OUTPUT:
            trim_err = np.clip(trim_err + mu, spec.a, spec.b) - mu
        s_table = None
        if needs_ss:
            if spec.mode is TruncationMode.INPUT:
                s_table = smooth_over_t_compact(padded, n, m, tt)
            else:
                spread = (x_sorted[:, -1] - x_sorted[:, 0]) / w
                s_table = np.maximum(spread[:, None], np.exp(-m * tt)[None, :] * span)

        for alg in spec.algorithms:
            if alg is Algorithm.TRIM_NONPRIVATE:
                sq = trim_err ** 2
                out[(alg, m)] = (c, np.asarray([sq.sum()]), np.asarray([(sq ** 2).sum()]))
            elif alg is Algorithm.GLOBAL_SENS:
                sd = span / (n * spec.eps)
                if spec.mode is TruncationMode.INPUT:
                    mean_err = cs[:, n] / n - mu
                else:
                    mean_err = np.clip(x, spec.a, spec.b).mean(axis=1) - mu
                sq = (mean_err + sd * noise_draws[alg]) ** 2
                out[(alg, m)] = (c, np.asarray([sq.sum()]), np.asarray([(sq ** 2).sum()]))
            elif alg is Algorithm.LOWER_BOUND:
                vals = trim_err[:, None] ** 2 + s_table ** 2 * lb_g[None, :]
                out[(alg, m)] = (c, vals.sum(axis=0), (vals ** 2).sum(axis=0))
            else:
                plan = plans[alg]
                sums = np.zeros(len(tt))
                sumsq = np.zeros(len(tt))
                for j in range(len(tt)):
                    if not plan.feasible[j]:
                        continue
                    if alg is Algorithm.LLN:
                        lap, y = noise_draws[alg]
                        z = lap * np.exp(plan.shape[j] * y)
                    else:
                        z = noise_draws[alg]
                    sq = (trim_err + s_table[:, j] / plan.s[j] * z) ** 2
                    sums[j] = sq.sum()
                    sumsq[j] = (sq ** 2).sum()
                out[(alg, m)] = (c, sums, sumsq)
    return out


def run_experiment(spec: ExperimentSpec, threads: int = 1) -> ExperimentResult:
    """Monte Carlo excess variance for every (algorithm, m) cell.

    Deterministic under the master seed; infeasible cells (no feasible grid
    point for the algorithm's budget) are absent from the result rather than
    reported as zero.
    """
    plans = _calibrate_plans(spec)
    edges = list(range(0, spec.reps, spec.chunk)) + [spec.reps]
    chunks = [(i, edges[i], edges[i + 1]) for i in range(len(edges) - 1)]

    totals = {}

    def merge(part):
        for key, (cnt, sums, sumsq) in part.items():
            if key in totals:
                c0, s0, q0 = totals[key]
                totals[key] = (c0 + cnt, s0 + sums, q0 + sumsq)
            else:
                totals[key] = (cnt, sums, sumsq)

    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda args: _chunk_stats(spec, plans, *args), chunks))
        for part in parts:
            merge(part)
    else:
        for args in chunks:
            merge(_chunk_stats(spec, plans, *args))

    rows = []
    tt = spec.t_grid
    for alg in spec.algorithms:
        for m in spec.m_grid:
            key = (alg, m)
            if key not in totals:
                continue
            cnt, sums, sumsq = totals[key]
            mse = sums / cnt
            var_sq = np.maximum(sumsq / cnt - mse ** 2, 0.0)
            if alg in (Algorithm.TRIM_NONPRIVATE, Algorithm.GLOBAL_SENS):
                j, t_best, s, shape = 0, None, None, None
            elif alg is Algorithm.LOWER_BOUND:
                j = int(np.argmin(mse))
                t_best, s, shape = float(tt[j]), None, None
            else:
                plan = plans[alg]
                if not plan.feasible.any():
                    continue
                masked = np.where(plan.feasible, mse, np.inf)
                j = int(np.argmin(masked))
                t_best, s, shape = float(tt[j]), float(plan.s[j]), float(plan.shape[j])
            rows.append(
                CellResult(
                    algorithm=alg.value,
                    n=spec.n,
                    eps=spec.eps,
                    m=m,
                    t_best=t_best,
                    s=s,
                    shape=shape,
                    excess_var=float(spec.n * mse[j] - 1.0),
                    stderr=float(spec.n * math.sqrt(var_sq[j] / cnt)),
                    reps=cnt,
                    seed=spec.seed,
                )
            )
    return ExperimentResult(rows=tuple(rows))


CSV_COLUMNS = ("algorithm", "n", "eps", "m", "t_best", "s", "shape",
               "excess_var", "stderr", "reps", "seed")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(result: ExperimentResult, path) -> None:
    """Long-format CSV, one row per (algorithm, m), deterministic row order."""
    rows = sorted(result.rows, key=lambda r: (r.algorithm, r.m))
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(",".join(_fmt(getattr(r, col)) for col in CSV_COLUMNS))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_csv(path) -> tuple:
    """Read back rows written by emit_csv."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines or lines[0] != ",".join(CSV_COLUMNS):
        raise ParameterError(f"{path} does not carry the expected header")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        rows.append(
            CellResult(
                algorithm=parts[0],
                n=int(parts[1]),
                eps=float(parts[2]),
                m=int(parts[3]),
                t_best=float(parts[4]) if parts[4] else None,
                s=float(parts[5]) if parts[5] else None,
                shape=float(parts[6]) if parts[6] else None,
                excess_var=float(parts[7]),
                stderr=float(parts[8]),
                reps=int(parts[9]),
                seed=int(parts[10]),
            )
        )
    return tuple(rows)
