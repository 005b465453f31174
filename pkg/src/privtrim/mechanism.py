"""The private trimmed-mean estimator: estimate + (S_t(x)/s) * Z.

Input-truncation mode clamps the data to [a, b], computes the exact smooth
sensitivity, and adds scaled noise to the trimmed mean. Output-truncation
mode trims the raw data, clamps the estimate, and uses the certified
smooth-sensitivity upper bound. A configuration can only be constructed if
the (noise, t, s) triple actually certifies the declared budget; release
refuses to exist otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import budgets
from .budgets import PrivacyBudget
from .errors import ParameterError, PrivacyContractError
from .noise import DistortionPair, NoiseSpec, privacy_cost, sample
from .sensitivity import (
    SortedDataset,
    TrimSpec,
    TruncationMode,
    smooth_sensitivity_input_trunc,
    smooth_sensitivity_output_trunc,
    trimmed_mean,
)


@dataclass(frozen=True)
class MechanismConfig:
    noise: NoiseSpec
    trim: TrimSpec
    t: float
    s: float
    budget: PrivacyBudget

    def __post_init__(self):
        if self.s <= 0 or self.t < 0:
            raise ParameterError(f"need s > 0 and t >= 0, got s={self.s}, t={self.t}")
        delta = getattr(self.budget, "delta", None)
        omega = getattr(self.budget, "omega", None)
        cost = privacy_cost(self.noise, DistortionPair(self.t, self.s), delta=delta, omega=omega)
        if not budgets.implies(cost, self.budget):
            raise PrivacyContractError(
                f"(t={self.t}, s={self.s}) with {self.noise.family.value} certifies {cost}, "
                f"which does not meet the declared budget {self.budget}"
            )


@dataclass(frozen=True)
class ReleaseRecord:
    estimate: float        # the released value
    point_estimate: float  # trimmed mean before noise
    noise_draw: float
    smooth_sens: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "point_estimate": self.point_estimate,
            "noise_draw": self.noise_draw,
            "smooth_sens": self.smooth_sens,
            "seed": self.seed,
        }


def release(config: MechanismConfig, values, seed: int) -> ReleaseRecord:
    """One private release of the trimmed mean; reproducible from (config, values, seed).

    The smooth sensitivity is recomputed per call: the dataset is the privacy
    boundary and caching across datasets would be a correctness hazard. The
    released value is not re-truncated after noise addition.
    """
    raw = np.asarray(values, dtype=float)
    if raw.ndim != 1 or raw.size < 1 or not np.all(np.isfinite(raw)):
        raise ParameterError("dataset must be a nonempty 1-D array of finite values")
    trim = config.trim
    if not raw.size > 2 * trim.m:
        raise ParameterError(f"need n > 2m, got n={raw.size}, m={trim.m}")

    if trim.mode is TruncationMode.INPUT:
        data = SortedDataset(np.clip(raw, trim.a, trim.b))
        point = trimmed_mean(data, trim.m)
        sens = smooth_sensitivity_input_trunc(data, trim, config.t).smooth
    else:
        data = SortedDataset(raw)
        point = float(np.clip(trimmed_mean(data, trim.m), trim.a, trim.b))
        sens = smooth_sensitivity_output_trunc(data, trim, config.t)

    rng = np.random.default_rng(seed)
    z = float(sample(config.noise, rng))
    return ReleaseRecord(
        estimate=point + sens / config.s * z,
        point_estimate=point,
        noise_draw=z,
        smooth_sens=sens,
        seed=seed,
    )


def global_sensitivity_baseline(values, a: float, b: float, eps: float, seed: int) -> float:
    """Mean of [a, b]-clamped data plus Gaussian noise at the global-sensitivity scale.

    The clamped mean has global sensitivity (b - a)/n; Gaussian noise with
    standard deviation (b - a)/(n eps) makes the release eps^2/2-CDP.
    """
    if eps <= 0:
        raise ParameterError(f"eps must be > 0, got {eps}")
    if not a < b:
        raise ParameterError(f"need a < b, got [{a}, {b}]")
    raw = np.asarray(values, dtype=float)
    clamped = np.clip(raw, a, b)
    sd = (b - a) / (raw.size * eps)
    rng = np.random.default_rng(seed)
    return float(clamped.mean() + sd * rng.standard_normal())
