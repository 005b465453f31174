"""Noise families for smooth-sensitivity mechanisms.

Six additive-noise families are supported, each with a sampler, a log
density, a closed-form variance, and a privacy-cost function that maps a
multiplicative/additive distortion of the noise variable to the budget kind
the family certifies:

  family          budget certified
  --------------  ---------------------------------
  LLN             CDP (Laplace times lognormal factor)
  ULN             CDP (uniform times lognormal factor, sigma >= sqrt(2))
  ArsinhNormal    CDP (sinh of a scaled Gaussian)
  StudentT        pure DP (degrees of freedom d)
  Laplace         approximate DP (needs a target delta)
  Gaussian        truncated CDP (needs an order cap omega)

All operations are pure given an explicit numpy Generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy.special import lambertw, log_ndtr, logsumexp, gammaln

from .budgets import CDP, ApproxDP, PrivacyBudget, PureDP, TCDP
from .errors import CalibrationError, InfeasibleError, InfiniteVarianceError, ParameterError

_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

ArrayLike = Union[float, np.ndarray]


class NoiseFamily(Enum):
    LLN = "lln"
    ULN = "uln"
    ARSINH_NORMAL = "arsinh_normal"
    STUDENT_T = "student_t"
    LAPLACE = "laplace"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class NoiseSpec:
    """A noise family plus its shape parameter.

    `shape` is sigma for LLN/ULN/ArsinhNormal, the degrees of freedom d for
    StudentT, and must be 1 (the standard distribution) for Laplace and
    Gaussian.
    """

    family: NoiseFamily
    shape: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.shape) or self.shape <= 0:
            raise ParameterError(f"shape must be a positive real, got {self.shape}")
        if self.family is NoiseFamily.ULN and self.shape < _SQRT2:
            raise ParameterError(
                f"ULN requires sigma >= sqrt(2) (privacy precondition), got {self.shape}"
            )
        if self.family is NoiseFamily.STUDENT_T and self.shape <= 2:
            raise InfiniteVarianceError(
                f"StudentT requires d > 2 for finite variance, got {self.shape}"
            )
        if self.family in (NoiseFamily.LAPLACE, NoiseFamily.GAUSSIAN) and self.shape != 1.0:
            raise ParameterError(f"{self.family.value} is standard-scale only (shape 1)")


def lln(sigma: float) -> NoiseSpec:
    return NoiseSpec(NoiseFamily.LLN, sigma)


def uln(sigma: float) -> NoiseSpec:
    return NoiseSpec(NoiseFamily.ULN, sigma)


def arsinh_normal(sigma: float) -> NoiseSpec:
    return NoiseSpec(NoiseFamily.ARSINH_NORMAL, sigma)


def student_t(d: float) -> NoiseSpec:
    return NoiseSpec(NoiseFamily.STUDENT_T, d)


def laplace() -> NoiseSpec:
    return NoiseSpec(NoiseFamily.LAPLACE)


def gaussian() -> NoiseSpec:
    return NoiseSpec(NoiseFamily.GAUSSIAN)


@dataclass(frozen=True)
class DistortionPair:
    """Multiplicative log-dilation t and additive shift s, in noise-scale units."""

    t: float
    s: float

    def __post_init__(self):
        if self.t < 0 or self.s < 0:
            raise ParameterError(f"distortion requires t >= 0 and s >= 0, got ({self.t}, {self.s})")


def standard_laplace(rng: np.random.Generator, size=None) -> ArrayLike:
    """Standard Laplace draw(s) by inverse CDF from one uniform per draw."""
    u = rng.random(size)
    with np.errstate(divide="ignore"):
        out = np.where(
            u < 0.5,
            np.log(np.maximum(2.0 * u, 1e-300)),
            -np.log(np.maximum(2.0 * (1.0 - u), 1e-300)),
        )
    return out if size is not None else float(out)


def sample(spec: NoiseSpec, rng: np.random.Generator, size=None) -> ArrayLike:
    """Draw from the named distribution using the explicit stream `rng`.

    LLN is standard Laplace times exp(sigma * standard Gaussian), ULN is
    Uniform[-1, 1] times the same factor, ArsinhNormal is
    sinh(sigma * Gaussian) / sigma, and StudentT uses d + 1 independent
    Gaussians (integral d only).
    """
    fam, shape = spec.family, spec.shape
    if fam is NoiseFamily.LLN:
        x = standard_laplace(rng, size)
        return x * np.exp(shape * rng.standard_normal(size))
    if fam is NoiseFamily.ULN:
        x = 2.0 * rng.random(size) - 1.0
        return x * np.exp(shape * rng.standard_normal(size))
    if fam is NoiseFamily.ARSINH_NORMAL:
        return np.sinh(shape * rng.standard_normal(size)) / shape
    if fam is NoiseFamily.STUDENT_T:
        d = int(round(shape))
        if d != shape:
            raise ParameterError(f"StudentT sampling needs integral d, got {shape}")
        shp = () if size is None else (size if isinstance(size, tuple) else (size,))
        x = rng.standard_normal((d + 1,) + shp)
        out = x[0] / np.sqrt(np.mean(x[1:] ** 2, axis=0))
        return out if size is not None else float(out)
    if fam is NoiseFamily.LAPLACE:
        return standard_laplace(rng, size)
    if fam is NoiseFamily.GAUSSIAN:
        return rng.standard_normal(size)
    raise ParameterError(f"unknown family {fam}")


def variance(spec: NoiseSpec) -> float:
    """Exact variance of the distribution."""
    fam, shape = spec.family, spec.shape
    if fam is NoiseFamily.LLN:
        return 2.0 * math.exp(2.0 * shape * shape)
    if fam is NoiseFamily.ULN:
        return math.exp(2.0 * shape * shape) / 3.0
    if fam is NoiseFamily.ARSINH_NORMAL:
        return math.expm1(2.0 * shape * shape) / (2.0 * shape * shape)
    if fam is NoiseFamily.STUDENT_T:
        if spec.shape <= 2:
            raise InfiniteVarianceError(f"StudentT variance is infinite for d = {spec.shape}")
        return spec.shape / (spec.shape - 2.0)
    if fam is NoiseFamily.LAPLACE:
        return 2.0
    if fam is NoiseFamily.GAUSSIAN:
        return 1.0
    raise ParameterError(f"unknown family {fam}")


@lru_cache(maxsize=8)
def _hermgauss(n: int):
    x, w = np.polynomial.hermite.hermgauss(n)
    return x, np.log(w), x * x


def _log_density_lln(sigma: float, z: np.ndarray, nodes: int = 128) -> np.ndarray:
    """LLN log density by Gauss-Hermite quadrature over the Gaussian mixing variable.

    The Gaussian expectation E[exp(-|z| e^{sigma^2} e^{sigma Y})] has its
    integrand mode at y* = -W(sigma^2 ztil)/sigma; recentring the nodes there
    (with curvature rescaling 1 + W) keeps the fixed node set accurate for
    every |z|, and the log-domain fold avoids underflow in the far tail.
    """
    x, logw, x2 = _hermgauss(nodes)
    ztil = np.abs(z) * math.exp(sigma * sigma)
    w_arg = np.real(lambertw(sigma * sigma * ztil))
    y_star = -w_arg / sigma
    scale = _SQRT2 / np.sqrt(1.0 + w_arg)
    y = y_star[..., None] + scale[..., None] * x
    with np.errstate(over="ignore"):
        h = -0.5 * y * y - ztil[..., None] * np.exp(sigma * y)
    log_integral = np.log(scale) + logsumexp(logw + x2 + h, axis=-1)
    return 0.5 * sigma * sigma - math.log(2.0) + log_integral - _LOG_SQRT_2PI


def log_density(spec: NoiseSpec, z: ArrayLike) -> ArrayLike:
    """Natural log of the density at z (vectorized; exact symmetry about 0)."""
    fam, shape = spec.family, spec.shape
    z_arr = np.abs(np.asarray(z, dtype=float))
    if fam is NoiseFamily.LLN:
        out = _log_density_lln(shape, z_arr)
    elif fam is NoiseFamily.ULN:
        # density (e^{sigma^2/2}/2) * Pr[Y >= sigma + log|z|/sigma]
        with np.errstate(divide="ignore"):
            g = shape + np.log(z_arr) / shape
        out = 0.5 * shape * shape - math.log(2.0) + log_ndtr(-g)
    elif fam is NoiseFamily.ARSINH_NORMAL:
        u = shape * z_arr
        out = -_LOG_SQRT_2PI - np.arcsinh(u) ** 2 / (2.0 * shape * shape) - 0.5 * np.log1p(u * u)
    elif fam is NoiseFamily.STUDENT_T:
        d = shape
        norm = gammaln((d + 1.0) / 2.0) - 0.5 * math.log(d * math.pi) - gammaln(d / 2.0)
        out = norm - (d + 1.0) / 2.0 * np.log1p(z_arr * z_arr / d)
    elif fam is NoiseFamily.LAPLACE:
        out = -math.log(2.0) - z_arr
    elif fam is NoiseFamily.GAUSSIAN:
        out = -0.5 * z_arr * z_arr - _LOG_SQRT_2PI
    else:
        raise ParameterError(f"unknown family {fam}")
    return out if isinstance(z, np.ndarray) else float(out)


def _golden_min(fn, lo: float, hi: float, iters: int = 120) -> float:
    """Golden-section minimizer; returns the best abscissa found (endpoints included)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    candidates = [lo, hi, c, d]
    return min(candidates, key=fn)


def _gaussian_gamma_cap(t: float, omega: float) -> float:
    """Largest admissible free parameter gamma for the Gaussian tCDP bound."""
    cap = 1.0 - omega * (-math.expm1(-t))
    if cap <= 0:
        raise CalibrationError(
            f"Gaussian tCDP requires omega < 1/(1 - e^-t); got omega={omega}, t={t}"
        )
    return cap


def _gaussian_tcdp_rho(t: float, s: float, omega: float) -> float:
    cap = _gaussian_gamma_cap(t, omega)

    def rho_at(g: float) -> float:
        return s * s / (2.0 * g) + t * t / (4.0 * g * g)

    gamma = _golden_min(rho_at, cap * 1e-6, cap)
    return rho_at(gamma)


def privacy_cost(
    spec: NoiseSpec,
    distortion: DistortionPair,
    *,
    delta: Optional[float] = None,
    omega: Optional[float] = None,
) -> PrivacyBudget:
    """The tightest budget certified for distorting Z into e^t Z + s.

    CDP families return rho = eps^2/2 with the family eps-formula; StudentT
    returns the pure-DP eps (its CDP form follows by conversion); Gaussian
    needs `omega` and returns tCDP; Laplace needs `delta` and returns
    approximate DP.
    """
    t, s = distortion.t, distortion.s
    fam, shape = spec.family, spec.shape
    if fam is NoiseFamily.LLN:
        eps = t / shape + math.exp(1.5 * shape * shape) * s
        return CDP(0.5 * eps * eps)
    if fam is NoiseFamily.ULN:
        eps = t / shape + math.exp(1.5 * shape * shape) * math.sqrt(2.0 / (math.pi * shape * shape)) * s
        return CDP(0.5 * eps * eps)
    if fam is NoiseFamily.ARSINH_NORMAL:
        eps = math.sqrt(t * (t / shape ** 2 + 1.0 / shape + 2.0)) + s * (2.0 / (3.0 * shape) + shape / 2.0)
        return CDP(0.5 * eps * eps)
    if fam is NoiseFamily.STUDENT_T:
        d = shape
        eps = t * (d + 1.0) + s * (d + 1.0) / (2.0 * math.sqrt(d))
        return PureDP(eps)
    if fam is NoiseFamily.GAUSSIAN:
        if omega is None or omega <= 1:
            raise CalibrationError("Gaussian tCDP needs an order cap omega > 1")
        return TCDP(_gaussian_tcdp_rho(t, s, omega), omega)
    if fam is NoiseFamily.LAPLACE:
        if delta is None or not 0 < delta < math.exp(-2.0):
            raise CalibrationError(
                f"Laplace approximate DP needs a target delta in (0, e^-2), got {delta}"
            )
        eps = s + math.expm1(t) * math.log(1.0 / delta) - t
        return ApproxDP(eps, delta)
    raise ParameterError(f"unknown family {fam}")


def _budget_eps(budget: PrivacyBudget) -> float:
    """The eps a budget corresponds to under the fixed-eps pairing convention."""
    if isinstance(budget, PureDP):
        return budget.eps
    if isinstance(budget, CDP):
        return math.sqrt(2.0 * budget.rho)
    if isinstance(budget, TCDP):
        return math.sqrt(2.0 * budget.rho)
    if isinstance(budget, ApproxDP):
        return budget.eps
    raise ParameterError(f"unknown budget {budget}")


def calibrate_scale(
    spec: NoiseSpec,
    t: float,
    target_eps: float,
    *,
    delta: Optional[float] = None,
    omega: Optional[float] = None,
) -> float:
    """Largest s with privacy_cost(spec, (t, s)) within the eps-target budget.

    For a fixed eps the target is the family's paired budget kind: pure DP
    for StudentT, eps^2/2-CDP for the CDP families, (eps^2/2, omega)-tCDP
    for Gaussian and (eps, delta)-DP for Laplace. Closed-form inversion where
    the eps-formula is affine in s; bisection for Gaussian.
    """
    if t < 0:
        raise ParameterError(f"t must be >= 0, got {t}")
    if target_eps <= 0:
        raise ParameterError(f"target eps must be > 0, got {target_eps}")
    fam, shape = spec.family, spec.shape
    base = _budget_eps(privacy_cost(spec, DistortionPair(t, 0.0), delta=delta, omega=omega))
    if base >= target_eps:
        raise InfeasibleError(
            f"infeasible: cost at s=0 is eps={base:.6g} >= target {target_eps:.6g} "
            f"(t={t} too large for {fam.value})"
        )
    if fam is NoiseFamily.LLN:
        return math.exp(-1.5 * shape * shape) * (target_eps - t / shape)
    if fam is NoiseFamily.ULN:
        slope = math.exp(1.5 * shape * shape) * math.sqrt(2.0 / (math.pi * shape * shape))
        return (target_eps - t / shape) / slope
    if fam is NoiseFamily.ARSINH_NORMAL:
        slope = 2.0 / (3.0 * shape) + shape / 2.0
        return (target_eps - math.sqrt(t * (t / shape ** 2 + 1.0 / shape + 2.0))) / slope
    if fam is NoiseFamily.STUDENT_T:
        d = shape
        return (target_eps - t * (d + 1.0)) * 2.0 * math.sqrt(d) / (d + 1.0)
    if fam is NoiseFamily.LAPLACE:
        return target_eps - (math.expm1(t) * math.log(1.0 / delta) - t)
    if fam is NoiseFamily.GAUSSIAN:
        rho_target = 0.5 * target_eps * target_eps

        def cost(s: float) -> float:
            return _gaussian_tcdp_rho(t, s, omega)

        s_hi = 1.0
        while cost(s_hi) <= rho_target:
            s_hi *= 2.0
            if s_hi > 1e12:
                break
        s_lo = 0.0
        for _ in range(200):
            mid = 0.5 * (s_lo + s_hi)
            if cost(mid) <= rho_target:
                s_lo = mid
            else:
                s_hi = mid
        return s_lo
    raise ParameterError(f"unknown family {fam}")


def arsinh_normal_half_t_eps(t: float, s: float) -> float:
    """The rounded eps-formula for ArsinhNormal at sigma = 2/sqrt(3), valid for |t| <= 1/2."""
    if not 0 <= t <= 0.5:
        raise ParameterError(f"specialisation requires 0 <= t <= 1/2, got {t}")
    return 1.81 * math.sqrt(t) + 1.16 * s
