"""Closed-form error predictions and smooth-sensitivity lower bounds.

Upper bounds cover the trimmed mean's variance (symmetric and general data),
the truncation error, the second moment of the smooth sensitivity, and the
full mechanism MSE for both truncation modes. Lower bounds cover the tails
and the variance of any noise distribution admissible at a given (s, t, eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .sensitivity import TruncationMode


@dataclass(frozen=True)
class BoundInputs:
    n: int
    m: int
    a: float
    b: float
    sigma_data: float       # true standard deviation of the data distribution
    sigma_subg: float       # subgaussian parameter (equals sigma_data for Gaussians)
    mu: float
    t: float
    s: float

    def __post_init__(self):
        if not self.n > 2 * self.m >= 0:
            raise ParameterError(f"need n > 2m >= 0, got n={self.n}, m={self.m}")
        if not self.a < self.b:
            raise ParameterError(f"need a < b, got [{self.a}, {self.b}]")
        if self.sigma_data <= 0 or self.sigma_subg <= 0:
            raise ParameterError("scale parameters must be positive")


def trim_var_bound_symmetric(n: int, m: int, second_moment: float) -> float:
    """E[(trim - mu)^2] <= n/(n - 2m)^2 * E[X^2] for data symmetric about its mean."""
    if not n > 2 * m >= 0:
        raise ParameterError(f"need n > 2m >= 0, got n={n}, m={m}")
    return n / (n - 2 * m) ** 2 * second_moment


def trim_var_bound_general(n: int, m: int, var: float) -> float:
    """E[(trim - mu)^2] <= n (1 + sqrt(8) m)/(n - 2m)^2 * sigma^2 for arbitrary data."""
    if not n > 2 * m >= 0:
        raise ParameterError(f"need n > 2m >= 0, got n={n}, m={m}")
    return n * (1.0 + math.sqrt(8.0) * m) / (n - 2 * m) ** 2 * var


def truncation_error_bound(n: int, m: int, sigma_subg: float, a: float, b: float, mu: float) -> float:
    """Mean-squared shift of the trimmed mean caused by clamping subgaussian inputs to [a, b]."""
    if not a < mu < b:
        raise ParameterError(f"mean must lie inside the interval, got mu={mu}, [{a}, {b}]")
    if not n > 2 * m >= 0:
        raise ParameterError(f"need n > 2m >= 0, got n={n}, m={m}")
    v = sigma_subg * sigma_subg
    tails = math.exp(-((b - mu) ** 2) / (2.0 * v)) + math.exp(-((mu - a) ** 2) / (2.0 * v))
    return 2.0 * n / (n - 2 * m) * v * tails


def ss_second_moment_bound(
    mode: TruncationMode, n: int, m: int, t: float, a: float, b: float, sigma: float
) -> float:
    """Bound on E[S^2] for the smooth sensitivity of the trimmed mean.

    Input mode takes sigma as the subgaussian parameter and uses the
    8 sigma^2 log(2n) form; output mode takes the true standard deviation.
    """
    if not n > 2 * m >= 0:
        raise ParameterError(f"need n > 2m >= 0, got n={n}, m={m}")
    span2 = (b - a) ** 2
    decay = math.exp(-2.0 * m * t) * span2
    if mode is TruncationMode.INPUT:
        return (8.0 * sigma * sigma * math.log(2.0 * n) + decay) / (n - 2 * m) ** 2
    return sigma * sigma * 2.0 * n / (n - 2 * m) ** 2 + decay


def mechanism_mse_bound(mode: TruncationMode, inputs: BoundInputs, noise_variance: float) -> float:
    """Predicted MSE of the full private estimator: estimation term plus noise term."""
    n, m = inputs.n, inputs.m
    if mode is TruncationMode.INPUT:
        trim_term = trim_var_bound_symmetric(n, m, inputs.sigma_data ** 2)
        trunc_term = truncation_error_bound(n, m, inputs.sigma_subg, inputs.a, inputs.b, inputs.mu)
        est = (math.sqrt(trim_term) + math.sqrt(trunc_term)) ** 2
        ss2 = ss_second_moment_bound(mode, n, m, inputs.t, inputs.a, inputs.b, inputs.sigma_subg)
    else:
        est = trim_var_bound_general(n, m, inputs.sigma_data ** 2)
        ss2 = ss_second_moment_bound(mode, n, m, inputs.t, inputs.a, inputs.b, inputs.sigma_data)
    return est + ss2 / (inputs.s ** 2) * noise_variance


def lower_bound_tail(s: float, t: float, eps: float, x: float) -> float:
    """Pr[|Z| > x] >= (1/4) exp(-eps^2 ceil((1/t) log(1 + (x/s)(e^t - 1)))^2) for admissible Z."""
    if min(s, t, eps, x) <= 0:
        raise ParameterError("s, t, eps, x must all be positive")
    k = math.ceil(math.log1p(x / s * math.expm1(t)) / t)
    return 0.25 * math.exp(-eps * eps * k * k)


def lower_bound_variance(s: float, t: float, eps: float, k_cap: int | None = None) -> float:
    """Best variance lower bound over the two-index family for admissible noise at (s, t, eps).

    Maximizes over k >= 1, l >= 0 with k + l capped near ceil(10/eps)
    (200 at most); beyond the cap the exp(eps^2 (k+l)^2) denominator makes
    every term vacuous. Negative terms are discarded.
    """
    if min(s, t, eps) <= 0:
        raise ParameterError("s, t, eps must all be positive")
    cap = k_cap if k_cap is not None else min(max(math.ceil(10.0 / eps), 1), 200)
    log_prefactor = 2.0 * (math.log(s) - math.log(-math.expm1(-t)))
    best = 0.0
    for total in range(1, cap + 1):
        e2 = eps * eps * total * total
        if e2 > 700.0:
            break
        log_den = e2 + math.log1p(-math.exp(-e2))
        for ell in range(0, total):
            k = total - ell
            # A = e^{(l-1)t} (e^{kt} - 1) + (e^{lt} - 1), both parts >= 0
            log_part1 = (ell - 1.0) * t + k * t + math.log1p(-math.exp(-k * t))
            if ell > 0:
                log_part2 = ell * t + math.log1p(-math.exp(-ell * t))
                log_a = np.logaddexp(log_part1, log_part2)
                sub = math.exp(2.0 * log_part2) if 2.0 * log_part2 < 700.0 else math.inf
            else:
                log_a = log_part1
                sub = 0.0
            log_main = log_prefactor + 2.0 * log_a - log_den
            main = math.exp(log_main) if log_main < 700.0 else math.inf
            if math.isinf(main):
                continue
            term = main - math.exp(log_prefactor) * sub
            if term > best:
                best = term
    return best
