"""Privacy-budget kinds and the algebra that connects them.

Four guarantee kinds are represented: pure DP (eps), CDP (rho), truncated
CDP (rho with a Renyi-order cap omega), and approximate DP (eps, delta).
Conversions are explicit operations; nothing converts silently, so a report
can always state which definition an algorithm satisfies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import ParameterError


@dataclass(frozen=True)
class PureDP:
    eps: float

    def __post_init__(self):
        if self.eps < 0:
            raise ParameterError(f"pure-DP eps must be >= 0, got {self.eps}")


@dataclass(frozen=True)
class CDP:
    """rho-CDP: Renyi divergence at every order alpha is at most rho * alpha."""

    rho: float

    def __post_init__(self):
        if self.rho < 0:
            raise ParameterError(f"CDP rho must be >= 0, got {self.rho}")


@dataclass(frozen=True)
class TCDP:
    """(rho, omega)-truncated CDP: the rho * alpha bound holds only for alpha < omega."""

    rho: float
    omega: float

    def __post_init__(self):
        if self.rho < 0:
            raise ParameterError(f"tCDP rho must be >= 0, got {self.rho}")
        if self.omega <= 1:
            raise ParameterError(f"tCDP omega must be > 1, got {self.omega}")


@dataclass(frozen=True)
class ApproxDP:
    eps: float
    delta: float

    def __post_init__(self):
        if self.eps < 0:
            raise ParameterError(f"approx-DP eps must be >= 0, got {self.eps}")
        if not 0 <= self.delta < 1:
            raise ParameterError(f"approx-DP delta must be in [0, 1), got {self.delta}")


PrivacyBudget = Union[PureDP, CDP, TCDP, ApproxDP]


@dataclass(frozen=True)
class RenyiCurve:
    """A linear Renyi bound: divergence at order alpha is at most coefficient * alpha."""

    coefficient: float

    def __post_init__(self):
        if self.coefficient < 0:
            raise ParameterError(f"Renyi coefficient must be >= 0, got {self.coefficient}")


def pure_to_cdp(eps: float) -> CDP:
    """Pure eps-DP implies (eps^2 / 2)-CDP."""
    if eps < 0:
        raise ParameterError(f"eps must be >= 0, got {eps}")
    return CDP(0.5 * eps * eps)


def cdp_to_approx(rho: float, delta: float) -> ApproxDP:
    """rho-CDP implies (rho + 2 * sqrt(rho * log(1/delta)), delta)-DP for any delta in (0, 1)."""
    if rho < 0:
        raise ParameterError(f"rho must be >= 0, got {rho}")
    if not 0 < delta < 1:
        raise ParameterError(f"delta must be in (0, 1), got {delta}")
    eps = rho + 2.0 * math.sqrt(rho * math.log(1.0 / delta))
    return ApproxDP(eps, delta)


def compose_group(a: RenyiCurve, b: RenyiCurve) -> RenyiCurve:
    """Triangle rule for linear Renyi curves: coefficients combine as (sqrt(a) + sqrt(b))^2."""
    if a.coefficient == 0.0:
        return b
    if b.coefficient == 0.0:
        return a
    s = math.sqrt(a.coefficient) + math.sqrt(b.coefficient)
    return RenyiCurve(s * s)

def iterate_group(a: RenyiCurve, k: int) -> RenyiCurve:
    """k-fold group privacy: the linear coefficient grows quadratically, a * k^2."""
    if k < 1:
        raise ParameterError(f"group size k must be >= 1, got {k}")
    return RenyiCurve(a.coefficient * k * k)


def implies(stronger: PrivacyBudget, weaker: PrivacyBudget) -> bool:
    """Whether guarantee `stronger` is sufficient for guarantee `weaker`.

    Only relaxing conversions are recognised (pure -> CDP -> tCDP, CDP ->
    approx); the comparison never strengthens a claim. Unknown cross-kind
    pairs conservatively return False.
    """
    if isinstance(weaker, PureDP):
        return isinstance(stronger, PureDP) and stronger.eps <= weaker.eps
    if isinstance(weaker, CDP):
        if isinstance(stronger, PureDP):
            return pure_to_cdp(stronger.eps).rho <= weaker.rho
        return isinstance(stronger, CDP) and stronger.rho <= weaker.rho
    if isinstance(weaker, TCDP):
        if isinstance(stronger, PureDP):
            return pure_to_cdp(stronger.eps).rho <= weaker.rho
        if isinstance(stronger, CDP):
            return stronger.rho <= weaker.rho
        return (
            isinstance(stronger, TCDP)
            and stronger.rho <= weaker.rho
            and stronger.omega >= weaker.omega
        )
    if isinstance(weaker, ApproxDP):
        if isinstance(stronger, PureDP):
            return stronger.eps <= weaker.eps
        if isinstance(stronger, CDP):
            if weaker.delta <= 0:
                return False
            return cdp_to_approx(stronger.rho, weaker.delta).eps <= weaker.eps
        return (
            isinstance(stronger, ApproxDP)
            and stronger.eps <= weaker.eps
            and stronger.delta <= weaker.delta
        )
    return False
