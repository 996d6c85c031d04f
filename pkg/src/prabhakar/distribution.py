"""The discrete Prabhakar-type fractional Poisson law.

``X ~ ML(alpha, beta, gamma)`` at time ``t`` has masses

    P(X = k) = (gamma)_k t^(alpha k) / (k! Gamma(alpha k + beta) E^gamma_{alpha,beta}(t^alpha)).

The intensity is fixed to one; an intensity ``lam`` is recovered by evaluating
at ``lam**(1/alpha) * t``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, List

import numpy as np

from .combinatorics import MAX_ORDER, falling_factorial_expansion, stirling2
from .errors import DomainError, NonConvergenceError
from .specfun import (
    DEFAULT_CONFIG,
    EvalConfig,
    HLZParams,
    MLParams,
    SeriesResult,
    hlz_phi,
    log_gamma,
    pochhammer,
    prabhakar_e,
    prabhakar_e_polar,
)

__all__ = [
    "MLDistribution",
    "MomentMethod",
    "MomentResult",
    "pmf",
    "cdf",
    "sample",
    "moment_raw",
    "moment_factorial",
    "moment_fractional",
    "brute_force_moment",
    "chf",
    "poisson_reweight_pmf",
    "brute_raw",
    "brute_factorial",
    "chf_derivatives",
]

TAIL_MASS_TOL = 1e-10
SAMPLE_TAIL_TOL = 1e-12
_BRUTE_REL = 1e-16
_BRUTE_MIN_TERMS = 50


def require(result: SeriesResult, what: str) -> SeriesResult:
    if not result.converged:
        raise NonConvergenceError(
            f"{what} did not converge after {result.terms_used} terms", result
        )
    return result


class MomentMethod(enum.Enum):
    CLOSED_FORM_N3 = "closed_form_n3"
    HLZ_N7 = "hlz_n7"
    BRUTE_FORCE = "brute_force"


@dataclass(frozen=True)
class MomentResult:
    order: float
    value: float
    method: MomentMethod
    est_error: float


@dataclass(frozen=True)
class MLDistribution:
    """``ML(alpha, beta, gamma)`` at a positive time ``t``; ``norm`` is cached."""

    params: MLParams
    t: float
    cfg: EvalConfig = DEFAULT_CONFIG
    norm: float = field(init=False, repr=False)

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t > 0.0):
            raise DomainError(f"t must be a finite positive real, got {self.t!r}")
        norm = require(prabhakar_e(self.params, self.arg, self.cfg), "normalizer")
        object.__setattr__(self, "norm", norm.value)

    @classmethod
    def of(cls, alpha: float, beta: float, gamma: float, t: float, cfg: EvalConfig = DEFAULT_CONFIG):
        return cls(MLParams(alpha, beta, gamma), t, cfg)

    @property
    def arg(self) -> float:
        """Series argument ``t**alpha``."""
        return self.t**self.params.alpha

    @cached_property
    def _log_norm(self) -> float:
        return math.log(self.norm)

    @cached_property
    def _poisson_log_denominator(self) -> float:
        return _poisson_log_denominator(self)

    def log_weight(self, k: int) -> float:
        """``log((gamma)_k t^(alpha k) / (k! Gamma(alpha k + beta)))``."""
        p = self.params
        return (
            log_gamma(p.gamma + k)
            - log_gamma(p.gamma)
            - log_gamma(p.alpha * k + p.beta)
            - log_gamma(k + 1.0)
            + k * p.alpha * math.log(self.t)
        )

    def ratio_bound(self, k: int) -> float:
        """Upper bound on ``pmf(j+1)/pmf(j)`` for every ``j >= k``."""
        p = self.params
        step = math.exp(log_gamma(p.alpha * k + p.beta) - log_gamma(p.alpha * (k + 1) + p.beta))
        return self.arg * max(1.0, (p.gamma + k) / (k + 1.0)) * step

    def cutoff(self, tail_tol: float = TAIL_MASS_TOL) -> int:
        """Smallest ``K`` past the mode with ``P(X > K) < tail_tol`` (rigorous bound)."""
        for k in range(self.cfg.max_terms):
            ratio = self.ratio_bound(k)
            if ratio < 1.0:
                tail = pmf(self, k + 1) / (1.0 - ratio)
                if tail < tail_tol:
                    return k
        raise NonConvergenceError(
            f"tail mass stays above {tail_tol:g} within {self.cfg.max_terms} terms"
        )


def pmf(d: MLDistribution, k: int) -> float:
    if k < 0:
        return 0.0
    return math.exp(d.log_weight(k) - d._log_norm)


def cdf(d: MLDistribution, k: int) -> float:
    if k < 0:
        return 0.0
    return min(1.0, math.fsum(pmf(d, j) for j in range(k + 1)))


def sample(d: MLDistribution, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` variates by inverse-CDF search.

    All uniforms advance through the support together, one mass at a time, so
    no cumulative table is stored.  Mass beyond the cap ``K`` (rigorously below
    ``SAMPLE_TAIL_TOL``) is assigned to ``K``.
    """
    if n < 0:
        raise DomainError(f"sample size must be non-negative, got {n}")
    if n == 0:
        return np.empty(0, dtype=np.int64)
    cap = d.cutoff(SAMPLE_TAIL_TOL)
    u = np.random.default_rng(seed).random(n)
    out = np.full(n, cap, dtype=np.int64)
    pending = np.arange(n)
    cum = 0.0
    for k in range(cap):
        cum += pmf(d, k)
        hit = u[pending] < cum
        out[pending[hit]] = k
        pending = pending[~hit]
        if pending.size == 0:
            break
    return out


def brute_force_moment(d: MLDistribution, weight: Callable[[int], float], order: float = math.nan) -> MomentResult:
    """``sum_k weight(k) pmf(k)`` for a non-negative, polynomially growing weight.

    Summation runs to at least 50 terms and stops past the mode once a term
    drops below ``1e-16`` of the running sum.  The error estimate is a
    geometric tail with ratio ``max(w(k+1)/w(k), 1) * ratio_bound(k)``.
    """
    terms: List[float] = []
    running = 0.0
    for k in range(d.cfg.max_terms):
        term = weight(k) * pmf(d, k)
        terms.append(term)
        running += term
        if k + 1 < _BRUTE_MIN_TERMS or term >= _BRUTE_REL * running:
            continue
        w_k, w_next = weight(k), weight(k + 1)
        growth = w_next / w_k if w_k > 0.0 else math.inf
        ratio = max(growth, 1.0) * d.ratio_bound(k)
        if ratio < 1.0:
            tail = term * ratio / (1.0 - ratio)
            total = math.fsum(terms)
            return MomentResult(order, total, MomentMethod.BRUTE_FORCE, tail + 4 * len(terms) * 2.0**-53 * total)
    raise NonConvergenceError(f"brute-force moment did not settle in {d.cfg.max_terms} terms")


def _falling(k: int, s: int) -> float:
    value = 1.0
    for j in range(s):
        value *= k - j
    return value


def _power_components(d: MLDistribution, j: int) -> SeriesResult:
    """``(gamma)_j t^(alpha j) E^{gamma+j}_{alpha, alpha j + beta}(t^alpha)``."""
    p = d.params
    series = require(
        prabhakar_e(p.shifted(beta=p.alpha * j, gamma=float(j)), d.arg, d.cfg),
        f"E^(gamma+{j}) component",
    )
    return series.scaled(pochhammer(p.gamma, j) * d.arg**j)


def _check_order(s: int, lowest: int) -> None:
    if int(s) != s or not lowest <= s <= MAX_ORDER:
        raise DomainError(f"integer moment order must lie in [{lowest}, {MAX_ORDER}], got {s!r}")


def _stirling_combination(d: MLDistribution, weights: dict, order: float) -> MomentResult:
    parts = []
    err = 0.0
    for j, w in weights.items():
        if w == 0:
            continue
        comp = _power_components(d, j)
        parts.append(w * comp.value)
        err += abs(w) * (comp.tail_bound + d.cfg.rel_tol * abs(comp.value))
    value = math.fsum(parts) / d.norm
    return MomentResult(order, value, MomentMethod.CLOSED_FORM_N3, err / d.norm + d.cfg.rel_tol * abs(value))


def moment_raw(d: MLDistribution, s: int) -> MomentResult:
    """Integer raw moment as a Stirling-weighted sum of shifted Prabhakar functions.

    ``E X^s = sum_j (gamma)_j S(s, j) t^(alpha j) E^{gamma+j}_{alpha, alpha j+beta}(t^alpha) / E``.
    """
    _check_order(s, 0)
    s = int(s)
    return _stirling_combination(d, {j: stirling2(s, j) for j in range(s + 1)}, s)


def moment_factorial(d: MLDistribution, s: int) -> MomentResult:
    """Factorial moment ``E[X(X-1)...(X-s+1)] = sum_r c_r E X^r``.

    The signed first-kind coefficients ``c_r`` are composed with the Stirling
    weights of each raw moment in exact integer arithmetic before any floating
    point work.  Summing the raw moments numerically instead would cancel
    catastrophically for small ``t``.
    """
    _check_order(s, 1)
    s = int(s)
    c = falling_factorial_expansion(s)
    weights = {j: sum(c[r] * stirling2(r, j) for r in range(j, s + 1)) for j in range(s + 1)}
    return _stirling_combination(d, weights, s)


def moment_fractional(d: MLDistribution, s: float) -> MomentResult:
    """Moment of positive real order through the generalized Hurwitz-Lerch series

    ``E X^s = gamma t^alpha Phi^{(1,alpha)}_{gamma+1; alpha+beta}(t^alpha, 1-s, 1) / (E Gamma(alpha+beta))``.

    Only ``s > 0`` is accepted: at ``s = 0`` the series drops the ``k = 0``
    mass and evaluates to ``1 - pmf(0)``.
    """
    if not s > 0.0:
        raise DomainError(f"fractional moment order must be positive, got {s!r}")
    p = d.params
    h = HLZParams(lam=p.gamma + 1.0, nu=p.alpha + p.beta, rho=1.0, sigma=0.0, kappa=p.alpha, a=1.0)
    series = require(hlz_phi(h, d.arg, 1.0 - s, d.cfg), "Hurwitz-Lerch series")
    scale = p.gamma * d.arg / (d.norm * math.exp(log_gamma(p.alpha + p.beta)))
    value = scale * series.value
    return MomentResult(s, value, MomentMethod.HLZ_N7, scale * series.tail_bound + 2 * d.cfg.rel_tol * abs(value))


def chf(d: MLDistribution, x: float) -> complex:
    """Characteristic function ``E exp(i x X) = E(t^alpha e^{ix}) / E(t^alpha)``."""
    series = require(prabhakar_e_polar(d.params, d.arg, x, d.cfg), "complex Prabhakar series")
    return series.value / d.norm


def _log_reweight(p: MLParams, k: int) -> float:
    # log((gamma)_k / Gamma(alpha k + beta))
    return log_gamma(p.gamma + k) - log_gamma(p.gamma) - log_gamma(p.alpha * k + p.beta)


def _log_poisson(mean: float, k: int) -> float:
    return -mean + k * math.log(mean) - log_gamma(k + 1.0)


def _poisson_log_denominator(d: MLDistribution) -> float:
    p, mean = d.params, d.arg
    terms: List[float] = []
    for k in range(d.cfg.max_terms):
        terms.append(_log_reweight(p, k) + _log_poisson(mean, k))
        ratio = d.ratio_bound(k)
        if ratio < 1.0 and terms[-1] - math.log1p(-ratio) < max(terms) + math.log(1e-17):
            break
    else:
        raise NonConvergenceError("Poisson reweighting sum did not settle")
    peak = max(terms)
    return peak + math.log(math.fsum(math.exp(v - peak) for v in terms))


def poisson_reweight_pmf(d: MLDistribution, k: int) -> float:
    """Mass at ``k`` as a reweighted Poisson law.

    A non-homogeneous Poisson process with intensity ``alpha t^(alpha-1)`` has
    Poisson(``t^alpha``) counts.  Its masses get weights
    ``(gamma)_k / Gamma(alpha k + beta)`` and are renormalized by their own
    weighted sum, which never touches ``d.norm``.
    """
    if k < 0:
        return 0.0
    log_num = _log_reweight(d.params, k) + _log_poisson(d.arg, k)
    return math.exp(log_num - d._poisson_log_denominator)


def _fractional_weight(s: float) -> Callable[[int], float]:
    return lambda k: float(k) ** s if k else (1.0 if s == 0 else 0.0)


def _factorial_weight(s: int) -> Callable[[int], float]:
    return lambda k: _falling(k, s)


def brute_raw(d: MLDistribution, s: float) -> MomentResult:
    """Reference ``sum_k k^s pmf(k)`` for any real ``s >= 0``."""
    return brute_force_moment(d, _fractional_weight(s), s)


def brute_factorial(d: MLDistribution, s: int) -> MomentResult:
    """Reference ``sum_k k(k-1)...(k-s+1) pmf(k)``."""
    return brute_force_moment(d, _factorial_weight(s), s)


def chf_derivatives(d: MLDistribution) -> tuple:
    """``(E X, E X^2)`` from the parameter-shift forms of the CHF derivatives at 0."""
    p, u = d.params, d.arg
    e1 = require(prabhakar_e(p.shifted(beta=p.alpha, gamma=1.0), u, d.cfg), "E^(gamma+1)").value
    e2 = require(prabhakar_e(p.shifted(beta=2 * p.alpha, gamma=2.0), u, d.cfg), "E^(gamma+2)").value
    first = p.gamma * u * e1 / d.norm
    second = (p.gamma * u * e1 + p.gamma * (p.gamma + 1.0) * u * u * e2) / d.norm
    return first, second

