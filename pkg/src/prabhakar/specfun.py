"""Series evaluators for the Prabhakar function and its companions.

Every series here is summed term by term in log space: a term is produced as
``(log|t_k|, sign)`` and exponentiated only when it is added, so that factors
such as ``Gamma(alpha*k + beta)`` never have to be representable on their own.
Summation stops once the current term and a geometric estimate of the tail
both fall below ``rel_tol * |partial sum|``.

The evaluators are meant for moderate arguments (``|z|`` up to roughly 100
with the default configuration).  No asymptotic expansions are used, so large
arguments end with ``converged=False`` rather than a wrong value.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple, Union

from .errors import DomainError

__all__ = [
    "EvalConfig",
    "DEFAULT_CONFIG",
    "MLParams",
    "SeriesResult",
    "HLZParams",
    "Region",
    "log_gamma",
    "pochhammer",
    "prabhakar_e",
    "prabhakar_e_polar",
    "two_param_ml",
    "classical_ml",
    "kummer_1f1",
    "hlz_phi",
    "prabhakar_derivative",
]

_EPS = 2.0**-52
_LOG_MAX = 709.0
# alternating and complex sums are only trusted to this relative accuracy
SIGNED_REL_TOL = 1e-10


@dataclass(frozen=True)
class EvalConfig:
    rel_tol: float = 1e-13
    max_terms: int = 10_000

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise DomainError(f"rel_tol must lie in (0, 1), got {self.rel_tol!r}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise DomainError(f"max_terms must be a positive integer, got {self.max_terms!r}")


DEFAULT_CONFIG = EvalConfig()


@dataclass(frozen=True)
class MLParams:
    """Parameter triple ``(alpha, beta, gamma)`` of ``E^gamma_{alpha,beta}``."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be a finite positive real, got {value!r}")

    def shifted(self, *, beta: float = 0.0, gamma: float = 0.0) -> "MLParams":
        return replace(self, beta=self.beta + beta, gamma=self.gamma + gamma)


@dataclass(frozen=True)
class SeriesResult:
    """Outcome of a series evaluation.

    ``tail_bound`` estimates the truncation error only.  Alternating and
    complex sums additionally require the rounding error implied by
    cancellation to stay below ``SIGNED_REL_TOL`` before they report
    ``converged``.
    """

    value: Union[float, complex]
    terms_used: int
    tail_bound: float
    converged: bool

    def scaled(self, factor: float) -> "SeriesResult":
        return replace(self, value=self.value * factor, tail_bound=self.tail_bound * abs(factor))


# --- gamma-function helpers -------------------------------------------------


def log_gamma(x: float) -> float:
    """Return ``ln Gamma(x)`` for ``x > 0``.

    Inside the range where ``Gamma(x)`` is a finite double the logarithm of
    ``math.gamma`` is used; it is more accurate than ``math.lgamma`` there.
    """
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    try:
        return math.log(math.gamma(x))
    except OverflowError:
        return math.lgamma(x)


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and float(x).is_integer()


def _log_gamma_signed(x: float) -> Tuple[float, int]:
    if x > 0.0:
        return log_gamma(x), 1
    if _is_nonpositive_integer(x):
        raise DomainError(f"Gamma has a pole at {x!r}")
    return math.lgamma(x), -1 if int(math.floor(x)) % 2 else 1


def _log_pochhammer(lam: float, mu: float) -> Tuple[float, int]:
    """``(log|(lam)_mu|, sign)``; sign 0 marks an exact zero."""
    if mu == 0.0:
        return 0.0, 1
    if lam > 0.0 and lam + mu > 0.0:
        return log_gamma(lam + mu) - log_gamma(lam), 1
    if mu > 0.0 and float(mu).is_integer():
        total, sign = 0.0, 1
        for j in range(int(mu)):
            factor = lam + j
            if factor == 0.0:
                return -math.inf, 0
            total += math.log(abs(factor))
            if factor < 0.0:
                sign = -sign
        return total, sign
    if _is_nonpositive_integer(lam) or _is_nonpositive_integer(lam + mu):
        raise DomainError(
            f"Pochhammer ({lam!r})_{mu!r} needs the Gamma ratio, which hits a pole"
        )
    num, s_num = _log_gamma_signed(lam + mu)
    den, s_den = _log_gamma_signed(lam)
    return num - den, s_num * s_den


def pochhammer(lam: float, mu: float) -> float:
    """Generalized Pochhammer symbol ``Gamma(lam + mu) / Gamma(lam)``.

    For a non-negative integer ``mu`` the rising-factorial product is used, so
    any real ``lam`` is accepted and ``(0)_0 = 1``.
    """
    if mu >= 0.0 and float(mu).is_integer():
        result = 1.0
        for j in range(int(mu)):
            result *= lam + j
        return result
    log_abs, sign = _log_pochhammer(lam, mu)
    return sign * math.exp(log_abs) if sign else 0.0


# --- summation engine ---------------------------------------------------------

TermFn = Callable[[int], Tuple[float, int]]
RatioBound = Callable[[int, float], float]


def _sum_series(
    term: TermFn,
    cfg: EvalConfig,
    *,
    ratio_bound: Optional[RatioBound] = None,
    phase: Optional[float] = None,
    length: Optional[int] = None,
) -> SeriesResult:
    """Sum ``sum_k sign_k * exp(log_k) * exp(i*k*phase)``.

    ``term`` is called with k = 0, 1, 2, ... in order.  ``ratio_bound(k, r)``
    may return a bound on every later magnitude ratio given the observed ratio
    ``r = |t_{k+1}/t_k|``; it turns the geometric tail estimate into a bound.
    ``length`` marks a terminating series.
    """
    log_tol = math.log(cfg.rel_tol)
    terms = []
    running = 0.0
    abs_sum = 0.0
    signed = phase is not None
    tail = math.inf
    converged = False

    log_k, sign_k = term(0)
    k = 0
    while True:
        if sign_k and log_k > _LOG_MAX:
            return SeriesResult(math.nan, k, math.inf, False)
        mag = math.exp(log_k) if sign_k else 0.0
        if phase is None:
            t_k = sign_k * mag
            signed = signed or sign_k < 0
        else:
            t_k = sign_k * mag * cmath.exp(1j * k * phase)
        terms.append(t_k)
        running += t_k
        abs_sum += mag
        n = k + 1
        if length is not None and n >= length:
            tail, converged = 0.0, True
            break
        if n >= cfg.max_terms:
            break
        log_next, sign_next = term(n)
        if sign_k and sign_next and running != 0.0:
            ratio = math.exp(log_next - log_k)
            if ratio_bound is not None:
                ratio = max(ratio, ratio_bound(k, ratio))
            if ratio < 1.0:
                log_s = math.log(abs(running))
                log_tail = log_next - math.log1p(-ratio)
                tail = math.exp(min(log_tail, _LOG_MAX))
                if log_k <= log_tol + log_s and log_tail <= log_tol + log_s:
                    converged = True
                    break
            else:
                tail = math.inf
        log_k, sign_k, k = log_next, sign_next, n

    if phase is None:
        value: Union[float, complex] = math.fsum(terms)
    else:
        value = complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
    if converged and signed:
        rounding = 16.0 * _EPS * abs_sum
        if rounding > max(SIGNED_REL_TOL, cfg.rel_tol) * abs(value):
            converged = False
    return SeriesResult(value, len(terms), tail, converged)


# --- Prabhakar function ---------------------------------------------------------


def _prabhakar_terms(p: MLParams, log_r: float, alternating: bool) -> Tuple[TermFn, RatioBound]:
    a, b, g = p.alpha, p.beta, p.gamma
    lg_g = log_gamma(g)

    def term(k: int) -> Tuple[float, int]:
        log_t = log_gamma(g + k) - lg_g - log_gamma(a * k + b) - log_gamma(k + 1.0)
        if k:
            log_t += k * log_r
        return log_t, -1 if alternating and k % 2 else 1

    # t_{k+1}/t_k = |z| (g+k)/(k+1) Gamma(ak+b)/Gamma(ak+a+b); the Gamma ratio
    # decreases in k, and (g+j)/(j+1) <= max(1, (g+k)/(k+1)) for j >= k.
    def bound(k: int, ratio: float) -> float:
        return ratio * max(1.0, (k + 1.0) / (g + k))

    return term, bound


def prabhakar_e(p: MLParams, z: float, cfg: EvalConfig = DEFAULT_CONFIG) -> SeriesResult:
    """Three-parameter Mittag-Leffler function ``E^gamma_{alpha,beta}(z)``.

    Sum of ``(gamma)_k z^k / (Gamma(alpha k + beta) k!)`` over ``k >= 0``.
    Negative ``z`` gives an alternating series, accepted only to a relative
    accuracy of ``SIGNED_REL_TOL``.

    >>> round(prabhakar_e(MLParams(1.0, 1.0, 1.0), 1.0).value, 10)
    2.7182818285
    """
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"z must be finite, got {z!r}")
    if z == 0.0:
        return _sum_series(lambda k: (-log_gamma(p.beta), 1), cfg, length=1)
    term, bound = _prabhakar_terms(p, math.log(abs(z)), z < 0.0)
    return _sum_series(term, cfg, ratio_bound=bound)


def prabhakar_e_polar(
    p: MLParams, r: float, theta: float, cfg: EvalConfig = DEFAULT_CONFIG
) -> SeriesResult:
    """``E^gamma_{alpha,beta}(r e^{i theta})`` for ``r >= 0`` with a complex value.

    Term magnitudes are those of the real series at ``r``; only the phase
    ``k*theta`` differs, so the same tail bound applies.
    """
    if not r >= 0.0:
        raise DomainError(f"modulus must be non-negative, got {r!r}")
    if r == 0.0:
        return _sum_series(lambda k: (-log_gamma(p.beta), 1), cfg, phase=theta, length=1)
    term, bound = _prabhakar_terms(p, math.log(r), False)
    return _sum_series(term, cfg, ratio_bound=bound, phase=theta)


def two_param_ml(alpha: float, beta: float, z: float, cfg: EvalConfig = DEFAULT_CONFIG) -> SeriesResult:
    """``E_{alpha,beta}(z)``, the Prabhakar function with ``gamma = 1``."""
    return prabhakar_e(MLParams(alpha, beta, 1.0), z, cfg)


def classical_ml(alpha: float, z: float, cfg: EvalConfig = DEFAULT_CONFIG) -> SeriesResult:
    """``E_alpha(z)``, the Prabhakar function with ``beta = gamma = 1``."""
    return prabhakar_e(MLParams(alpha, 1.0, 1.0), z, cfg)


def prabhakar_derivative(
    p: MLParams, z: float, order: int, cfg: EvalConfig = DEFAULT_CONFIG
) -> SeriesResult:
    """First or second derivative in ``z`` via the parameter-shift identities

    ``E' = gamma E^{gamma+1}_{alpha,alpha+beta}`` and
    ``E'' = gamma (gamma+1) E^{gamma+2}_{alpha,2 alpha+beta}``.
    """
    if order == 1:
        shifted, factor = p.shifted(beta=p.alpha, gamma=1.0), p.gamma
    elif order == 2:
        shifted, factor = p.shifted(beta=2.0 * p.alpha, gamma=2.0), p.gamma * (p.gamma + 1.0)
    else:
        raise DomainError(f"order must be 1 or 2, got {order!r}")
    return prabhakar_e(shifted, z, cfg).scaled(factor)


# --- Kummer 1F1 -------------------------------------------------------------------


def kummer_1f1(a: float, b: float, z: float, cfg: EvalConfig = DEFAULT_CONFIG) -> SeriesResult:
    """Confluent hypergeometric ``1F1(a; b; z) = sum (a)_k z^k / ((b)_k k!)``."""
    if _is_nonpositive_integer(b):
        raise DomainError(f"1F1 is undefined for b a non-positive integer, got {b!r}")
    z = float(z)
    if z == 0.0:
        return _sum_series(lambda k: (0.0, 1), cfg, length=1)
    length = int(1 - a) if _is_nonpositive_integer(a) else None
    log_z = math.log(abs(z))
    state = [0.0, 1]

    def term(k: int) -> Tuple[float, int]:
        if k:
            prev = k - 1
            num = a + prev
            if num == 0.0:
                state[1] = 0
            else:
                state[0] += math.log(abs(num)) - math.log(abs(b + prev)) - math.log(k) + log_z
                state[1] *= (1 if num > 0 else -1) * (1 if b + prev > 0 else -1) * (1 if z > 0 else -1)
        return state[0], state[1]

    # |a+j|/(b+j) <= max(1, |a+k|/(b+k)) and 1/(j+1) <= 1/(k+1) for j >= k
    def bound(k: int, ratio: float) -> float:
        return abs(z) * max(1.0, abs(a + k) / (b + k)) / (k + 1.0)

    return _sum_series(term, cfg, ratio_bound=bound if b > 0.0 else None, length=length)


# --- extended Hurwitz-Lerch zeta -----------------------------------------------------


class Region(enum.Enum):
    ALL_Z = "all_z"
    DISK = "disk"
    BOUNDARY = "boundary"
    DIVERGENT = "divergent"


_CLOSE = 1e-12


@dataclass(frozen=True)
class HLZParams:
    """Parameters of the extended Hurwitz-Lerch zeta series

    ``sum_n (lam)_{rho n} (mu)_{sigma n} z^n / (n! (nu)_{kappa n} (n + a)^s)``.

    With ``sigma = 0`` the ``mu`` factor is identically one and the series is
    the generalized two-parameter form used for fractional moments.
    """

    lam: float
    mu: float = 1.0
    nu: float = 1.0
    rho: float = 1.0
    sigma: float = 0.0
    kappa: float = 1.0
    a: float = 1.0

    def __post_init__(self):
        if not self.nu > 0.0:
            raise DomainError(f"nu must be positive, got {self.nu!r}")
        if not self.a > 0.0:
            raise DomainError(f"a must be positive, got {self.a!r}")
        if not (self.rho > 0.0 and self.kappa > 0.0):
            raise DomainError("rho and kappa must be positive")
        if not self.sigma >= 0.0:
            raise DomainError(f"sigma must be non-negative, got {self.sigma!r}")

    @property
    def delta(self) -> float:
        """Radius of convergence when ``kappa - rho - sigma = -1``."""
        sigma_term = self.sigma ** (-self.sigma) if self.sigma > 0.0 else 1.0
        return self.rho ** (-self.rho) * sigma_term * self.kappa**self.kappa

    def region(self, z: float, s: float) -> Region:
        excess = self.kappa - self.rho - self.sigma
        if excess + 1.0 > _CLOSE:
            return Region.ALL_Z
        if abs(excess + 1.0) > _CLOSE:
            return Region.DIVERGENT
        radius = self.delta
        if abs(z) < radius * (1.0 - _CLOSE):
            return Region.DISK
        mu = self.mu if self.sigma > 0.0 else 0.0
        if abs(abs(z) - radius) <= _CLOSE * radius and s + self.nu - self.lam - mu > 1.0:
            return Region.BOUNDARY
        return Region.DIVERGENT

    def require_convergent(self, z: float, s: float) -> Region:
        region = self.region(z, s)
        if region is not Region.DIVERGENT:
            return region
        excess = self.kappa - self.rho - self.sigma
        if excess < -1.0 - _CLOSE:
            why = f"kappa - rho - sigma = {excess:g} < -1"
        elif abs(z) > self.delta * (1.0 + _CLOSE):
            why = f"|z| = {abs(z):g} exceeds delta = {self.delta:g}"
        else:
            why = "|z| = delta requires s + nu - lambda - mu > 1"
        raise DomainError(f"extended Hurwitz-Lerch series diverges: {why}")


def hlz_phi(h: HLZParams, z: float, s: float, cfg: EvalConfig = DEFAULT_CONFIG) -> SeriesResult:
    """Extended Hurwitz-Lerch zeta ``Phi^{(rho,sigma,kappa)}_{lam,mu;nu}(z, s, a)``."""
    h.require_convergent(z, s)
    z = float(z)
    if z == 0.0:
        return _sum_series(lambda k: (-s * math.log(h.a), 1), cfg, length=1)
    log_z = math.log(abs(z))
    use_mu = h.sigma > 0.0

    length = None
    for base, step, active in ((h.lam, h.rho, True), (h.mu, h.sigma, use_mu)):
        if active and _is_nonpositive_integer(base) and float(step).is_integer():
            n_stop = int(-base // step) + 1
            length = n_stop if length is None else min(length, n_stop)

    def term(n: int) -> Tuple[float, int]:
        log_t, sign = _log_pochhammer(h.lam, h.rho * n)
        if use_mu:
            log_m, sign_m = _log_pochhammer(h.mu, h.sigma * n)
            log_t += log_m
            sign *= sign_m
        if not sign:
            return -math.inf, 0
        log_nu, sign_nu = _log_pochhammer(h.nu, h.kappa * n)
        log_t += -log_nu - log_gamma(n + 1.0) - s * math.log(n + h.a)
        if n:
            log_t += n * log_z
        if z < 0.0 and n % 2:
            sign = -sign
        return log_t, sign * sign_nu

    return _sum_series(term, cfg, length=length)
