"""Numerical certification of the Turan, Laguerre and recurrence results.

Each claim is a function of a grid point ``(alpha, beta, gamma, t)`` returning a
signed margin normalized by the natural scale of the claim: for an inequality
``quantity <= bound`` that is ``(bound - quantity) / |bound|``, for an identity
it is minus the relative residual.  A claim passes on a grid when no
in-hypothesis point has a margin below ``-tol``.
"""

from __future__ import annotations

import enum
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import digamma

from .combinatorics import stirling2
from .distribution import require
from .errors import DomainError, EmptyGridError, HypothesisError
from .specfun import (
    DEFAULT_CONFIG,
    EvalConfig,
    HLZParams,
    MLParams,
    hlz_phi,
    kummer_1f1,
    log_gamma,
    pochhammer,
    prabhakar_derivative,
    prabhakar_e,
)

__all__ = [
    "gamma_t0",
    "GammaMin",
    "gamma_min",
    "turan_difference",
    "check_moment_ineq_N9",
    "check_lemma1_bounds",
    "check_turan_bound_thm3",
    "laguerre_difference",
    "classical_laguerre_difference",
    "x2_margin",
    "check_laguerre_bound_thm4",
    "check_recurrences_prop2",
    "check_corollary1",
    "Filter",
    "GridSpec",
    "DEFAULT_GRID",
    "CertificateReport",
    "CLAIMS",
    "run_certification",
]

# t > 1 - UNIT_MARGIN is dropped for claims restricted to t in (0, 1)
UNIT_MARGIN = 1e-3


@lru_cache(maxsize=None)
def gamma_t0() -> Tuple[float, float]:
    """Positive minimizer ``t0`` of Gamma and ``Gamma(t0)``."""
    t0 = brentq(digamma, 1.0, 2.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return t0, math.gamma(t0)


@dataclass(frozen=True)
class GammaMin:
    p: int
    value: float
    argmin_n: int


def _gamma_at(alpha: float, beta: float, n: int) -> float:
    x = alpha * n + beta
    return math.gamma(x) if x < 171.0 else math.exp(log_gamma(x))


def gamma_min(alpha: float, beta: float, p: int) -> GammaMin:
    """``min_{n >= p} Gamma(alpha n + beta)``.

    ``n -> Gamma(alpha n + beta)`` is convex, so the minimum sits next to
    ``(t0 - beta)/alpha``; only that integer and its neighbours are examined.
    Ties go to the smaller ``n``.
    """
    if p not in (0, 1, 2):
        raise DomainError(f"p must be 0, 1 or 2, got {p!r}")
    if not (alpha > 0.0 and beta > 0.0):
        raise DomainError("alpha and beta must be positive")
    t0, _ = gamma_t0()
    centre = max(p, round((t0 - beta) / alpha))
    best: Optional[GammaMin] = None
    for n in (centre - 1, centre, centre + 1):
        if n < p:
            continue
        value = _gamma_at(alpha, beta, n)
        if best is None or value < best.value:
            best = GammaMin(p, value, n)
    return best


# --- shared evaluations ----------------------------------------------------------


def _E(alpha: float, beta: float, gamma: float, z: float, cfg: EvalConfig) -> float:
    return require(prabhakar_e(MLParams(alpha, beta, gamma), z, cfg), "Prabhakar series").value


def _F(a: float, b: float, z: float, cfg: EvalConfig) -> float:
    return require(kummer_1f1(a, b, z, cfg), "1F1 series").value


def _inv_gamma(x: float) -> float:
    return math.exp(-log_gamma(x))


def _require_unit(t: float, what: str) -> None:
    if not 0.0 < t < 1.0:
        raise HypothesisError(f"{what} needs t in (0, 1), got t={t!r}")


def _require_kummer(p: MLParams, what: str) -> None:
    t0, _ = gamma_t0()
    if not (p.alpha >= 1.0 and p.beta >= t0):
        raise HypothesisError(
            f"{what} needs alpha >= 1 and beta >= t0 = {t0:.6f}, got alpha={p.alpha!r}, beta={p.beta!r}"
        )


def _turan_parts(p: MLParams, x: float, cfg: EvalConfig) -> Tuple[float, float, float]:
    a, b, g = p.alpha, p.beta, p.gamma
    return _E(a, b, g, x, cfg), _E(a, a + b, g + 1, x, cfg), _E(a, 2 * a + b, g + 2, x, cfg)


def turan_difference(p: MLParams, t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """``[E^{gamma+1}_{alpha,alpha+beta}]^2 - E^gamma_{alpha,beta} E^{gamma+2}_{alpha,2alpha+beta}`` at ``t^alpha``."""
    e0, e1, e2 = _turan_parts(p, t**p.alpha, cfg)
    return e1 * e1 - e0 * e2


def _n9_sides(p: MLParams, t: float, cfg: EvalConfig) -> Tuple[float, float]:
    x = t**p.alpha
    e0, e1, e2 = _turan_parts(p, x, cfg)
    lhs = e0 * (e1 + x * e2)
    rhs = p.gamma * x * turan_difference(p, t, cfg)
    return lhs, rhs


def check_moment_ineq_N9(p: MLParams, t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """Margin ``E [E^{g+1} + x E^{g+2}] - gamma x Delta_T`` with ``x = t^alpha``; non-negative in theory."""
    lhs, rhs = _n9_sides(p, t, cfg)
    return lhs - rhs


def _lemma1_bound(p: MLParams, t: float, which: str, cfg: EvalConfig) -> float:
    x = t**p.alpha
    if which == "N10":
        _require_unit(t, "bound N10")
        return 1.0 / (gamma_min(p.alpha, p.beta, 0).value * (1.0 - x) ** p.gamma)
    if which == "N11":
        _require_kummer(p, "bound N11")
        return _F(p.gamma, p.beta, x, cfg) * _inv_gamma(p.beta)
    raise DomainError(f"unknown Lemma 1 bound {which!r}")


def check_lemma1_bounds(p: MLParams, t: float, which: str, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """``bound - E^gamma_{alpha,beta}(t^alpha)`` for ``which`` in ``{"N10", "N11"}``."""
    bound = _lemma1_bound(p, t, which, cfg)
    return bound - _E(p.alpha, p.beta, p.gamma, t**p.alpha, cfg)


def _thm3_bound(p: MLParams, t: float, branch: str, cfg: EvalConfig) -> float:
    a, b, g = p.alpha, p.beta, p.gamma
    x = t**a
    if branch == "T_IN_0_1":
        _require_unit(t, "Turan bound (t in (0,1))")
        g0, g1, g2 = (gamma_min(a, b, q).value for q in (0, 1, 2))
        return (1.0 / g1 + x / (g2 * (1.0 - x))) / (g * g0 * x * (1.0 - x) ** (2 * g + 1))
    if branch == "KUMMER":
        _require_kummer(p, "Turan bound (Kummer)")
        inner = _F(g + 1, a + b, x, cfg) * _inv_gamma(a + b) + x * _F(g + 2, 2 * a + b, x, cfg) * _inv_gamma(2 * a + b)
        return _F(g, b, x, cfg) * _inv_gamma(b) * inner / (g * x)
    raise DomainError(f"unknown Theorem 3 branch {branch!r}")


def check_turan_bound_thm3(p: MLParams, t: float, branch: str, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """``bound - Delta_T(t)``; ``branch`` is ``"T_IN_0_1"`` or ``"KUMMER"``."""
    bound = _thm3_bound(p, t, branch, cfg)
    return bound - turan_difference(p, t, cfg)


# --- Laguerre-type quantities (argument t, not t^alpha) -------------------------------


def _derivs(p: MLParams, t: float, cfg: EvalConfig) -> Tuple[float, float, float]:
    e = require(prabhakar_e(p, t, cfg), "E").value
    d1 = require(prabhakar_derivative(p, t, 1, cfg), "E'").value
    d2 = require(prabhakar_derivative(p, t, 2, cfg), "E''").value
    return e, d1, d2


def laguerre_difference(p: MLParams, t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """Laguerre difference of ``x -> E(t e^{ix})`` at ``x = 0``.

    Equals ``-t^2 E'^2 + E (t E' + t^2 E'')``, i.e. ``E^2`` times the variance of
    the distribution with series argument ``t``; hence non-negative.
    """
    e, d1, d2 = _derivs(p, t, cfg)
    return e * (t * d1 + t * t * d2) - t * t * d1 * d1


def classical_laguerre_difference(p: MLParams, t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """``E'(t)^2 - E(t) E''(t)``, the first-order Laguerre difference in ``t``.

    The functional upper bounds of the Laguerre section control this quantity:
    the moment inequality gives ``t (E'^2 - E E'') <= E E'``.
    """
    e, d1, d2 = _derivs(p, t, cfg)
    return d1 * d1 - e * d2


def x2_margin(p: MLParams, t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """``E (E' + t E'') - t E'^2``; non-negative."""
    e, d1, d2 = _derivs(p, t, cfg)
    return e * (d1 + t * d2) - t * d1 * d1


def _thm4_bound(p: MLParams, t: float, branch: str, cfg: EvalConfig) -> float:
    a, b, g = p.alpha, p.beta, p.gamma
    if branch == "T_IN_0_1":
        _require_unit(t, "Laguerre bound (t in (0,1))")
        g0, g1 = gamma_min(a, b, 0).value, gamma_min(a, b, 1).value
        return g / (g0 * g1 * t * (1.0 - t) ** (2 * g + 1))
    if branch == "KUMMER":
        _require_kummer(p, "Laguerre bound (Kummer)")
        return g * _F(g, b, t, cfg) * _F(g + 1, a + b, t, cfg) * _inv_gamma(b) * _inv_gamma(a + b) / t
    raise DomainError(f"unknown Theorem 4 branch {branch!r}")


def check_laguerre_bound_thm4(p: MLParams, t: float, branch: str, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """``bound - (E'^2 - E E'')`` for the two functional bounds."""
    bound = _thm4_bound(p, t, branch, cfg)
    return bound - classical_laguerre_difference(p, t, cfg)


# --- identities --------------------------------------------------------------------


def _prop2_terms(p: MLParams, t: float, cfg: EvalConfig) -> Tuple[List[float], List[float]]:
    a, b, g = p.alpha, p.beta, p.gamma
    e_b = _E(a, b, g, t, cfg)
    e_b1 = _E(a, b + 1, g, t, cfg)
    first = [a * g * t * _E(a, a + b + 1, g + 1, t, cfg), -e_b, b * e_b1]
    second = [
        a * a * g * (g + 1) * t * t * _E(a, 2 * a + b + 2, g + 2, t, cfg),
        -e_b,
        (a + 2 * b + 1) * e_b1,
        -(a + b + 1) * (b + 1) * _E(a, b + 2, g, t, cfg),
    ]
    return first, second


def check_recurrences_prop2(p: MLParams, t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> Tuple[float, float]:
    """Residuals of the two parameter recurrences; both vanish in exact arithmetic."""
    first, second = _prop2_terms(p, t, cfg)
    return math.fsum(first), math.fsum(second)


def _corollary1_sides(p: MLParams, t: float, s: int, cfg: EvalConfig) -> Tuple[float, float]:
    a, b, g = p.alpha, p.beta, p.gamma
    x = t**a
    h = HLZParams(lam=g + 1, nu=a + b, rho=1.0, sigma=0.0, kappa=a, a=1.0)
    lhs = require(hlz_phi(h, x, 1.0 - s, cfg), "Hurwitz-Lerch series").value
    total = math.fsum(
        pochhammer(g, j) * stirling2(s, j) * x**j * _E(a, a * j + b, g + j, x, cfg) for j in range(s + 1)
    )
    rhs = math.exp(log_gamma(a + b)) * total / (g * x)
    return lhs, rhs


def check_corollary1(p: MLParams, t: float, s: int, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """Relative discrepancy between the Hurwitz-Lerch value and its Prabhakar sum."""
    if int(s) != s or s < 1:
        raise DomainError(f"s must be a positive integer, got {s!r}")
    lhs, rhs = _corollary1_sides(p, t, int(s), cfg)
    return abs(lhs - rhs) / abs(lhs)


# --- claims and grids ------------------------------------------------------------------


class Filter(enum.Enum):
    T_IN_0_1 = "t_in_0_1"
    ALPHA_GE_1_BETA_GE_T0 = "alpha_ge_1_beta_ge_t0"
    NONE = "none"

    def admits(self, alpha: float, beta: float, gamma: float, t: float) -> bool:
        if self is Filter.T_IN_0_1:
            return 0.0 < t <= 1.0 - UNIT_MARGIN
        if self is Filter.ALPHA_GE_1_BETA_GE_T0:
            return alpha >= 1.0 and beta >= gamma_t0()[0]
        return True


Point = Tuple[float, float, float, float]


def _relative(margin: float, scale: float) -> float:
    return margin / abs(scale) if scale else margin


def _claim_n9(p, t, cfg):
    lhs, rhs = _n9_sides(p, t, cfg)
    return _relative(lhs - rhs, lhs)


def _claim_lemma(which):
    def claim(p, t, cfg):
        return _relative(check_lemma1_bounds(p, t, which, cfg), _lemma1_bound(p, t, which, cfg))
    return claim


def _claim_thm3(branch):
    def claim(p, t, cfg):
        bound = _thm3_bound(p, t, branch, cfg)
        return _relative(bound - turan_difference(p, t, cfg), bound)
    return claim


def _claim_laguerre(p, t, cfg):
    e, d1, d2 = _derivs(p, t, cfg)
    scale = e * (t * d1 + t * t * d2)
    return _relative(scale - t * t * d1 * d1, scale)


def _claim_thm4(branch):
    def claim(p, t, cfg):
        bound = _thm4_bound(p, t, branch, cfg)
        return _relative(bound - classical_laguerre_difference(p, t, cfg), bound)
    return claim


def _claim_prop2(p, t, cfg):
    worst = 0.0
    for terms in _prop2_terms(p, t, cfg):
        scale = math.fsum(abs(v) for v in terms)
        worst = max(worst, abs(math.fsum(terms)) / scale)
    return -worst


def _claim_cor1(p, t, cfg):
    return -max(check_corollary1(p, t, s, cfg) for s in (1, 2, 3))


def _claim_remark3(p, t, cfg):
    # moment inequality at t^(1/alpha) against the derivative form at t
    n9 = p.gamma * check_moment_ineq_N9(p, t ** (1.0 / p.alpha), cfg)
    x2 = x2_margin(p, t, cfg)
    return -abs(n9 - x2) / max(abs(n9), abs(x2))


@dataclass(frozen=True)
class Claim:
    name: str
    description: str
    hypotheses: FrozenSet[Filter]
    evaluate: Callable[[MLParams, float, EvalConfig], float]


_UNIT = frozenset({Filter.T_IN_0_1})
_KUMMER = frozenset({Filter.ALPHA_GE_1_BETA_GE_T0})
_ANY: FrozenSet[Filter] = frozenset()

CLAIMS: Dict[str, Claim] = {
    c.name: c
    for c in (
        Claim("n9", "moment inequality E[E1 + x E2] >= gamma x Delta_T", _ANY, _claim_n9),
        Claim("n10", "E <= (1/Gamma_0) (1 - t^alpha)^-gamma", _UNIT, _claim_lemma("N10")),
        Claim("n11", "E <= 1F1(gamma; beta; t^alpha) / Gamma(beta)", _KUMMER, _claim_lemma("N11")),
        Claim("thm3a", "Turan difference bound, t in (0,1)", _UNIT, _claim_thm3("T_IN_0_1")),
        Claim("thm3b", "Turan difference bound via 1F1", _KUMMER, _claim_thm3("KUMMER")),
        Claim("laguerre", "Laguerre inequality of the CHF, Delta_L >= 0", _ANY, _claim_laguerre),
        Claim("o6a", "Laguerre difference bound, t in (0,1)", _UNIT, _claim_thm4("T_IN_0_1")),
        Claim("o6b", "Laguerre difference bound via 1F1", _KUMMER, _claim_thm4("KUMMER")),
        Claim("prop2", "two parameter recurrences", _ANY, _claim_prop2),
        Claim("cor1", "Hurwitz-Lerch summation formula, s = 1..3", _ANY, _claim_cor1),
        Claim("remark3", "moment inequality equals derivative form", _ANY, _claim_remark3),
    )
}

Range = Tuple[float, float, int]


def _axis(r: Range) -> np.ndarray:
    lo, hi, steps = r
    if steps < 1:
        raise DomainError(f"grid steps must be >= 1, got {steps}")
    if steps == 1:
        return np.array([float(lo)])
    if not lo < hi:
        raise DomainError(f"grid range needs lo < hi, got ({lo}, {hi})")
    return np.linspace(lo, hi, steps)


@dataclass(frozen=True)
class GridSpec:
    """Tensor grid over ``(alpha, beta, gamma, t)``.

    Each range is ``(lo, hi, steps)``; a single step uses ``lo`` alone.
    ``constraint_filter`` is applied to every claim in addition to the claim's
    own hypotheses.
    """

    alpha_range: Range = (0.3, 3.0, 7)
    beta_range: Range = (0.3, 3.0, 7)
    gamma_range: Range = (0.3, 3.0, 5)
    t_range: Range = (0.1, 4.9, 13)
    constraint_filter: FrozenSet[Filter] = field(default_factory=frozenset)

    @classmethod
    def single(cls, alpha: float, beta: float, gamma: float, t: float) -> "GridSpec":
        return cls((alpha, alpha, 1), (beta, beta, 1), (gamma, gamma, 1), (t, t, 1))

    def points(self, filters: Iterable[Filter] = ()) -> List[Point]:
        active = set(self.constraint_filter) | set(filters)
        axes = [_axis(r) for r in (self.alpha_range, self.beta_range, self.gamma_range, self.t_range)]
        if any(v <= 0.0 for ax in axes for v in ax):
            raise DomainError("grid values must be positive")
        pts = []
        for a, b, g, t in itertools.product(*axes):
            point = (float(a), float(b), float(g), float(t))
            if all(f.admits(*point) for f in active):
                pts.append(point)
        return pts


DEFAULT_GRID = GridSpec()


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of one claim over a grid; ``worst_margin`` is relative.

    A report with no points is a skipped claim: no grid point met its
    hypotheses.  It neither passes nor fails.
    """

    name: str
    points_checked: int
    points_passed: int
    worst_margin: float
    worst_point: Optional[Point]
    tolerance: float
    elapsed: float = 0.0

    @classmethod
    def skipped(cls, name: str, tolerance: float) -> "CertificateReport":
        return cls(name, 0, 0, math.nan, None, tolerance)

    @property
    def is_skipped(self) -> bool:
        return self.points_checked == 0

    @property
    def passed(self) -> bool:
        return (
            not self.is_skipped
            and self.points_passed == self.points_checked
            and self.worst_margin >= -self.tolerance
        )

    @property
    def verdict(self) -> str:
        if self.is_skipped:
            return "SKIP"
        return "PASS" if self.passed else "FAIL"

    def to_record(self) -> dict:
        point = None if self.worst_point is None else dict(zip(("alpha", "beta", "gamma", "t"), self.worst_point))
        return {
            "claim": self.name,
            "verdict": self.verdict,
            "points_checked": self.points_checked,
            "points_passed": self.points_passed,
            "worst_margin": self.worst_margin,
            "worst_point": point,
            "tolerance": self.tolerance,
        }


def _evaluate_chunk(name: str, points: Sequence[Point], cfg: EvalConfig) -> List[float]:
    claim = CLAIMS[name]
    return [claim.evaluate(MLParams(a, b, g), t, cfg) for a, b, g, t in points]


def _margins(name: str, points: List[Point], cfg: EvalConfig, workers: int) -> List[float]:
    if workers <= 1 or len(points) < 2 * workers:
        return _evaluate_chunk(name, points, cfg)
    size = math.ceil(len(points) / (4 * workers))
    chunks = [points[i : i + size] for i in range(0, len(points), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_evaluate_chunk, [name] * len(chunks), chunks, [cfg] * len(chunks))
        return [m for part in parts for m in part]


def certify_claim(name: str, grid: GridSpec, tol: float, cfg: EvalConfig = DEFAULT_CONFIG, workers: int = 1) -> CertificateReport:
    try:
        claim = CLAIMS[name]
    except KeyError:
        raise DomainError(f"unknown claim {name!r}; valid claims: {', '.join(CLAIMS)}") from None
    points = grid.points(claim.hypotheses)
    if not points:
        hyp = ", ".join(f.value for f in claim.hypotheses) or "none"
        raise EmptyGridError(f"no grid point satisfies the hypotheses of {name} ({hyp})")
    start = time.perf_counter()
    margins = _margins(name, points, cfg, workers)
    elapsed = time.perf_counter() - start
    worst = int(np.argmin(margins))
    passed = sum(1 for m in margins if m >= -tol)
    return CertificateReport(name, len(points), passed, margins[worst], points[worst], tol, elapsed)


def run_certification(
    grid: GridSpec = DEFAULT_GRID,
    claims: Optional[Iterable[str]] = None,
    tol: float = 1e-9,
    cfg: EvalConfig = DEFAULT_CONFIG,
    workers: int = 1,
) -> List[CertificateReport]:
    """Certify each claim over ``grid``; reports follow the canonical claim order.

    Claims whose hypotheses exclude every grid point come back skipped.  If
    that happens to all of them, ``EmptyGridError`` is raised instead.
    """
    wanted = list(CLAIMS) if claims is None else list(dict.fromkeys(claims))
    unknown = [c for c in wanted if c not in CLAIMS]
    if unknown:
        raise DomainError(f"unknown claim(s) {', '.join(unknown)}; valid claims: {', '.join(CLAIMS)}")
    reports = []
    empty = []
    for name in (c for c in CLAIMS if c in wanted):
        try:
            reports.append(certify_claim(name, grid, tol, cfg, workers))
        except EmptyGridError as exc:
            empty.append(exc)
            reports.append(CertificateReport.skipped(name, tol))
    if len(empty) == len(reports):
        raise empty[0] if len(empty) == 1 else EmptyGridError(
            f"no grid point satisfies the hypotheses of any requested claim ({', '.join(wanted)})"
        )
    return reports
