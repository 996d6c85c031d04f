"""Prabhakar (three-parameter Mittag-Leffler) function, the fractional
Poisson-type distribution it normalizes, and numerical certification of the
inequalities and identities that go with it."""

from .errors import (
    DomainError,
    EmptyGridError,
    HypothesisError,
    NonConvergenceError,
    PrabhakarError,
)
from .specfun import (
    DEFAULT_CONFIG,
    EvalConfig,
    HLZParams,
    MLParams,
    Region,
    SeriesResult,
    classical_ml,
    hlz_phi,
    kummer_1f1,
    log_gamma,
    pochhammer,
    prabhakar_derivative,
    prabhakar_e,
    prabhakar_e_polar,
    two_param_ml,
)
from .combinatorics import elementary_symmetric, falling_factorial_expansion, stirling2
from .distribution import (
    MLDistribution,
    MomentMethod,
    MomentResult,
    cdf,
    chf,
    moment_factorial,
    moment_fractional,
    moment_raw,
    pmf,
    poisson_reweight_pmf,
    sample,
)
from .certify import CertificateReport, GridSpec, run_certification

__version__ = "0.1.0"
