import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prabhakar import certify as cert
from prabhakar import distribution as dist
from prabhakar.errors import DomainError, EmptyGridError, HypothesisError
from prabhakar.specfun import MLParams, kummer_1f1, prabhakar_e

E = math.e
ONE = MLParams(1.0, 1.0, 1.0)
SECOND = MLParams(0.8, 1.2, 2.0)

params = st.builds(MLParams, st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(0.3, 3.0))


def test_gamma_t0():
    t0, g0 = cert.gamma_t0()
    assert t0 == pytest.approx(1.4616321449683623, abs=1e-12)
    assert g0 == pytest.approx(0.885603194410889, rel=1e-12)


@pytest.mark.parametrize(
    "alpha, beta, p, value, argmin",
    [(1.0, 1.0, 0, 1.0, 0), (1.0, 1.0, 2, 2.0, 2), (0.5, 1.0, 0, math.sqrt(math.pi) / 2, 1)],
)
def test_gamma_min_examples(alpha, beta, p, value, argmin):
    g = cert.gamma_min(alpha, beta, p)
    assert g.value == pytest.approx(value, rel=1e-15)
    assert g.argmin_n == argmin
    assert g.p == p


@given(alpha=st.floats(0.01, 4.0), beta=st.floats(0.01, 4.0), p=st.sampled_from([0, 1, 2]))
def test_gamma_min_is_local_minimum(alpha, beta, p):
    g = cert.gamma_min(alpha, beta, p)
    assert g.argmin_n >= p
    for n in (g.argmin_n - 1, g.argmin_n, g.argmin_n + 1):
        if n >= p:
            assert g.value <= math.gamma(alpha * n + beta)


def test_gamma_min_domain():
    with pytest.raises(DomainError):
        cert.gamma_min(1.0, 1.0, 3)
    with pytest.raises(DomainError):
        cert.gamma_min(0.0, 1.0, 0)


# --- closed-form reductions at alpha = beta = gamma = 1 ----------------------------------


def test_turan_difference_closed_form():
    assert cert.turan_difference(ONE, 1.0) == pytest.approx(E * E / 2, rel=1e-14)
    assert cert.turan_difference(ONE, 1e-9) == pytest.approx(0.5, rel=1e-8)


def test_turan_difference_series_oracle():
    # three independent direct sums at x = t^alpha
    a, b, g, t = 0.8, 1.2, 2.0, 0.5
    x = t**a

    def direct(beta, gamma):
        return math.fsum(
            math.gamma(gamma + k) / math.gamma(gamma) * x**k / (math.gamma(a * k + beta) * math.factorial(k))
            for k in range(60)
        )

    expected = direct(a + b, g + 1) ** 2 - direct(b, g) * direct(2 * a + b, g + 2)
    assert cert.turan_difference(SECOND, t) == pytest.approx(expected, rel=1e-12)


def test_n9_closed_form_and_positivity():
    assert cert.check_moment_ineq_N9(ONE, 1.0) == pytest.approx(E * E, rel=1e-13)
    assert cert.check_moment_ineq_N9(SECOND, 0.7) > 0.0


def test_n9_tends_to_product_at_zero():
    p = MLParams(0.6, 1.7, 1.4)
    t = 1e-20  # x = t^alpha = 1e-12
    e0 = prabhakar_e(p, 0.0).value
    e1 = prabhakar_e(MLParams(0.6, 2.3, 1.0), 0.0).value
    assert cert.check_moment_ineq_N9(p, t) == pytest.approx(e0 * e1, rel=1e-8)


def test_lemma1_examples():
    assert cert.check_lemma1_bounds(ONE, 0.5, "N10") == pytest.approx(2 - math.exp(0.5), rel=1e-13)
    assert abs(cert.check_lemma1_bounds(MLParams(1.0, 1.5, 1.0), 1.0, "N11")) <= 1e-13
    assert cert.check_lemma1_bounds(MLParams(2.0, 2.0, 0.5), 3.0, "N11") >= 0.0


def test_n11_is_equality_on_the_kummer_line():
    # E^g_{1,b}(z) = 1F1(g; b; z) / Gamma(b)
    for b, g, z in ((1.5, 2.0, 0.7), (2.5, 0.5, 3.0)):
        lhs = prabhakar_e(MLParams(1.0, b, g), z).value
        assert lhs == pytest.approx(kummer_1f1(g, b, z).value / math.gamma(b), rel=1e-13)


def test_lemma1_hypotheses():
    with pytest.raises(HypothesisError, match="t in \\(0, 1\\)"):
        cert.check_lemma1_bounds(ONE, 1.5, "N10")
    with pytest.raises(HypothesisError, match="alpha >= 1"):
        cert.check_lemma1_bounds(MLParams(0.5, 2.0, 1.0), 1.0, "N11")
    with pytest.raises(HypothesisError, match="beta >= t0"):
        cert.check_lemma1_bounds(MLParams(1.0, 1.0, 1.0), 1.0, "N11")
    with pytest.raises(DomainError):
        cert.check_lemma1_bounds(ONE, 0.5, "N12")


def test_thm3_examples():
    assert cert.check_turan_bound_thm3(ONE, 0.5, "T_IN_0_1") == pytest.approx(24 - E / 2, rel=1e-13)
    assert cert.check_turan_bound_thm3(MLParams(1.0, 1.5, 1.0), 2.0, "KUMMER") >= 0.0
    # the bound blows up like 1/t while the difference tends to 1/2
    assert cert.check_turan_bound_thm3(ONE, 1e-6, "T_IN_0_1") > 1e6


def test_thm3_hypotheses():
    with pytest.raises(HypothesisError):
        cert.check_turan_bound_thm3(ONE, 1.0, "T_IN_0_1")
    with pytest.raises(HypothesisError):
        cert.check_turan_bound_thm3(MLParams(0.9, 2.0, 1.0), 0.5, "KUMMER")


def test_laguerre_differences_closed_form():
    # E = E' = E'' = e^t
    t = 1.0
    assert cert.laguerre_difference(ONE, t) == pytest.approx(t * math.exp(2 * t), rel=1e-13)
    assert cert.x2_margin(ONE, t) == pytest.approx(math.exp(2 * t), rel=1e-13)
    assert abs(cert.classical_laguerre_difference(ONE, t)) <= 1e-14 * math.exp(2 * t)


def test_laguerre_difference_is_scaled_variance():
    # Delta_L(t) = E(t)^2 Var(X) for the law with series argument t
    p = MLParams(0.8, 1.2, 2.0)
    t = 0.5
    d = dist.MLDistribution(p, t ** (1 / p.alpha))
    m1, m2 = (dist.moment_raw(d, s).value for s in (1, 2))
    assert cert.laguerre_difference(p, t) == pytest.approx(d.norm**2 * (m2 - m1 * m1), rel=1e-12)


def test_thm4_examples():
    assert cert.check_laguerre_bound_thm4(ONE, 0.5, "T_IN_0_1") == pytest.approx(16.0, abs=1e-12)
    assert cert.check_laguerre_bound_thm4(ONE, 0.9, "T_IN_0_1") == pytest.approx(1 / (0.9 * 0.1**3), rel=1e-12)
    assert cert.check_laguerre_bound_thm4(MLParams(1.0, 1.5, 1.0), 1.0, "KUMMER") >= 0.0


@given(p=params, t=st.floats(0.01, 4.0))
def test_laguerre_and_x2_are_non_negative(p, t):
    assert cert.laguerre_difference(p, t) >= -1e-12 * prabhakar_e(p, t).value ** 2
    assert cert.x2_margin(p, t) >= -1e-12 * prabhakar_e(p, t).value ** 2


@given(p=params, t=st.floats(0.01, 4.0))
def test_n9_is_non_negative(p, t):
    assert cert.check_moment_ineq_N9(p, t) >= 0.0


def test_recurrence_spot_residuals():
    r1, r2 = cert.check_recurrences_prop2(ONE, 1.0)
    assert abs(r1) <= 1e-14 and abs(r2) <= 1e-14
    # the first recurrence at this point reads E^2_{1,3}(1) - e + (e - 1) = 0
    assert prabhakar_e(MLParams(1.0, 3.0, 2.0), 1.0).value == pytest.approx(1.0, rel=1e-14)
    assert prabhakar_e(MLParams(1.0, 2.0, 1.0), 1.0).value == pytest.approx(E - 1, rel=1e-14)


def test_recurrence_cancels_at_zero():
    for b in (0.4, 1.0, 2.7):
        r1, r2 = cert.check_recurrences_prop2(MLParams(1.3, b, 0.8), 0.0)
        assert abs(r1) <= 1e-15 and abs(r2) <= 1e-15


@given(p=params, t=st.floats(0.05, 4.0))
def test_recurrences_property(p, t):
    r1, r2 = cert.check_recurrences_prop2(p, t)
    # the second recurrence carries coefficients up to (a + b + 1)(b + 1) ~ 28
    scale = prabhakar_e(p, t).value
    assert abs(r1) <= 1e-10 * scale
    assert abs(r2) <= 1e-9 * scale


@pytest.mark.parametrize(
    "p, t, s",
    [(ONE, 1.3, 1), (SECOND, 1.0, 2), (MLParams(0.5, 2.0, 1.5), 0.7, 3)],
)
def test_corollary1_examples(p, t, s):
    assert cert.check_corollary1(p, t, s) < 1e-9


def test_corollary1_order_domain():
    with pytest.raises(DomainError):
        cert.check_corollary1(ONE, 1.0, 0)


def test_remark3_relation():
    # gamma * N9 margin at t^(1/alpha) equals the X2 margin at t
    p = MLParams(0.7, 1.9, 1.6)
    t = 0.8
    n9 = p.gamma * cert.check_moment_ineq_N9(p, t ** (1 / p.alpha))
    assert n9 == pytest.approx(cert.x2_margin(p, t), rel=1e-12)


# --- grids and reports ---------------------------------------------------------------------


def test_default_grid_sizes():
    g = cert.DEFAULT_GRID
    assert len(g.points()) == 7 * 7 * 5 * 13
    unit = g.points([cert.Filter.T_IN_0_1])
    assert unit and all(0 < t <= 1 - 1e-3 for *_, t in unit)
    assert len(g.points([cert.Filter.ALPHA_GE_1_BETA_GE_T0])) >= 500


def test_grid_validation():
    with pytest.raises(DomainError):
        cert.GridSpec(alpha_range=(2.0, 1.0, 3)).points()
    with pytest.raises(DomainError):
        cert.GridSpec(alpha_range=(1.0, 2.0, 0)).points()
    with pytest.raises(DomainError):
        cert.GridSpec(alpha_range=(-1.0, 2.0, 3)).points()


def test_single_point_grid_reports():
    reports = {r.name: r for r in cert.run_certification(cert.GridSpec.single(1.0, 1.0, 1.0, 0.5))}
    assert list(reports) == list(cert.CLAIMS)
    assert reports["thm3a"].worst_margin == pytest.approx((24 - E / 2) / 24, rel=1e-12)
    assert reports["o6a"].worst_margin == pytest.approx(1.0, rel=1e-12)
    assert reports["n10"].worst_margin == pytest.approx((2 - math.exp(0.5)) / 2, rel=1e-12)
    for name in ("n11", "thm3b", "o6b"):
        assert reports[name].verdict == "SKIP" and not reports[name].passed
    for name in ("n9", "n10", "thm3a", "laguerre", "o6a", "prop2", "cor1", "remark3"):
        assert reports[name].verdict == "PASS"


def test_filtered_empty_grid_is_an_error():
    grid = cert.GridSpec(t_range=(1.5, 4.9, 5))
    with pytest.raises(EmptyGridError):
        cert.certify_claim("n10", grid, 1e-9)
    with pytest.raises(EmptyGridError):
        cert.run_certification(grid, ["n10", "thm3a"])


def test_unknown_claim():
    with pytest.raises(DomainError, match="valid claims"):
        cert.run_certification(claims=["n99"])


def test_report_invariants_and_record():
    grid = cert.GridSpec((0.5, 2.0, 3), (0.5, 2.0, 3), (0.5, 2.0, 2), (0.2, 0.8, 3))
    report = cert.certify_claim("n9", grid, 1e-9)
    assert report.points_passed <= report.points_checked == 54
    rec = report.to_record()
    assert rec["verdict"] == "PASS"
    assert set(rec["worst_point"]) == {"alpha", "beta", "gamma", "t"}


def test_failing_claim_is_reported(monkeypatch):
    # a claim whose margin is negative everywhere must come back FAIL
    claim = cert.CLAIMS["n9"]
    monkeypatch.setitem(cert.CLAIMS, "n9", cert.Claim("n9", "", claim.hypotheses, lambda p, t, cfg: -1.0))
    report = cert.certify_claim("n9", cert.GridSpec.single(1.0, 1.0, 1.0, 0.5), 1e-9)
    assert not report.passed and report.verdict == "FAIL"


def test_parallel_matches_serial():
    grid = cert.GridSpec((0.5, 2.0, 3), (0.5, 2.0, 3), (0.5, 2.0, 2), (0.2, 2.0, 4))
    serial = cert.certify_claim("laguerre", grid, 1e-9, workers=1)
    parallel = cert.certify_claim("laguerre", grid, 1e-9, workers=2)
    assert serial.worst_margin == parallel.worst_margin
    assert serial.worst_point == parallel.worst_point
