import math

import numpy as np
import pytest

from conftest import ALL_REGIMES, ORIGIN_NEIGHBOUR, POS_POS, SYMMETRIC, ZERO_X, ZERO_Y
from quarterwalk import (
    DriftClass,
    Quantity,
    StartPoint,
    WalkParams,
    WrongRegime,
    dp_tau,
    gamma_set_green,
    green_asymptotics,
    green_boundary_asymptotics,
    green_box,
    harmonic,
    martin_kernel,
    s_tail,
    site_asymptotics,
    site_probability,
    t_tail,
    tau_tail,
)
from quarterwalk.asymptotic import harmonicity_residual
from quarterwalk.errors import OutOfRange


@pytest.fixture(scope="module")
def tau_tables():
    return {p: dp_tau(p, ORIGIN_NEIGHBOUR, 600, grid_cap=200) for p in ALL_REGIMES}


@pytest.fixture(scope="module")
def symmetric_box():
    return green_box(SYMMETRIC, ORIGIN_NEIGHBOUR, 400)


@pytest.fixture(scope="module")
def positive_box():
    return green_box(POS_POS, ORIGIN_NEIGHBOUR, 300)


class TestLawShapes:
    def test_zero_drift_tails(self, symmetric, start11):
        s = s_tail(symmetric, start11)
        assert (s.power, s.base) == (-2.0, 1.0)
        assert s.constant == pytest.approx(1 / (2 * math.pi * 0.25))
        assert t_tail(symmetric, start11) == s.__class__(DriftClass.ZERO_ZERO, Quantity.T_TAIL, s.constant, -2.0)
        tau = tau_tail(symmetric, start11)
        assert tau.power == -1.0 and tau.constant == pytest.approx(4 / math.pi)

    def test_positive_drift_tails(self, pos_pos, start11):
        s = s_tail(pos_pos, start11)
        assert s.power == -1.5
        assert s.base == pytest.approx(pos_pos.p_e + pos_pos.p_w + 2 * math.sqrt(pos_pos.p_n * pos_pos.p_s))
        tau = tau_tail(pos_pos, start11)
        assert tau.power == 0 and tau.constant == pytest.approx(1 / 9)

    def test_mixed_tails(self, start11):
        t = t_tail(ZERO_X, start11)
        assert t.power == -1.5 and t.base == 1.0
        assert s_tail(ZERO_X, start11).base > 1.0 - 1e-12 or s_tail(ZERO_X, start11).base < 1.0
        assert tau_tail(ZERO_X, start11).power == -0.5
        assert tau_tail(ZERO_Y, start11).constant == pytest.approx(tau_tail(ZERO_X, start11).constant)

    def test_uncorrected_vertical_tail(self, start11):
        fixed = t_tail(ZERO_X, start11)
        alternative = t_tail(ZERO_X, start11, uncorrected=True)
        assert alternative.power == fixed.power
        assert alternative.constant != pytest.approx(fixed.constant)

    def test_law_is_callable(self, pos_pos, start11):
        law = s_tail(pos_pos, start11)
        assert law(10.0) == pytest.approx(law.constant * law.base**10 * 10**-1.5)

    def test_mirror_laws(self, start11):
        start = StartPoint(2, 3)
        assert s_tail(ZERO_Y, start).constant == pytest.approx(t_tail(ZERO_X, start.swapped()).constant)
        assert site_asymptotics(POS_POS, start, "y").constant == pytest.approx(
            site_asymptotics(POS_POS.swapped(), start.swapped(), "x").constant
        )


class TestAgainstLattice:
    @pytest.mark.parametrize("params", ALL_REGIMES)
    def test_hitting_time_tails(self, tau_tables, params, start11):
        table = tau_tables[params]
        for law, series in ((s_tail(params, start11), table.s), (t_tail(params, start11), table.t)):
            early, late = series[200] / law(200), series[600] / law(600)
            assert abs(late - 1) < 0.02
            assert abs(late - 1) <= abs(early - 1) + 2e-3

    @pytest.mark.parametrize("params", ALL_REGIMES)
    def test_survival_tail(self, tau_tables, params, start11):
        law = tau_tail(params, start11)
        assert tau_tables[params].survival[600] / law(600) == pytest.approx(1.0, abs=5e-3)

    def test_zero_drift_site_law(self, symmetric, start11):
        law = site_asymptotics(symmetric, start11)
        assert law.power == -3.0
        assert site_probability(symmetric, start11, 200) / law(200) == pytest.approx(1.0, abs=1e-4)

    def test_positive_drift_site_law_converges(self, pos_pos, start11):
        law = site_asymptotics(pos_pos, start11)
        ratios = [site_probability(pos_pos, start11, i) / law(i) for i in (20, 50, 200)]
        assert ratios[0] > ratios[1] > ratios[2] > 1.0
        assert ratios[2] < 1.05

    def test_zero_drift_green(self, symmetric_box, symmetric, start11):
        for i, j in ((20, 20), (40, 10), (60, 60)):
            assert symmetric_box.G[i, j] / green_asymptotics(symmetric, start11, i, j).value == pytest.approx(1.0, abs=5e-3)

    def test_positive_drift_green_converges(self, positive_box, pos_pos, start11):
        ratios = [positive_box.G[k, k] / green_asymptotics(pos_pos, start11, k, k).value for k in (20, 40, 80)]
        assert ratios[0] > ratios[1] > ratios[2] > 1.0
        assert ratios[2] < 1.07

    def test_boundary_green(self, positive_box, pos_pos, start11):
        est = green_boundary_asymptotics(pos_pos, start11, 200, 2, "x")
        assert positive_box.G[200, 2] / est.value == pytest.approx(1.0, abs=0.05)
        alternative = green_boundary_asymptotics(pos_pos, start11, 200, 2, "x", uncorrected=True)
        assert alternative.value / est.value == pytest.approx(2 * pos_pos.p_n)
        mirror = green_boundary_asymptotics(pos_pos, start11, 2, 200, "y")
        assert mirror.value == pytest.approx(est.value)

    def test_line_sums(self, symmetric_box, symmetric, start11):
        law = gamma_set_green(symmetric, start11, 1)
        assert law.constant == pytest.approx(8 / math.pi)
        ratios = [k * symmetric_box.diagonal_sum(1, k) / law.constant for k in (40, 80, 120)]
        assert ratios[0] < ratios[1] < ratios[2] < 1.0
        assert ratios[2] > 0.97
        assert gamma_set_green(symmetric, start11, 1, uncorrected=True).constant == pytest.approx(8.0)


class TestGreenEstimate:
    def test_large_indices_do_not_underflow(self, pos_pos, start11):
        # far from the drift direction the decay is exponential and the value underflows
        est = green_asymptotics(pos_pos, start11, 20000, 500)
        assert est.value == 0.0 or est.value < 1e-300
        assert math.isfinite(est.log_value) and est.log_value < -700
        # along the drift direction the decay is only polynomial
        assert green_asymptotics(pos_pos, start11, 4000, 4000).log_decay == pytest.approx(0.0, abs=1e-9)

    def test_saddle_is_recorded(self, pos_pos, start11):
        est = green_asymptotics(pos_pos, start11, 30, 30)
        assert est.gamma == pytest.approx(math.pi / 4)
        assert est.s3 == pytest.approx(1.0) and est.t3 == pytest.approx(1.0)

    def test_dispatch(self, start11):
        with pytest.raises(WrongRegime):
            green_asymptotics(ZERO_X, start11, 10, 10)
        with pytest.raises(OutOfRange):
            green_asymptotics(SYMMETRIC, start11, 0, 10)
        with pytest.raises(WrongRegime):
            gamma_set_green(POS_POS, start11, 1)


class TestMartinKernel:
    def test_zero_drift(self):
        assert martin_kernel(SYMMETRIC, StartPoint(2, 3), 0.4) == 6.0

    def test_unit_at_reference_start(self, pos_pos, start11):
        for direction in (0.0, 0.3, math.pi / 4, 1.2, math.pi / 2, "axis-x", "axis-y"):
            assert martin_kernel(pos_pos, start11, direction) == pytest.approx(1.0, abs=1e-12)

    def test_axis_is_limit_of_interior(self, pos_pos):
        start = StartPoint(3, 2)
        assert martin_kernel(pos_pos, start, 0.0) == pytest.approx(martin_kernel(pos_pos, start, "axis-x"), rel=1e-9)
        assert martin_kernel(pos_pos, start, math.pi / 2) == pytest.approx(martin_kernel(pos_pos, start, "axis-y"), rel=1e-9)
        assert martin_kernel(pos_pos, start, "axis-x", half_exponent=True) != pytest.approx(
            martin_kernel(pos_pos, start, "axis-x")
        )

    def test_continuity(self, pos_pos):
        start = StartPoint(2, 3)
        gammas = np.linspace(0, math.pi / 2, 1001)
        values = np.array([martin_kernel(pos_pos, start, g) for g in gammas])
        assert np.all(values > 0)
        assert np.max(np.abs(np.diff(values))) < 1e-3

    def test_matches_green_ratio(self, positive_box, pos_pos):
        start = StartPoint(2, 1)
        other = green_box(pos_pos, start, 300)
        ratio = other.G[60, 60] / positive_box.G[60, 60]
        assert ratio == pytest.approx(martin_kernel(pos_pos, start, math.pi / 4), rel=0.02)

    def test_dispatch(self, start11):
        with pytest.raises(WrongRegime):
            martin_kernel(ZERO_Y, start11, 0.3)
        with pytest.raises(OutOfRange):
            martin_kernel(POS_POS, start11, 2.0)


class TestHarmonic:
    def test_values(self):
        assert harmonic(SYMMETRIC, StartPoint(3, 5)) == 15.0
        assert harmonic(POS_POS, ORIGIN_NEIGHBOUR) == pytest.approx(1 / 9)
        with pytest.raises(WrongRegime):
            harmonic(ZERO_X, ORIGIN_NEIGHBOUR)

    @pytest.mark.parametrize("params", [SYMMETRIC, POS_POS, WalkParams(0.4, 0.1, 0.35, 0.15)])
    def test_harmonicity(self, params):
        for i, j in ((1, 1), (1, 7), (5, 2), (9, 9)):
            assert harmonicity_residual(params, i, j) < 1e-15

    def test_start_scaling(self):
        base = tau_tail(SYMMETRIC, ORIGIN_NEIGHBOUR).constant
        assert tau_tail(SYMMETRIC, StartPoint(2, 3)).constant == pytest.approx(6 * base)
        assert s_tail(SYMMETRIC, StartPoint(2, 3)).constant == pytest.approx(6 * s_tail(SYMMETRIC, ORIGIN_NEIGHBOUR).constant)
