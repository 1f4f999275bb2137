import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhypo.analytic import (
    GaussianScenario,
    GridOracleConfig,
    gaussian_grid_oracle,
    gaussian_overlap,
    log_overlap_cubic_coefficient,
)
from qhypo.errors import ValidationError


class TestClosedForm:
    @given(st.floats(-3, 3), st.floats(0, 2), st.floats(0, 3))
    def test_identical_rates(self, g, k, t):
        assert gaussian_overlap(GaussianScenario(g, g, k, t)) == 1.0

    def test_no_probe(self):
        assert gaussian_overlap(GaussianScenario(1.5, 0.5, 0.0, 2.0)) == pytest.approx(math.exp(-1))

    def test_value(self):
        assert gaussian_overlap(GaussianScenario(1, 0, 1, 1)) == pytest.approx(math.exp(-0.25) * math.exp(-1 / 3), abs=1e-12)

    @given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 2), st.floats(0, 3))
    def test_symmetric(self, g0, g1, k, t):
        assert gaussian_overlap(GaussianScenario(g0, g1, k, t)) == gaussian_overlap(GaussianScenario(g1, g0, k, t))

    @pytest.mark.parametrize("dg, k", [(0.5, 0.5), (1.0, 1.0), (2.0, 0.3)])
    def test_cubic_coefficient(self, dg, k):
        t = np.linspace(0.1, 2.0, 12)
        vals = [gaussian_overlap(GaussianScenario(dg, 0, k, ti)) for ti in t]
        assert log_overlap_cubic_coefficient(t, vals) == pytest.approx(-dg**2 * k / 3, abs=1e-10)

    def test_invalid(self):
        with pytest.raises(ValidationError):
            GaussianScenario(0, 1, -1, 1)
        with pytest.raises(ValidationError):
            GaussianScenario(0, 1, 1, -1)


class TestGridOracle:
    @pytest.mark.parametrize("k", [0.0, 0.7, 3.0])
    def test_identical(self, k):
        assert gaussian_grid_oracle(GaussianScenario(0.8, 0.8, k, 1.5)) == pytest.approx(1, abs=1e-6)

    def test_matches_closed_form(self):
        s = GaussianScenario(1, 0, 1, 1)
        assert gaussian_grid_oracle(s) == pytest.approx(gaussian_overlap(s), rel=1e-3)

    def test_displacement_only(self):
        assert gaussian_grid_oracle(GaussianScenario(1, 0, 0, 2)) == pytest.approx(math.exp(-1), abs=1e-4)

    def test_negative_rates(self):
        s = GaussianScenario(-0.7, 0.4, 0.5, 1.8)
        assert gaussian_grid_oracle(s) == pytest.approx(gaussian_overlap(s), rel=1e-10)

    def test_refinement(self):
        s = GaussianScenario(1, 0, 1, 1)
        exact = gaussian_overlap(s)
        errs = [abs(gaussian_grid_oracle(s, GridOracleConfig(-40, 40, n)) - exact) for n in (64, 128)]
        assert errs[0] > 1e-6  # coarse grid is genuinely quadrature-limited
        assert errs[0] >= 3 * errs[1]

    def test_grid_support_violation(self):
        with pytest.raises(ValidationError, match="tails"):
            gaussian_grid_oracle(GaussianScenario(4, 0, 0, 2))

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            GridOracleConfig(1, 0)
        with pytest.raises(ValidationError):
            GridOracleConfig(n_points=32)
