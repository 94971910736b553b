import numpy as np
import pytest
from numpy.testing import assert_allclose

from suboptlqr import (
    AgentDynamics,
    CostWeights,
    GainMethod,
    admissibility,
    c_interval,
    default_coupling,
    design_gain,
    design_gain_single,
    is_hurwitz,
    psd_check,
    spectrum,
    UndirectedGraph,
)
from suboptlqr.errors import (
    BudgetInfeasible,
    COutOfRange,
    DimensionMismatch,
    InputError,
    InvalidSpectralData,
    NotPositiveDefinite,
    NotPositiveSemidefinite,
    NotStabilizable,
)

from support import (
    OSCILLATOR_X0,
    oscillator_dynamics,
    oscillator_weights,
    random_connected_graph,
    random_pd,
    random_psd,
    random_stabilizable,
)


class TestDomainTypes:
    def test_dynamics_requires_stabilizable(self):
        with pytest.raises(NotStabilizable):
            AgentDynamics(A=[[1.0]], B=[[0.0]])

    def test_dynamics_shape_check(self):
        with pytest.raises(DimensionMismatch):
            AgentDynamics(A=[[0.0, 1.0], [-1.0, 0.0]], B=[[1.0]])

    def test_weights_q_psd(self):
        with pytest.raises(NotPositiveSemidefinite):
            CostWeights(Q=[[0.0, 1.0], [1.0, 0.0]], R=[[1.0]])

    def test_weights_r_pd(self):
        with pytest.raises(NotPositiveDefinite):
            CostWeights(Q=[[1.0]], R=[[0.0]])


class TestCInterval:
    def test_upper_range_oscillator_values(self):
        ivl = c_interval(GainMethod.EXACT_SPECTRUM_UPPER, 0.1522, 3.8478)
        assert ivl.closed_lower
        assert ivl.lower == pytest.approx(0.5, abs=1e-4)
        assert ivl.upper == pytest.approx(0.5198, abs=1e-4)

    def test_lower_range_k2(self):
        ivl = c_interval(GainMethod.EXACT_SPECTRUM_LOWER, 2.0, 2.0)
        assert not ivl.closed_lower
        assert ivl.lower == 0.0
        assert ivl.upper == pytest.approx(0.5)

    def test_ordering_violation(self):
        with pytest.raises(InvalidSpectralData):
            c_interval(GainMethod.EXACT_SPECTRUM_UPPER, 3.0, 2.0)

    def test_membership_endpoints(self):
        ivl = c_interval(GainMethod.EXACT_SPECTRUM_UPPER, 1.0, 3.0)
        assert ivl.contains(ivl.lower)
        assert not ivl.contains(ivl.upper)
        low = c_interval(GainMethod.EXACT_SPECTRUM_LOWER, 1.0, 3.0)
        assert not low.contains(0.0)
        assert low.contains(0.5 * low.upper)

    def test_single_system_has_no_interval(self):
        with pytest.raises(ValueError):
            c_interval(GainMethod.SINGLE_SYSTEM, 1.0, 2.0)

    def test_default_coupling(self):
        assert default_coupling(GainMethod.EXACT_SPECTRUM_UPPER, 1.0, 3.0) \
            == pytest.approx(0.5)
        c = default_coupling(GainMethod.EXACT_SPECTRUM_LOWER, 1.0, 3.0)
        assert 0.0 < c < 0.5 and c == pytest.approx(0.5, rel=1e-5)


class TestDesignGain:
    def test_oscillator_reference_design(self, osc_network):
        design = osc_network["design"]
        assert_allclose(design.P, [[12.1168, 3.1303], [3.1303, 8.3081]], rtol=1e-3)
        assert_allclose(design.K, [[-1.5652, -4.1541]], rtol=1e-3)
        assert design.spectral_inputs == (
            osc_network["spec"].lambda2, osc_network["spec"].lambda_max)

    def test_gain_construction_identity(self, osc_network):
        design = osc_network["design"]
        dyn, weights = osc_network["dyn"], osc_network["weights"]
        expected = -design.c * np.linalg.solve(weights.R, dyn.B.T @ design.P)
        assert_allclose(design.K, expected, atol=0.0)

    def test_scalar_k2_closed_form(self):
        dyn = AgentDynamics(A=[[0.0]], B=[[1.0]])
        weights = CostWeights(Q=[[1.0]], R=[[1.0]])
        design = design_gain(dyn, weights, GainMethod.EXACT_SPECTRUM_UPPER,
                             (2.0, 2.0), c=0.5, epsilon=1e-6)
        # scaled equation is -p^2 + 2 + eps = 0
        assert design.P[0, 0] == pytest.approx(np.sqrt(2.0), abs=1e-5)
        assert design.K[0, 0] == pytest.approx(-np.sqrt(2.0) / 2.0, abs=1e-5)

    def test_epsilon_below_noise_floor_rejected(self):
        from suboptlqr.errors import InequalityNotStrict

        dyn = AgentDynamics(A=[[0.0]], B=[[1.0]])
        weights = CostWeights(Q=[[1.0]], R=[[1.0]])
        with pytest.raises(InequalityNotStrict):
            design_gain(dyn, weights, GainMethod.EXACT_SPECTRUM_UPPER,
                        (2.0, 2.0), c=0.5, epsilon=1e-12)

    def test_c_out_of_range(self, osc_network):
        with pytest.raises(COutOfRange):
            design_gain(osc_network["dyn"], osc_network["weights"],
                        GainMethod.EXACT_SPECTRUM_UPPER,
                        (osc_network["spec"].lambda2,
                         osc_network["spec"].lambda_max), c=0.6)

    def test_epsilon_must_be_positive(self, osc_network):
        with pytest.raises(InputError):
            design_gain(osc_network["dyn"], osc_network["weights"],
                        GainMethod.EXACT_SPECTRUM_UPPER, (0.5, 2.0), epsilon=0.0)

    def test_design_inequality_holds(self, osc_network):
        # the defining strict matrix inequality evaluated at the solution
        dyn, weights = osc_network["dyn"], osc_network["weights"]
        design = osc_network["design"]
        lam_max = osc_network["spec"].lambda_max
        c = design.c
        g = dyn.B @ np.linalg.solve(weights.R, dyn.B.T)
        m = (dyn.A.T @ design.P + design.P @ dyn.A
             + (c**2 * lam_max**2 - 2 * c * lam_max) * design.P @ g @ design.P
             + lam_max * weights.Q)
        assert np.linalg.eigvalsh(0.5 * (m + m.T))[-1] < 0

    def test_every_mode_hurwitz_all_methods(self, rng):
        # random instances across all four distributed methods
        for trial in range(12):
            n = int(rng.integers(1, 4))
            m = int(rng.integers(1, 3))
            a, b = random_stabilizable(rng, n, m)
            dyn = AgentDynamics(A=a, B=b)
            weights = CostWeights(Q=random_psd(rng, n), R=random_pd(rng, m))
            g = random_connected_graph(rng, int(rng.integers(2, 7)))
            spec = spectrum(g)
            for method in (GainMethod.EXACT_SPECTRUM_UPPER,
                           GainMethod.EXACT_SPECTRUM_LOWER,
                           GainMethod.BOUNDS_UPPER,
                           GainMethod.BOUNDS_LOWER):
                if method in (GainMethod.BOUNDS_UPPER, GainMethod.BOUNDS_LOWER):
                    spectral = (0.7 * spec.lambda2, 1.4 * spec.lambda_max)
                else:
                    spectral = (spec.lambda2, spec.lambda_max)
                design = design_gain(dyn, weights, method, spectral)
                for lam in spec.lambdas[1:]:
                    assert is_hurwitz(dyn.A + lam * (dyn.B @ design.K)), (
                        f"mode unstable for {method} in trial {trial}"
                    )

    def test_monotone_in_c(self, osc_network):
        dyn, weights, spec = (osc_network["dyn"], osc_network["weights"],
                              osc_network["spec"])
        ivl = c_interval(GainMethod.EXACT_SPECTRUM_UPPER, spec.lambda2,
                         spec.lambda_max)
        grid = np.linspace(ivl.lower, ivl.upper, 6)[:-1]
        previous = None
        for c in grid:
            design = design_gain(dyn, weights, GainMethod.EXACT_SPECTRUM_UPPER,
                                 (spec.lambda2, spec.lambda_max), c=float(c))
            if previous is not None:
                ok, min_eig = psd_check(design.P - previous)
                assert min_eig >= -1e-8
            previous = design.P

    def test_monotone_in_epsilon(self, osc_network):
        dyn, weights, spec = (osc_network["dyn"], osc_network["weights"],
                              osc_network["spec"])
        previous = None
        for eps in (1e-4, 1e-3, 1e-2):
            design = design_gain(dyn, weights, GainMethod.EXACT_SPECTRUM_UPPER,
                                 (spec.lambda2, spec.lambda_max), c=0.5,
                                 epsilon=eps)
            if previous is not None:
                ok, min_eig = psd_check(design.P - previous)
                assert min_eig >= -1e-8
            previous = design.P

    def test_bounds_dominate_exact(self, osc_network):
        # lower-range pair shares every c in (0, 2/(l2+LN))
        dyn, weights, spec = (osc_network["dyn"], osc_network["weights"],
                              osc_network["spec"])
        l2, ln = 0.5 * spec.lambda2, 2.0 * spec.lambda_max
        c = 0.9 * 2.0 / (l2 + ln)
        exact = design_gain(dyn, weights, GainMethod.EXACT_SPECTRUM_LOWER,
                            (spec.lambda2, spec.lambda_max), c=c)
        bounds = design_gain(dyn, weights, GainMethod.BOUNDS_LOWER, (l2, ln), c=c)
        ok, min_eig = psd_check(bounds.P - exact.P)
        assert min_eig >= -1e-8


class TestDesignGainSingle:
    def test_scalar_accept(self):
        dyn = AgentDynamics(A=[[0.0]], B=[[1.0]])
        weights = CostWeights(Q=[[1.0]], R=[[1.0]])
        design = design_gain_single(dyn, weights, [1.0], gamma=2.0, epsilon=1e-9)
        assert design.P[0, 0] == pytest.approx(1.0, abs=1e-8)
        assert design.K[0, 0] == pytest.approx(-1.0, abs=1e-8)
        assert design.method is GainMethod.SINGLE_SYSTEM
        assert design.spectral_inputs is None

    def test_scalar_budget_infeasible(self):
        dyn = AgentDynamics(A=[[0.0]], B=[[1.0]])
        weights = CostWeights(Q=[[1.0]], R=[[1.0]])
        with pytest.raises(BudgetInfeasible):
            design_gain_single(dyn, weights, [1.0], gamma=0.5, epsilon=1e-9)

    def test_unstable_scalar_threshold(self):
        # p solves 2p - p^2 + eps = 0, so the bound sits just above 2
        dyn = AgentDynamics(A=[[1.0]], B=[[1.0]])
        weights = CostWeights(Q=[[0.0]], R=[[1.0]])
        design = design_gain_single(dyn, weights, [1.0], gamma=2.1, epsilon=1e-6)
        assert design.P[0, 0] == pytest.approx(2.0, abs=1e-5)
        with pytest.raises(BudgetInfeasible):
            design_gain_single(dyn, weights, [1.0], gamma=2.0, epsilon=1e-6)


class TestAdmissibility:
    def test_consensus_start_is_free(self, osc_network):
        x0 = np.tile([0.3, -0.7], 8)
        admissible, bound = admissibility(osc_network["design"].P, x0, 1e-9)
        assert admissible
        assert abs(bound) < 1e-12

    def test_oscillator_initial_state(self, osc_network):
        admissible, bound = admissibility(osc_network["design"].P,
                                          osc_network["x0"], 3.0)
        assert admissible and bound < 3.0

    def test_two_agent_closed_form(self):
        admissible, bound = admissibility([[1.0]], [1.0, -1.0], 1.0)
        assert not admissible
        assert bound == pytest.approx(2.0)

    def test_translation_invariance(self, osc_network, rng):
        p = osc_network["design"].P
        x0 = osc_network["x0"]
        shift = np.tile(rng.standard_normal(2), 8)
        _, bound0 = admissibility(p, x0, 3.0)
        _, bound1 = admissibility(p, x0 + shift, 3.0)
        assert bound1 == pytest.approx(bound0, rel=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            admissibility(np.eye(2), np.ones(5), 1.0)
