import numpy as np
import pytest

from suboptlqr import GainMethod, design_gain, spectrum, UndirectedGraph

from support import OSCILLATOR_X0, oscillator_dynamics, oscillator_weights


@pytest.fixture(scope="session")
def osc_network():
    """The eight-oscillator path-graph fixture, designed once per session."""
    dyn = oscillator_dynamics()
    weights = oscillator_weights()
    graph = UndirectedGraph.path(8)
    spec = spectrum(graph)
    design = design_gain(dyn, weights, GainMethod.EXACT_SPECTRUM_UPPER,
                         (spec.lambda2, spec.lambda_max), c=0.5, epsilon=1e-3)
    return {
        "dyn": dyn,
        "weights": weights,
        "graph": graph,
        "spec": spec,
        "design": design,
        "x0": OSCILLATOR_X0.copy(),
        "gamma": 3.0,
    }


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
