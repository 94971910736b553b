"""Built-in demonstration problem: eight harmonic oscillators on a line graph.

Each agent is an undamped planar oscillator; the network is coupled along a
path, the cost weights position error twice as heavily as velocity error,
and the budget is 3. The configuration doubles as a regression fixture: the
expected design and certificate values are pinned in the test suite.
"""

from __future__ import annotations

import copy

DEMO_CONFIG: dict = {
    "dynamics": {
        "A": [[0.0, 1.0], [-1.0, 0.0]],
        "B": [[0.0], [1.0]],
    },
    "weights": {
        "Q": [[2.0, 0.0], [0.0, 1.0]],
        "R": [[1.0]],
    },
    "graph": {
        "node_count": 8,
        "edges": [[1, 2], [2, 3], [3, 4], [4, 5], [5, 6], [6, 7], [7, 8]],
    },
    "gamma": 3.0,
    "method": "thm3",
    "c": 0.5,
    "epsilon": 0.001,
    "x0": [
        [-0.08, 0.11],
        [0.12, -0.08],
        [-0.09, -0.14],
        [-0.12, 0.04],
        [0.07, -0.16],
        [-0.21, 0.12],
        [0.15, -0.22],
        [-0.17, -0.14],
    ],
    "simulation": {
        "dt": 0.001,
        "horizon": 30.0,
    },
}


def demo_config() -> dict:
    """A fresh copy of the built-in oscillator-network configuration."""
    return copy.deepcopy(DEMO_CONFIG)
