"""Szegedy quantum walks under percolation decoherence."""

import json as _json

from . import _core
from ._core import (
    BudgetError,
    DomainError,
    Graph,
    InvariantError,
    ValidationError,
    averaged_operator,
    classical_hitting_time,
    coherent_qht,
    decoherent_qht,
    exact_mean_p1,
    initial_state,
    run_cli,
    transition_matrix,
    verify_lemma1,
    walk_unitary,
)


def bounds(graph, marked, p=0.0, variant="bond-flip"):
    return _json.loads(_core.bounds(graph, marked, p, variant))


def detection_campaign(graph, marked, p, T, trials, seed=0, variant="bond-flip"):
    return _json.loads(_core.detection_campaign(graph, marked, p, T, trials, seed, variant))


__all__ = [
    "BudgetError",
    "DomainError",
    "Graph",
    "InvariantError",
    "ValidationError",
    "averaged_operator",
    "bounds",
    "classical_hitting_time",
    "coherent_qht",
    "decoherent_qht",
    "detection_campaign",
    "exact_mean_p1",
    "initial_state",
    "run_cli",
    "transition_matrix",
    "verify_lemma1",
    "walk_unitary",
]
