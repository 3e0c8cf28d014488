"""Orchestration engine for shareable, complexity-tunable xApp services.

Thin convenience layer over the compiled core: structured results cross the
boundary as JSON text and are decoded into plain dicts here.
"""

import json

from . import _core

__all__ = [
    "generate_scenario",
    "testbed_scenario",
    "validate_catalog",
    "solve",
    "check_feasibility",
    "objective",
    "run_experiment",
    "xapp_latency",
    "required_cpu",
]


def generate_scenario(scale="S", seed=1):
    """Seeded scenario catalog as a dict (S, M, L or XL preset)."""
    return json.loads(_core.generate_scenario(scale, seed))


def testbed_scenario():
    """The canned three-service desk catalog."""
    return json.loads(_core.testbed_scenario())


def validate_catalog(catalog):
    """Structural violations of a catalog dict; empty list means valid."""
    return json.loads(_core.validate_catalog(json.dumps(catalog)))


def solve(catalog, policy="oreo", state=None, **params):
    """Solve one instance with ``oreo``, ``exact`` or ``baseline``.

    Returns the plan as a dict; the exact policy reports
    ``{"status": "exceeded"}`` when its enumeration limits trip.
    """
    state_text = json.dumps(state) if state else ""
    return json.loads(_core.solve(json.dumps(catalog), policy, state_text, **params))


def check_feasibility(catalog, assignment, state=None):
    """Independent constraint check; returns the violation list."""
    state_text = json.dumps(state) if state else ""
    return json.loads(
        _core.check_feasibility(json.dumps(catalog), json.dumps(assignment), state_text)
    )


def objective(catalog, assignment):
    return _core.objective(json.dumps(catalog), json.dumps(assignment))


def run_experiment(scale="S", runs=1, epochs=3, seed=1, policies=("oreo", "baseline"), lifetime=2):
    """Replay epochs for every seed/policy; returns the results CSV text."""
    return _core.run_experiment(scale, runs, epochs, seed, list(policies), lifetime)


xapp_latency = _core.xapp_latency
required_cpu = _core.required_cpu
