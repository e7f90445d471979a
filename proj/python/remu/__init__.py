"""Python bindings for the ReMU derivative-free trust-region toolkit."""

import json

import numpy as np

from ._core import (
    WeightCoefficients,
    data_profile,
    eta_coefficients,
    limiting_error_terms,
    objective,
    parse_weights,
    performance_profile,
    standard_weight_rows,
    tn_error,
    variants,
)

__all__ = [
    "WeightCoefficients",
    "data_profile",
    "eta_coefficients",
    "limiting_error_terms",
    "minimize",
    "objective",
    "parse_weights",
    "performance_profile",
    "problems",
    "solve",
    "standard_weight_rows",
    "tn_error",
    "variants",
]


def problems():
    """Registry descriptors as a list of dicts."""
    from ._core import _registry_json

    return json.loads(_registry_json())


def solve(problem, variant="smooth", weights="1/3,1/3,1/3", budget_mult=50.0, seed=0, sigma=1e-2,
          set_size="2n+1"):
    """Run one solver on a registry problem; returns the JSON result as a dict."""
    from ._core import _solve_problem

    return json.loads(_solve_problem(problem, variant, weights, budget_mult, seed, sigma, set_size))


def minimize(fun, x0, weights="1/3,1/3,1/3", max_evals=100, delta0=0.0, set_size="2n+1"):
    """Minimize a Python callable. delta0 <= 0 picks max(1, |x0|_inf)."""
    from ._core import _minimize

    x0 = np.asarray(x0, dtype=float)
    return json.loads(_minimize(lambda x: float(fun(np.array(x))), x0, weights, max_evals, delta0, set_size))
