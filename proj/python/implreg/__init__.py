"""Python interface to the implreg risk and bound library."""

import json as _json

from ._implreg import (
    Dataset,
    GuardError,
    Problem,
    ValidationError,
    __version__,
    excess_risk,
    gd_fit,
    gd_risk,
    max_stable_stepsize,
    power_law_exponent,
    power_law_problem,
    ridge_fit,
    ridge_risk,
    sample_dataset,
    sgd_risk,
    sgd_run,
    spike_problem,
)
from . import _implreg


def problem_from_dict(doc):
    return _implreg.problem_from_json(_json.dumps(doc))


def bound(kind, problem, n, *, lam=0.0, eta=0.0, t=0, eta0=0.0, constants=None):
    raw = _implreg.bound_json(kind, problem, n, lam, eta, t, eta0, _json.dumps(constants) if constants else "")
    return _json.loads(raw)


def validate(config, command=""):
    return _implreg.validate_json(_json.dumps(config), command)


def run(command, config, out=None, seed=None, trials=None, threads=None):
    """Run a CLI command in-process; returns (exit_code, messages)."""
    return _implreg.run_json(_json.dumps(config), command, None if out is None else str(out), seed, trials, threads)


__all__ = [
    "Dataset",
    "GuardError",
    "Problem",
    "ValidationError",
    "__version__",
    "bound",
    "excess_risk",
    "gd_fit",
    "gd_risk",
    "max_stable_stepsize",
    "power_law_exponent",
    "power_law_problem",
    "problem_from_dict",
    "ridge_fit",
    "ridge_risk",
    "run",
    "sample_dataset",
    "sgd_risk",
    "sgd_run",
    "spike_problem",
    "validate",
]
