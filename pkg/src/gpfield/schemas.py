"""JSON Schema descriptions of every subcommand's stdout summary."""
from __future__ import annotations

_NUM = {"type": ["number", "string"]}  # non-finite floats are emitted as strings
_GRID = {
    "type": "object",
    "required": ["dim", "N", "L"],
    "properties": {"dim": {"enum": [1, 2, 3]}, "N": {"type": "integer"}, "L": {"type": "number"}},
}
_PAIR = {
    "type": "object",
    "required": ["p", "q", "n"],
    "properties": {"p": _NUM, "q": _NUM, "n": {"type": "integer"}},
}
_REPORT = {
    "type": "object",
    "required": ["hypothesis", "passed", "fitted_C0", "alpha1", "alpha2", "A", "samples",
                 "max_violation"],
    "properties": {
        "hypothesis": {"enum": ["Hf", "Halpha1", "Halpha1prime", "Halpha2", "ff01"]},
        "passed": {"type": "boolean"},
        "fitted_C0": _NUM,
        "alpha1": {"type": "number"},
        "alpha2": {"type": ["number", "null"]},
        "A": {"type": ["number", "null"]},
        "samples": {"type": "integer"},
        "max_violation": _NUM,
    },
}
_DRIFT = {
    "type": "object",
    "required": ["e0", "max_rel_drift", "max_abs_drift", "max_mass_drift", "floor", "num_snapshots"],
    "properties": {k: _NUM for k in ("e0", "max_rel_drift", "max_abs_drift", "max_mass_drift", "floor")},
}


def _summary(command: str, required, properties) -> dict:
    props = {"command": {"const": command}, "passed": {"type": "boolean"}}
    props.update(properties)
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["command", "passed", *required],
        "properties": props,
    }


_RUN = {
    "grid": _GRID,
    "dt": {"type": "number"},
    "T": {"type": "number"},
    "steps": {"type": "integer", "minimum": 1},
    "seed": {"type": "integer"},
    "xt_norm": _NUM,
    "final_h1_w": _NUM,
    "drift": _DRIFT,
    "artifacts": {"type": "array", "items": {"type": "string"}},
}

SCHEMAS = {
    "check-hypotheses": _summary(
        "check-hypotheses",
        ["nonlinearity", "alpha1", "reports", "Halpha1", "max_admissible_dimension", "background"],
        {
            "nonlinearity": {"type": "object", "required": ["kind", "rho0"]},
            "alpha1": {"type": "number"},
            "reports": {"type": "array", "items": _REPORT, "minItems": 4},
            "Halpha1": _REPORT,
            "max_admissible_dimension": {"type": "array", "items": {"enum": [2, 3, 4]}},
            "background": {"type": "object",
                           "required": ["passed", "grad_phi_H2", "density_deviation_L2", "tail_fraction"]},
        },
    ),
    "evolve": _summary("evolve", list(_RUN), _RUN),
    "picard": _summary(
        "picard",
        [*_RUN, "iterations", "contraction_factors", "contracting"],
        {**_RUN,
         "iterations": {"type": "integer", "minimum": 1},
         "contraction_factors": {"type": "array", "items": {"type": "number"}},
         "contracting": {"type": "boolean"},
         "strang_l2_difference": {"type": "number"}},
    ),
    "strichartz": _summary(
        "strichartz",
        ["pair", "T", "ratio", "num_fields", "max_ratio", "grid", "ratios", "seed", "spectrum"],
        {"pair": _PAIR, "T": {"type": "number"}, "ratio": _NUM, "num_fields": {"type": "integer"},
         "max_ratio": _NUM, "grid": _GRID, "ratios": {"type": "array", "items": _NUM},
         "seed": {"type": "integer"}, "spectrum": {"enum": ["flat", "sobolev-decay"]}},
    ),
    "decompose-test": _summary(
        "decompose-test",
        ["cases", "tol", "checks", "split_reconstruction_err", "frequency_reconstruction_err",
         "explicit_remainder_rel_err", "lipschitz_max_ratio", "lipschitz_bound",
         "q_smoothing_max_ratio", "q_smoothing_bound"],
        {"cases": {"type": "integer"}, "tol": {"type": "number"},
         "checks": {"type": "object", "additionalProperties": {"type": "boolean"}},
         **{k: _NUM for k in ("split_reconstruction_err", "frequency_reconstruction_err",
                              "explicit_remainder_rel_err", "lipschitz_max_ratio", "lipschitz_bound",
                              "q_smoothing_max_ratio", "q_smoothing_bound")}},
    ),
    "energy": _summary(
        "energy",
        ["snapshot", "time", "rho0", "grid", "energy", "mass"],
        {"snapshot": {"type": "string"}, "time": {"type": "number"}, "rho0": {"type": "number"},
         "grid": _GRID, "energy": _NUM, "mass": _NUM},
    ),
    "convergence": _summary(
        "convergence",
        ["order", "dts", "errors", "exact", "pairwise_orders", "T"],
        {"order": {"type": ["number", "string"]}, "dts": {"type": "array", "items": {"type": "number"}},
         "errors": {"type": "array", "items": {"type": "number"}}, "exact": {"type": "boolean"},
         "pairwise_orders": {"type": "array", "items": {"type": "number"}}, "T": {"type": "number"}},
    ),
}

# failure summaries (non-contraction, blow-up, usage errors) share this shape
ERROR_SCHEMA = {
    "type": "object",
    "required": ["command", "passed", "error"],
    "properties": {"command": {"type": "string"}, "passed": {"const": False}, "error": {"type": "string"}},
}
