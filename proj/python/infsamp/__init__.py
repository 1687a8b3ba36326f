"""Influence sampling for n-qubit quantum processes."""

import json as _json

import numpy as _np

from . import _core
from ._core import (
    CapabilityError,
    ConfigError,
    Error,
    SizeError,
    ValidationError,
    commands,
    junta_epsilon,
    influence,
    influence_bounds,
    influence_samplers,
    kraus_to_chi,
    process_distance,
    process_fidelity,
)

__version__ = _core.__version__

EXIT_CODES = {ConfigError: 2, ValidationError: 2, CapabilityError: 3, SizeError: 4}


def run(command, config):
    """Run a workflow on a config dict and return the result envelope."""
    return _json.loads(_core.run_json(command, _json.dumps(config)))


def to_csv(envelope):
    """CSV projection of a sample or sweep envelope."""
    return _core.render_csv(_json.dumps(envelope))


def process_chi(process, max_qubits=12):
    """Dense process matrix of a process dict {"n": ..., "layers": [...]}."""
    return _np.asarray(_core.process_chi(_json.dumps(process), max_qubits))


__all__ = [
    "CapabilityError",
    "ConfigError",
    "Error",
    "EXIT_CODES",
    "SizeError",
    "ValidationError",
    "commands",
    "junta_epsilon",
    "influence",
    "influence_bounds",
    "influence_samplers",
    "kraus_to_chi",
    "process_chi",
    "process_distance",
    "process_fidelity",
    "run",
    "to_csv",
]
