"""Monte Carlo stabilizer-frame simulator for preparing heterogeneously
encoded Bell pairs (Steane 7-qubit code, distance-3 surface code, bare
physical qubits) by entanglement purification under Pauli circuit-level
noise."""

__version__ = "0.1.0"

from .analytic import (
    distilled_fidelity_two_rounds,
    purification_success_probability,
    werner_components,
)
from .codes import get_code, physical_code, steane7_code, surface3_code
from .montecarlo import RunConfig, TableRow, run_row, run_table, wilson_interval
from .noise import NoiseModel, RngStream

__all__ = [
    "__version__",
    "NoiseModel",
    "RngStream",
    "RunConfig",
    "TableRow",
    "distilled_fidelity_two_rounds",
    "get_code",
    "physical_code",
    "purification_success_probability",
    "run_row",
    "run_table",
    "steane7_code",
    "surface3_code",
    "werner_components",
    "wilson_interval",
]
