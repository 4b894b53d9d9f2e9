"""Depth analysis and parallelization of measurement patterns."""

from .core import Angle, Circuit, Geometry, Pattern, parse_circuit, parse_pattern
from .depth import quantum_depth
from .flow import characterized_depth, find_flow, flow_pattern
from .translate import circuit_to_pattern, parallelize_circuit, pattern_to_circuit

__all__ = [
    "Angle",
    "Circuit",
    "Geometry",
    "Pattern",
    "parse_circuit",
    "parse_pattern",
    "quantum_depth",
    "characterized_depth",
    "find_flow",
    "flow_pattern",
    "circuit_to_pattern",
    "parallelize_circuit",
    "pattern_to_circuit",
]

__version__ = "0.1.0"
