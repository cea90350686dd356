"""Symmetry-based chirality classification of parity-violating interactions."""

__version__ = "0.1.0"

from .clifford import Bispinor, Matrix4, build_weyl_basis, verify_clifford
from .dsl import builtin, builtin_library, parse, render
from .kinematics import ChiralityClass, classify_kinematic, parse_kinematic
from .qft import run_axion_check, run_nc_check
from .symmetry import classify_influence, parity_transform, time_reversal_transform
from .verdict import SystemKind, chirality_test, verdict_table, weak_charge

__all__ = [
    "__version__",
    "Bispinor",
    "Matrix4",
    "build_weyl_basis",
    "verify_clifford",
    "builtin",
    "builtin_library",
    "parse",
    "render",
    "ChiralityClass",
    "classify_kinematic",
    "parse_kinematic",
    "run_axion_check",
    "run_nc_check",
    "classify_influence",
    "parity_transform",
    "time_reversal_transform",
    "SystemKind",
    "chirality_test",
    "verdict_table",
    "weak_charge",
]
