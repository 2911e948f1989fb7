"""Hyper-site order parameters for classical Heisenberg antiferromagnets."""
from .decomposition import (
    FieldMap, apply_gauge, chain_decompose, chain_reconstruct, decompose, reconstruct,
    square_decompose, square_reconstruct, tri_consistency_report, tri_decompose, tri_reconstruct,
)
from .dynamics import McOptions, MinimizeOptions, align_sweep, metropolis_sweep, minimize, run_metropolis
from .errors import ConfigurationError, PreconditionError, UnsupportedFeatureError
from .lattice import Lattice, LatticeKind, LatticeSpec, build_lattice, validate_partition
from .observables import constraint_residuals, frame_residuals, heisenberg_energy, nude_chirality_map
from .report import ResidualReport
from .scaling import ScanSchedule, affleck_scan, fit_slope
from .spins import SpinConfiguration, random_config, reference_config, spin_length, validate_norms

__version__ = "0.1.0"
