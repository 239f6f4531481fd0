"""
Pseudo-spectral Navier-Stokes on the periodic box with velocity-vorticity
alignment diagnostics and a localized energy ledger over parabolic cylinders.
"""

from .spectral import Grid
from .flows import exact_abc, init_abc, init_perturbed_beltrami, init_random_solenoidal, init_taylor_green
from .solver import SolverConfig, Snapshot, Trajectory, simulate, step
from .cutoff import Cylinder, CutoffSpec, build_cutoff, verify_cutoff
from .diagnostics import alignment_sine, criterion, diagnostics_series, helicity_stats
from .ledger import Ledger, LedgerConfig, LedgerReport
from .config import parse_config
from .snapshot_io import read_run, read_snapshot, write_run, write_snapshot

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "exact_abc",
    "init_abc",
    "init_perturbed_beltrami",
    "init_random_solenoidal",
    "init_taylor_green",
    "SolverConfig",
    "Snapshot",
    "Trajectory",
    "simulate",
    "step",
    "Cylinder",
    "CutoffSpec",
    "build_cutoff",
    "verify_cutoff",
    "alignment_sine",
    "criterion",
    "diagnostics_series",
    "helicity_stats",
    "Ledger",
    "LedgerConfig",
    "LedgerReport",
    "parse_config",
    "read_run",
    "read_snapshot",
    "write_run",
    "write_snapshot",
]
