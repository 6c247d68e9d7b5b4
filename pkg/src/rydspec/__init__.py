"""Few-atom Rydberg blockade simulator with Fourier spectroscopy of the return probability."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("rydspec")
except PackageNotFoundError:
    __version__ = "0.0.0"

from .analysis import (AnalysisOptions, detect_peaks, fourier_spectrum, hexagon_sweep, match_lines,
                       run_pipeline, sweep)
from .dynamics import NoiseParams, TimeGrid, p0_closed_form, p0_lindblad, p0_unitary
from .errors import (AmbiguityError, CapacityError, ConfigError, NumericalError, ParameterError,
                     RydspecError, ValidationError)
from .geometry import (AtomArrangement, TransformationParam, hexagon_to_antiprism, square_to_diamond,
                       star_to_tetrahedron, tetra_to_square, three_atom_bend)
from .graphs import BlockadeGraph, blockade_graph, classify_graph
from .hamiltonian import (DriveParams, build_full, build_full_truncated, build_ising, build_pxp,
                          ising_params_from)
from .spectral import bright_lines, diagonalize, regime_report

__all__ = [
    "AmbiguityError", "AnalysisOptions", "AtomArrangement", "BlockadeGraph", "CapacityError",
    "ConfigError", "DriveParams", "NoiseParams", "NumericalError", "ParameterError", "RydspecError",
    "TimeGrid", "TransformationParam", "ValidationError", "blockade_graph", "bright_lines",
    "build_full", "build_full_truncated", "build_ising", "build_pxp", "classify_graph",
    "detect_peaks", "diagonalize", "fourier_spectrum", "hexagon_sweep", "hexagon_to_antiprism",
    "ising_params_from", "match_lines", "p0_closed_form", "p0_lindblad", "p0_unitary",
    "regime_report", "run_pipeline", "square_to_diamond", "star_to_tetrahedron", "sweep",
    "tetra_to_square", "three_atom_bend",
]
