"""Correlation-filter tracking with group-sparse, temporally consistent learning."""
from .bench import EvalReport, Sequence, load_sequence, run_ope, score
from .solver import SolverConfig, SpectralFilter, learn
from .tracker import BoundingBox, Tracker, TrackerConfig, TrackerState

__all__ = [
    "BoundingBox", "EvalReport", "Sequence", "SolverConfig", "SpectralFilter",
    "Tracker", "TrackerConfig", "TrackerState", "learn", "load_sequence",
    "run_ope", "score",
]
__version__ = "0.1.0"
