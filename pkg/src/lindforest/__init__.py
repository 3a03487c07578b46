"""Stationary states of Lindblad systems from weighted trees and forests."""
from .estimator import StationaryStateAnalyzer
from .exceptions import (
    DimensionMismatch,
    InvalidSystem,
    LindForestError,
    MethodDisagreement,
    NonPhysicalState,
    NonUniformRelation,
    NotGPM,
    NotInLeftKernel,
    RankMismatch,
    SearchSpaceExceeded,
    StabilityGuard,
)
from .graph import (
    BasinDecomposition,
    InTree,
    RootedForest,
    decompose_basins,
    enumerate_basin_forests,
    enumerate_in_trees,
    export_dot,
)
from .laplacian import ProjectorFamily, RateGraph, build_omega, build_rate_graph
from .model import GPMDecomposition, LindbladSystem, gpm_decompose, is_gpm, validate_system
from .oracle import integrate_lambda, integrate_master_equation, minor_determinant, numerical_kernel
from .stationary import (
    ConstraintVector,
    StationaryOrbit,
    asymptotic_state,
    constraint_vectors,
    kernel_rank,
    stationary_orbits,
)
from .symmetry import (
    CoherenceGraph,
    EquivalenceRelation,
    ResonanceCertificate,
    build_coherence_graph,
    check_oscillations,
    check_resonance,
    coherence_kernel_dim,
    detect_hidden_enclosures,
    verify_symmetry,
)

__version__ = "0.1.0"
