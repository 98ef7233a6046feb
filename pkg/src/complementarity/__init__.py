"""Quantitative complementarity relations for multi-qubit states, with an interferometer and NMR simulator."""

from .qcore import (
    BlochVector,
    DensityMatrix,
    PureState,
    UnitaryOperator,
    apply_unitary,
    bloch_vector,
    partial_trace,
    purity,
    random_mixed_state,
    random_pure_state,
    tensor,
)
from .measures import (
    ComplementarityReport,
    DistinguishabilityResult,
    RelationCheck,
    SingleParticleProfile,
    TangleProfile,
    bipartite_concurrence,
    concurrence_mixed,
    concurrence_pure,
    distinguishability,
    pairwise_tangle,
    predictability,
    single_particle_character,
    three_tangle,
    verify_relations,
    visibility_single,
)
from .states import generalized_state_families

__all__ = [name for name in dir() if not name.startswith("_")]
