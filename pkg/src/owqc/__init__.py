"""Analytic engine and Gaussian verifier for measurement-based computation
on continuous-variable cluster states."""

from .cluster import (
    ClusterGraph,
    ClusterModel,
    NodePartition,
    NullifierMap,
    build_cluster,
    nullifier_map,
    partition_blocks,
)
from .engine import (
    CaseSolution,
    MeasurementAngles,
    case1_cz_squeeze,
    effective_error_on_ys,
    four_node_transform,
    solve_case1,
    solve_case2,
    solve_case3,
    three_node_family,
    three_node_weights_for_z,
)
from .gates import (
    EulerFactors,
    FourNodeAngles,
    SymplecticTransform,
    cz_of,
    euler_decompose,
    four_node_angles_for,
    phi_of,
    rotate_of,
    squeeze_of,
)
from .matrix_core import (
    BlockPartition2x2,
    blockwise_invert_lower,
    blockwise_invert_upper,
    inv_sqrt_posdef,
    symplectic_defect,
)
from .oracle import (
    GaussianState,
    SchemeProgram,
    apply_symplectic,
    beamsplitter_mix,
    compare_with_analytic,
    homodyne_measure,
    init_squeezed,
    simulate_owqc,
)

__version__ = "0.1.0"
