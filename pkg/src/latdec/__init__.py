"""Lattice decoding in the fundamental parallelotope.

Construct and reduce lattices, solve the closest-vector problem, verify
Voronoi-reduced bases, synthesize and run the hyperplane logical decoder,
fold its boundary function for the A/D/E families, count boundary pieces,
and run Gaussian-channel experiments.
"""

from .lattices import (
    BudgetExceededError,
    GeneratorMatrix,
    ShellCount,
    count_points_in_sphere,
    dual_generator,
    family_generator,
    gram_for_family,
    generator_from_gram,
    kissing_number,
    lll_reduce,
    minimum_distance,
    nominal_coding_gain,
    norms_in_sphere,
    random_mimo_generator,
    random_real_generator,
    relevant_vectors,
    sigma_from_vnr,
    theta_shells,
)
from .cvp import (
    DecodeResult,
    ParallelotopeCoords,
    corner_decode,
    extended_corner_decode,
    pipeline_decode,
    reduce_to_parallelotope,
    sphere_decode,
    sphere_decode_batch,
    zf_decode,
)
from .vr import (
    VrReport,
    asymptotic_union_bound,
    estimate_nonvr_volume,
    facet_distance,
    lemma1_bound,
    pe_union_bound,
    verify_vr_interior,
    wilson_interval,
)
from .hld import (
    CoordinateDNF,
    HldDecoder,
    Hyperplane,
    PiecewiseNetwork,
    boundary_eval,
    export_hld_network,
    hld_decode,
    hld_decode_batch,
    network_forward,
    orient_basis,
    piece_count,
    synthesize_all,
    synthesize_hld,
)
from .folding import (
    FoldingDecoder,
    ReflectionSequence,
    build_reflection_sequence,
    export_folding_network,
    fold,
    folded_decode,
    folded_piece_set,
    reflect_if_negative,
)
from .complexity import (
    PieceCount,
    count_pieces_enumerate,
    count_pieces_folded,
    count_pieces_formula,
    shallow_lower_bound,
)
from .simulate import (
    ExperimentReport,
    PointsReport,
    ReportRow,
    SimulationConfig,
    mimo_vr_experiment,
    points_in_sphere_experiment,
    run_simulation,
    simulate_error_rate,
)
