"""Rank lower bounds for design matrices and incidence-geometry audits."""

__version__ = "0.1.0"

from .design import (
    DesignProfile,
    DesignRankCertifier,
    RankCertificate,
    build_replicated,
    design_profile,
    diag_dominant_rank_bound,
    formula_certify,
    gram_certify,
    rank_lower_bound,
    rank_lower_bound_avg,
)
from .geometry import (
    DependencyRow,
    LineIncidence,
    PointConfig,
    affine_dimension,
    build_sg_design_matrix,
    dependency_row,
    generate_lines_config,
    grid_config,
    mr3_check,
    mr_delta,
    sg_delta,
    sgk_check,
    special_lines,
)
from .lcc import (
    LccAudit,
    LccConfig,
    RecoveryGraph,
    lcc_audit,
    low_rank_sublist,
    normalize_generating_set,
    partition_iterate,
    random_line_triples,
    recovery_graph,
)
from .matrix import (
    COMPLEX,
    RATIONAL,
    PropertySVerdict,
    ScalarDomain,
    ScalarMatrix,
    ZeroPattern,
    as_scalar_matrix,
    pattern_of,
    property_s_check,
    property_s_from_blocks,
)
from .rank import RankResult, exact_rank_rational, numerical_rank, rank, rank_mod_p
from .scaling import ScalingResult, SinkhornScaler, balance_deviation, scale_l2, sinkhorn_l1
from .triples import Hypergraph3, LatinSquare, TripleFamily, diagonal_latin_square, hypergraph_core, triple_family
