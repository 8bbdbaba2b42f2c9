"""Permutation and rearrangement distances between fully-labelled rooted trees and forests."""

from .approx import (
    APPROX_FACTOR,
    StepTrace,
    TreeApproximation,
    approximate_rearrangement,
    approximate_tree_distance,
    family_partition,
    migrations_graph,
    pair_partition,
)
from .forest import (
    Cut,
    EditScript,
    ForestError,
    LabeledForest,
    LinkAndCut,
    Permutation,
    Permute,
    ScriptError,
    anchor,
    apply_op,
    apply_script,
    parse_forest,
    parse_script,
    permute,
    read_forest,
    similar,
)
from .isomorphism import NotIsomorphic, canonical_ids, isomorphic
from .matching import (
    BipartiteGraph,
    WeightedBipartiteGraph,
    max_matching,
    max_weight_matching,
    max_weight_matching_oracle,
)
from .permdist import gamma_baseline, gamma_fast, permutation_distance, recover_permutation

__version__ = "0.1.0"
