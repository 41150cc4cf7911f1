"""Logratio variable selection for compositional data.

An engine and workbench for picking a small set of pairwise or summated
(amalgamation) logratios that explain most of a composition's total
logratio variance, together with the supporting transforms, variance
accounting, stepwise selection, and low-rank ordination exports.
"""

from .compositions import (
    Amalgamation,
    CompositionMatrix,
    LogratioSpec,
    PartWeights,
    ZeroReplacement,
    amalgamate,
    close,
    clr_matrix,
    plr_values,
    replace_zeros,
    slr_values,
)
from .errors import DegenerateDataError, InputDataError
from .io import parse_composition_csv, read_composition_csv
from .ordination import (
    OrdinationResult,
    RegressionFit,
    explained_variance,
    lra,
    pca_of_logratios,
    ternary_coords,
)
from .selection import (
    AmalgamationHierarchy,
    CommittedSlr,
    HierarchyExplained,
    LogratioGraph,
    SelectionTrace,
    Split,
    evaluate_candidates,
    hierarchy_explained,
    plr_graph,
    stepwise_select,
)
from .variance import (
    VarianceReport,
    explained_percentage,
    total_logratio_variance,
    variance_population,
)

__version__ = "0.1.0"

__all__ = [
    "Amalgamation",
    "AmalgamationHierarchy",
    "CommittedSlr",
    "CompositionMatrix",
    "DegenerateDataError",
    "HierarchyExplained",
    "InputDataError",
    "LogratioGraph",
    "LogratioSpec",
    "OrdinationResult",
    "PartWeights",
    "RegressionFit",
    "SelectionTrace",
    "Split",
    "VarianceReport",
    "ZeroReplacement",
    "amalgamate",
    "close",
    "clr_matrix",
    "evaluate_candidates",
    "explained_percentage",
    "explained_variance",
    "hierarchy_explained",
    "lra",
    "parse_composition_csv",
    "pca_of_logratios",
    "plr_graph",
    "plr_values",
    "read_composition_csv",
    "replace_zeros",
    "slr_values",
    "stepwise_select",
    "ternary_coords",
    "total_logratio_variance",
    "variance_population",
]
