"""pyfrechetann - approximate nearest neighbours for polygonal curves under the Frechet distance."""

from .ann import (
    MetricOracle,  # noqa: F401
    NearlyDoublingIndex,  # noqa: F401
    NearlyDoublingProjection,  # noqa: F401
    NetTree,  # noqa: F401
    ann_query,  # noqa: F401
    brute_force_nn,  # noqa: F401
    build_generalized_ann,  # noqa: F401
    build_net_tree,  # noqa: F401
    euclidean_oracle,  # noqa: F401
    frechet_oracle,  # noqa: F401
    generic_nearly_doubling_ann,  # noqa: F401
)
from .doubling import (
    doubling_dimension_bound,  # noqa: F401
    generate_lower_bound_family,  # noqa: F401
    lower_bound_dimension,  # noqa: F401
    packing_estimate,  # noqa: F401
)
from .errors import (
    ConstraintError,  # noqa: F401
    ConvergenceError,  # noqa: F401
    CurveFileError,  # noqa: F401
    DegenerateDatasetError,  # noqa: F401
    DimensionMismatchError,  # noqa: F401
    FrechetANNError,  # noqa: F401
    NetTreeError,  # noqa: F401
)
from .frechet import (
    discrete_frechet,  # noqa: F401
    frechet_decide,  # noqa: F401
    frechet_distance,  # noqa: F401
    is_delta_stabber,  # noqa: F401
)
from .io import load_index, read_curves, save_index, write_curves  # noqa: F401
from .pipeline import FrechetIndex, build_additive, build_multiplicative, dedup, query  # noqa: F401
from .snap import snap_curve, validate_snapped  # noqa: F401
from .stats import c_packedness_lower_bound, dataset_stats, spread  # noqa: F401
from .types import (
    Curve,  # noqa: F401
    DatasetStats,  # noqa: F401
    ExperimentConfig,  # noqa: F401
    FrechetConfig,  # noqa: F401
    IndexParams,  # noqa: F401
    PackingReport,  # noqa: F401
    QueryCertificate,  # noqa: F401
    Segment,  # noqa: F401
    SnappedCurve,  # noqa: F401
)

# Import pytest plugin helpers for programmatic use
try:
    from .pytest_plugin import (
        assert_ann_guarantee,  # noqa: F401
        assert_metric_triple,  # noqa: F401
        assert_tree_audit,  # noqa: F401
    )

    _pytest_exports = ["assert_ann_guarantee", "assert_metric_triple", "assert_tree_audit"]
except ImportError:
    # Pytest not installed, plugin features not available
    _pytest_exports = []

__version__ = "0.1.0"

_base_exports = [
    "ConstraintError",
    "ConvergenceError",
    "Curve",
    "CurveFileError",
    "DatasetStats",
    "DegenerateDatasetError",
    "DimensionMismatchError",
    "ExperimentConfig",
    "FrechetANNError",
    "FrechetConfig",
    "FrechetIndex",
    "IndexParams",
    "MetricOracle",
    "NearlyDoublingIndex",
    "NearlyDoublingProjection",
    "NetTree",
    "NetTreeError",
    "PackingReport",
    "QueryCertificate",
    "Segment",
    "SnappedCurve",
    "ann_query",
    "brute_force_nn",
    "build_additive",
    "build_generalized_ann",
    "build_multiplicative",
    "build_net_tree",
    "c_packedness_lower_bound",
    "dataset_stats",
    "dedup",
    "discrete_frechet",
    "doubling_dimension_bound",
    "euclidean_oracle",
    "frechet_decide",
    "frechet_distance",
    "frechet_oracle",
    "generate_lower_bound_family",
    "generic_nearly_doubling_ann",
    "is_delta_stabber",
    "load_index",
    "lower_bound_dimension",
    "packing_estimate",
    "query",
    "read_curves",
    "save_index",
    "snap_curve",
    "spread",
    "validate_snapped",
    "write_curves",
]

__all__ = tuple(_base_exports + _pytest_exports)
