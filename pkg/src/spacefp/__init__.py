"""Unsupervised spatial fingerprints from presence patterns in detection records."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    EmptyDataset,
    EmptyInput,
    IncomparableVectors,
    InsufficientData,
    InvalidConfig,
    InvalidInput,
    InvalidParameters,
    ParseError,
    SpaceFPError,
)
from .model import (  # noqa: E402
    Detection,
    DetectionSet,
    FeatureIndex,
    FeatureVector,
    Fingerprint,
    Window,
    feature_count,
    feature_layout,
    normalize_time,
    restrict_to_space,
)
from .vectorize import density_vector, vectorize, vectorize_naive  # noqa: E402
from .metric import MetricKind, distance, pairwise_distance_matrix, vector_average  # noqa: E402
from .params import (  # noqa: E402
    ParamSearchConfig,
    SearchTrace,
    find_duration,
    find_resolution,
    fingerprint_parameters,
)
from .pipeline import epoch_vectors, spaceprint  # noqa: E402
from .cluster import ClusterConfig, ClusterResult, EvalReport, evaluate, kmeans, mds_2d  # noqa: E402
