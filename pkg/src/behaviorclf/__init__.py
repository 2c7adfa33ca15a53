"""Behavior-log feature extraction and binary malware-family classification.

The pipeline: parse artifact logs into sample runs, map each run onto a
fixed 65-slot behavior vector, train one of five classifiers, and report
per-class false-positive / false-negative percentages, including the
train/test flip experiment.  A seeded synthetic corpus generator makes
the whole protocol reproducible at desk scale.
"""

from .artifacts import (
    ArtifactLogError,
    DnsQuery,
    DnsRecordType,
    FileAction,
    FileEvent,
    HttpMethod,
    HttpTransaction,
    Label,
    NetworkFlow,
    Protocol,
    RegistryAction,
    RegistryEvent,
    RegValueType,
    SampleRun,
    file_event,
    parse_artifact_log,
    runs_to_log_bytes,
    validate_run,
)
from .estimators import (
    GiniTreeClassifier,
    ModelFormatError,
    NearestNeighborClassifier,
    PenalizedLogisticRegression,
    SquaredHingeSVM,
    Standardizer,
    load_model,
    save_model,
)
from .evaluation import (
    ConfusionCounts,
    ErrorReport,
    confusion,
    default_algorithms,
    error_report,
    flip_experiment,
    render_table,
    run_experiment,
)
from .features import (
    BehaviorVectorizer,
    Dataset,
    FeatureVector,
    build_dataset,
    extract_features,
    load_matrix,
    quartile_counts,
    save_matrix,
)
from .layout import DEFAULT_LAYOUT, DEFAULT_PORTS, FeatureLayout, build_layout
from .synth import (
    BehaviorProfile,
    GenSpec,
    emit_log,
    generate,
    generic_profile,
    interpolate_profile,
    load_profile,
    zeus_like_profile,
)

__version__ = "0.1.0"
