"""Interactive fairness auditing for binary classifiers."""

from .data import (
    Dataset,
    EqualWidth,
    ExplicitEdges,
    FeatureSpec,
    Histogram,
    IngestConfig,
    attach_predictions,
    bin_numeric,
    export_csv,
    feature_distribution,
    load_dataset,
)
from .metrics import (
    CompositeParity,
    ConfusionCounts,
    MetricVector,
    ParityAssessment,
    StratifiedParity,
    conditional_statistical_parity,
    confusion,
    demographic_parity,
    metric_deviation,
    metrics,
    overall_metrics,
    parity_by_rate,
    rate_for_class,
    subgroup_metrics,
)
from .subgroups import (
    GroupSet,
    Predicate,
    Subgroup,
    generate_subgroups,
    make_subgroup,
    membership_mask,
)
from .suggest import (
    describe_cluster,
    encode_instances,
    kmeans,
    similar_subgroups,
    suggest_subgroups,
)
from .compass import (
    DEFINITIONS,
    DecisionTree,
    FairnessDefinition,
    describe_node,
    load_default_tree,
    load_tree,
    load_tree_file,
)
from .session import AuditSession, StageLogEntry, count_loop_iterations
from .report import render_markdown

__version__ = "0.1.0"
