"""boxlens: black-box model inspection through input/output behavior.

Models are probed purely through a ``score(x) -> [0, 1]`` interface: global
partial dependence, per-row what-if inspection with local importance and
impactful changes, and the contrast/cluster/rank signature pipeline.
"""

from .cluster import Cluster, cluster_side
from .curves import ContingencyMatrix, CurveSet, contingency_at, score_curves
from .dataset import (
    BINARY,
    NUMERIC,
    Dataset,
    Feasible,
    FeatureMeta,
    Histogram,
    IngestionError,
    feature_grid,
    histogram,
    impute_missing,
    load_csv,
    load_schema,
    snap_value,
)
from .explain import (
    IceCurve,
    ImpactfulChange,
    LocalImportanceReport,
    PdpCurve,
    feature_order,
    ice_curve,
    impactful_changes,
    local_importance,
    partial_dependence,
    what_if,
    write_curve_csv,
    write_histogram_csv,
)
from .models import (
    LogisticModel,
    Predictor,
    TrainingError,
    TreeModel,
    load_model,
    predict,
    predict_batch,
    save_model,
    train_logistic,
    train_tree,
)
from .service import Session, make_server
from .signatures import (
    EmptySideError,
    SignatureMatrix,
    ThresholdPair,
    build_signatures,
    contrast_filter,
    rank_discriminative,
    signature_to_dict,
)
from .tsne import project_items

__version__ = "0.1.0"
