"""driftmon: label-free accuracy monitoring for classifiers under gradual drift.

The estimator couples consecutive unlabeled batches with entropic optimal
transport, propagates a label belief forward from the labeled source batch,
and reads off the expected accuracy of the monitored model's predictions.
The belief doubles as an uncertainty measure that can trigger targeted
labeling interventions.
"""

from driftmon.ot import (
    SinkhornResult,
    cost_matrix,
    sinkhorn,
    conditional_coupling,
    exact_wasserstein1,
)
from driftmon.mlp import Mlp, TrainConfig, train, grad_check
from driftmon.datasets import (
    LabeledBatch,
    ShiftStream,
    make_moons,
    make_circles,
    make_clusters,
    apply_rotation,
    apply_translation,
    apply_scaling,
    gen_stream,
)
from driftmon.engine import (
    EngineState,
    LabelBelief,
    init,
    advance,
    estimate_accuracy,
    estimate_uncertainty,
    apply_labels,
    nipm_estimate,
    transition_map,
)
from driftmon.intervention import (
    InterventionPolicy,
    should_trigger,
    budget,
    select_ui,
    select_cei,
    select_ri,
)
from driftmon.baselines import (
    SourceCalibration,
    calibrate,
    ac,
    doc,
    atc_fit,
    atc_estimate,
    im_estimate,
)
from driftmon.smoothness import (
    SmoothnessTrace,
    estimate_epsilon,
    estimate_lipschitz,
    pearson,
    trace,
)
from driftmon.runner import (
    ConfigError,
    NumericalFailure,
    RunConfig,
    RunResult,
    run_batch,
    sweep,
    verify,
    ingest_external,
)

__version__ = "0.1.0"
