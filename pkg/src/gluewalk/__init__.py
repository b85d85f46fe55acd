"""Coined quantum walks on glued-trees graphs under coin phase damping."""

from .channel import (
    PhaseDampingChannel,
    apply_closed_form,
    apply_kraus_truncated,
    kraus_completeness_defect,
)
from .experiment import (
    DEFAULT_ETAS,
    ExperimentConfig,
    ProbabilityTrace,
    classical_baseline,
    eta_scan,
    first_arrival,
    layer_scan,
    optimize_initial_coin,
    peak_filter,
    run_walk,
    target_curve,
)
from .graph import (
    GluedTreesSpec,
    GraphFormatError,
    PortLabeledGraph,
    build_glued_trees,
    export_edge_list,
    import_edge_list,
    validate,
)
from .walk import (
    Coin,
    InitialCondition,
    custom_coin,
    default_initial_condition,
    grover_coin,
    hadamard_coin,
    hadamard_line_walk,
    measure_positions,
    step_density,
    step_pure,
)

__version__ = "0.1.0"
