"""qnnlab: train variational circuits under chip-connectivity restrictions
and check how tightly the cost concentrates around its ensemble mean."""

from .circuits import (
    AnsatzFamily,
    AnsatzSpec,
    ParametrizedCircuit,
    build_fixed_ansatz,
    build_random_ansatz,
    evaluate,
    load_circuit,
    save_circuit,
)
from .datasets import Dataset, load_csv, make_moons, save_csv, scale_features
from .encoding import (
    dense_angle_encode,
    experiment_encode,
    qubit_encode,
    wavefunction_encode,
)
from .estimator import QnnClassifier
from .exceptions import ConfigError
from .experiments import (
    ExperimentConfig,
    run_experiment,
    run_fixed_compare,
    run_random_sweep,
    run_theory_check,
    summarize,
)
from .simulator import (
    Gate,
    GateKind,
    Observable,
    ObservableKind,
    StateVector,
    apply_gate,
    expectation,
    init_zero_state,
    observable_from_name,
    trace,
    trace_sq,
)
from .theory import (
    DeviationBound,
    HaarMoments,
    deviation_bound,
    deviation_delta,
    haar_mean,
    haar_moments,
    haar_second_moment,
    haar_variance,
    monte_carlo_moments,
    sample_haar_unitary,
    theorem1_lower_bound,
)
from .topology import (
    CouplingGraph,
    coupling_graph_from_name,
    distance,
    guadalupe,
    load_coupling_graph,
    routing_cost,
    transpile_overhead,
)
from .training import (
    AdamState,
    ParamInit,
    TrainConfig,
    TrialRecord,
    adam_step,
    cost,
    gd_step,
    parameter_shift_gradient,
    train,
)

__version__ = "0.1.0"
