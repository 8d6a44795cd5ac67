//! Core algorithms: quantum channels on up to three qubits, circuit-class
//! enumeration, statistical complexity estimators, channel robustness via
//! linear programming, and learning-bound diagnostics.

pub mod channel;
pub mod classes;
pub mod complexity;
pub mod error;
pub mod gates;
pub mod learn;
pub mod mat;
pub mod rng;
pub mod robustness;
pub mod sample;
pub mod serialize;
pub mod simplex;

pub use channel::{
    basis_state, choi_to_superop, compose, cptp_report, eval_f, eval_f_choi, is_cptp,
    kraus_channel, pauli_string, tensor, unitary_channel, BitString, CptpReport, DensityMatrix,
    QuantumChannel,
};
pub use classes::{
    augment, class_from_spec, class_size_bound_iqp, clifford_class, clifford_group_order, dedupe,
    iqp_ccz_class, iqp_class, stab_t_class, stabilizer_state_count,
    stabilizer_state_count_formula, CircuitClass, DEFAULT_DEDUP_TOL, DEFAULT_WORD_BUDGET,
};
pub use complexity::{
    check_concentration, check_theorem1, check_theorem2, class_vectors, dedupe_vectors,
    empirical_complexity, expected_complexity, gamma_star, gaussian_set_mc, massart_bound,
    rademacher_set_exact, rademacher_set_exact_abs, rademacher_set_mc, AmplificationReport,
    ComplexityEstimate, ComplexityVariant, ConcentrationReport, EstimatorMethod, Method,
    SandwichReport, ValueMode, WeightKind,
};
pub use error::{Error, Result};
pub use learn::{
    check_proposition, empirical_error, erm, expected_error, generalization_bound, loss,
    ErmResult, LearningTask, PropositionReport, TrialRecord,
};
pub use rng::stream_rng;
pub use robustness::{
    free_robustness, gamma_max_lower_bound, mixture_is_cptp, t_gate_certificate,
    verify_decomposition, GammaMaxBound, RobustnessResult, RobustnessStatus,
};
pub use sample::{all_sample_sets, function_vector, SampleDistribution, SampleSet};
pub use serialize::{
    load_channel, load_manifest, save_channel, save_manifest, ChannelRecord, ClassManifest,
};
pub use simplex::{lp_solve, LinearProgram, LpSolution, LpStatus};
