//! Exact evaluation, optimization, and Monte Carlo simulation of one-step
//! rendezvous games on cycle and cubic graphs.
//!
//! Two players are dropped on random vertices of a labelled graph, take one
//! synchronized step each, and win by ending up together. The crate covers
//! the classical strategies for this game, the entanglement-assisted
//! strategies built from a shared qubit or qutrit pair, exact closed forms
//! and enumeration for their winning probabilities, derivative-free
//! optimization of per-site measurement angles on cubic graphs, and
//! finite-trial simulation including the pre-generated outcome-table
//! workflow and a gate-failure noise model with discard mitigation.

#![forbid(unsafe_code)]

pub mod classical;
pub mod error;
pub mod eval;
pub mod game;
pub mod graph;
pub mod montecarlo;
pub mod optimize;
pub mod quantum;
pub mod strategies;

pub use classical::{
    closed_form_cycle_classical, ClassicalPair, ClassicalStrategy, CycleClassicalVariant,
};
pub use error::{Error, Result};
pub use eval::{exact_win_probability, FnProvider, JointOutcomeProvider};
pub use game::{
    convert_win_probability, resolve_round, ConversionDirection, GameConfig, GameResult,
    RoundOutcome, SameStartRule,
};
pub use graph::{Graph, Vertex};
pub use montecarlo::{
    build_table, simulate, Mitigation, QuantumTable, Sampler, SimResult, SimSource, TableKind,
    TableMode, TableProvenance,
};
pub use optimize::{
    cubic_objective, optimize, OptimizationResult, OptimizerConfig, RestartTrace, TieComponents,
};
pub use quantum::{
    euler_rotation, noisy_sample_fourqubit, outcome_matrix_fourqubit, outcome_matrix_qubit,
    outcome_matrix_qutrit, sample_outcome, EulerAngles, NoiseParams, OutcomeDistribution,
    StateVector,
};
pub use strategies::{
    closed_form_cycle_quantum, cycle_asymptote, nst_attainable, nst_bound, optimal_theta,
    shared_randomness_strategy_c3, CycleAsymptote, NstWitness, QubitStrategy, QutritStrategy,
    RoleSplitC3, SharedRandomnessReport, Strategy, ThetaOptimum,
};
