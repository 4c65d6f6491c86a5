//! Regime table and Monte Carlo checks of the scaling limits.

mod experiments;
mod model;
mod regime;
pub mod stats;

pub use experiments::{
    addition_continuity_experiment, addition_shared_jump_control, decomposition_suite, drift_pair, exponent_fit,
    fdd_joint, fdd_self_consistency, fdd_self_consistency_shifts, geometric_grid, j2_gap_experiment, oracle_test, oracle_test_shifts, reorder_suite, AdditionReport,
    AdditionRow, DecompositionReport, DecompositionRow, ExponentFit, GapRow, J2GapReport, JointReport,
    MarginalReport, Observable, Perturbation, ReorderReport, ScaleStatistic,
};
pub use model::{
    exact_marginal_oracle, flight_at, flight_endpoint, normalized_endpoint, replica_id, FlightModel, OracleScaling,
};
pub use regime::{classify_regime, ConvergenceMode, Fluctuation, FluctuationSource, RegimeId, RegimeSpec};
pub use stats::KsReport;
