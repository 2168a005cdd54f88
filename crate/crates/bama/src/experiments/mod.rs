//! Seeded numerical experiments. Each one is a pure function of its spec
//! and seed and returns plain rows for tabular output.

pub mod case_study;
pub mod convergence;
pub mod isocurves;
pub mod oracle;
pub mod profiles;
pub mod sweep;

pub use case_study::{decision_case_study, CaseRow, CaseStudyReport, Check};
pub use convergence::{
    convergence_study, items_to_accuracy, ConvergenceRow, ConvergenceSpec, NamedPrior, NamedProfile,
};
pub use isocurves::{isocurve_grid, level_sets, IsoPoint, IsocurveGrid, LEVELS};
pub use oracle::{mc_profile_z, mc_state_z, McEstimate};
pub use profiles::{equal_mean_profiles, score_histogram, solve_lambda, EqualMeanProfiles};
pub use sweep::{fit_line, sensitivity_sweep, SweepRow, SweepSpec};
