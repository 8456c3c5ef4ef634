//! Sufficient decision datasets for linear programs with uncertain costs.
//!
//! Given a bounded polytope `X` and a polyhedral set `C` of admissible cost
//! vectors, the library finds which linear measurements of the cost are
//! enough to pick an optimal decision, builds small such sets of
//! measurements, and recovers decisions from observed values.

pub mod directions;
pub mod error;
pub mod hiring;
pub mod linalg;
pub mod lp_solver;
pub mod milp_solver;
pub mod model;
pub mod oracle;
pub mod recovery;
pub mod selection;

pub use error::{Error, Result};
pub use linalg::{Matrix, SpanBasis};
pub use lp_solver::{find_point, solve_lp, VertexSolution};
pub use model::{
    standardize, Dataset, GeneralLP, ObservationVector, StandardLP, UncertaintyRepr, UncertaintySet,
};
pub use directions::{compute_dir_basis, CsMilpConfig, DirectionBasis};
pub use milp_solver::{solve_milp, MilpProblem, MilpSolution, MilpStatus};
pub use recovery::{fit_c_hat, noise_threshold_probe, recover_decision, RecoveryResult};
pub use selection::{
    is_sufficient, is_sufficient_unrestricted, monte_carlo_sufficiency_check, select_queries, McOutcome, QueryBasis,
};
