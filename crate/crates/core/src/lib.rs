//! Numerical laboratory for mean-field minimum matching and TSP in
//! pseudo-dimension one.
//!
//! * [`cavity`]: order-parameter equations, ground-state constants and the
//!   finite-penalty TSP constant.
//! * [`diluted`]: closed-form theory of the diluted matching problem.
//! * [`recursion`]: deterministic grid iteration of the distributional
//!   recursions with their convergence diagnostics.
//! * [`popdyn`]: population dynamics on the Poisson weighted infinite tree.
//! * [`oracle`]: exact solvers on small random complete graphs.
//! * [`export`]: CSV and JSON writers shared by the CLI and bindings.

pub mod cavity;
pub mod diluted;
pub mod error;
pub mod export;
pub mod kernel;
pub mod oracle;
pub mod popdyn;
pub mod quad;
pub mod recursion;
pub mod rng;
pub mod roots;

pub use cavity::{
    curve_area, domain_length, fixed_point_g0, ground_state_energy, lambda_map, solve_order_parameter,
    tsp_constant_from_lambda, verify_consistency, OrderParameterCurve, TspConstant,
};
pub use diluted::DilutedMatchingModel;
pub use error::{Error, Result};
pub use kernel::Kernel;
pub use oracle::{SolutionRecord, WeightedCompleteGraph};
pub use popdyn::Population;
pub use recursion::{GridDistribution, IterationTrace, Mode};
