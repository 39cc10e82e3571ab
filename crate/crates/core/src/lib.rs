//! Simulation of a quantum network with feedback to an earlier time.
//!
//! Two couplers with transmission `alpha` and reflection `-i beta` join a
//! forward channel `G1`, an alternate channel `G2`, and a backward
//! propagator `M` that feeds amplitude from the late time back to the early
//! one. [`FeedbackNetwork::solve_closed_form`] resolves the loop exactly;
//! [`oracle::solve_by_iteration`] sums the loop traversals one by one and
//! serves as an independent check.

pub mod algebra;
pub mod error;
pub mod network;
pub mod oracle;
pub mod scenarios;

pub use algebra::{couple, ComplexScalar, Inversion, InversionOptions, Operator, SplitterParams, StateVector, MAX_DIM};
pub use error::{Error, Result};
pub use network::{FeedbackNetwork, NetworkSolution};
pub use oracle::{loop_map, relative_difference, solve_by_iteration, IterationOptions, IterationReport, LoopMap, LoopUnrolling};
pub use scenarios::{GrandfatherParams, PhaseScanResult, ScanPoint, SpecialCase};

pub use num_complex::Complex64;
