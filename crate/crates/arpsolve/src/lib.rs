//! Solver library for two-stage adjustable robust convex optimization with
//! ball uncertainty and SOS-convex polynomial constraints.
//!
//! The robust problem is reformulated as an unconstrained convex composite
//! model (linear matrix inequalities obtained from an inhomogeneous S-lemma)
//! and solved by a primal-dual proximal splitting iteration whose dual steps
//! are projections: closed-form for boxes and shifted PSD cones, and
//! SDP-based for sets cut out by convex quadratic or SOS-convex polynomial
//! inequalities.
//!
//! Module map:
//! - [`linalg`]: dense symmetric matrix algebra, PSD projection, operator
//!   norm estimation.
//! - [`polycore`]: multivariate polynomials, monomial bases, moment
//!   matrices, SOS-convexity certification.
//! - [`conicif`]: uniform interface to the conic (SDP) backend.
//! - [`projections`]: projection operators onto boxes, shifted PSD cones,
//!   quadratic sets, and SOS-convex sets, plus brute-force oracles.
//! - [`reformulator`]: the adjustable robust problem data model and its
//!   composite reformulation (offsets, the structured linear operator and
//!   its adjoint).
//! - [`pdps`]: the primal-dual proximal splitting engine.
//! - [`lotsizing`]: lot-sizing instance generator, nominal benchmark, and
//!   experiment drivers.

// Link the system BLAS/LAPACK used by the conic backend's PSD cone support.
extern crate openblas_src;

pub mod conicif;
pub mod linalg;
pub mod lotsizing;
pub mod pdps;
pub mod polycore;
pub mod projections;
pub mod reformulator;

pub use conicif::{SdpProblem, SdpSolution, SdpStatus};
pub use linalg::{SVec, SymMat};
pub use lotsizing::{ExperimentConfig, LotSizingInstance, RunRecord};
pub use pdps::{PdpsConfig, SolveReport, SolveStatus};
pub use polycore::{MonomialBasis, MultiIndex, Polynomial};
pub use projections::{QuadraticSet, SosConvexSet};
pub use reformulator::{ArpProblem, BallUncertainty, CompositeProblem};
