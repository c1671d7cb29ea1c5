//! Algorithms and bound machinery for the a priori TSP with independent
//! activation.
//!
//! An instance is a finite (semi-)metric space together with an activation
//! probability for every customer. A single tour over all customers is fixed
//! up front; once the active customers are revealed, the tour is cut short to
//! them and only the shortcut cycle is paid. This crate provides
//!
//! * exact, Monte-Carlo and brute-force evaluation of a priori tours and of
//!   master route solutions ([`eval`]),
//! * TSP subroutines with declared guarantees and the subtour-elimination LP
//!   value ([`tsp`]),
//! * the randomized sampling algorithm, the low-activity enumeration, depot
//!   selection, normalization by customer copies, and the derandomized
//!   master-route algorithm ([`apriori`]),
//! * the two LP families whose optima certify ratio upper bounds, an LP
//!   solver facade, CPLEX-LP export, and exact rational verification of dual
//!   certificates ([`lp`]),
//! * generators and analytic ratio evaluators for the two lower-bound
//!   instance families ([`lowerbound`]).
//!
//! All operations are deterministic; randomized ones take an explicit seed.

pub mod apriori;
pub mod error;
pub mod eval;
pub mod instance;
pub mod lowerbound;
pub mod lp;
pub mod tsp;

pub use error::Error;
pub use eval::{ExpectedCostReport, MasterRouteSolution};
pub use instance::{ActiveSet, Instance, MetricMode, Tour, ValidationReport, Violation};
pub use tsp::{TspKind, TspResult};

/// Convenient result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
