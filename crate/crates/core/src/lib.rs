//! Exact construction of the bridges of the (n−1)-fold integral of Brownian
//! motion, their piecewise-polynomial covariances, and the Green functions of
//! the polyharmonic boundary value problem `v^(2n) = (−1)^n u` on `[0, 1]`
//! with `v^(i)(0) = 0` for `i < n` and `v^(i)(1) = 0` for `i ∈ I`.
//!
//! Every coefficient is an exact rational; floating point appears only in the
//! Monte Carlo validator ([`sim`]).

pub mod bridge;
pub mod error;
pub mod exact;
pub mod green;
pub mod hermite;
pub mod index_sets;
pub mod prediction;
pub mod render;
pub mod sim;

pub use bridge::BridgeModel;
pub use error::{Error, Result};
pub use exact::{BiPoly, PiecewiseBiPoly, RatMatrix, Rational, UniPoly};
pub use green::{BvpReport, GreenFunction, GreenReport};
pub use hermite::{HermiteSpec, LuFactors};
pub use index_sets::{IndexSetI, IndexSetJ};
pub use prediction::PredictionModel;
pub use sim::{CovComparison, PathEnsemble, SimConfig};
