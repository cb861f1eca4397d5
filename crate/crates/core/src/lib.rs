//! Exact graded-dimension series for cohomological Hall algebras of surface
//! groups and quivers: plethystic calculus, free Lie/tensor/symmetric algebra
//! dimension functors, finite-field point counting and the verification
//! checks that compare counting against plethystics.

pub mod arith;
pub mod charvar;
pub mod error;
pub mod ff;
pub mod filtration;
pub mod group;
pub mod lie;
pub mod plethysm;
pub mod poly;
pub mod quiver;
pub mod series;
pub mod verify;

pub use error::{CheckError, CountError, QuiverError, SeriesError};
pub use series::{GradedSeries, HalfInt, RatSeries, TruncationPolicy};
