//! Exact laboratory for anchored games and parallel repetition.
//!
//! * [`game`]: k-player games, exact classical value, non-signaling LP value.
//! * [`anchoring`]: the anchoring transform, its value identity and decay curves.
//! * [`repetition`]: parallel repetition and win events on coordinate subsets.
//! * [`depbreak`]: dependency-breaking joint tables and their distributional checks.
//! * [`quantum`]: entangled strategies, seesaw, Φ states, classical-quantum states.
//! * [`harness`]: experiment configuration, decay curves and verification reports.
//!
//! Probability code is generic over [`Prob`]; [`Rational`] gives exact
//! arithmetic and `f64` is used where weights are irrational.

pub mod anchoring;
pub mod depbreak;
pub mod error;
pub mod game;
pub mod harness;
pub mod quantum;
pub mod repetition;
pub mod scalar;

pub use error::{Error, Result};
pub use game::{Distribution, Game, Label};
pub use scalar::{Prob, Rational};

/// Exact probability distribution.
pub type ExactDistribution<L> = Distribution<L, Rational>;
/// Double-precision probability distribution.
pub type FloatDistribution<L> = Distribution<L, f64>;
/// Single-precision probability distribution.
pub type Float32Distribution<L> = Distribution<L, f32>;
