//! Numerical laboratory for macrostates: generalized canonical states,
//! quantum relative entropy, optimal hypothesis tests and the
//! Kawasaki–Gunton projector, together with seeded experiment sweeps that
//! check the entropy inequalities relating them.

pub mod entropy;
pub mod error;
pub mod harness;
pub mod hypotest;
pub mod kg;
pub mod maxent;
pub mod operator;

pub use error::{Error, Result};
