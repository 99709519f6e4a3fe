//! Weighted Bergman space A²_α(B_N) on the unit ball: the monomial basis,
//! the residue-class splitting of the multi-index lattice, the weighted
//! shifts `M_{z^n}` and `M_z`, the diagonal intertwiners `X_j` / `Y_j`, and
//! the coefficient asymptotics showing those intertwiners are quasi-invertible
//! but not invertible.
//!
//! All Gamma and factorial ratios are carried as natural logarithms
//! ([`LogValue`]); exact big-integer arithmetic ([`ExactRational`]) is used
//! wherever every input is an integer factorial.

pub mod asymptotics;
pub mod bergman;
mod error;
pub mod lattice;
pub mod operators;
pub mod special;

pub use error::{Error, Result};
pub use lattice::{MultiIndex, ResidueClass, ShiftExponent};
pub use special::{ExactRational, LogValue};
pub use bergman::SpaceParams;
