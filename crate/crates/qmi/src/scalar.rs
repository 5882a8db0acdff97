//! Scalar abstraction: all core math is generic over the real float type.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps};

/// Real scalar type underlying states, gates and entropies.
///
/// Implemented for `f32` and `f64`. The tolerance constants encode how
/// tightly physical invariants (unit norm, hermiticity, unitarity) can be
/// expected to hold at each precision; the `f64` values are the ones the
/// test suites pin.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssignOps
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Entrywise tolerance for norm, hermiticity and trace checks.
    const DEFAULT_TOL: Self;
    /// Entrywise tolerance for unitarity checks (`U†U = I`).
    const UNITARY_TOL: Self;
    /// Off-diagonal Frobenius-norm threshold at which the Jacobi
    /// eigensolver declares convergence.
    const EIGEN_OFF_TOL: Self;
    /// Eigenvalues at or below this cutoff contribute zero entropy.
    const ENTROPY_CUTOFF: Self;
}

impl Real for f64 {
    const DEFAULT_TOL: Self = 1e-9;
    const UNITARY_TOL: Self = 1e-8;
    const EIGEN_OFF_TOL: Self = 1e-12;
    const ENTROPY_CUTOFF: Self = 1e-12;
}

impl Real for f32 {
    const DEFAULT_TOL: Self = 1e-4;
    const UNITARY_TOL: Self = 1e-3;
    const EIGEN_OFF_TOL: Self = 1e-6;
    const ENTROPY_CUTOFF: Self = 1e-7;
}

/// Convert an `f64` constant into the working scalar type.
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable in scalar type")
}
