//! Exact-semantics arithmetic kernel for the real spacetime algebra with
//! signature (+,-,-,-).
//!
//! All values are immutable plain data and every operation is a pure
//! function, so everything here is safe to share across threads.

mod even;
mod multivector;
mod vector;

pub use even::{EvenElement, Rotor, SpinorPolar, EVEN_BLADES};
pub use multivector::{
    blade_grade, blade_name, Multivector, ParseMultivectorError, BLADE_COUNT, METRIC,
};
pub use vector::FourVector;

/// Failures of the algebra kernel.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgebraError {
    /// Exponential series failed to converge inside the iteration cap;
    /// signals a pathological input magnitude.
    #[error("exponential series did not converge")]
    ExpDiverged,
    /// `psi * reverse(psi)` is numerically zero: a light-like spinor with
    /// no inverse.
    #[error("degenerate (light-like) spinor")]
    DegenerateSpinor,
    /// A rotor generator must be a pure bivector.
    #[error("generator is not a bivector")]
    NotABivector,
}

/// Metric component `eta_{mu nu}` (diagonal).
pub fn eta(mu: usize, nu: usize) -> f64 {
    if mu == nu {
        METRIC[mu]
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_is_diagonal() {
        assert_eq!(eta(0, 0), 1.0);
        assert_eq!(eta(2, 2), -1.0);
        assert_eq!(eta(0, 3), 0.0);
    }
}
