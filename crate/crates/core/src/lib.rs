//! Spacetime-algebra library and simulator for a classical spinning
//! particle whose point-like constituent traces a zitterbewegung helix.
//!
//! The crate is organised around four layers:
//!
//! * [`algebra`] — the real Clifford algebra of Minkowski space
//!   (multivectors, even elements, rotors, bivector exponentials);
//! * [`matrix_rep`] — a faithful 4x4 complex-matrix representation used
//!   as an independent correctness oracle, plus the analytic spinor
//!   evolution of the free particle;
//! * [`dynamics`] — the equations of motion, a fixed-step RK4 integrator,
//!   and the zitterbewegung observables (frequency, mean velocity,
//!   conserved quantities);
//! * [`frenet`] and [`residuals`] — world-line geometry (tetrads, Darboux
//!   bivector, curvatures) and the residual evaluators connecting the
//!   dynamics to the linear spinor field equation.

pub mod algebra;
pub mod dynamics;
pub mod frenet;
pub mod matrix_rep;
pub mod residuals;

pub use algebra::{EvenElement, FourVector, Multivector, Rotor};
