//! Residual evaluators connecting the particle dynamics to the spinor
//! field equations.
//!
//! Four evaluators are exposed, all local to a stream-line sample (the
//! field equation is never discretised over spacetime; along a world-line
//! the directional derivative `v . grad` is the proper-time derivative):
//!
//! * [`nonlinear_residual`] — the stream-line equation
//!   `psi_dot g1 g2 + pi psi g0`; zero on any state/derivative pair that
//!   satisfies the equations of motion.
//! * [`free_nonlinear_residual`] — the free form written through the
//!   inverse spinor, `psi_dot g1 g2 + m (psi^-1 v rev(psi)^-1) psi g0`;
//!   zero on free rest-frame solutions.
//! * [`momentum_linearized_residual`] — the momentum-averaged form
//!   restricted to the center-of-mass line, where replacing the velocity
//!   by its oscillation mean `p/m` turns the directional derivative back
//!   into d/dtau: `psi_dot g1 g2 + p psi g0`.
//! * [`linear_form_residual`] — the instantaneous linear-equation check:
//!   deviation from the rest-frame plane-wave evolution law wrapped in
//!   the Dirac operator form, `g0 (psi_dot + m psi g2 g1) g1 g2`. Zero
//!   exactly on plane waves; nonzero on helical solutions, which solve
//!   the nonlinear, not the linear, equation pointwise.

use crate::algebra::{AlgebraError, EvenElement, FourVector, Multivector};
use crate::dynamics::{
    eom_derivatives, kinetic_momentum, velocity, zbw_average, DynamicsError, FieldSpec,
    ParticleState, Trajectory,
};

/// Failures of the residual layer.
#[derive(Debug, Clone, thiserror::Error)]
pub enum ResidualError {
    #[error("degenerate spinor: inverse does not exist")]
    DegenerateSpinor,
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

impl From<AlgebraError> for ResidualError {
    fn from(_: AlgebraError) -> Self {
        ResidualError::DegenerateSpinor
    }
}

/// Which equation a report refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualTag {
    /// Stream-line form of the nonlinear equation.
    StreamlineNonlinear,
    /// Free nonlinear form through the inverse spinor.
    FreeNonlinear,
    /// Momentum-averaged form on the center-of-mass line.
    MomentumLinearized,
    /// Instantaneous linear (plane-wave) form.
    LinearDirac,
}

/// Per-sample residual norms with max and RMS summaries.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub tag: ResidualTag,
    pub per_sample: Vec<f64>,
    pub max: f64,
    pub rms: f64,
}

impl ResidualReport {
    pub fn new(tag: ResidualTag, per_sample: Vec<f64>) -> Self {
        assert!(!per_sample.is_empty(), "empty residual series");
        let max = per_sample.iter().fold(0.0_f64, |a, &b| a.max(b));
        let rms =
            (per_sample.iter().map(|r| r * r).sum::<f64>() / per_sample.len() as f64).sqrt();
        ResidualReport {
            tag,
            per_sample,
            max,
            rms,
        }
    }
}

fn g1g2() -> Multivector {
    Multivector::basis_vector(1) * Multivector::basis_vector(2)
}

fn g2g1() -> Multivector {
    Multivector::basis_vector(2) * Multivector::basis_vector(1)
}

fn g0() -> Multivector {
    Multivector::basis_vector(0)
}

/// Stream-line residual `psi_dot g1 g2 + pi psi g0`. Zero by construction
/// when `psi_dot` comes from the equations of motion; perturbing the state
/// while keeping the derivative exposes the defect.
pub fn nonlinear_residual(
    s: &ParticleState,
    psi_dot: &EvenElement,
    f: &FieldSpec,
) -> Multivector {
    psi_dot.mv() * g1g2() + kinetic_momentum(s, f).mv() * s.psi.mv() * g0()
}

/// Free nonlinear residual
/// `psi_dot g1 g2 + m (psi^-1 v rev(psi)^-1) psi g0`, with the velocity
/// projector computed literally through the spinor inverse.
pub fn free_nonlinear_residual(
    s: &ParticleState,
    psi_dot: &EvenElement,
    mass: f64,
) -> Result<Multivector, ResidualError> {
    let inv = s.psi.invert()?;
    let v = velocity(&s.psi);
    let projector = inv.mv() * v.mv() * inv.reverse().mv();
    Ok(psi_dot.mv() * g1g2() + projector.scaled(mass) * s.psi.mv() * g0())
}

/// Momentum-averaged residual on the center-of-mass line:
/// `psi_dot g1 g2 + p psi g0`.
pub fn momentum_linearized_residual(
    psi: &EvenElement,
    psi_dot: &EvenElement,
    p: &FourVector,
) -> Multivector {
    psi_dot.mv() * g1g2() + p.mv() * psi.mv() * g0()
}

/// Instantaneous linear-equation residual
/// `g0 (psi_dot + m psi g2 g1) g1 g2`: the deviation of the spinor's
/// proper-time evolution from the rest-frame plane-wave law.
pub fn linear_form_residual(psi: &EvenElement, psi_dot: &EvenElement, mass: f64) -> Multivector {
    g0() * (psi_dot.mv() + psi.mv().scaled(mass) * g2g1()) * g1g2()
}

/// Rest-frame plane wave `psi(x) = psi0 exp(-g2 g1 m (g0 . x))`.
pub fn planewave_spinor(psi0: &EvenElement, mass: f64, x: &FourVector) -> EvenElement {
    let tau = x.0[0]; // g0 . x
    let phase = EvenElement::even_part_of(&g2g1().scaled(-mass * tau))
        .exp()
        .expect("plane-wave phase exponential converges");
    *psi0 * phase
}

/// Residual of the linear spinor equation on the plane-wave family,
/// with the spacetime gradient taken analytically:
/// `grad psi g1 g2 + m psi g0` where `grad psi = -m g0 psi g2 g1`.
pub fn dh_residual_planewave(psi0: &EvenElement, mass: f64, x: &FourVector) -> Multivector {
    let psi = planewave_spinor(psi0, mass, x);
    let grad = (g0() * psi.mv() * g2g1()).scaled(-mass);
    grad * g1g2() + psi.mv().scaled(mass) * g0()
}

/// Pre- and post-linearization residual series over a free trajectory.
#[derive(Clone, Debug)]
pub struct LinearizationReport {
    /// Largest component deviation of the oscillation-averaged velocity
    /// from `p/m` (the replacement the linearization is built on).
    pub mean_velocity_gap: f64,
    /// Free nonlinear residual per sample.
    pub nonlinear: ResidualReport,
    /// Instantaneous linear-form residual per sample.
    pub linearized: ResidualReport,
}

/// Evaluates the linearization chain over a free trajectory: verifies the
/// oscillation mean of the velocity against `p/m`, then reports the free
/// nonlinear residual and the instantaneous linear-form residual at every
/// sample. Plane waves drive both to round-off; helical solutions keep
/// the nonlinear one at round-off while the linear one stays finite.
pub fn linearization_check(t: &Trajectory) -> Result<LinearizationReport, ResidualError> {
    let mean = zbw_average(t)?;
    let m = t.config.mass;
    let drift = mean - t.config.p0.scaled(1.0 / m);
    let f = t.field_spec();

    let mut nl = Vec::with_capacity(t.samples.len());
    let mut lin = Vec::with_capacity(t.samples.len());
    for s in &t.samples {
        let d = eom_derivatives(s, &f);
        nl.push(free_nonlinear_residual(s, &d.psi_dot, m)?.coeff_norm());
        lin.push(linear_form_residual(&s.psi, &d.psi_dot, m).coeff_norm());
    }

    Ok(LinearizationReport {
        mean_velocity_gap: drift.max_abs(),
        nonlinear: ResidualReport::new(ResidualTag::FreeNonlinear, nl),
        linearized: ResidualReport::new(ResidualTag::LinearDirac, lin),
    })
}
