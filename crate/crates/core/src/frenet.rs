//! Tetrad, Darboux-bivector and curvature analysis of world-lines.
//!
//! Two frames travel with the particle and both are implemented:
//!
//! * the rotor frame `e_mu = R g_mu reverse(R)` carried by the spinor's
//!   rotor factor, whose angular-velocity bivector is `2 R_dot reverse(R)`;
//! * the curve frame built from the world-line derivatives by Minkowski
//!   Gram-Schmidt, with curvatures extracted so the frame evolution
//!   system holds with unit timelike leg and `-1` spacelike legs.
//!
//! The two frames share the timelike leg on solutions but are not assumed
//! identical; [`compare_tetrads`] reports their deviation. Curve
//! derivatives come from repeated application of the equations of motion,
//! not from differencing trajectories, so curvature estimates carry no
//! differentiation noise.

use crate::algebra::{AlgebraError, EvenElement, FourVector, Multivector, METRIC};
use crate::dynamics::{
    eom_derivatives, hamiltonian, kinetic_momentum, spin_bivector, velocity, FieldKind, FieldSpec,
    ParticleState,
};

/// Failures of the geometric layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrenetError {
    #[error("degenerate spinor: no rotor factor")]
    DegenerateSpinor,
    #[error("duality angle {beta:e} too large for rotor extraction")]
    DualityAngle { beta: f64 },
    #[error("velocity is not timelike: v.v = {v_sq:e}")]
    NonTimelikeVelocity { v_sq: f64 },
    #[error("internal field requires a non-zero charge")]
    ZeroCharge,
    #[error("analytic curve derivatives support free and uniform fields only")]
    UnsupportedField,
}

impl From<AlgebraError> for FrenetError {
    fn from(_: AlgebraError) -> Self {
        FrenetError::DegenerateSpinor
    }
}

/// Orthonormal frame along the world-line; `legs[0]` timelike and
/// future-pointing, the rest spacelike.
#[derive(Clone, Copy, Debug)]
pub struct Tetrad {
    pub legs: [FourVector; 4],
}

impl Tetrad {
    /// Index-raised leg `e^mu = eta^{mu mu} e_mu` (frame index).
    pub fn raised(&self, mu: usize) -> FourVector {
        self.legs[mu].scaled(METRIC[mu])
    }

    /// Largest deviation of `e_mu . e_nu` from the metric.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for mu in 0..4 {
            for nu in 0..4 {
                let target = if mu == nu { METRIC[mu] } else { 0.0 };
                worst = worst.max((self.legs[mu].dot(&self.legs[nu]) - target).abs());
            }
        }
        worst
    }
}

/// Curvatures of the curve frame; `rank` counts the genuinely determined
/// legs (a straight line has rank 1), curvatures beyond the rank are zero
/// and the remaining legs are an orthonormal completion.
#[derive(Clone, Copy, Debug)]
pub struct CurvatureSet {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub rank: usize,
}

fn rotor_even(psi: &EvenElement) -> Result<EvenElement, FrenetError> {
    let polar = psi.polar()?;
    if polar.beta.abs() > 1e-9 {
        return Err(FrenetError::DualityAngle { beta: polar.beta });
    }
    Ok(*polar.rotor.even())
}

/// Rotor frame `e_mu = R g_mu reverse(R)` of a duality-free spinor.
pub fn rotor_tetrad(psi: &EvenElement) -> Result<Tetrad, FrenetError> {
    let r = rotor_even(psi)?;
    let mut legs = [FourVector::zero(); 4];
    for (mu, leg) in legs.iter_mut().enumerate() {
        *leg = FourVector::from_mv(&r.sandwich(&Multivector::basis_vector(mu)));
    }
    Ok(Tetrad { legs })
}

/// Density-weighted frame `rho e_mu = psi g_mu reverse(psi)`.
pub fn density_tetrad(psi: &EvenElement) -> [FourVector; 4] {
    let mut legs = [FourVector::zero(); 4];
    for (mu, leg) in legs.iter_mut().enumerate() {
        *leg = FourVector::from_mv(&psi.sandwich(&Multivector::basis_vector(mu)));
    }
    legs
}

/// Rotor derivative `R_dot = (psi_dot - (rho_dot / 2 rho) psi) / sqrt(rho)`
/// for a duality-free spinor with density `rho`.
pub fn rotor_derivative_from(
    psi: &EvenElement,
    psi_dot: &EvenElement,
) -> Result<EvenElement, FrenetError> {
    let (s, p) = psi.spinor_norm();
    if s <= 1e-12 * psi.norm_sq() || s <= 0.0 {
        return Err(FrenetError::DegenerateSpinor);
    }
    if p.abs() > 1e-9 * s {
        return Err(FrenetError::DualityAngle { beta: p.atan2(s) });
    }
    let rho = s;
    let rho_dot = 2.0 * (psi_dot.mv() * psi.reverse().mv()).scalar_part();
    Ok((*psi_dot - psi.scaled(rho_dot / (2.0 * rho))).scaled(1.0 / rho.sqrt()))
}

/// Rotor derivative along the equations of motion.
pub fn rotor_derivative(s: &ParticleState, f: &FieldSpec) -> Result<EvenElement, FrenetError> {
    let d = eom_derivatives(s, f);
    rotor_derivative_from(&s.psi, &d.psi_dot)
}

/// Angular-velocity bivector `Omega = 2 R_dot reverse(R)`; the scalar and
/// pseudoscalar residues vanish to round-off because `R reverse(R) = 1`.
pub fn angular_velocity_from(
    psi: &EvenElement,
    psi_dot: &EvenElement,
) -> Result<Multivector, FrenetError> {
    let r = rotor_even(psi)?;
    let r_dot = rotor_derivative_from(psi, psi_dot)?;
    let full = (r_dot * r.reverse()).mv().scaled(2.0);
    let residue = (full - full.grade(2)).coeff_norm();
    assert!(
        residue <= 1e-10 * full.coeff_norm().max(1.0),
        "angular velocity has non-bivector residue {residue:e}"
    );
    Ok(full.grade(2))
}

pub fn angular_velocity(s: &ParticleState, f: &FieldSpec) -> Result<Multivector, FrenetError> {
    let d = eom_derivatives(s, f);
    angular_velocity_from(&s.psi, &d.psi_dot)
}

/// Leg derivatives `e_mu_dot = R_dot g_mu reverse(R) + R g_mu reverse(R_dot)`.
pub fn tetrad_derivative(
    s: &ParticleState,
    f: &FieldSpec,
) -> Result<[FourVector; 4], FrenetError> {
    let d = eom_derivatives(s, f);
    let r = rotor_even(&s.psi)?;
    let r_dot = rotor_derivative_from(&s.psi, &d.psi_dot)?;
    let mut out = [FourVector::zero(); 4];
    for (mu, slot) in out.iter_mut().enumerate() {
        let g = Multivector::basis_vector(mu);
        let mv = r_dot.mv() * g * r.reverse().mv() + r.mv() * g * r_dot.reverse().mv();
        *slot = FourVector::from_mv(&mv);
    }
    Ok(out)
}

/// Darboux bivector `Omega = (1/2) sum_mu e_mu_dot ^ e^mu`.
pub fn darboux_bivector(tetrad_dot: &[FourVector; 4], tetrad: &Tetrad) -> Multivector {
    let mut omega = Multivector::zero();
    for mu in 0..4 {
        omega += tetrad_dot[mu].mv().wedge(&tetrad.raised(mu).mv());
    }
    omega.scaled(0.5)
}

/// Internal field bivector `(m / 2e) sum_mu e_mu_dot ^ e^mu`, the uniform
/// field that would drive the frame's rotation through the force law.
pub fn internal_field(
    tetrad_dot: &[FourVector; 4],
    tetrad: &Tetrad,
    mass: f64,
    charge: f64,
) -> Result<Multivector, FrenetError> {
    if charge == 0.0 {
        return Err(FrenetError::ZeroCharge);
    }
    // (m/2e) sum = (m/e) * Omega since Omega already carries the 1/2
    Ok(darboux_bivector(tetrad_dot, tetrad).scaled(mass / charge))
}

/// World-line derivatives up to fourth order.
#[derive(Clone, Copy, Debug)]
pub struct CurveDerivatives {
    pub d1: FourVector,
    pub d2: FourVector,
    pub d3: FourVector,
    pub d4: FourVector,
}

/// Analytic derivatives of `x(tau)` by repeated application of the
/// equations of motion (free or uniform field; potentials would need
/// field gradients along the chain).
pub fn curve_derivatives(
    s: &ParticleState,
    f: &FieldSpec,
) -> Result<CurveDerivatives, FrenetError> {
    let field = match &f.kind {
        FieldKind::Free => Multivector::zero(),
        FieldKind::ConstantBivector(b) => *b,
        FieldKind::Potential(_) => return Err(FrenetError::UnsupportedField),
    };
    let e = f.charge;
    let right = Multivector::basis_vector(0)
        * Multivector::basis_vector(2)
        * Multivector::basis_vector(1);
    let g0 = Multivector::basis_vector(0);

    let psi = s.psi.mv();
    let pi = kinetic_momentum(s, f).mv();

    let psi1 = -(pi * psi * right);
    let d1 = velocity(&s.psi);

    let d2_mv = psi1 * g0 * psi.reverse() + psi * g0 * psi1.reverse();
    let d2 = FourVector::from_mv(&d2_mv);

    let pi1 = field.dot(&d1.mv()).scaled(e);
    let psi2 = -((pi1 * psi + pi * psi1) * right);
    let d3_mv = psi2 * g0 * psi.reverse()
        + (psi1 * g0 * psi1.reverse()).scaled(2.0)
        + psi * g0 * psi2.reverse();
    let d3 = FourVector::from_mv(&d3_mv);

    let pi2 = field.dot(&d2.mv()).scaled(e);
    let psi3 = -((pi2 * psi + (pi1 * psi1).scaled(2.0) + pi * psi2) * right);
    let d4_mv = psi3 * g0 * psi.reverse()
        + (psi2 * g0 * psi1.reverse()).scaled(3.0)
        + (psi1 * g0 * psi2.reverse()).scaled(3.0)
        + psi * g0 * psi3.reverse();
    let d4 = FourVector::from_mv(&d4_mv);

    Ok(CurveDerivatives { d1, d2, d3, d4 })
}

fn euclid_norm(v: &FourVector) -> f64 {
    v.0.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Remove the components of `v` along the orthonormal legs collected so
/// far (`e.e = +1` for the timelike leg, `-1` otherwise).
fn reject(v: FourVector, legs: &[FourVector]) -> FourVector {
    let mut out = v;
    for e in legs {
        let coeff = out.dot(e) / e.dot(e);
        out = out - e.scaled(coeff);
    }
    out
}

/// Orthonormal extension of a partial frame, spacelike legs only, with
/// the final leg flipped toward positive orientation.
fn complete_frame(mut legs: Vec<FourVector>) -> [FourVector; 4] {
    let candidates = [
        FourVector::basis(1),
        FourVector::basis(2),
        FourVector::basis(3),
        FourVector::basis(0),
    ];
    let completed_from = legs.len();
    for cand in candidates {
        if legs.len() == 4 {
            break;
        }
        let u = reject(cand, &legs);
        let nsq = -u.norm_sq();
        if nsq > 1e-6 {
            legs.push(u.scaled(1.0 / nsq.sqrt()));
        }
    }
    assert_eq!(legs.len(), 4, "frame completion failed");
    if completed_from < 4 {
        let orientation = legs[0]
            .mv()
            .wedge(&legs[1].mv())
            .wedge(&legs[2].mv())
            .wedge(&legs[3].mv())
            .pseudoscalar_part();
        if orientation < 0.0 {
            let last = legs[3];
            legs[3] = -last;
        }
    }
    [legs[0], legs[1], legs[2], legs[3]]
}

/// Minkowski Gram-Schmidt frame with curvatures. The curvatures are
/// parameter-invariant (`K_i = n_i / (n_{i-1} n_0)` over the rejected
/// lengths), signs fixed so the frame evolution system holds with
/// `K1 >= 0`; degenerate directions produce a lower rank with zeroed
/// curvatures and an orthonormal completion.
pub fn frenet_frame_from_curve(
    cd: &CurveDerivatives,
) -> Result<(Tetrad, CurvatureSet), FrenetError> {
    let v_sq = cd.d1.norm_sq();
    if v_sq <= 1e-12 * euclid_norm(&cd.d1).powi(2) {
        return Err(FrenetError::NonTimelikeVelocity { v_sq });
    }
    let w = v_sq.sqrt();
    let mut e0 = cd.d1.scaled(1.0 / w);
    if e0.0[0] < 0.0 {
        e0 = -e0;
    }

    let degenerate = |nsq: f64, source: &FourVector| -> bool {
        nsq.sqrt() <= 1e-10 * euclid_norm(source).max(w)
    };

    let u1 = reject(cd.d2, &[e0]);
    let n1sq = (-u1.norm_sq()).max(0.0);
    if degenerate(n1sq, &cd.d2) {
        let legs = complete_frame(vec![e0]);
        return Ok((
            Tetrad { legs },
            CurvatureSet {
                k1: 0.0,
                k2: 0.0,
                k3: 0.0,
                rank: 1,
            },
        ));
    }
    let n1 = n1sq.sqrt();
    let e1 = u1.scaled(-1.0 / n1);
    let k1 = n1 / (w * w);

    let u2 = reject(cd.d3, &[e0, e1]);
    let n2sq = (-u2.norm_sq()).max(0.0);
    if degenerate(n2sq, &cd.d3) {
        let legs = complete_frame(vec![e0, e1]);
        return Ok((
            Tetrad { legs },
            CurvatureSet {
                k1,
                k2: 0.0,
                k3: 0.0,
                rank: 2,
            },
        ));
    }
    let n2 = n2sq.sqrt();
    let e2 = u2.scaled(1.0 / n2);
    let k2 = n2 / (n1 * w);

    let u3 = reject(cd.d4, &[e0, e1, e2]);
    let n3sq = (-u3.norm_sq()).max(0.0);
    if degenerate(n3sq, &cd.d4) {
        let legs = complete_frame(vec![e0, e1, e2]);
        return Ok((
            Tetrad { legs },
            CurvatureSet {
                k1,
                k2,
                k3: 0.0,
                rank: 3,
            },
        ));
    }
    let n3 = n3sq.sqrt();
    // leg signs alternate (-u1, +u2, -u3) so the evolution system holds
    // with non-negative curvatures
    let e3 = u3.scaled(-1.0 / n3);
    let k3 = n3 / (n2 * w);

    Ok((
        Tetrad {
            legs: [e0, e1, e2, e3],
        },
        CurvatureSet {
            k1,
            k2,
            k3,
            rank: 4,
        },
    ))
}

/// Scalar invariant `Omega . Omega` of a bivector.
pub fn curvature_invariant(omega: &Multivector) -> f64 {
    omega.scalar_dot(omega)
}

/// Darboux bivector reconstructed from the curvature decomposition
/// `K1 e^1 e^0 + K2 e^2 e^1 + K3 e^3 e^2`.
pub fn darboux_from_curvatures(tetrad: &Tetrad, k: &CurvatureSet) -> Multivector {
    (tetrad.raised(1).mv() * tetrad.raised(0).mv()).scaled(k.k1)
        + (tetrad.raised(2).mv() * tetrad.raised(1).mv()).scaled(k.k2)
        + (tetrad.raised(3).mv() * tetrad.raised(2).mv()).scaled(k.k3)
}

/// Residual of the frame evolution system, `frame_dot` given in the
/// trajectory parameter and converted to arc length by the speed `w`:
/// `e0' = K1 e^1; e1' = -K1 e^0 + K2 e^2; e2' = -K2 e^1 + K3 e^3;
/// e3' = -K3 e^2`.
pub fn frenet_system_residual(
    frame_dot: &[FourVector; 4],
    tetrad: &Tetrad,
    k: &CurvatureSet,
    w: f64,
) -> f64 {
    let rhs = [
        tetrad.raised(1).scaled(k.k1),
        tetrad.raised(0).scaled(-k.k1) + tetrad.raised(2).scaled(k.k2),
        tetrad.raised(1).scaled(-k.k2) + tetrad.raised(3).scaled(k.k3),
        tetrad.raised(2).scaled(-k.k3),
    ];
    let mut worst = 0.0_f64;
    for mu in 0..4 {
        worst = worst.max((frame_dot[mu].scaled(1.0 / w) - rhs[mu]).max_abs());
    }
    worst
}

/// The two mass scalars: `p . v` and `Omega . S`. They coincide on free
/// duality-free solutions and equal the mass when the Hamiltonian is
/// normalised to it; under external fields they are reported without a
/// pass/fail contract.
#[derive(Clone, Copy, Debug)]
pub struct MassRelation {
    pub momentum_velocity: f64,
    pub rotation_spin: f64,
}

pub fn mass_relation(s: &ParticleState, f: &FieldSpec) -> Result<MassRelation, FrenetError> {
    let d = eom_derivatives(s, f);
    let omega = angular_velocity_from(&s.psi, &d.psi_dot)?;
    let spin = spin_bivector(&s.psi);
    Ok(MassRelation {
        momentum_velocity: hamiltonian(s),
        rotation_spin: omega.scalar_dot(&spin),
    })
}

/// Per-leg deviation between two tetrads (report, not a gate: the rotor
/// frame and the curve frame are not assumed to coincide).
pub fn compare_tetrads(a: &Tetrad, b: &Tetrad) -> [f64; 4] {
    let mut out = [0.0; 4];
    for mu in 0..4 {
        out[mu] = (a.legs[mu] - b.legs[mu]).max_abs();
    }
    out
}
