//! State representation and numerical integration of the spinning-particle
//! equations of motion, with zitterbewegung observables and conserved
//! quantities.
//!
//! The dynamical variables are the position `x`, the even spinor `psi`
//! and the momentum `p`, evolving in an invariant parameter `tau`:
//!
//! * `psi_dot = -pi psi g0 g2 g1` (the spinor equation rearranged with
//!   `(g1 g2)^-1 = g2 g1`),
//! * `x_dot = psi g0 reverse(psi)`,
//! * `pi_dot = e F . x_dot` with kinetic momentum `pi = p - e A`.
//!
//! The internal oscillation runs at frequency `2 m`, so one
//! zitterbewegung period is `pi / m`. `tau` is not assumed to be the
//! arc length of `x(tau)`: the velocity magnitude is fixed by the spinor
//! density (`v.v = rho^2` for duality-free spinors).
//!
//! `integrate` is a pure function of the configuration; trajectories are
//! immutable after construction and safe to share across threads.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::algebra::{EvenElement, FourVector, Multivector, METRIC};
use crate::matrix_rep::{gamma_matrix, DiracColumn};

/// Failures of configuration, integration and trajectory analysis.
#[derive(Debug, Clone, thiserror::Error)]
pub enum DynamicsError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("initial momentum off the mass shell: |p.p - m^2| = {off:e} exceeds {tol:e}")]
    OffMassShell { off: f64, tol: f64 },
    #[error("numerical abort at sample {step}: non-finite state")]
    NumericalAbort { step: usize },
    #[error("trajectory too short: need at least {needed} steps, have {available}")]
    SpanTooShort { needed: usize, available: usize },
    #[error("no oscillation detected (amplitude {amplitude:e}); trivial trajectory?")]
    NoOscillation { amplitude: f64 },
    #[error("operation requires a free-field trajectory")]
    RequiresFreeField,
}

/// Phase-space point of the spinning-particle system.
#[derive(Clone, Copy, Debug)]
pub struct ParticleState {
    pub tau: f64,
    pub x: FourVector,
    pub psi: EvenElement,
    pub p: FourVector,
}

/// Electromagnetic environment.
#[derive(Clone)]
pub enum FieldKind {
    Free,
    /// Uniform field bivector `F`.
    ConstantBivector(Multivector),
    /// Four-potential `A(x)`; the field bivector comes from
    /// Richardson-extrapolated central differences (step 1e-5).
    Potential(Arc<dyn Fn(FourVector) -> FourVector + Send + Sync>),
}

impl fmt::Debug for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Free => write!(f, "Free"),
            FieldKind::ConstantBivector(b) => write!(f, "ConstantBivector({b})"),
            FieldKind::Potential(_) => write!(f, "Potential(<fn>)"),
        }
    }
}

impl FieldKind {
    pub fn is_free(&self) -> bool {
        matches!(self, FieldKind::Free)
    }
}

/// Field kind plus coupling charge.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    pub kind: FieldKind,
    pub charge: f64,
}

const FD_STEP: f64 = 1e-5;

impl FieldSpec {
    pub fn free() -> Self {
        FieldSpec {
            kind: FieldKind::Free,
            charge: 0.0,
        }
    }

    pub fn constant(field: Multivector, charge: f64) -> Self {
        FieldSpec {
            kind: FieldKind::ConstantBivector(field.grade(2)),
            charge,
        }
    }

    pub fn potential(
        a: Arc<dyn Fn(FourVector) -> FourVector + Send + Sync>,
        charge: f64,
    ) -> Self {
        FieldSpec {
            kind: FieldKind::Potential(a),
            charge,
        }
    }

    /// Potential `A(x)`; zero for the free and uniform-field kinds.
    pub fn potential_at(&self, x: &FourVector) -> FourVector {
        match &self.kind {
            FieldKind::Potential(a) => a(*x),
            _ => FourVector::zero(),
        }
    }

    /// Field bivector at `x`.
    pub fn field_bivector_at(&self, x: &FourVector) -> Multivector {
        match &self.kind {
            FieldKind::Free => Multivector::zero(),
            FieldKind::ConstantBivector(f) => *f,
            FieldKind::Potential(a) => {
                // F = sum_mu g^mu ^ (d_mu A)
                let mut f = Multivector::zero();
                for mu in 0..4 {
                    let d = richardson_partial(a.as_ref(), x, mu);
                    f += Multivector::basis_vector_upper(mu).wedge(&d.mv());
                }
                f
            }
        }
    }

    /// Partial-derivative matrix `d_mu A^nu` (finite differences).
    fn potential_jacobian(&self, x: &FourVector) -> [[f64; 4]; 4] {
        let mut j = [[0.0; 4]; 4];
        if let FieldKind::Potential(a) = &self.kind {
            for (mu, row) in j.iter_mut().enumerate() {
                let d = richardson_partial(a.as_ref(), x, mu);
                *row = d.0;
            }
        }
        j
    }
}

fn richardson_partial(
    a: &(dyn Fn(FourVector) -> FourVector + Send + Sync),
    x: &FourVector,
    mu: usize,
) -> FourVector {
    let central = |h: f64| -> FourVector {
        let mut xp = *x;
        let mut xm = *x;
        xp.0[mu] += h;
        xm.0[mu] -= h;
        (a(xp) - a(xm)).scaled(0.5 / h)
    };
    let d1 = central(FD_STEP);
    let d2 = central(FD_STEP / 2.0);
    (d2.scaled(4.0) - d1).scaled(1.0 / 3.0)
}

/// Right factor `g0 g2 g1` of the spinor equation of motion.
fn eom_right_factor() -> Multivector {
    Multivector::basis_vector(0) * Multivector::basis_vector(2) * Multivector::basis_vector(1)
}

/// Spin-plane bivector `g2 g1`.
fn spin_plane() -> Multivector {
    Multivector::basis_vector(2) * Multivector::basis_vector(1)
}

/// Derivatives of the three dynamical variables at a state.
#[derive(Clone, Copy, Debug)]
pub struct Derivatives {
    pub psi_dot: EvenElement,
    pub x_dot: FourVector,
    pub p_dot: FourVector,
    /// Odd-grade residue of the spinor derivative before projection;
    /// anything above round-off signals algebra corruption.
    pub odd_residue: f64,
}

/// Kinetic momentum `pi = p - e A(x)`.
pub fn kinetic_momentum(s: &ParticleState, f: &FieldSpec) -> FourVector {
    s.p - f.potential_at(&s.x).scaled(f.charge)
}

/// Equations of motion evaluated at a state.
pub fn eom_derivatives(s: &ParticleState, f: &FieldSpec) -> Derivatives {
    let pi = kinetic_momentum(s, f);
    let psi_dot_mv = -(pi.mv() * s.psi.mv() * eom_right_factor());
    let odd_residue = psi_dot_mv.odd_norm();
    // non-finite states are the integrator's abort path, not corruption
    assert!(
        !odd_residue.is_finite() || odd_residue <= 1e-10 * psi_dot_mv.coeff_norm().max(1.0),
        "odd-grade contamination in spinor derivative: {odd_residue:e}"
    );
    let psi_dot = EvenElement::even_part_of(&psi_dot_mv);
    let x_dot = velocity(&s.psi);

    let p_dot = match &f.kind {
        FieldKind::Free => FourVector::zero(),
        FieldKind::ConstantBivector(field) => {
            FourVector::from_mv(&field.dot(&x_dot.mv())).scaled(f.charge)
        }
        FieldKind::Potential(_) => {
            // p_dot_mu = e (d_mu A_nu) v^nu; raised back to contravariant
            // components. The invariant statement is pi_dot = e F . v.
            let jac = f.potential_jacobian(&s.x);
            let mut lower = [0.0; 4];
            for (mu, l) in lower.iter_mut().enumerate() {
                *l = f.charge
                    * (0..4)
                        .map(|nu| METRIC[nu] * jac[mu][nu] * x_dot.0[nu])
                        .sum::<f64>();
            }
            FourVector([
                METRIC[0] * lower[0],
                METRIC[1] * lower[1],
                METRIC[2] * lower[2],
                METRIC[3] * lower[3],
            ])
        }
    };

    Derivatives {
        psi_dot,
        x_dot,
        p_dot,
        odd_residue,
    }
}

/// Velocity `v = psi g0 reverse(psi)`, a pure vector up to round-off.
pub fn velocity(psi: &EvenElement) -> FourVector {
    let mv = psi.mv() * Multivector::basis_vector(0) * psi.reverse().mv();
    let residue = (mv - mv.grade(1)).coeff_norm();
    assert!(
        !residue.is_finite() || residue <= 1e-12 * mv.coeff_norm().max(1.0),
        "non-vector residue in velocity: {residue:e}"
    );
    FourVector::from_mv(&mv)
}

/// Hamiltonian `H = p . v`; a constant of motion for the free particle.
pub fn hamiltonian(s: &ParticleState) -> f64 {
    s.p.dot(&velocity(&s.psi))
}

/// Spin bivector `psi g2 g1 reverse(psi) / 2`, carrying the spinor
/// density; for a unit spinor this is the rotor-transported spin plane.
pub fn spin_bivector(psi: &EvenElement) -> Multivector {
    (psi.mv() * spin_plane() * psi.reverse().mv())
        .grade(2)
        .scaled(0.5)
}

/// Closed-form free spinor evolution:
/// `psi(tau) = cos(m tau) psi0 - sin(m tau) (p/m) psi0 g0 g2 g1`.
pub fn free_spinor_evolution(
    psi0: &EvenElement,
    p: &FourVector,
    m: f64,
    tau: f64,
) -> EvenElement {
    let shifted =
        EvenElement::even_part_of(&(p.mv().scaled(1.0 / m) * psi0.mv() * eom_right_factor()));
    psi0.scaled((m * tau).cos()) - shifted.scaled((m * tau).sin())
}

/// Antisymmetric spin-tensor components `S_{mu nu}` from the Dirac
/// column: the quarter commutator bilinear `zbar [g_mu, g_nu] z / 4`,
/// oriented so that `S_dot_{mu nu} = pi_mu v_nu - pi_nu v_mu` and
/// `v_dot_mu = 4 S_{mu nu} pi^nu` hold along solutions (this fixes the
/// sign of the complex unit relative to the column correspondence).
pub fn spin_tensor(z: &DiracColumn) -> [[f64; 4]; 4] {
    let mut s = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            if mu == nu {
                continue;
            }
            let comm = gamma_matrix(mu) * gamma_matrix(nu) - gamma_matrix(nu) * gamma_matrix(mu);
            let b = z.bilinear(&comm) * num_complex::Complex64::new(0.0, -0.25);
            debug_assert!(
                b.im.abs() <= 1e-12 * (1.0 + b.re.abs()),
                "spin tensor has imaginary residue {:e}",
                b.im
            );
            s[mu][nu] = b.re;
        }
    }
    s
}

/// Orbital tensor `L_{mu nu} = x_mu p_nu - x_nu p_mu`.
pub fn orbital_tensor(x: &FourVector, p: &FourVector) -> [[f64; 4]; 4] {
    let mut l = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            l[mu][nu] = x.lower(mu) * p.lower(nu) - x.lower(nu) * p.lower(mu);
        }
    }
    l
}

/// Integrator selection; the first-order stepper exists only as a
/// negative control for the convergence harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Integrator {
    Rk4,
    EulerDebug,
}

/// Full simulation configuration.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub mass: f64,
    pub charge: f64,
    pub psi0: EvenElement,
    pub x0: FourVector,
    pub p0: FourVector,
    pub field: FieldKind,
    pub steps_per_period: usize,
    pub periods: f64,
    pub integrator: Integrator,
    pub enforce_mass_shell: bool,
}

impl SimConfig {
    /// Rest-frame configuration whose spinor is a plane rotation: the
    /// particle moves on a straight line and the oscillation vanishes.
    pub fn trivial_demo() -> SimConfig {
        SimConfig {
            mass: 1.0,
            charge: 0.0,
            psi0: EvenElement::one(),
            x0: FourVector::zero(),
            p0: FourVector::new(1.0, 0.0, 0.0, 0.0),
            field: FieldKind::Free,
            steps_per_period: 1000,
            periods: 10.0,
            integrator: Integrator::Rk4,
            enforce_mass_shell: true,
        }
    }

    /// Helical demo: a boosted spinor normalised so that `p . v = m`
    /// exactly (density `1/cosh(alpha)`), giving a visible helix with
    /// transverse velocity amplitude `tanh(alpha)`.
    pub fn helix_demo() -> SimConfig {
        Self::helix_demo_with_mass(1.0)
    }

    pub fn helix_demo_with_mass(mass: f64) -> SimConfig {
        let alpha = 0.5_f64;
        let generator = (Multivector::basis_vector(1) * Multivector::basis_vector(0))
            .scaled(alpha / 2.0);
        let boost = EvenElement::even_part_of(&generator)
            .exp()
            .expect("boost exponential converges");
        let psi0 = boost.scaled((1.0 / alpha.cosh()).sqrt());
        SimConfig {
            mass,
            charge: 0.0,
            psi0,
            x0: FourVector::zero(),
            p0: FourVector::new(mass, 0.0, 0.0, 0.0),
            field: FieldKind::Free,
            steps_per_period: 1000,
            periods: 10.0,
            integrator: Integrator::Rk4,
            enforce_mass_shell: true,
        }
    }

    /// Zitterbewegung period `pi / m` (frequency `2 m`).
    pub fn zbw_period(&self) -> f64 {
        PI / self.mass
    }

    pub fn step_size(&self) -> f64 {
        self.zbw_period() / self.steps_per_period as f64
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(DynamicsError::InvalidConfig(format!(
                "mass must be positive and finite, got {}",
                self.mass
            )));
        }
        if !self.charge.is_finite() {
            return Err(DynamicsError::InvalidConfig("charge must be finite".into()));
        }
        if !(self.psi0.is_finite() && self.x0.is_finite() && self.p0.is_finite()) {
            return Err(DynamicsError::InvalidConfig(
                "initial data must be finite".into(),
            ));
        }
        if self.steps_per_period < 16 {
            return Err(DynamicsError::InvalidConfig(format!(
                "steps_per_period must be at least 16, got {}",
                self.steps_per_period
            )));
        }
        if !(self.periods > 0.0 && self.periods.is_finite()) {
            return Err(DynamicsError::InvalidConfig(format!(
                "periods must be positive, got {}",
                self.periods
            )));
        }
        if self.enforce_mass_shell && self.field.is_free() {
            let off = (self.p0.norm_sq() - self.mass * self.mass).abs();
            let tol = 1e-9 * self.mass * self.mass;
            if off > tol {
                return Err(DynamicsError::OffMassShell { off, tol });
            }
        }
        Ok(())
    }

    pub fn field_spec(&self) -> FieldSpec {
        FieldSpec {
            kind: self.field.clone(),
            charge: self.charge,
        }
    }

    /// Stable content digest of the configuration (hex SHA-256 of a
    /// canonical text rendering). Potential closures hash by kind only.
    pub fn digest(&self) -> String {
        let field = match &self.field {
            FieldKind::Free => "free".to_string(),
            FieldKind::ConstantBivector(f) => format!("constant_F({f})"),
            FieldKind::Potential(_) => "potential_A(<fn>)".to_string(),
        };
        let text = format!(
            "mass={:?};charge={:?};psi0={};x0={};p0={};field={};steps_per_period={};periods={:?};integrator={:?}",
            self.mass,
            self.charge,
            self.psi0,
            self.x0,
            self.p0,
            field,
            self.steps_per_period,
            self.periods,
            self.integrator,
        );
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Ordered, uniform-step samples of a run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub config: SimConfig,
    pub config_digest: String,
    pub step: f64,
    pub samples: Vec<ParticleState>,
}

impl Trajectory {
    pub fn field_spec(&self) -> FieldSpec {
        self.config.field_spec()
    }

    pub fn velocity_at(&self, i: usize) -> FourVector {
        velocity(&self.samples[i].psi)
    }

    pub fn hamiltonian_at(&self, i: usize) -> f64 {
        hamiltonian(&self.samples[i])
    }
}

fn rk4_step(s: &ParticleState, f: &FieldSpec, h: f64) -> ParticleState {
    let k1 = eom_derivatives(s, f);
    let s2 = advance(s, &k1, h / 2.0);
    let k2 = eom_derivatives(&s2, f);
    let s3 = advance(s, &k2, h / 2.0);
    let k3 = eom_derivatives(&s3, f);
    let s4 = advance(s, &k3, h);
    let k4 = eom_derivatives(&s4, f);

    ParticleState {
        tau: s.tau + h,
        x: s.x
            + (k1.x_dot + k2.x_dot.scaled(2.0) + k3.x_dot.scaled(2.0) + k4.x_dot)
                .scaled(h / 6.0),
        psi: s.psi
            + (k1.psi_dot + k2.psi_dot.scaled(2.0) + k3.psi_dot.scaled(2.0) + k4.psi_dot)
                .scaled(h / 6.0),
        p: s.p
            + (k1.p_dot + k2.p_dot.scaled(2.0) + k3.p_dot.scaled(2.0) + k4.p_dot)
                .scaled(h / 6.0),
    }
}

fn euler_step(s: &ParticleState, f: &FieldSpec, h: f64) -> ParticleState {
    let k = eom_derivatives(s, f);
    let mut out = advance(s, &k, h);
    out.tau = s.tau + h;
    out
}

fn advance(s: &ParticleState, d: &Derivatives, h: f64) -> ParticleState {
    ParticleState {
        tau: s.tau + h,
        x: s.x + d.x_dot.scaled(h),
        psi: s.psi + d.psi_dot.scaled(h),
        p: s.p + d.p_dot.scaled(h),
    }
}

fn state_is_finite(s: &ParticleState) -> bool {
    s.tau.is_finite() && s.x.is_finite() && s.psi.is_finite() && s.p.is_finite()
}

/// Fixed-step integration of the equations of motion. Deterministic:
/// identical configurations produce identical trajectories.
pub fn integrate(cfg: &SimConfig) -> Result<Trajectory, DynamicsError> {
    cfg.validate()?;
    let f = cfg.field_spec();
    let h = cfg.step_size();
    let steps = (cfg.periods * cfg.steps_per_period as f64).round().max(1.0) as usize;

    let mut samples = Vec::with_capacity(steps + 1);
    let mut state = ParticleState {
        tau: 0.0,
        x: cfg.x0,
        psi: cfg.psi0,
        p: cfg.p0,
    };
    samples.push(state);

    for step in 1..=steps {
        state = match cfg.integrator {
            Integrator::Rk4 => rk4_step(&state, &f, h),
            Integrator::EulerDebug => euler_step(&state, &f, h),
        };
        // keep tau exact: uniform grid
        state.tau = step as f64 * h;
        if !state_is_finite(&state) {
            return Err(DynamicsError::NumericalAbort { step });
        }
        samples.push(state);
    }

    Ok(Trajectory {
        config_digest: cfg.digest(),
        config: cfg.clone(),
        step: h,
        samples,
    })
}

/// Trapezoidal mean of the velocity over the largest whole number of
/// zitterbewegung periods in the trajectory. Free field only; the
/// contract is `<v> = p / m` once the Hamiltonian is normalised to `m`.
pub fn zbw_average(t: &Trajectory) -> Result<FourVector, DynamicsError> {
    if !t.config.field.is_free() {
        return Err(DynamicsError::RequiresFreeField);
    }
    let per = t.config.steps_per_period;
    let total = t.samples.len().saturating_sub(1);
    let full = total / per;
    if full == 0 {
        return Err(DynamicsError::SpanTooShort {
            needed: per,
            available: total,
        });
    }
    let k = full * per;
    let mut sum = FourVector::zero();
    for i in 0..=k {
        let w = if i == 0 || i == k { 0.5 } else { 1.0 };
        sum = sum + t.velocity_at(i).scaled(w);
    }
    Ok(sum.scaled(1.0 / k as f64))
}

/// Oscillation frequency from zero-crossing spacing of the transverse
/// velocity component with the largest swing, refined by linear
/// interpolation. The contract is `omega = 2 m` on free helical runs.
pub fn zbw_frequency(t: &Trajectory) -> Result<f64, DynamicsError> {
    let n = t.samples.len();
    if n < 3 {
        return Err(DynamicsError::SpanTooShort {
            needed: 3,
            available: n,
        });
    }
    let velocities: Vec<FourVector> = (0..n).map(|i| t.velocity_at(i)).collect();

    let mut best = (0usize, 0.0_f64);
    for comp in 1..4 {
        let lo = velocities.iter().map(|v| v.0[comp]).fold(f64::INFINITY, f64::min);
        let hi = velocities
            .iter()
            .map(|v| v.0[comp])
            .fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > best.1 {
            best = (comp, hi - lo);
        }
    }
    let (comp, swing) = best;
    let amplitude = swing / 2.0;
    if amplitude < 1e-10 {
        return Err(DynamicsError::NoOscillation { amplitude });
    }

    let lo = velocities.iter().map(|v| v.0[comp]).fold(f64::INFINITY, f64::min);
    let mid = lo + amplitude;
    let f: Vec<f64> = velocities.iter().map(|v| v.0[comp] - mid).collect();

    let mut crossings = Vec::new();
    for i in 1..n {
        if f[i - 1] == 0.0 {
            crossings.push(t.samples[i - 1].tau);
        } else if f[i - 1] * f[i] < 0.0 {
            let frac = f[i - 1] / (f[i - 1] - f[i]);
            crossings.push(t.samples[i - 1].tau + frac * t.step);
        }
    }
    if crossings.len() < 2 {
        return Err(DynamicsError::NoOscillation { amplitude });
    }
    let spacing =
        (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64;
    Ok(PI / spacing)
}

/// Scalar Lagrangian
/// `< rev(psi) psi_dot g1 g2 + p (x_dot - psi g0 rev(psi)) + e A psi g0 rev(psi) >_0`.
/// Diagnostic only: on shell the middle term vanishes by construction.
pub fn eval_lagrangian(s: &ParticleState, d: &Derivatives, f: &FieldSpec) -> f64 {
    let g1g2 = Multivector::basis_vector(1) * Multivector::basis_vector(2);
    let current = s.psi.mv() * Multivector::basis_vector(0) * s.psi.reverse().mv();
    let kinetic = (s.psi.reverse().mv() * d.psi_dot.mv() * g1g2).scalar_part();
    let constraint = (s.p.mv() * (d.x_dot.mv() - current)).scalar_part();
    let coupling = f.charge * (f.potential_at(&s.x).mv() * current).scalar_part();
    kinetic + constraint + coupling
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_rep::{analytic_column_evolution, column_to_spinor, spinor_to_column};

    fn g(mu: usize) -> Multivector {
        Multivector::basis_vector(mu)
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn trivial_state(m: f64, tau: f64) -> ParticleState {
        let psi = EvenElement::even_part_of(&(g(2) * g(1)).scaled(-m * tau))
            .exp()
            .unwrap();
        ParticleState {
            tau,
            x: FourVector::new(tau, 0.0, 0.0, 0.0),
            psi,
            p: FourVector::new(m, 0.0, 0.0, 0.0),
        }
    }

    #[test]
    fn trivial_solution_satisfies_eom() {
        let m = 1.0;
        let s = trivial_state(m, 0.37);
        let d = eom_derivatives(&s, &FieldSpec::free());
        // psi_dot = -m g2 g1 psi
        let expected = EvenElement::even_part_of(&((g(2) * g(1)).scaled(-m) * s.psi.mv()));
        assert!((d.psi_dot - expected).coeff_norm() < 1e-14);
        assert!((d.x_dot - FourVector::new(1.0, 0.0, 0.0, 0.0)).max_abs() < 1e-14);
        assert_eq!(d.p_dot, FourVector::zero());
    }

    #[test]
    fn free_momentum_derivative_vanishes() {
        let psi = EvenElement::from_coeffs([0.8, -0.1, 0.3, 1.2, 0.4, -0.7, 0.2, -0.5]);
        let s = ParticleState {
            tau: 0.0,
            x: FourVector::new(0.3, -1.0, 2.0, 0.5),
            psi,
            p: FourVector::new(1.5, 0.2, -0.4, 0.1),
        };
        let d = eom_derivatives(&s, &FieldSpec::free());
        assert_eq!(d.p_dot, FourVector::zero());
    }

    #[test]
    fn constant_field_momentum_follows_lorentz_form() {
        let field = (g(1) * g(0)).scaled(0.3) + (g(2) * g(3)).scaled(-0.8);
        let e = -1.0;
        let spec = FieldSpec::constant(field, e);
        let s = trivial_state(1.0, 0.0);
        let d = eom_derivatives(&s, &spec);
        let expected = FourVector::from_mv(&field.dot(&d.x_dot.mv())).scaled(e);
        assert!((d.p_dot - expected).max_abs() < 1e-15);
    }

    #[test]
    fn potential_field_matches_constant_field() {
        // A = -(1/2) F . x reproduces a uniform F through the
        // finite-difference route.
        let field = (g(1) * g(0)).scaled(0.4) + (g(1) * g(2)).scaled(0.7);
        let a = Arc::new(move |x: FourVector| {
            FourVector::from_mv(&field.dot(&x.mv())).scaled(-0.5)
        });
        let spec = FieldSpec::potential(a, 2.0);
        let x = FourVector::new(0.3, -0.2, 0.9, 1.4);
        let fd = spec.field_bivector_at(&x);
        assert!((fd - field).coeff_norm() < 1e-9);

        // pi_dot = e F . v holds for the potential route.
        let s = ParticleState {
            tau: 0.0,
            x,
            psi: EvenElement::from_coeffs([1.0, 0.2, -0.3, 0.5, 0.0, 0.1, -0.2, 0.4]),
            p: FourVector::new(1.2, 0.1, 0.0, -0.3),
        };
        let d = eom_derivatives(&s, &spec);
        // pi_dot = p_dot - e d(A)/dtau = p_dot - e (v.dA) chain
        let jac = spec.potential_jacobian(&s.x);
        let mut a_dot = [0.0; 4];
        for nu in 0..4 {
            a_dot[nu] = (0..4).map(|mu| d.x_dot.0[mu] * jac[mu][nu]).sum();
        }
        let pi_dot = d.p_dot - FourVector(a_dot).scaled(spec.charge);
        let lorentz = FourVector::from_mv(&fd.dot(&d.x_dot.mv())).scaled(spec.charge);
        assert!((pi_dot - lorentz).max_abs() < 1e-8);
    }

    #[test]
    fn velocity_examples() {
        assert!((velocity(&EvenElement::one()) - FourVector::basis(0)).max_abs() < 1e-15);

        let alpha = 0.5_f64;
        let boost = EvenElement::even_part_of(&(g(1) * g(0)).scaled(alpha / 2.0))
            .exp()
            .unwrap();
        let v = velocity(&boost);
        assert_close(v.0[0], alpha.cosh(), 1e-14);
        assert_close(v.0[1].abs(), alpha.sinh().abs(), 1e-14);
        assert_close(v.0[2], 0.0, 1e-14);
        assert_close(v.0[3], 0.0, 1e-14);
    }

    #[test]
    fn velocity_matches_matrix_current() {
        let psi = EvenElement::from_coeffs([0.9, -0.4, 0.2, 1.3, -0.2, 0.6, -0.8, 0.15]);
        let v = velocity(&psi);
        let z = spinor_to_column(&psi);
        let v_bz = z.vector_current();
        assert!((v - v_bz).max_abs() < 1e-12);
    }

    #[test]
    fn velocity_square_is_density_squared() {
        let psi = EvenElement::from_coeffs([0.7, 0.2, -0.5, 0.9, 0.1, -0.3, 0.4, 0.0]);
        // project out the duality content so psi*rev(psi) is a scalar
        let polar = psi.polar().unwrap();
        let pure = polar.rotor.even().scaled(polar.rho.sqrt());
        let v = velocity(&pure);
        let rho = pure.spinor_norm().0;
        assert_close(v.norm_sq(), rho * rho, 1e-12);
    }

    #[test]
    fn hamiltonian_examples() {
        let m = 1.0;
        let s = trivial_state(m, 1.1);
        assert_close(hamiltonian(&s), m, 1e-13);

        // quadratic scaling in the spinor
        let lambda = 1.7;
        let scaled = ParticleState {
            psi: s.psi.scaled(lambda),
            ..s
        };
        assert_close(hamiltonian(&scaled), lambda * lambda * m, 1e-12);
    }

    #[test]
    fn helix_demo_is_mass_normalised() {
        let cfg = SimConfig::helix_demo();
        let s = ParticleState {
            tau: 0.0,
            x: cfg.x0,
            psi: cfg.psi0,
            p: cfg.p0,
        };
        assert_close(hamiltonian(&s), cfg.mass, 1e-14);
        // transverse velocity amplitude tanh(alpha)
        let v = velocity(&cfg.psi0);
        assert_close(v.0[0], 1.0, 1e-14);
        assert_close(v.0[1].abs(), 0.5_f64.tanh(), 1e-14);
    }

    #[test]
    fn spin_bivector_examples() {
        let expected = (g(2) * g(1)).scaled(0.5);
        assert!((spin_bivector(&EvenElement::one()) - expected).coeff_norm() < 1e-15);

        // rotational invariance: S^2 = -1/4 for any unit rotor
        let rotor = crate::algebra::Rotor::from_generator(
            &((g(1) * g(2)).scaled(0.4) + (g(0) * g(3)).scaled(0.7)),
        )
        .unwrap();
        let s = spin_bivector(rotor.even());
        assert_close((s * s).scalar_part(), -0.25, 1e-12);

        // trivial solution keeps S constant
        let st = trivial_state(1.0, 0.9);
        assert!((spin_bivector(&st.psi) - expected).coeff_norm() < 1e-13);
    }

    #[test]
    fn spin_tensor_evolution_identities() {
        // S_dot_{mu nu} = pi_mu v_nu - pi_nu v_mu and
        // v_dot_mu = 4 S_{mu nu} pi^nu along the helical solution.
        let cfg = SimConfig::helix_demo();
        let tau = 0.6;
        let eps = 1e-6;
        let state = |t: f64| ParticleState {
            tau: t,
            x: FourVector::zero(),
            psi: free_spinor_evolution(&cfg.psi0, &cfg.p0, cfg.mass, t),
            p: cfg.p0,
        };
        let sten = |t: f64| spin_tensor(&spinor_to_column(&state(t).psi));
        let sp = sten(tau + eps);
        let sm = sten(tau - eps);
        let v = velocity(&state(tau).psi);
        let vdot = {
            let vp = velocity(&state(tau + eps).psi);
            let vm = velocity(&state(tau - eps).psi);
            (vp - vm).scaled(0.5 / eps)
        };
        let pi = cfg.p0;
        let s_now = sten(tau);
        for mu in 0..4 {
            for nu in 0..4 {
                let sdot = (sp[mu][nu] - sm[mu][nu]) / (2.0 * eps);
                let rhs = pi.lower(mu) * v.lower(nu) - pi.lower(nu) * v.lower(mu);
                assert_close(sdot, rhs, 1e-8);
            }
            let rhs = 4.0 * (0..4).map(|nu| s_now[mu][nu] * pi.0[nu]).sum::<f64>();
            assert_close(vdot.lower(mu), rhs, 1e-8);
        }
    }

    #[test]
    fn spin_tensor_from_unit_spinor() {
        let z = spinor_to_column(&EvenElement::one());
        let s = spin_tensor(&z);
        for mu in 0..4 {
            for nu in 0..4 {
                let expected = match (mu, nu) {
                    (2, 1) => 0.5,
                    (1, 2) => -0.5,
                    _ => 0.0,
                };
                assert_close(s[mu][nu], expected, 1e-13);
            }
        }
    }

    #[test]
    fn free_spinor_evolution_matches_matrix_oracle() {
        let cfg = SimConfig::helix_demo();
        let m = cfg.mass;
        for &tau in &[0.0, 0.4, 1.9, 6.0] {
            let direct = free_spinor_evolution(&cfg.psi0, &cfg.p0, m, tau);
            let z = analytic_column_evolution(&spinor_to_column(&cfg.psi0), &cfg.p0, m, tau).unwrap();
            let via_matrix = column_to_spinor(&z);
            assert!((direct - via_matrix).coeff_norm() < 1e-13, "tau = {tau}");
        }
    }

    #[test]
    fn free_spinor_evolution_solves_eom() {
        let cfg = SimConfig::helix_demo();
        let m = cfg.mass;
        let tau = 0.73;
        let psi = free_spinor_evolution(&cfg.psi0, &cfg.p0, m, tau);
        let s = ParticleState {
            tau,
            x: FourVector::zero(),
            psi,
            p: cfg.p0,
        };
        let d = eom_derivatives(&s, &FieldSpec::free());
        // compare with the tau-derivative of the closed form
        let eps = 1e-6;
        let plus = free_spinor_evolution(&cfg.psi0, &cfg.p0, m, tau + eps);
        let minus = free_spinor_evolution(&cfg.psi0, &cfg.p0, m, tau - eps);
        let fd = (plus - minus).scaled(0.5 / eps);
        assert!((d.psi_dot - fd).coeff_norm() < 1e-9);
    }

    #[test]
    fn lagrangian_examples() {
        let m = 1.0;
        let spec = FieldSpec::free();
        let s = trivial_state(m, 0.6);
        let d = eom_derivatives(&s, &spec);
        // on-shell constraint term vanishes
        let current = s.psi.mv() * g(0) * s.psi.reverse().mv();
        let middle = (s.p.mv() * (d.x_dot.mv() - current)).scalar_part();
        assert_close(middle, 0.0, 1e-14);
        // free trivial value is -m
        assert_close(eval_lagrangian(&s, &d, &spec), -m, 1e-13);
    }

    #[test]
    fn lagrangian_matches_matrix_translation() {
        // kinetic term: <rev(psi) psi_dot g1 g2>_0 = Re[(i/2)(zbar_dot z - zbar z_dot)]
        let cfg = SimConfig::helix_demo();
        let s = ParticleState {
            tau: 0.0,
            x: cfg.x0,
            psi: cfg.psi0,
            p: cfg.p0,
        };
        let d = eom_derivatives(&s, &FieldSpec::free());

        let z = spinor_to_column(&s.psi);
        let zdot = spinor_to_column(&d.psi_dot);
        // zbar_dot z = conj(z_dot)^T g0 z
        let zbar_dot_z: num_complex::Complex64 = {
            let bar = zdot.bar();
            (0..4).map(|k| bar[k] * z.0[k]).sum()
        };
        let zbar_zdot: num_complex::Complex64 = {
            let bar = z.bar();
            (0..4).map(|k| bar[k] * zdot.0[k]).sum()
        };
        let matrix_kin = (num_complex::Complex64::new(0.0, 0.5) * (zbar_dot_z - zbar_zdot)).re;

        let g1g2 = g(1) * g(2);
        let clifford_kin = (s.psi.reverse().mv() * d.psi_dot.mv() * g1g2).scalar_part();
        assert_close(clifford_kin, matrix_kin, 1e-12);

        // velocity term agrees as well, so the full scalar Lagrangian
        // translates term by term.
        let v_matrix = z.vector_current();
        let v_clifford = d.x_dot;
        assert!((v_matrix - v_clifford).max_abs() < 1e-12);
    }

    #[test]
    fn integrate_rejects_bad_configs() {
        let mut cfg = SimConfig::trivial_demo();
        cfg.mass = -1.0;
        assert!(matches!(
            integrate(&cfg),
            Err(DynamicsError::InvalidConfig(_))
        ));

        let mut cfg = SimConfig::trivial_demo();
        cfg.steps_per_period = 4;
        assert!(integrate(&cfg).is_err());

        let mut cfg = SimConfig::trivial_demo();
        cfg.p0 = FourVector::new(1.01, 0.0, 0.0, 0.0);
        assert!(matches!(
            integrate(&cfg),
            Err(DynamicsError::OffMassShell { .. })
        ));
    }

    #[test]
    fn runaway_field_aborts_with_sample_index() {
        let mut cfg = SimConfig::trivial_demo();
        cfg.charge = 1e160;
        cfg.field = FieldKind::ConstantBivector((g(0) * g(1)).scaled(1e150));
        cfg.periods = 1.0;
        cfg.steps_per_period = 16;
        match integrate(&cfg) {
            Err(DynamicsError::NumericalAbort { step }) => assert!(step >= 1),
            other => panic!("expected numerical abort, got {other:?}"),
        }
    }

    #[test]
    fn integration_is_deterministic() {
        let mut cfg = SimConfig::helix_demo();
        cfg.periods = 1.0;
        cfg.steps_per_period = 64;
        let a = integrate(&cfg).unwrap();
        let b = integrate(&cfg).unwrap();
        assert_eq!(a.samples.len(), b.samples.len());
        for (sa, sb) in a.samples.iter().zip(b.samples.iter()) {
            assert_eq!(sa.psi.coeffs(), sb.psi.coeffs());
            assert_eq!(sa.x.0, sb.x.0);
            assert_eq!(sa.p.0, sb.p.0);
        }
        assert_eq!(a.config_digest, b.config_digest);
    }

    #[test]
    fn zbw_average_trivial_and_negative_control() {
        let mut cfg = SimConfig::trivial_demo();
        cfg.periods = 2.0;
        // the spinor norm drifts at the integrator's truncation order, so
        // the mean approaches g0 at that order as well
        let t = integrate(&cfg).unwrap();
        let mean = zbw_average(&t).unwrap();
        assert!((mean - FourVector::new(1.0, 0.0, 0.0, 0.0)).max_abs() < 1e-10);

        // too short a span
        let mut short = SimConfig::trivial_demo();
        short.periods = 0.5;
        short.steps_per_period = 200;
        let ts = integrate(&short).unwrap();
        assert!(matches!(
            zbw_average(&ts),
            Err(DynamicsError::SpanTooShort { .. })
        ));
    }

    #[test]
    fn zbw_frequency_trivial_errors() {
        let mut cfg = SimConfig::trivial_demo();
        cfg.periods = 2.0;
        cfg.steps_per_period = 128;
        let t = integrate(&cfg).unwrap();
        assert!(matches!(
            zbw_frequency(&t),
            Err(DynamicsError::NoOscillation { .. })
        ));
    }

    #[test]
    fn config_digest_is_stable_and_sensitive() {
        let a = SimConfig::helix_demo();
        let b = SimConfig::helix_demo();
        assert_eq!(a.digest(), b.digest());
        let mut c = SimConfig::helix_demo();
        c.periods = 11.0;
        assert_ne!(a.digest(), c.digest());
    }
}
