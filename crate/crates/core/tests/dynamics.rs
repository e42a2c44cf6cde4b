//! Integration-level dynamics gates: conserved quantities, oscillation
//! frequency, mean velocity, and agreement with the analytic matrix
//! oracle including the integrator's convergence order.

use zbw_core::algebra::{EvenElement, FourVector};
use zbw_core::dynamics::{
    spin_tensor, eom_derivatives, hamiltonian, integrate, orbital_tensor, velocity,
    zbw_average, zbw_frequency, DynamicsError, Integrator, SimConfig, Trajectory,
};
use zbw_core::frenet::curve_derivatives;
use zbw_core::matrix_rep::{analytic_column_evolution, column_to_spinor, spinor_to_column};

fn total_angular_momentum(t: &Trajectory, i: usize) -> [[f64; 4]; 4] {
    let s = &t.samples[i];
    let l = orbital_tensor(&s.x, &s.p);
    let spin = spin_tensor(&spinor_to_column(&s.psi));
    let mut j = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            j[mu][nu] = l[mu][nu] + spin[mu][nu];
        }
    }
    j
}

#[test]
fn free_particle_conservation_over_ten_periods() {
    let cfg = SimConfig::helix_demo();
    let m = cfg.mass;
    let t = integrate(&cfg).unwrap();
    assert_eq!(t.samples.len(), 10 * 1000 + 1);

    // |H - m| <= 1e-9 along the whole run
    let mut h_worst = 0.0_f64;
    for i in 0..t.samples.len() {
        h_worst = h_worst.max((t.hamiltonian_at(i) - m).abs());
    }
    assert!(h_worst <= 1e-9, "Hamiltonian drift {h_worst:e}");

    // the momentum never changes bit for bit, and the mass shell is exact
    for s in &t.samples {
        assert_eq!(s.p.0, cfg.p0.0);
        assert_eq!(s.p.norm_sq() - m * m, 0.0);
    }

    // total angular momentum drift <= 1e-8
    let j0 = total_angular_momentum(&t, 0);
    let mut j_worst = 0.0_f64;
    for i in 0..t.samples.len() {
        let j = total_angular_momentum(&t, i);
        for mu in 0..4 {
            for nu in 0..4 {
                j_worst = j_worst.max((j[mu][nu] - j0[mu][nu]).abs());
            }
        }
    }
    assert!(j_worst <= 1e-8, "angular momentum drift {j_worst:e}");
}

#[test]
fn spinor_stays_even_along_the_run() {
    let mut cfg = SimConfig::helix_demo();
    cfg.periods = 2.0;
    let t = integrate(&cfg).unwrap();
    let f = t.field_spec();
    let mut worst = 0.0_f64;
    for s in &t.samples {
        worst = worst.max(eom_derivatives(s, &f).odd_residue);
    }
    assert!(worst <= 1e-10, "odd contamination {worst:e}");
}

#[test]
fn zbw_frequency_matches_twice_the_mass() {
    for &m in &[0.5_f64, 1.0, 2.5] {
        let mut cfg = SimConfig::helix_demo_with_mass(m);
        cfg.periods = 4.0;
        let t = integrate(&cfg).unwrap();
        let omega = zbw_frequency(&t).unwrap();
        let rel = (omega - 2.0 * m).abs() / (2.0 * m);
        assert!(rel <= 1e-3, "m = {m}: omega = {omega}, rel = {rel:e}");
    }
}

#[test]
fn mean_velocity_equals_momentum_over_mass() {
    let mut cfg = SimConfig::helix_demo();
    cfg.periods = 1.0;
    let t = integrate(&cfg).unwrap();
    let mean = zbw_average(&t).unwrap();
    let target = cfg.p0.scaled(1.0 / cfg.mass);
    let gap = (mean - target).max_abs();
    assert!(gap <= 1e-6, "mean velocity gap {gap:e}");
}

#[test]
fn half_period_mean_misses_the_momentum() {
    // oscillatory terms cancel only over whole periods
    let mut cfg = SimConfig::helix_demo();
    cfg.periods = 1.0;
    let t = integrate(&cfg).unwrap();
    let half = cfg.steps_per_period / 2;
    let mut sum = FourVector::zero();
    for i in 0..=half {
        let w = if i == 0 || i == half { 0.5 } else { 1.0 };
        sum = sum + t.velocity_at(i).scaled(w);
    }
    let mean = sum.scaled(1.0 / half as f64);
    let gap = (mean - cfg.p0.scaled(1.0 / cfg.mass)).max_abs();
    assert!(gap > 0.1, "half-period mean should miss p/m, gap {gap:e}");
}

fn max_oracle_error(cfg: &SimConfig) -> f64 {
    let t = integrate(cfg).unwrap();
    let z0 = spinor_to_column(&cfg.psi0);
    let mut worst = 0.0_f64;
    for s in &t.samples {
        let z = analytic_column_evolution(&z0, &cfg.p0, cfg.mass, s.tau).unwrap();
        let exact = column_to_spinor(&z);
        worst = worst.max((s.psi - exact).coeff_norm());
    }
    worst
}

#[test]
fn integrated_spinor_matches_analytic_oracle() {
    let mut cfg = SimConfig::helix_demo();
    cfg.periods = 10.0;
    cfg.steps_per_period = 1000;
    let err = max_oracle_error(&cfg);
    assert!(err <= 1e-8, "oracle error {err:e}");
}

#[test]
fn rk4_convergence_ratio_is_fourth_order() {
    let mut coarse = SimConfig::helix_demo();
    coarse.periods = 10.0;
    coarse.steps_per_period = 1000;
    let mut fine = coarse.clone();
    fine.steps_per_period = 2000;
    let e_coarse = max_oracle_error(&coarse);
    let e_fine = max_oracle_error(&fine);
    let ratio = e_coarse / e_fine;
    assert!(
        (12.0..=20.0).contains(&ratio),
        "convergence ratio {ratio} (errors {e_coarse:e} / {e_fine:e})"
    );
}

#[test]
fn euler_debug_stepper_is_first_order() {
    let mut coarse = SimConfig::helix_demo();
    coarse.periods = 1.0;
    coarse.steps_per_period = 1000;
    coarse.integrator = Integrator::EulerDebug;
    let mut fine = coarse.clone();
    fine.steps_per_period = 2000;
    let ratio = max_oracle_error(&coarse) / max_oracle_error(&fine);
    assert!(
        (1.6..=2.4).contains(&ratio),
        "first-order control ratio {ratio}"
    );
}

#[test]
fn trivial_run_stays_on_the_time_axis() {
    let mut cfg = SimConfig::trivial_demo();
    cfg.periods = 5.0;
    let t = integrate(&cfg).unwrap();
    for s in &t.samples {
        assert_eq!(s.x.0[1], 0.0);
        assert_eq!(s.x.0[2], 0.0);
        assert_eq!(s.x.0[3], 0.0);
        assert!((s.x.0[0] - s.tau).abs() <= 1e-7);
    }
    // velocity columns stay (1,0,0,0) to round-off
    for i in 0..t.samples.len() {
        let v = t.velocity_at(i);
        assert!((v.0[0] - 1.0).abs() <= 1e-9);
        assert_eq!(v.0[1], 0.0);
        assert_eq!(v.0[2], 0.0);
        assert_eq!(v.0[3], 0.0);
    }
}

#[test]
fn helix_run_traces_a_transverse_circle() {
    let mut cfg = SimConfig::helix_demo();
    cfg.periods = 3.0;
    let t = integrate(&cfg).unwrap();
    let m = cfg.mass;
    let amp = 0.5_f64.tanh() / (2.0 * m);
    let mut max1 = 0.0_f64;
    let mut max2 = 0.0_f64;
    for s in &t.samples {
        max1 = max1.max(s.x.0[1].abs());
        max2 = max2.max(s.x.0[2].abs());
        // motion is confined to the t/x1/x2 subspace
        assert_eq!(s.x.0[3], 0.0);
    }
    assert!((max1 - amp).abs() <= 0.05 * amp, "x1 amplitude {max1} vs {amp}");
    assert!(max2 > 0.5 * amp && max2 < 2.5 * amp, "x2 swing {max2}");
    // time coordinate advances with unit rate (H = m)
    let last = t.samples.last().unwrap();
    assert!((last.x.0[0] - last.tau).abs() <= 1e-8);
}

#[test]
fn spin_tensor_identities_along_integrated_samples() {
    let mut cfg = SimConfig::helix_demo();
    cfg.periods = 1.0;
    cfg.steps_per_period = 250;
    let t = integrate(&cfg).unwrap();
    let f = t.field_spec();

    for s in t.samples.iter().step_by(50) {
        let d = eom_derivatives(s, &f);
        let z = spinor_to_column(&s.psi);
        let zdot = spinor_to_column(&d.psi_dot);
        let v = velocity(&s.psi);

        // S_dot via bilinearity of the commutator form
        for mu in 0..4 {
            for nu in 0..4 {
                if mu == nu {
                    continue;
                }
                let comm = zbw_core::matrix_rep::gamma_matrix(mu)
                    * zbw_core::matrix_rep::gamma_matrix(nu)
                    - zbw_core::matrix_rep::gamma_matrix(nu)
                        * zbw_core::matrix_rep::gamma_matrix(mu);
                let mixed = {
                    let bar_dot = zdot.bar();
                    let cz = comm.mul_col(&z.0);
                    let a: num_complex::Complex64 =
                        (0..4).map(|k| bar_dot[k] * cz[k]).sum();
                    let bar = z.bar();
                    let czdot = comm.mul_col(&zdot.0);
                    let b: num_complex::Complex64 =
                        (0..4).map(|k| bar[k] * czdot[k]).sum();
                    (a + b) * num_complex::Complex64::new(0.0, -0.25)
                };
                let s_dot = mixed.re;
                let pi = s.p; // free field
                let rhs = pi.lower(mu) * v.lower(nu) - pi.lower(nu) * v.lower(mu);
                assert!(
                    (s_dot - rhs).abs() <= 1e-11,
                    "S_dot[{mu}][{nu}] {s_dot} vs {rhs}"
                );
            }
        }

        // v_dot = 4 S pi, with v_dot from the analytic curve chain
        let cd = curve_derivatives(s, &f).unwrap();
        let spin = spin_tensor(&z);
        for mu in 0..4 {
            let rhs = 4.0 * (0..4).map(|nu| spin[mu][nu] * s.p.0[nu]).sum::<f64>();
            assert!(
                (cd.d2.lower(mu) - rhs).abs() <= 1e-11,
                "v_dot_{mu} {} vs {rhs}",
                cd.d2.lower(mu)
            );
        }
    }
}

#[test]
fn hamiltonian_conservation_error_reporting() {
    // a deliberately coarse run still conserves H well below the bound
    let mut cfg = SimConfig::helix_demo();
    cfg.steps_per_period = 64;
    cfg.periods = 1.0;
    let t = integrate(&cfg).unwrap();
    let h0 = t.hamiltonian_at(0);
    let hn = t.hamiltonian_at(t.samples.len() - 1);
    assert!((hn - h0).abs() < 1e-6);
}

#[test]
fn off_shell_free_start_is_rejected_until_flagged_off() {
    let mut cfg = SimConfig::helix_demo();
    cfg.p0 = FourVector::new(1.0001, 0.0, 0.0, 0.0);
    assert!(matches!(
        integrate(&cfg),
        Err(DynamicsError::OffMassShell { .. })
    ));
    cfg.enforce_mass_shell = false;
    assert!(integrate(&cfg).is_ok());
}

#[test]
fn trajectory_grid_is_strictly_increasing_and_uniform() {
    let mut cfg = SimConfig::trivial_demo();
    cfg.periods = 0.5;
    cfg.steps_per_period = 32;
    let t = integrate(&cfg).unwrap();
    for i in 1..t.samples.len() {
        let dt = t.samples[i].tau - t.samples[i - 1].tau;
        assert!(dt > 0.0);
        assert!((dt - t.step).abs() < 1e-15);
    }
}

#[test]
fn scaled_spinor_keeps_even_grades_but_scales_hamiltonian() {
    let cfg = SimConfig::helix_demo();
    let s = zbw_core::dynamics::ParticleState {
        tau: 0.0,
        x: cfg.x0,
        psi: cfg.psi0.scaled(3.0),
        p: cfg.p0,
    };
    let h = hamiltonian(&s);
    assert!((h - 9.0 * cfg.mass).abs() < 1e-12);
    let _ = EvenElement::even_part_of(&s.psi.mv());
}
