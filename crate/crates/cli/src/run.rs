//! `run`: integrate a configuration, write the trajectory table and the
//! run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use zbw_core::dynamics::{
    eom_derivatives, hamiltonian, integrate, velocity, DynamicsError, Trajectory,
};
use zbw_core::frenet::{curve_derivatives, frenet_frame_from_curve, mass_relation};
use zbw_core::residuals::{linear_form_residual, nonlinear_residual};

use crate::config::{load_config, LoadedConfig};

pub const CSV_HEADER: &str =
    "tau,x0,x1,x2,x3,v0,v1,v2,v3,H,pv,OmegaS,K1,K2,K3,res_nl,res_dh";

/// One pass/fail entry of the run manifest.
#[derive(Clone, Debug, Serialize)]
pub struct RunCheck {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Self-contained run report: the embedded config reproduces the
/// trajectory byte for byte.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub version: String,
    pub config_path: String,
    pub config: BTreeMap<String, String>,
    pub config_digest: String,
    pub seed: u64,
    pub tol_scale: f64,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
    pub step: f64,
    pub samples: usize,
    pub outputs: Vec<String>,
    pub checks: Vec<RunCheck>,
    pub all_checks_passed: bool,
}

fn now_unix() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Renders the trajectory table: one row per sample, decimal text with
/// 17 significant digits, columns fixed by [`CSV_HEADER`].
pub fn render_csv(t: &Trajectory) -> String {
    let f = t.field_spec();
    let m = t.config.mass;
    let mut out = String::with_capacity(t.samples.len() * 340);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &t.samples {
        let v = velocity(&s.psi);
        let h = s.p.dot(&v);
        let (pv, omega_s) = match mass_relation(s, &f) {
            Ok(rel) => (rel.momentum_velocity, rel.rotation_spin),
            Err(_) => (f64::NAN, f64::NAN),
        };
        let (k1, k2, k3) = match curve_derivatives(s, &f)
            .and_then(|cd| frenet_frame_from_curve(&cd))
        {
            Ok((_tetrad, k)) => (k.k1, k.k2, k.k3),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN),
        };
        let d = eom_derivatives(s, &f);
        let res_nl = nonlinear_residual(s, &d.psi_dot, &f).coeff_norm();
        let res_dh = linear_form_residual(&s.psi, &d.psi_dot, m).coeff_norm();

        let cols = [
            s.tau, s.x.0[0], s.x.0[1], s.x.0[2], s.x.0[3], v.0[0], v.0[1], v.0[2], v.0[3], h,
            pv, omega_s, k1, k2, k3, res_nl, res_dh,
        ];
        let mut first = true;
        for c in cols {
            if !first {
                out.push(',');
            }
            out.push_str(&format!("{c:.16e}"));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// Invariant monitors reported in the manifest. Conservation gates apply
/// to free runs; structural gates apply always.
pub fn run_checks(t: &Trajectory, tol_scale: f64) -> Vec<RunCheck> {
    let mut checks = Vec::new();
    let f = t.field_spec();
    let m = t.config.mass;

    let mut odd = 0.0_f64;
    for s in &t.samples {
        odd = odd.max(eom_derivatives(s, &f).odd_residue);
    }
    let tol = 1e-10 * tol_scale;
    checks.push(RunCheck {
        name: "spinor_evenness".into(),
        measured: odd,
        tolerance: tol,
        pass: odd <= tol,
    });

    if t.config.field.is_free() {
        let h0 = hamiltonian(&t.samples[0]);
        let mut h_drift = 0.0_f64;
        for s in &t.samples {
            h_drift = h_drift.max((hamiltonian(s) - h0).abs());
        }
        let tol = 1e-9 * m * tol_scale;
        checks.push(RunCheck {
            name: "hamiltonian_drift".into(),
            measured: h_drift,
            tolerance: tol,
            pass: h_drift <= tol,
        });

        let mut p_drift = 0.0_f64;
        let mut shell = 0.0_f64;
        for s in &t.samples {
            p_drift = p_drift.max((s.p - t.config.p0).max_abs());
            shell = shell.max((s.p.norm_sq() - m * m).abs());
        }
        checks.push(RunCheck {
            name: "momentum_drift".into(),
            measured: p_drift,
            tolerance: 0.0,
            pass: p_drift <= 0.0,
        });
        let tol = 1e-9 * m * m * tol_scale;
        checks.push(RunCheck {
            name: "mass_shell_drift".into(),
            measured: shell,
            tolerance: tol,
            pass: shell <= tol,
        });
    }
    checks
}

pub enum RunError {
    Config(String),
    Numerical { step: usize },
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical { .. } => 3,
            RunError::Io(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            RunError::Config(m) => format!("configuration error: {m}"),
            RunError::Numerical { step } => {
                format!("numerical abort: non-finite state at sample {step}")
            }
            RunError::Io(m) => format!("i/o error: {m}"),
        }
    }
}

/// Integrates the config and writes the requested outputs; returns the
/// manifest on success.
pub fn execute_run(
    config_path: &Path,
    out_dir: &Path,
    seed: u64,
    tol_scale: f64,
) -> Result<RunManifest, RunError> {
    let started = now_unix();
    let loaded: LoadedConfig =
        load_config(config_path).map_err(|e| RunError::Config(e.to_string()))?;

    let trajectory = integrate(&loaded.sim).map_err(|e| match e {
        DynamicsError::NumericalAbort { step } => RunError::Numerical { step },
        other => RunError::Config(other.to_string()),
    })?;

    std::fs::create_dir_all(out_dir).map_err(|e| RunError::Io(e.to_string()))?;
    let mut outputs: Vec<String> = Vec::new();

    if loaded.outputs.trajectory {
        let path: PathBuf = out_dir.join("trajectory.csv");
        std::fs::write(&path, render_csv(&trajectory))
            .map_err(|e| RunError::Io(e.to_string()))?;
        outputs.push(path.display().to_string());
    }

    let checks = run_checks(&trajectory, tol_scale);
    let all_pass = checks.iter().all(|c| c.pass);
    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_path: config_path.display().to_string(),
        config: loaded.echo.clone(),
        config_digest: trajectory.config_digest.clone(),
        seed,
        tol_scale,
        started_unix_s: started,
        finished_unix_s: now_unix(),
        step: trajectory.step,
        samples: trajectory.samples.len(),
        outputs: outputs.clone(),
        checks,
        all_checks_passed: all_pass,
    };

    if loaded.outputs.report {
        let path = out_dir.join("report.json");
        let json = serde_json::to_string_pretty(&manifest)
            .map_err(|e| RunError::Io(e.to_string()))?;
        std::fs::write(&path, json).map_err(|e| RunError::Io(e.to_string()))?;
    }

    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use zbw_core::dynamics::SimConfig;

    #[test]
    fn csv_header_and_shape() {
        let mut cfg = SimConfig::trivial_demo();
        cfg.periods = 0.1;
        cfg.steps_per_period = 20;
        let t = integrate(&cfg).unwrap();
        let csv = render_csv(&t);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), 17);
        assert_eq!(csv.lines().count(), t.samples.len() + 1);
    }

    #[test]
    fn trivial_rows_have_unit_velocity_and_zero_curvatures() {
        let mut cfg = SimConfig::trivial_demo();
        cfg.periods = 0.1;
        cfg.steps_per_period = 200;
        let t = integrate(&cfg).unwrap();
        let csv = render_csv(&t);
        for row in csv.lines().skip(1) {
            let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
            assert!((cols[5] - 1.0).abs() < 1e-9); // v0
            assert_eq!(cols[6], 0.0); // v1
            assert_eq!(cols[12], 0.0); // K1
            assert_eq!(cols[13], 0.0); // K2
            assert_eq!(cols[14], 0.0); // K3
        }
    }

    #[test]
    fn run_checks_pass_on_a_free_run() {
        let mut cfg = SimConfig::helix_demo();
        cfg.periods = 1.0;
        cfg.steps_per_period = 200;
        let t = integrate(&cfg).unwrap();
        let checks = run_checks(&t, 1.0);
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
        assert!(checks.iter().any(|c| c.name == "hamiltonian_drift"));
    }
}
