//! `oracle`: compare the integrator against the analytic spinor
//! evolution and verify the convergence order when halving the step.

use std::path::Path;

use zbw_core::dynamics::{integrate, Integrator, SimConfig};
use zbw_core::matrix_rep::{analytic_column_evolution, column_to_spinor, spinor_to_column};

use crate::config::load_config;

pub struct OracleOutcome {
    pub max_error_coarse: f64,
    pub max_error_fine: f64,
    pub ratio: f64,
    pub error_bound: f64,
    pub ratio_band: (f64, f64),
    pub pass: bool,
}

fn max_error(cfg: &SimConfig) -> Result<f64, String> {
    let t = integrate(cfg).map_err(|e| e.to_string())?;
    let z0 = spinor_to_column(&cfg.psi0);
    let mut worst = 0.0_f64;
    for s in &t.samples {
        let z = analytic_column_evolution(&z0, &cfg.p0, cfg.mass, s.tau).map_err(|e| e.to_string())?;
        worst = worst.max((s.psi - column_to_spinor(&z)).coeff_norm());
    }
    Ok(worst)
}

/// Error bound pinned to the fourth-order budget: 1e-8 at 1000 steps per
/// period over ten periods, scaled as h^4 and linearly in longer runs.
pub fn error_bound(steps_per_period: usize, periods: f64, tol_scale: f64) -> f64 {
    1e-8 * tol_scale * (1000.0 / steps_per_period as f64).powi(4) * (periods / 10.0).max(1.0)
}

pub fn evaluate_oracle(
    config_path: &Path,
    euler_debug: bool,
    tol_scale: f64,
) -> Result<OracleOutcome, String> {
    let loaded = load_config(config_path).map_err(|e| e.to_string())?;
    if !loaded.sim.field.is_free() {
        return Err("oracle comparison requires a free-field configuration".into());
    }
    let mut coarse = loaded.sim.clone();
    if euler_debug {
        coarse.integrator = Integrator::EulerDebug;
    }
    let mut fine = coarse.clone();
    fine.steps_per_period *= 2;

    let e1 = max_error(&coarse)?;
    let e2 = max_error(&fine)?;
    let ratio = e1 / e2;
    let bound = error_bound(coarse.steps_per_period, coarse.periods, tol_scale);
    let band = (12.0, 20.0);
    let pass = ratio >= band.0 && ratio <= band.1 && e1 <= bound;
    Ok(OracleOutcome {
        max_error_coarse: e1,
        max_error_fine: e2,
        ratio,
        error_bound: bound,
        ratio_band: band,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_scales_with_resolution() {
        let base = error_bound(1000, 10.0, 1.0);
        assert!((base - 1e-8).abs() < 1e-20);
        assert!(error_bound(500, 10.0, 1.0) > base);
        assert!(error_bound(2000, 10.0, 1.0) < base);
        assert!(error_bound(1000, 20.0, 1.0) > base);
        assert!(error_bound(1000, 1.0, 1.0) == base);
    }
}
