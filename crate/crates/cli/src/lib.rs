//! Batch front-end for the spacetime-algebra spinning-particle
//! simulator: configuration parsing, trajectory/report output, invariant
//! check suites and the integrator-vs-analytic oracle.

pub mod checks;
pub mod config;
pub mod oracle;
pub mod run;

/// Uniform tolerance relaxation for slow or fast-math platforms, read
/// from `STA_ZBW_TOL_SCALE` (a float >= 1; default 1).
pub fn tol_scale_from_env() -> Result<f64, String> {
    match std::env::var("STA_ZBW_TOL_SCALE") {
        Err(_) => Ok(1.0),
        Ok(raw) => match raw.parse::<f64>() {
            Ok(v) if v >= 1.0 && v.is_finite() => Ok(v),
            _ => Err(format!(
                "STA_ZBW_TOL_SCALE must be a finite float >= 1, got `{raw}`"
            )),
        },
    }
}
