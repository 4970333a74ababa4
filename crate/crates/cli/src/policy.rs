//! Numeric-policy construction with environment overrides.
//!
//! Each tolerance in [`NumericPolicy`] can be overridden by an environment
//! variable; command-line flags (like `--mc-threshold`) take precedence over
//! both.

use entcert::NumericPolicy64;

use crate::error::{CliError, CliResult};

pub const ENV_VARS: &[(&str, &str)] = &[
    ("ENTCERT_TOL_HERMITICITY", "hermiticity_tol"),
    ("ENTCERT_TOL_TRACE", "trace_tol"),
    ("ENTCERT_TOL_PSD", "psd_tol"),
    ("ENTCERT_TOL_PROB", "prob_tol"),
    ("ENTCERT_TOL_MC", "mc_tol"),
    ("ENTCERT_TOL_SUPPORT_MASS", "support_mass_tol"),
    ("ENTCERT_PURITY_CLAMP_TOL", "purity_clamp_tol"),
    ("ENTCERT_MC_THRESHOLD", "mc_threshold"),
];

fn read_var(name: &str) -> CliResult<Option<f64>> {
    match std::env::var(name) {
        Ok(raw) => raw
            .trim()
            .parse::<f64>()
            .map(Some)
            .map_err(|_| CliError::input(format!("{name} must be a number, got {raw:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::input(format!("cannot read {name}: {e}"))),
    }
}

/// Default policy with any `ENTCERT_*` environment overrides applied.
pub fn policy_from_env() -> CliResult<NumericPolicy64> {
    let mut policy = NumericPolicy64::default();
    for (var, field) in ENV_VARS {
        if let Some(value) = read_var(var)? {
            match *field {
                "hermiticity_tol" => policy.hermiticity_tol = value,
                "trace_tol" => policy.trace_tol = value,
                "psd_tol" => policy.psd_tol = value,
                "prob_tol" => policy.prob_tol = value,
                "mc_tol" => policy.mc_tol = value,
                "support_mass_tol" => policy.support_mass_tol = value,
                "purity_clamp_tol" => policy.purity_clamp_tol = value,
                "mc_threshold" => policy.mc_threshold = value,
                _ => unreachable!(),
            }
        }
    }
    Ok(policy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_override_applies() {
        std::env::set_var("ENTCERT_MC_THRESHOLD", "0.25");
        let policy = policy_from_env().unwrap();
        assert_eq!(policy.mc_threshold, 0.25);
        std::env::remove_var("ENTCERT_MC_THRESHOLD");

        std::env::set_var("ENTCERT_MC_THRESHOLD", "not-a-number");
        assert!(policy_from_env().is_err());
        std::env::remove_var("ENTCERT_MC_THRESHOLD");
    }
}
