//! JSON scenario files: the system parameters plus optional solver settings.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_config, SystemConfig, ValidatedConfig};
use crate::socp::SolverOptions;

/// Contents of a scenario file.
///
/// System fields sit at the top level under their conventional symbols; the
/// optional `solver` object overrides individual [`SolverOptions`] fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(flatten)]
    pub system: SystemConfig,
    #[serde(default)]
    pub solver: SolverOptions,
}

impl Scenario {
    pub fn new(system: SystemConfig) -> Self {
        Self {
            system,
            solver: SolverOptions::default(),
        }
    }

    /// Reads a scenario from a JSON file.
    ///
    /// # Errors
    /// `Io` or `Serde` on unreadable or malformed input.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// # Errors
    /// As [`validate_config`].
    pub fn validate(&self) -> Result<ValidatedConfig> {
        validate_config(&self.system)
    }

    /// Overrides one system parameter from its textual value. Per-user lists
    /// (`d`, `c`) take either a single value applied to every user or a
    /// colon-separated list such as `3:3`.
    ///
    /// # Errors
    /// `Range` for an unknown name or an unparsable value.
    pub fn set_param(&mut self, name: &str, value: &str) -> Result<()> {
        let bad = || Error::Range(format!("invalid value {value:?} for {name}"));
        let int = || value.trim().parse::<usize>().map_err(|_| bad());
        let real = || value.trim().parse::<f64>().map_err(|_| bad());
        let list = |users: usize| -> Result<Vec<usize>> {
            let parts: Vec<usize> = value
                .split(':')
                .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            Ok(if parts.len() == 1 {
                vec![parts[0]; users]
            } else {
                parts
            })
        };
        let s = &mut self.system;
        match name {
            "M" => s.antennas = int()?,
            "N" => s.rx_antennas = int()?,
            "J" => s.users = int()?,
            "K" => s.subcarriers = int()?,
            "d" => s.streams = list(s.users)?,
            "c" => s.redundancy = list(s.users)?,
            "P_s" => s.signal_power = real()?,
            "sigma2" => s.sigma2 = real()?,
            "zeta" => s.zeta = real()?,
            "gamma_floor" => s.gamma_floor = real()?,
            "constellation" => s.constellation = value.to_string(),
            _ => return Err(Error::Range(format!("unknown parameter {name:?}"))),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::socp::Method;

    #[test]
    fn parses_flat_fields_and_solver_block() {
        let text = r#"{"M":4,"N":2,"J":2,"K":128,"d":[1,1],"c":[1,1],"zeta":1.8,
                       "solver":{"method":"ipm","tol_gap":1e-5}}"#;
        let s: Scenario = serde_json::from_str(text).unwrap();
        assert_eq!(s.system.antennas, 4);
        assert_eq!(s.system.signal_power, 1.0);
        assert_eq!(s.solver.method, Method::Ipm);
        assert_eq!(s.solver.tol_gap, 1e-5);
        assert_eq!(s.solver.max_iter, SolverOptions::default().max_iter);
        let back: Scenario = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn solver_block_is_optional() {
        let text = r#"{"M":8,"N":2,"J":2,"K":64,"d":[1,1],"c":[3,3],"zeta":2.0,"P_s":2.0}"#;
        let s: Scenario = serde_json::from_str(text).unwrap();
        assert_eq!(s.solver, SolverOptions::default());
        assert_eq!(s.system.signal_power, 2.0);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn parameter_overrides() {
        let mut s = Scenario::new(SystemConfig::new(4, 2, 2, 128, vec![1, 1], vec![1, 1], 1.8));
        s.set_param("K", "64").unwrap();
        s.set_param("zeta", "2.0").unwrap();
        s.set_param("M", "8").unwrap();
        s.set_param("c", "3").unwrap();
        assert_eq!(s.system.subcarriers, 64);
        assert_eq!(s.system.zeta, 2.0);
        assert_eq!(s.system.redundancy, vec![3, 3]);
        s.set_param("c", "2:3").unwrap();
        assert_eq!(s.system.redundancy, vec![2, 3]);
        assert!(s.set_param("K", "x").is_err());
        assert!(s.set_param("Q", "1").is_err());
    }
}
