//! Code description files (TOML).

use std::path::Path;

use mmcodes::{parse_poly_with, GroupSpec, MCssCode, Provenance, RingElem, Variables};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Published parameters a fixture is checked against.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub d: Option<usize>,
    pub w_med: Option<usize>,
    pub w_max: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildConfig {
    pub name: String,
    pub t: usize,
    pub orders: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
    pub generators: Vec<String>,
    /// Homological degree of the qubits; defaults to `t / 2`.
    #[serde(default, alias = "q_override", skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

impl BuildConfig {
    pub fn from_toml(text: &str, origin: &str) -> CliResult<Self> {
        let cfg: BuildConfig = toml::from_str(text).map_err(|e| CliError::Config {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        if cfg.generators.len() != cfg.t {
            return Err(CliError::Config {
                path: origin.to_string(),
                message: format!("t = {} but {} generators given", cfg.t, cfg.generators.len()),
            });
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    pub fn spec(&self) -> CliResult<GroupSpec> {
        Ok(GroupSpec::new(self.orders.clone())?)
    }

    pub fn variables(&self, spec: &GroupSpec) -> CliResult<Variables> {
        Ok(match &self.variables {
            Some(names) => Variables::new(names, spec.dims())?,
            None => Variables::default_for(spec.dims()),
        })
    }

    pub fn parse_generators(&self) -> CliResult<(GroupSpec, Variables, Vec<RingElem>)> {
        let spec = self.spec()?;
        let vars = self.variables(&spec)?;
        let gens = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                parse_poly_with(g, &spec, &vars).map_err(|e| CliError::Config {
                    path: self.name.clone(),
                    message: format!("generator {} {g:?}: {e}", i + 1),
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok((spec, vars, gens))
    }

    pub fn build(&self) -> CliResult<MCssCode> {
        let (spec, _, gens) = self.parse_generators()?;
        Ok(MCssCode::from_generators(&spec, &gens, self.q)?.with_provenance(Provenance {
            name: self.name.clone(),
            source: String::new(),
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROW1: &str = r#"
name = "row1"
t = 4
orders = [2, 2, 2, 2]
generators = ["1 + wx", "1 + xy", "1 + yz", "1 + wz"]
"#;

    #[test]
    fn parses_and_builds() {
        let c = BuildConfig::from_toml(ROW1, "row1").unwrap();
        let code = c.build().unwrap();
        assert_eq!(code.n, 96);
        assert_eq!(code.p_x.shape(), (64, 96));
    }

    #[test]
    fn generator_count_must_match_t() {
        let bad = ROW1.replace("t = 4", "t = 3");
        assert!(matches!(BuildConfig::from_toml(&bad, "x"), Err(CliError::Config { .. })));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let bad = ROW1.replace("1 + yz", "1 + y?z");
        let err = BuildConfig::from_toml(&bad, "x").unwrap().build().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("generator 3") && msg.contains("byte 5"), "{msg}");
        assert_eq!(err.exit_code(), crate::error::exit::USAGE);
    }

    #[test]
    fn custom_variable_names() {
        let text = r#"
name = "bga"
t = 2
orders = [4, 2]
variables = ["x", "s"]
generators = ["1 + x", "1 + x + s + x^2 + sx + sx^3"]
"#;
        let code = BuildConfig::from_toml(text, "bga").unwrap().build().unwrap();
        assert_eq!(code.n, 16);
    }
}
