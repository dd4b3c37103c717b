//! Optional TOML configuration: default bounds, epsilon, and per-node
//! cusp constants. Command-line flags override every field.

use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 0.25;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Default bound override for verification claims.
    pub bound: Option<u64>,
    /// Default epsilon for the crossover analysis.
    pub epsilon: Option<f64>,
    /// Cusp-bound constants keyed by sum expression; external inputs by
    /// design (they come from newform computations out of scope here).
    #[serde(default)]
    pub cusp_constants: HashMap<String, f64>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Invalid(format!("config: {e}")))
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(DEFAULT_EPSILON)
    }

    /// The configured cusp constant for a sum, if any.
    pub fn cusp_constant(&self, sum: &str) -> Option<f64> {
        self.cusp_constants.get(sum).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn load_and_defaults() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(
            f,
            "bound = 5000\nepsilon = 0.3\n[cusp_constants]\n\"P3+P3+5P4+19P3\" = 12.645"
        )
        .unwrap();
        let c = Config::load(f.path()).unwrap();
        assert_eq!(c.bound, Some(5000));
        assert_eq!(c.epsilon(), 0.3);
        assert_eq!(c.cusp_constant("P3+P3+5P4+19P3"), Some(12.645));
        assert_eq!(c.cusp_constant("P3"), None);
        assert_eq!(Config::default().epsilon(), DEFAULT_EPSILON);
    }

    #[test]
    fn unknown_fields_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "bonud = 5000").unwrap();
        assert!(Config::load(f.path()).is_err());
    }
}
