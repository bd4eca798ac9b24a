//! Reference values stored as JSON maps `name -> {re, im}` with decimal strings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable overriding the fixture file location.
pub const FIXTURE_ENV: &str = "HURWITZ_FROBENIUS_FIXTURES";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureValue {
    pub re: String,
    pub im: String,
}

impl FixtureValue {
    pub fn from_complex(z: C64) -> Self {
        FixtureValue {
            re: format_17(z.re),
            im: format_17(z.im),
        }
    }

    pub fn to_complex(&self) -> Result<C64> {
        let p = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Usage(format!("bad fixture number '{s}': {e}")))
        };
        Ok(C64::new(p(&self.re)?, p(&self.im)?))
    }
}

/// Decimal string with 17 significant digits.
pub fn format_17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fixtures {
    pub values: BTreeMap<String, FixtureValue>,
}

impl Fixtures {
    /// `$HURWITZ_FROBENIUS_FIXTURES` if set, else the oracle file shipped with the workspace.
    pub fn default_path() -> PathBuf {
        match std::env::var_os(FIXTURE_ENV) {
            Some(p) => PathBuf::from(p),
            None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/oracle.json"),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read fixtures {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn load_default() -> Result<Self> {
        Self::load(&Self::default_path())
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Usage(format!("malformed fixture JSON: {e}")))
    }

    pub fn get(&self, name: &str) -> Result<C64> {
        self.values
            .get(name)
            .ok_or_else(|| Error::Usage(format!("fixture '{name}' not found")))?
            .to_complex()
    }

    pub fn insert(&mut self, name: &str, z: C64) {
        self.values.insert(name.to_string(), FixtureValue::from_complex(z));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fixture map serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let mut f = Fixtures::default();
        f.insert("a", C64::new(0.1, -2.5e-7));
        let g = Fixtures::parse(&f.to_json()).unwrap();
        assert_eq!(g.get("a").unwrap(), C64::new(0.1, -2.5e-7));
        assert!(g.get("b").is_err());
    }
}
