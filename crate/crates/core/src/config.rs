//! Run configuration read from TOML.
//!
//! ```toml
//! [hamiltonian]
//! catalog = "gaussian"
//! params = { a = 0.1 }
//!
//! [simulation]
//! mode = "adaptive"     # constant | adaptive | piecewise
//! k = 2
//! epsilon = 1e-4
//! t0 = 0.0              # optional, defaults to the catalog interval
//! dt = 2.0              # optional
//! seed = 7              # optional
//!
//! [oracle]              # optional
//! time_bits_override = 20
//! value_qubits_override = 40
//! ```

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::hamiltonian::catalog::CatalogEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Constant,
    Adaptive,
    Piecewise,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Mode::Constant),
            "adaptive" => Ok(Mode::Adaptive),
            "piecewise" => Ok(Mode::Piecewise),
            other => Err(Error::Config {
                key: "simulation.mode".into(),
                message: format!("unknown mode '{other}' (expected constant, adaptive or piecewise)"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub catalog: CatalogEntry,
    pub mode: Mode,
    pub k: u32,
    pub epsilon: f64,
    pub t0: Option<f64>,
    pub dt: Option<f64>,
    pub seed: u64,
    pub time_bits_override: Option<u32>,
    pub value_qubits_override: Option<u32>,
}

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        message: message.into(),
    }
}

fn section<'a>(root: &'a Table, name: &str) -> Result<Option<&'a Table>> {
    match root.get(name) {
        None => Ok(None),
        Some(Value::Table(t)) => Ok(Some(t)),
        Some(_) => Err(config_err(name, "expected a table")),
    }
}

fn float(table: &Table, sec: &str, key: &str) -> Result<Option<f64>> {
    let full = format!("{sec}.{key}");
    match table.get(key) {
        None => Ok(None),
        Some(Value::Float(v)) => Ok(Some(*v)),
        Some(Value::Integer(v)) => Ok(Some(*v as f64)),
        Some(_) => Err(config_err(&full, "expected a number")),
    }
}

fn integer(table: &Table, sec: &str, key: &str) -> Result<Option<i64>> {
    let full = format!("{sec}.{key}");
    match table.get(key) {
        None => Ok(None),
        Some(Value::Integer(v)) => Ok(Some(*v)),
        Some(_) => Err(config_err(&full, "expected an integer")),
    }
}

fn unsigned<T: TryFrom<i64>>(table: &Table, sec: &str, key: &str) -> Result<Option<T>> {
    integer(table, sec, key)?
        .map(|v| T::try_from(v).map_err(|_| config_err(&format!("{sec}.{key}"), "out of range")))
        .transpose()
}

fn required<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| config_err(key, "missing required key"))
}

fn check_keys(table: &Table, sec: &str, allowed: &[&str]) -> Result<()> {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(config_err(&format!("{sec}.{key}"), "unknown key"));
        }
    }
    Ok(())
}

fn catalog(table: &Table, seed: u64) -> Result<CatalogEntry> {
    let name = match table.get("catalog") {
        Some(Value::String(s)) => s.as_str(),
        Some(_) => return Err(config_err("hamiltonian.catalog", "expected a string")),
        None => return Err(config_err("hamiltonian.catalog", "missing required key")),
    };
    let empty = Table::new();
    let params = match table.get("params") {
        None => &empty,
        Some(Value::Table(t)) => t,
        Some(_) => return Err(config_err("hamiltonian.params", "expected a table")),
    };
    let sec = "hamiltonian.params";
    let entry = match name {
        "gaussian" => {
            check_keys(params, sec, &["a"])?;
            CatalogEntry::Gaussian {
                a: required(float(params, sec, "a")?, "hamiltonian.params.a")?,
            }
        }
        "singular" => {
            check_keys(params, sec, &["end"])?;
            CatalogEntry::Singular {
                end: float(params, sec, "end")?.unwrap_or(crate::run::SINGULAR_END),
            }
        }
        "qubit_pair" => {
            check_keys(params, sec, &[])?;
            CatalogEntry::QubitPair
        }
        "random_sparse" => {
            check_keys(params, sec, &["qubits", "sparsity", "seed"])?;
            CatalogEntry::RandomSparse {
                qubits: unsigned(params, sec, "qubits")?.unwrap_or(2),
                sparsity: unsigned(params, sec, "sparsity")?.unwrap_or(2),
                seed: unsigned(params, sec, "seed")?.unwrap_or(seed),
            }
        }
        "piecewise" => {
            check_keys(params, sec, &["jumps"])?;
            CatalogEntry::Piecewise {
                jumps: unsigned(params, sec, "jumps")?.unwrap_or(2),
            }
        }
        other => {
            return Err(config_err(
                "hamiltonian.catalog",
                format!("unknown catalog entry '{other}'"),
            ))
        }
    };
    Ok(entry)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let root: Table = text
            .parse()
            .map_err(|e: toml::de::Error| config_err("<file>", e.message()))?;
        check_keys(&root, "<root>", &["hamiltonian", "simulation", "oracle"])?;
        let sim = section(&root, "simulation")?.ok_or_else(|| config_err("simulation", "missing section"))?;
        check_keys(sim, "simulation", &["mode", "k", "epsilon", "t0", "dt", "seed"])?;
        let ham = section(&root, "hamiltonian")?.ok_or_else(|| config_err("hamiltonian", "missing section"))?;
        check_keys(ham, "hamiltonian", &["catalog", "params"])?;

        let mode = match sim.get("mode") {
            Some(Value::String(s)) => s.parse()?,
            Some(_) => return Err(config_err("simulation.mode", "expected a string")),
            None => return Err(config_err("simulation.mode", "missing required key")),
        };
        let k: u32 = required(unsigned(sim, "simulation", "k")?, "simulation.k")?;
        if k == 0 {
            return Err(config_err("simulation.k", "must be at least 1"));
        }
        let epsilon = required(float(sim, "simulation", "epsilon")?, "simulation.epsilon")?;
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(config_err("simulation.epsilon", "must lie in (0, 1]"));
        }
        let dt = float(sim, "simulation", "dt")?;
        if dt.is_some_and(|v| !(v > 0.0)) {
            return Err(config_err("simulation.dt", "must be positive"));
        }
        let seed = unsigned(sim, "simulation", "seed")?.unwrap_or(0);

        let (mut time_bits_override, mut value_qubits_override) = (None, None);
        if let Some(oracle) = section(&root, "oracle")? {
            check_keys(oracle, "oracle", &["time_bits_override", "value_qubits_override"])?;
            time_bits_override = unsigned(oracle, "oracle", "time_bits_override")?;
            value_qubits_override = unsigned(oracle, "oracle", "value_qubits_override")?;
            if value_qubits_override.is_some_and(|v: u32| !v.is_multiple_of(2) || v == 0) {
                return Err(config_err(
                    "oracle.value_qubits_override",
                    "must be a positive even integer",
                ));
            }
            if time_bits_override == Some(0) {
                return Err(config_err("oracle.time_bits_override", "must be positive"));
            }
        }

        Ok(Self {
            catalog: catalog(ham, seed)?,
            mode,
            k,
            epsilon,
            t0: float(sim, "simulation", "t0")?,
            dt,
            seed,
            time_bits_override,
            value_qubits_override,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAUSSIAN: &str = r#"
[hamiltonian]
catalog = "gaussian"
params = { a = 0.1 }

[simulation]
mode = "adaptive"
k = 2
epsilon = 1e-4
"#;

    #[test]
    fn parses_minimal() {
        let c = RunConfig::parse(GAUSSIAN).unwrap();
        assert_eq!(c.catalog, CatalogEntry::Gaussian { a: 0.1 });
        assert_eq!(c.mode, Mode::Adaptive);
        assert_eq!((c.k, c.epsilon), (2, 1e-4));
    }

    #[test]
    fn missing_epsilon_names_key() {
        let text = GAUSSIAN.replace("epsilon = 1e-4\n", "");
        match RunConfig::parse(&text) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "simulation.epsilon"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let text = GAUSSIAN.replace("k = 2", "k = 2\nfoo = 1");
        assert!(matches!(RunConfig::parse(&text), Err(Error::Config { key, .. }) if key == "simulation.foo"));
        let text = GAUSSIAN.replace("\"adaptive\"", "\"magic\"");
        assert!(matches!(RunConfig::parse(&text), Err(Error::Config { key, .. }) if key == "simulation.mode"));
        let text = format!("{GAUSSIAN}\n[oracle]\nvalue_qubits_override = 7\n");
        assert!(RunConfig::parse(&text).is_err());
    }
}
