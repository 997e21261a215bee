//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "model": "serverfi",
//!   "iterations": 500,
//!   "repeats": 100,
//!   "master_seed": 42,
//!   "econ": { "productivity_init_mean": 1.0, "mutation_sigma": 0.1 },
//!   "serverfi": { "lambda": 2.0, "k": 8 },
//!   "retention": { "top_fraction": 0.2, "pool_share": 0.8, "window": 5 }
//! }
//! ```
//!
//! Only `model` is required. Missing keys take their defaults, unknown keys
//! are rejected.

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::econ::EconCoreParams;
use crate::error::{Result, SimError};
use crate::harness::{ExperimentSpec, ModelKind};
use crate::retention::RetentionParams;
use crate::serverfi::ServerFiParams;

const TOP_LEVEL_KEYS: [&str; 7] = [
    "model",
    "econ",
    "serverfi",
    "retention",
    "iterations",
    "repeats",
    "master_seed",
];

fn section<T: DeserializeOwned + Default>(root: &mut Map<String, Value>, key: &str) -> Result<T> {
    match root.remove(key) {
        None => Ok(T::default()),
        Some(v @ Value::Object(_)) => {
            serde_json::from_value(v).map_err(|e| SimError::Config(format!("{key}: {e}")))
        }
        Some(_) => Err(SimError::Config(format!("{key}: expected an object"))),
    }
}

fn scalar<T: DeserializeOwned>(root: &mut Map<String, Value>, key: &str, default: T) -> Result<T> {
    match root.remove(key) {
        None => Ok(default),
        Some(v) => serde_json::from_value(v).map_err(|e| SimError::Config(format!("{key}: {e}"))),
    }
}

/// Parse and validate an experiment configuration.
pub fn parse_config(text: &str) -> Result<ExperimentSpec> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| SimError::Config(format!("malformed JSON: {e}")))?;
    let Value::Object(mut root) = value else {
        return Err(SimError::Config("top level must be an object".into()));
    };
    if let Some(unknown) = root.keys().find(|k| !TOP_LEVEL_KEYS.contains(&k.as_str())) {
        return Err(SimError::Config(format!("unknown key `{unknown}`")));
    }
    let model: ModelKind = match root.remove("model") {
        None => return Err(SimError::Config("missing key `model`".into())),
        Some(v) => serde_json::from_value(v)
            .map_err(|e| SimError::Config(format!("model: {e}")))?,
    };
    let spec = ExperimentSpec {
        model,
        econ: section::<EconCoreParams>(&mut root, "econ")?,
        serverfi: section::<ServerFiParams>(&mut root, "serverfi")?,
        retention: section::<RetentionParams>(&mut root, "retention")?,
        iterations: scalar(&mut root, "iterations", ExperimentSpec::DEFAULT_ITERATIONS)?,
        repeats: scalar(&mut root, "repeats", ExperimentSpec::DEFAULT_REPEATS)?,
        master_seed: scalar(&mut root, "master_seed", ExperimentSpec::DEFAULT_SEED)?,
    };
    spec.validate()?;
    Ok(spec)
}

/// Render a spec as pretty JSON that [`parse_config`] accepts.
pub fn spec_to_json(spec: &ExperimentSpec) -> String {
    serde_json::to_string_pretty(spec).expect("spec is always serializable")
}
