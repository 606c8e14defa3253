//! TOML experiment files.
//!
//! The file holds a `[sweep]` table whose keys are exactly the fields of
//! [`SweepSpec`], and an optional `[threshold]` table with a `beta1` list
//! that turns the sweep into a threshold scan. Unknown keys are rejected.
//!
//! ```toml
//! [sweep]
//! factor = "theta"
//! values = [0.0, 0.5, 1.0]
//! outputs = ["steady_state", "profit"]
//! seed = 42
//!
//! [sweep.base]
//! alpha = 0.5
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::sweep::{Experiment, FactorValue, NetworkSpec};

pub fn parse_experiment(text: &str) -> Result<Experiment> {
    let experiment: Experiment = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    experiment.sweep.validate()?;
    Ok(experiment)
}

/// Reads an experiment file; relative graph-file paths are resolved against
/// the file's directory.
pub fn load_experiment(path: impl AsRef<Path>) -> Result<Experiment> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut experiment: Experiment =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if let Some(dir) = path.parent() {
        let resolve = |spec: &mut NetworkSpec| {
            if let NetworkSpec::File { path } = spec {
                if path.is_relative() {
                    *path = dir.join(&*path);
                }
            }
        };
        resolve(&mut experiment.sweep.network);
        for v in &mut experiment.sweep.values {
            if let FactorValue::Network(n) = v {
                resolve(n);
            }
        }
    }
    experiment.sweep.validate()?;
    Ok(experiment)
}

/// The effective configuration, in the same format [`parse_experiment`] reads.
pub fn to_toml(experiment: &Experiment) -> String {
    toml::to_string(experiment).expect("experiment is always representable as TOML")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{preset, Factor, Output, PRESET_NAMES};

    #[test]
    fn minimal_file_uses_defaults() {
        let e = parse_experiment("[sweep]\nfactor = \"alpha\"\nvalues = [0.2, 0.8]\n").unwrap();
        assert_eq!(e.sweep.factor, Factor::Alpha);
        assert_eq!(e.sweep.values.len(), 2);
        assert_eq!(e.sweep.seed, 42);
        assert!(e.sweep.outputs.contains(&Output::Profit));
        assert!(e.threshold.is_none());
    }

    #[test]
    fn network_values_and_threshold() {
        let text = r#"
[sweep]
factor = "network"
values = [
  { kind = "small-world", n = 100, k = 4, p = 0.1 },
  { kind = "scale-free", n = 100, m = 162, r = 2.0 },
]
outputs = ["profit"]

[threshold]
beta1 = [0.1, 1.0]
"#;
        let e = parse_experiment(text).unwrap();
        assert_eq!(e.sweep.values.len(), 2);
        assert_eq!(e.threshold.unwrap().beta1, vec![0.1, 1.0]);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let bad = [
            "[sweep]\nfactor = \"alpha\"\nvalues = [0.2]\ncolour = 1\n",
            "[sweep]\nfactor = \"alpha\"\nvalues = [0.2]\n[sweep.base]\nalfa = 1.0\n",
            "[sweep]\nfactor = \"network\"\nvalues = [{ kind = \"small-world\", n = 10, k = 2, q = 0.1 }]\n",
            "[sweep]\nfactor = \"alpha\"\nvalues = [0.2]\n[extra]\n",
            "[sweep]\nfactor = \"delta\"\nvalues = [0.2]\n",
        ];
        for text in bad {
            assert!(matches!(parse_experiment(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn invalid_values_are_rejected() {
        let text = "[sweep]\nfactor = \"theta\"\nvalues = [2.0]\n";
        assert!(matches!(parse_experiment(text), Err(Error::Parameter(_))));
    }

    #[test]
    fn presets_survive_toml_round_trip() {
        for name in PRESET_NAMES {
            let e = preset(name).unwrap();
            assert_eq!(parse_experiment(&to_toml(&e)).unwrap(), e, "{name}");
        }
    }
}
