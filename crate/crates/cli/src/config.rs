//! `--config` overlay: a JSON object with one key per flag. Keys may use
//! dashes or underscores. Flags given on the command line take precedence.

use std::path::Path;

use clap::parser::ValueSource;
use clap::ArgMatches;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::{CliError, CliResult};

pub fn overlay<T: Serialize + DeserializeOwned>(args: T, config: &Path, matches: &ArgMatches) -> CliResult<T> {
    let text = std::fs::read_to_string(config).map_err(CliError::io(config))?;
    let overrides: serde_json::Map<String, Value> = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: expected a JSON object: {e}", config.display())))?;
    apply(args, overrides, |key| matches.value_source(key) == Some(ValueSource::CommandLine))
}

fn apply<T: Serialize + DeserializeOwned>(
    args: T,
    overrides: serde_json::Map<String, Value>,
    on_command_line: impl Fn(&str) -> bool,
) -> CliResult<T> {
    let Value::Object(mut fields) = serde_json::to_value(args).expect("argument structs serialize") else {
        unreachable!("argument structs serialize to objects")
    };
    for (key, value) in overrides {
        let key = key.replace('-', "_");
        if !fields.contains_key(&key) {
            return Err(CliError::Usage(format!("unknown config key {key:?}")));
        }
        if on_command_line(&key) {
            continue;
        }
        fields.insert(key, value);
    }
    serde_json::from_value(Value::Object(fields)).map_err(|e| CliError::Usage(format!("config: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::{EvalArgs, OperatorArgs, OperatorKind};
    use pqkant::BasisMode;

    fn base() -> EvalArgs {
        EvalArgs {
            config: None,
            function: None,
            x: Some("0.5".into()),
            operator: OperatorKind::K,
            tol: 1e-12,
            json: None,
            op: OperatorArgs {
                n: None,
                m: 0,
                alpha: "0".into(),
                beta: "0".into(),
                bn: "1".into(),
                p: "1".into(),
                q: "1".into(),
                mode: BasisMode::Normalized,
            },
        }
    }

    fn obj(v: Value) -> serde_json::Map<String, Value> {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn config_fills_unset_flags() {
        let cfg = obj(serde_json::json!({"fn": "sin", "n": 7, "p": 0.9, "q": "4/5", "mode": "literal", "x": 0.1}));
        let out = apply(base(), cfg, |k| k == "x").unwrap();
        assert_eq!(out.function.as_deref(), Some("sin"));
        assert_eq!(out.op.n, Some(7));
        assert_eq!(out.op.p, "0.9");
        assert_eq!(out.op.q, "4/5");
        assert_eq!(out.op.mode, BasisMode::Literal);
        assert_eq!(out.x.as_deref(), Some("0.5"));
    }

    #[test]
    fn unknown_and_mistyped_keys() {
        assert!(apply(base(), obj(serde_json::json!({"bogus": 1})), |_| false).is_err());
        assert!(apply(base(), obj(serde_json::json!({"mode": "other"})), |_| false).is_err());
        let dashed = apply(base(), obj(serde_json::json!({"tol": 1e-9})), |_| false).unwrap();
        assert_eq!(dashed.tol, 1e-9);
    }
}
