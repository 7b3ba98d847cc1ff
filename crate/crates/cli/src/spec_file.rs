//! Loading diffusion specifications and probability vectors from JSON files.
//!
//! Schema problems are reported with the path of the offending field, e.g.
//! `axes[1].sigma2` or `payoff.values`.

use std::fmt;
use std::path::Path;

use serde_json::{Map, Value};
use tau_spectra::diffusion::{DiffusionAxis, DiffusionSpec};
use tau_spectra::wealth::linear_payoff;
use tau_spectra::{PayoffTensor, ProbabilityTensor};

#[derive(Debug)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn fail<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError { path: path.into(), message: message.into() })
}

pub struct LoadedSpec {
    pub spec: DiffusionSpec,
    pub payoff: Option<PayoffTensor>,
}

fn read_json(path: &Path) -> Result<Value, SchemaError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).or_else(|e| fail(&shown, format!("cannot read file: {e}")))?;
    serde_json::from_str(&text).or_else(|e| fail(&shown, format!("invalid JSON: {e}")))
}

fn object<'a>(value: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>, SchemaError> {
    let Some(map) = value.as_object() else {
        return fail(path, "expected an object");
    };
    if let Some(key) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
        let at = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
        return fail(at, format!("unknown field; expected one of {}", allowed.join(", ")));
    }
    Ok(map)
}

fn number(map: &Map<String, Value>, key: &str, path: &str) -> Result<Option<f64>, SchemaError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => match v.as_f64() {
            Some(x) if x.is_finite() => Ok(Some(x)),
            _ => fail(format!("{path}.{key}"), "expected a finite number"),
        },
    }
}

fn required(map: &Map<String, Value>, key: &str, path: &str) -> Result<f64, SchemaError> {
    number(map, key, path)?.map_or_else(|| fail(format!("{path}.{key}"), "missing"), Ok)
}

fn numbers(value: &Value, path: &str) -> Result<Vec<f64>, SchemaError> {
    let Some(items) = value.as_array() else {
        return fail(path, "expected an array of numbers");
    };
    items
        .iter()
        .enumerate()
        .map(|(i, v)| match v.as_f64() {
            Some(x) if x.is_finite() => Ok(x),
            _ => fail(format!("{path}[{i}]"), "expected a finite number"),
        })
        .collect()
}

fn parse_axis(value: &Value, path: &str) -> Result<DiffusionAxis, SchemaError> {
    let map = object(value, path, &["n", "mu", "sigma2", "delta"])?;
    let n = match map.get("n") {
        None => return fail(format!("{path}.n"), "missing"),
        Some(v) => match v.as_u64() {
            Some(n) if n >= 2 => n as usize,
            _ => return fail(format!("{path}.n"), "expected an integer >= 2"),
        },
    };
    let mu = required(map, "mu", path)?;
    let sigma2 = required(map, "sigma2", path)?;
    if sigma2 <= 0.0 {
        return fail(format!("{path}.sigma2"), "must be positive");
    }
    let axis = match number(map, "delta", path)? {
        Some(delta) if delta <= 0.0 => return fail(format!("{path}.delta"), "must be positive"),
        Some(delta) => DiffusionAxis::with_delta(n, delta, mu, sigma2),
        None => DiffusionAxis::new(n, mu, sigma2),
    };
    axis.or_else(|e| fail(path, e.to_string()))
}

fn parse_payoff(value: &Value, spec: &DiffusionSpec) -> Result<PayoffTensor, SchemaError> {
    let kind = value.get("kind").and_then(Value::as_str);
    match kind {
        Some("linear") => {
            let map = object(value, "payoff", &["kind", "weights"])?;
            let Some(raw) = map.get("weights") else {
                return fail("payoff.weights", "missing");
            };
            let weights = numbers(raw, "payoff.weights")?;
            if weights.len() != spec.axes.len() {
                return fail(
                    "payoff.weights",
                    format!("expected {} weights (one per axis), found {}", spec.axes.len(), weights.len()),
                );
            }
            linear_payoff(spec, &weights).or_else(|e| fail("payoff.weights", e.to_string()))
        }
        Some("tensor") => {
            let map = object(value, "payoff", &["kind", "values", "description"])?;
            let Some(raw) = map.get("values") else {
                return fail("payoff.values", "missing");
            };
            let values = numbers(raw, "payoff.values")?;
            let expected: usize = spec.dims().iter().product();
            if values.len() != expected {
                return fail(
                    "payoff.values",
                    format!("expected {expected} values for dims {:?}, found {}", spec.dims(), values.len()),
                );
            }
            let description = map.get("description").and_then(Value::as_str).unwrap_or("tensor");
            PayoffTensor::new(spec.dims(), values, description).or_else(|e| fail("payoff.values", e.to_string()))
        }
        Some(other) => fail("payoff.kind", format!("unknown kind {other:?}; expected \"linear\" or \"tensor\"")),
        None => fail("payoff.kind", "missing"),
    }
}

/// Parses `{axes: [...], payoff?: {...}}`. A missing `delta` means
/// `1/(n−1)`.
pub fn parse_spec(value: &Value) -> Result<LoadedSpec, SchemaError> {
    let root = object(value, "", &["axes", "payoff"])?;
    let Some(axes) = root.get("axes") else {
        return fail("axes", "missing");
    };
    let Some(axes) = axes.as_array() else {
        return fail("axes", "expected an array of axis objects");
    };
    if axes.is_empty() {
        return fail("axes", "must list at least one axis");
    }
    let axes = axes
        .iter()
        .enumerate()
        .map(|(i, a)| parse_axis(a, &format!("axes[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = DiffusionSpec::new(axes).or_else(|e| fail("axes", e.to_string()))?;
    let payoff = root.get("payoff").map(|p| parse_payoff(p, &spec)).transpose()?;
    Ok(LoadedSpec { spec, payoff })
}

pub fn load_spec(path: &Path) -> Result<LoadedSpec, SchemaError> {
    parse_spec(&read_json(path)?)
}

/// Reads a probability vector given either as a bare array in lexicographic
/// order or as `{dims, values}`.
pub fn load_distribution(path: &Path, dims: &[usize]) -> Result<ProbabilityTensor, SchemaError> {
    let value = read_json(path)?;
    let values = if value.is_array() {
        numbers(&value, "p0")?
    } else {
        let map = object(&value, "p0", &["dims", "values"])?;
        if let Some(d) = map.get("dims") {
            let found: Option<Vec<usize>> =
                d.as_array().map(|a| a.iter().filter_map(|x| x.as_u64().map(|x| x as usize)).collect());
            if found.as_deref() != Some(dims) {
                return fail("p0.dims", format!("expected {dims:?}"));
            }
        }
        let Some(raw) = map.get("values") else {
            return fail("p0.values", "missing");
        };
        numbers(raw, "p0.values")?
    };
    let expected: usize = dims.iter().product();
    if values.len() != expected {
        return fail("p0.values", format!("expected {expected} values, found {}", values.len()));
    }
    ProbabilityTensor::new(dims.to_vec(), values).or_else(|e| fail("p0", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn error_path(v: Value) -> String {
        match parse_spec(&v) {
            Err(e) => e.path,
            Ok(_) => panic!("expected a schema error"),
        }
    }

    #[test]
    fn two_asset_file_loads() {
        let v = json!({
            "axes": [{"n": 31, "mu": 0.01, "sigma2": 0.0025}, {"n": 31, "mu": 0.01, "sigma2": 0.0025}],
            "payoff": {"kind": "linear", "weights": [1, 1]}
        });
        let loaded = parse_spec(&v).unwrap();
        assert_eq!(loaded.spec.dims(), vec![31, 31]);
        assert_eq!(loaded.spec.axes[0].delta, 1.0 / 30.0);
        assert_eq!(loaded.payoff.unwrap().values.len(), 961);
    }

    #[test]
    fn schema_errors_name_the_field() {
        assert_eq!(error_path(json!({"axes": []})), "axes");
        assert_eq!(error_path(json!({})), "axes");
        assert_eq!(error_path(json!({"axes": [{"n": 1, "mu": 0, "sigma2": 1}]})), "axes[0].n");
        assert_eq!(error_path(json!({"axes": [{"n": 3, "mu": "x", "sigma2": 1}]})), "axes[0].mu");
        assert_eq!(error_path(json!({"axes": [{"n": 3, "mu": 0}]})), "axes[0].sigma2");
        assert_eq!(error_path(json!({"axes": [{"n": 3, "mu": 0, "sigma2": 1, "extra": 1}]})), "axes[0].extra");
        assert_eq!(
            error_path(json!({"axes": [{"n": 3, "mu": 0, "sigma2": 1}], "payoff": {"kind": "tensor", "values": [1, 2]}})),
            "payoff.values"
        );
        assert_eq!(
            error_path(json!({"axes": [{"n": 3, "mu": 0, "sigma2": 1}], "payoff": {"kind": "linear", "weights": [1, 2]}})),
            "payoff.weights"
        );
        assert_eq!(
            error_path(json!({"axes": [{"n": 3, "mu": 0, "sigma2": 1}], "payoff": {"kind": "cubic"}})),
            "payoff.kind"
        );
    }
}
