//! Schema-checked access to the experiment parameter map. Every violation
//! names the offending key as `params.<key>`.

use geomcmp::{CurvatureProfile, InitialOperator};
use nalgebra::{DMatrix, DVector};
use serde_json::{Map, Value};

use crate::config::CliError;

pub struct ParamReader<'a> {
    map: &'a Map<String, Value>,
    prefix: String,
}

/// Keys the resolution chain owns; every experiment accepts them.
const COMMON_KEYS: [&str; 3] = ["steps", "tol", "seed"];

impl<'a> ParamReader<'a> {
    pub fn new(map: &'a Map<String, Value>) -> Self {
        ParamReader {
            map,
            prefix: "params".into(),
        }
    }

    fn child(&self, key: &str, map: &'a Map<String, Value>) -> Self {
        ParamReader {
            map,
            prefix: format!("{}.{key}", self.prefix),
        }
    }

    fn path(&self, key: &str) -> String {
        format!("{}.{key}", self.prefix)
    }

    fn missing(&self, key: &str, want: &str) -> CliError {
        CliError::Input(format!("{}: missing required {want}", self.path(key)))
    }

    fn mismatch(&self, key: &str, want: &str, got: &Value) -> CliError {
        CliError::Input(format!("{}: expected {want}, got {got}", self.path(key)))
    }

    /// Rejects keys outside the experiment's schema, naming the stray one.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.map.keys() {
            let known =
                allowed.contains(&key.as_str()) || COMMON_KEYS.contains(&key.as_str());
            if !known {
                let mut expected: Vec<&str> = allowed.to_vec();
                expected.extend(COMMON_KEYS);
                expected.sort_unstable();
                return Err(CliError::Input(format!(
                    "{}: unknown key; expected one of {}",
                    self.path(key),
                    expected.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        match self.map.get(key) {
            None => Err(self.missing(key, "number")),
            Some(v) => v
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| self.mismatch(key, "a finite number", v)),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        if self.map.contains_key(key) {
            self.f64(key)
        } else {
            Ok(default)
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        if self.map.contains_key(key) {
            self.f64(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        match self.map.get(key) {
            None => Err(self.missing(key, "positive integer")),
            Some(v) => v
                .as_u64()
                .filter(|&n| n > 0)
                .map(|n| n as usize)
                .ok_or_else(|| self.mismatch(key, "a positive integer", v)),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        if self.map.contains_key(key) {
            self.usize(key)
        } else {
            Ok(default)
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(Value::Bool(b)) => Ok(*b),
            Some(v) => Err(self.mismatch(key, "true or false", v)),
        }
    }

    pub fn vec_f64(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let v = self
            .map
            .get(key)
            .ok_or_else(|| self.missing(key, "array of numbers"))?;
        let arr = v
            .as_array()
            .ok_or_else(|| self.mismatch(key, "an array of numbers", v))?;
        arr.iter()
            .map(|x| {
                x.as_f64()
                    .filter(|y| y.is_finite())
                    .ok_or_else(|| self.mismatch(key, "an array of finite numbers", v))
            })
            .collect()
    }

    fn object(&self, key: &str) -> Result<ParamReader<'a>, CliError> {
        let v = self.map.get(key).ok_or_else(|| self.missing(key, "object"))?;
        match v {
            Value::Object(m) => Ok(self.child(key, m)),
            other => Err(self.mismatch(key, "an object", other)),
        }
    }

    fn kind(&self) -> Result<&'a str, CliError> {
        match self.map.get("kind") {
            None => Err(self.missing("kind", "string")),
            Some(Value::String(s)) => Ok(s.as_str()),
            Some(v) => Err(self.mismatch("kind", "a string", v)),
        }
    }

    /// Curvature profile sub-schema:
    /// `{"kind":"constant","n":3,"l":1.0,"k":0.5}` or
    /// `{"kind":"diagonal","l":1.0,"entries":[0.5,1.5]}`.
    pub fn profile(&self, key: &str) -> Result<CurvatureProfile, CliError> {
        let obj = self.object(key)?;
        match obj.kind()? {
            "constant" => {
                obj.check_profile_keys(&["kind", "n", "l", "k"])?;
                let n = obj.usize("n")?;
                let l = obj.f64("l")?;
                let k = obj.f64("k")?;
                CurvatureProfile::constant(n, l, k).map_err(CliError::Lib)
            }
            "diagonal" => {
                obj.check_profile_keys(&["kind", "l", "entries"])?;
                let l = obj.f64("l")?;
                let entries = obj.vec_f64("entries")?;
                CurvatureProfile::diagonal_constant(l, &entries).map_err(CliError::Lib)
            }
            other => Err(CliError::Input(format!(
                "{}.kind: unknown profile kind \"{other}\"; expected constant or diagonal",
                obj.prefix
            ))),
        }
    }

    /// Initial-operator sub-schema:
    /// `{"kind":"scalar","dim":2,"value":0.3}` or
    /// `{"kind":"matrix","rows":[[0.3,0.0],[0.0,0.9]]}`.
    pub fn operator(&self, key: &str) -> Result<InitialOperator, CliError> {
        let obj = self.object(key)?;
        match obj.kind()? {
            "scalar" => {
                obj.check_profile_keys(&["kind", "dim", "value"])?;
                let dim = obj.usize("dim")?;
                let value = obj.f64("value")?;
                Ok(InitialOperator::scalar(dim, value))
            }
            "matrix" => {
                obj.check_profile_keys(&["kind", "rows"])?;
                let rows = obj.matrix_rows("rows")?;
                InitialOperator::from_matrix(rows).map_err(CliError::Lib)
            }
            other => Err(CliError::Input(format!(
                "{}.kind: unknown operator kind \"{other}\"; expected scalar or matrix",
                obj.prefix
            ))),
        }
    }

    /// Sub-object key check without the steps/tol/seed carve-out.
    fn check_profile_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Input(format!(
                    "{}: unknown key; expected one of {}",
                    self.path(key),
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn vector(&self, key: &str) -> Result<DVector<f64>, CliError> {
        let entries = self.vec_f64(key)?;
        if entries.is_empty() {
            return Err(CliError::Input(format!(
                "{}: needs at least one entry",
                self.path(key)
            )));
        }
        Ok(DVector::from_vec(entries))
    }

    fn matrix_rows(&self, key: &str) -> Result<DMatrix<f64>, CliError> {
        let v = self
            .map
            .get(key)
            .ok_or_else(|| self.missing(key, "array of number rows"))?;
        let rows = v
            .as_array()
            .ok_or_else(|| self.mismatch(key, "an array of rows", v))?;
        if rows.is_empty() {
            return Err(self.mismatch(key, "a non-empty array of rows", v));
        }
        let mut data: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
        for row in rows {
            let entries = row
                .as_array()
                .ok_or_else(|| self.mismatch(key, "rows of numbers", v))?
                .iter()
                .map(|x| {
                    x.as_f64()
                        .filter(|y| y.is_finite())
                        .ok_or_else(|| self.mismatch(key, "rows of finite numbers", v))
                })
                .collect::<Result<Vec<f64>, CliError>>()?;
            if entries.len() != rows.len() {
                return Err(self.mismatch(key, "a square matrix", v));
            }
            data.push(entries);
        }
        let n = data.len();
        Ok(DMatrix::from_fn(n, n, |i, j| data[i][j]))
    }
}
