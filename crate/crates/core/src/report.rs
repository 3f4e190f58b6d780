//! Check records: one per verified inequality.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Non-finite floats are written as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod float {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};
    use serde_json::Value;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&tag(*v))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        parse(&Value::deserialize(d)?).ok_or_else(|| D::Error::custom("expected a number"))
    }

    pub fn tag(v: f64) -> String {
        if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    }

    pub fn parse(v: &Value) -> Option<f64> {
        match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => match s.as_str() {
                "inf" => Some(f64::INFINITY),
                "-inf" => Some(f64::NEG_INFINITY),
                "nan" => Some(f64::NAN),
                _ => None,
            },
            _ => None,
        }
    }

    pub mod option {
        use serde::{Deserialize, Deserializer, Serializer};
        use serde_json::Value;

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => super::serialize(x, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            let v = Option::<Value>::deserialize(d)?;
            Ok(v.as_ref().and_then(super::parse))
        }
    }
}

/// JSON value for a float, honoring the non-finite convention.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else {
        Value::String(float::tag(v))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(with = "float")]
    pub measured: f64,
    #[serde(default, with = "float::option", skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>, measured: f64, pass: bool) -> Self {
        CheckRecord { check: check.into(), params: Map::new(), measured, bound: None, pass, notes: String::new() }
    }

    /// `measured <= bound`.
    pub fn upper(check: impl Into<String>, measured: f64, bound: f64) -> Self {
        let mut r = CheckRecord::new(check, measured, measured <= bound);
        r.bound = Some(bound);
        r
    }

    /// `measured >= bound`.
    pub fn lower(check: impl Into<String>, measured: f64, bound: f64) -> Self {
        let mut r = CheckRecord::new(check, measured, measured >= bound);
        r.bound = Some(bound);
        r
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn param_f(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), num(value));
        self
    }

    pub fn note(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CheckReport {
    pub records: Vec<CheckRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

impl CheckReport {
    pub fn new() -> Self {
        CheckReport::default()
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.records.extend(other.records);
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn named<'a>(&'a self, check: &'a str) -> impl Iterator<Item = &'a CheckRecord> + 'a {
        self.records.iter().filter(move |r| r.check == check)
    }

    pub fn summary(&self) -> Summary {
        let passed = self.records.iter().filter(|r| r.pass).count();
        Summary { total: self.records.len(), passed, failed: self.records.len() - passed }
    }
}

impl FromIterator<CheckRecord> for CheckReport {
    fn from_iter<I: IntoIterator<Item = CheckRecord>>(iter: I) -> Self {
        CheckReport { records: iter.into_iter().collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_round_trip() {
        let r = CheckRecord::upper("ratio", f64::INFINITY, 2.0).param_f("r", f64::NAN);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"inf\"") && s.contains("\"nan\""));
        let back: CheckRecord = serde_json::from_str(&s).unwrap();
        assert!(back.measured.is_infinite() && !back.pass);
        assert_eq!(back.bound, Some(2.0));
    }
}
