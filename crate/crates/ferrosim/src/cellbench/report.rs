//! Scenario reports: named assertions plus metrics, serialized as JSON
//! with fixed 9-significant-digit numbers for byte-identical reruns.

use crate::units::round_sig;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub config_digest: String,
    pub seed: Option<u64>,
    pub assertions: Vec<Assertion>,
    pub metrics: Map<String, Value>,
    pub outputs: Vec<String>,
}

impl ScenarioReport {
    pub fn new(scenario: &str, config_digest: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            config_digest: config_digest.to_string(),
            seed: None,
            assertions: Vec::new(),
            metrics: Map::new(),
            outputs: Vec::new(),
        }
    }

    pub fn assert_that(&mut self, name: &str, pass: bool, detail: String) {
        self.assertions.push(Assertion { name: name.to_string(), pass, detail });
    }

    pub fn metric_num(&mut self, name: &str, value: f64) {
        let v = round_sig(value, 9);
        self.metrics.insert(
            name.to_string(),
            serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null),
        );
    }

    pub fn metric(&mut self, name: &str, value: Value) {
        self.metrics.insert(name.to_string(), value);
    }

    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn failing_names(&self) -> Vec<String> {
        self.assertions.iter().filter(|a| !a.pass).map(|a| a.name.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}
