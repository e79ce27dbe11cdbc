use serde::Serialize;
use serde_json::Value;

/// One residual against the tolerance it was checked with.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub checks: Vec<Check>,
    pub result: Value,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str, inputs: Value, checks: Vec<Check>, result: Value) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self {
            command: command.to_string(),
            inputs,
            checks,
            result,
            passed,
            wall_time_s: None,
        }
    }

    /// A report whose verdict is decided by the command rather than by residuals.
    pub fn with_verdict(mut self, passed: bool) -> Self {
        self.passed = self.passed && passed;
        self
    }
}
