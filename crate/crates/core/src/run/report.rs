use serde::Serialize;
use serde_json::Value;

/// One pass/fail item with the measured value and its bound.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    /// `"max"` when `value ≤ bound` passes, `"min"` when `value ≥ bound` does.
    pub kind: &'static str,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound,
            kind: "max",
            pass: value <= bound,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound,
            kind: "min",
            pass: value >= bound,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

/// The machine-readable outcome of a command. Everything except
/// `wall_time_s` is a pure function of the config and seed.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub details: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sections: Vec<Report>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Report {
    pub fn new(command: &str, config_hash: &str, seed: u64) -> Self {
        Report {
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            seed,
            pass: true,
            checks: Vec::new(),
            details: Value::Object(Default::default()),
            sections: Vec::new(),
            error: None,
            wall_time_s: None,
        }
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report details serialize");
        if let Value::Object(map) = &mut self.details {
            map.insert(key.to_string(), v);
        }
    }

    pub fn section(&mut self, r: Report) {
        self.pass &= r.pass;
        self.sections.push(r);
    }

    pub fn fail(&mut self, message: String) {
        self.pass = false;
        self.error = Some(message);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
