use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA: &str = "v1";

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }
}

impl From<&sadic::coding::Certificate> for Check {
    fn from(c: &sadic::coding::Certificate) -> Self {
        Check::new(c.name.clone(), c.passed, c.detail.clone())
    }
}

/// What a subcommand produced, before it is wrapped into a report.
#[derive(Default)]
pub struct Outcome {
    pub inputs: Vec<String>,
    pub parameters: Map<String, Value>,
    pub results: Value,
    pub certificates: Vec<Check>,
}

impl Outcome {
    pub fn input(mut self, s: impl Into<String>) -> Self {
        self.inputs.push(s.into());
        self
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.to_string(), to_value(value));
        self
    }

    pub fn results(mut self, value: impl Serialize) -> Self {
        self.results = to_value(value);
        self
    }

    pub fn check(mut self, c: Check) -> Self {
        self.certificates.push(c);
        self
    }

    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed)
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// One report object; object keys come out sorted because `serde_json`'s map
/// is ordered.
pub fn render(command: &str, outcome: &Outcome, pretty: bool) -> String {
    let report = serde_json::json!({
        "command": command,
        "inputs": outcome.inputs,
        "parameters": outcome.parameters,
        "results": outcome.results,
        "certificates": outcome.certificates,
        "version": {
            "schema": SCHEMA,
            "tool": env!("CARGO_PKG_VERSION"),
        },
    });
    if pretty {
        serde_json::to_string_pretty(&report).expect("serializable") + "\n"
    } else {
        serde_json::to_string(&report).expect("serializable") + "\n"
    }
}

pub fn render_error(command: &str, kind: &str, message: &str, pretty: bool) -> String {
    let outcome = Outcome::default().results(serde_json::json!({
        "error": message,
        "kind": kind,
    }));
    render(command, &outcome, pretty)
}
