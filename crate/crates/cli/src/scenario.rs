//! Scenario files: one JSON object or an array of them.
//!
//! ```json
//! {"name": "base",
//!  "financials": {"operating_revenue": 400, "operating_cost": 300},
//!  "disagreement": {"d1": 20, "d2": 30, "normalized": false},
//!  "model": {"kind": "constant", "alpha": 0.4}}
//! ```

use std::collections::HashSet;
use std::path::Path;

use nashroyalty_core::schema::{DisagreementInput, FinancialsInput, ModelDescriptor};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, ValidationError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub financials: Option<FinancialsInput>,
    pub disagreement: DisagreementInput,
    pub model: ModelDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operating_margin: Option<f64>,
}

impl Scenario {
    fn violations(&self, out: &mut Vec<String>) {
        let who = if self.name.is_empty() {
            "<unnamed>"
        } else {
            self.name.as_str()
        };
        if self.name.trim().is_empty() {
            out.push("scenario name must not be empty".into());
        }
        let fin = match self.financials.as_ref().map(FinancialsInput::profile).transpose() {
            Ok(fin) => fin,
            Err(e) => {
                out.push(format!("{who}: {e}"));
                None
            }
        };
        let d = &self.disagreement;
        if !d.normalized && self.financials.is_none() {
            out.push(format!("{who}: raw disagreement payoffs require financials"));
        } else if d.normalized || fin.is_some() {
            if let Err(e) = d.resolve(fin.as_ref()) {
                out.push(format!("{who}: {e}"));
            }
        }
        if let Some(m) = self.operating_margin {
            if !(m > 0.0 && m <= 1.0) {
                out.push(format!("{who}: operating margin {m} is outside (0, 1]"));
            }
        }
        if let Err(e) = self.model.resolve() {
            out.push(format!("{who}: {e}"));
        }
    }
}

fn parse_error(path: &Path, err: serde_path_to_error::Error<serde_json::Error>) -> CliError {
    let field = err.path().to_string();
    let inner = err.into_inner();
    let mut message = format!("line {}, column {}", inner.line(), inner.column());
    if field != "." {
        message.push_str(&format!(", field `{field}`"));
    }
    message.push_str(&format!(": {inner}"));
    CliError::ScenarioParse {
        path: path.to_path_buf(),
        message,
    }
}

/// Parses scenario JSON text; `path` is used only in messages.
pub fn parse_scenarios(path: &Path, text: &str) -> Result<Vec<Scenario>, CliError> {
    let scenarios = if text.trim_start().starts_with('[') {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize::<_, Vec<Scenario>>(de).map_err(|e| parse_error(path, e))?
    } else {
        let de = &mut serde_json::Deserializer::from_str(text);
        vec![serde_path_to_error::deserialize::<_, Scenario>(de).map_err(|e| parse_error(path, e))?]
    };
    validate(path, &scenarios)?;
    Ok(scenarios)
}

fn validate(path: &Path, scenarios: &[Scenario]) -> Result<(), CliError> {
    let mut violations = Vec::new();
    let mut seen = HashSet::new();
    for s in scenarios {
        if !s.name.is_empty() && !seen.insert(s.name.as_str()) {
            violations.push(format!("duplicate scenario name {:?}", s.name));
        }
        s.violations(&mut violations);
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::ScenarioInvalid(ValidationError {
            path: path.to_path_buf(),
            violations,
        }))
    }
}

pub fn load_scenarios(path: &Path) -> Result<Vec<Scenario>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))?;
    parse_scenarios(path, &text)
}

pub fn find_scenario(path: &Path, name: &str) -> Result<Scenario, CliError> {
    let scenarios = load_scenarios(path)?;
    let names: Vec<_> = scenarios.iter().map(|s| s.name.clone()).collect();
    scenarios
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "no scenario named {name:?} in {} (available: {})",
                path.display(),
                names.join(", ")
            ))
        })
}
