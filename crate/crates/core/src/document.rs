//! JSON scenario documents.
//!
//! Tuples in a document follow the member order in which the context is
//! listed in the file; they are permuted into global measurement order on
//! load.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Result;
use crate::model::{format_rational, parse_rational, EmpiricalModel, SupportModel};
use crate::scenario::{Scenario, Section};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub measurements: Vec<String>,
    pub outcomes: Vec<Label>,
    pub contexts: Vec<Vec<String>>,
    pub model: ModelEntry,
}

/// Outcome labels may be written as strings or integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Text(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelEntry {
    /// Per context, the possible outcome tuples.
    Support(Vec<Vec<Tuple>>),
    /// Per context, tuple (comma-joined) to probability `"p/q"`.
    Distribution(Vec<BTreeMap<String, String>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tuple {
    Joined(String),
    Items(Vec<Label>),
}

impl Tuple {
    fn parts(&self) -> Vec<String> {
        match self {
            Tuple::Joined(s) if s.is_empty() => Vec::new(),
            Tuple::Joined(s) => s.split(',').map(|p| p.trim().to_string()).collect(),
            Tuple::Items(items) => items.iter().map(Label::to_string).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", render(.0))]
pub struct DocumentError(pub Vec<SchemaError>);

fn render(errors: &[SchemaError]) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelData {
    Support(SupportModel),
    Empirical(EmpiricalModel),
}

/// A schema-valid document with its scenario and model built.
#[derive(Debug, Clone)]
pub struct Document {
    pub source: ScenarioDocument,
    pub scenario: Scenario,
    pub model: ModelData,
}

impl Document {
    /// The support model; distributions must be no-signalling.
    pub fn support_model(&self) -> Result<SupportModel> {
        match &self.model {
            ModelData::Support(s) => Ok(s.clone()),
            ModelData::Empirical(e) => e.support_of(),
        }
    }

    pub fn empirical(&self) -> Option<&EmpiricalModel> {
        match &self.model {
            ModelData::Empirical(e) => Some(e),
            ModelData::Support(_) => None,
        }
    }
}

struct Errors(Vec<SchemaError>);

impl Errors {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(SchemaError { path: path.into(), message: message.into() });
    }
}

pub fn parse_scenario(text: &str) -> std::result::Result<Document, DocumentError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let source: ScenarioDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        DocumentError(vec![SchemaError { path, message: e.into_inner().to_string() }])
    })?;
    source.load()
}

impl ScenarioDocument {
    /// Validates the document and builds the scenario and model.
    pub fn load(&self) -> std::result::Result<Document, DocumentError> {
        let mut errs = Errors(Vec::new());
        let outcomes: Vec<String> = self.outcomes.iter().map(Label::to_string).collect();

        if self.measurements.is_empty() {
            errs.push("measurements", "no measurements");
        }
        duplicates(&mut errs, "measurements", &self.measurements);
        if outcomes.len() < 2 {
            errs.push("outcomes", "at least two outcomes are required");
        }
        duplicates(&mut errs, "outcomes", &outcomes);

        let mut indices = Vec::with_capacity(self.contexts.len());
        for (i, ctx) in self.contexts.iter().enumerate() {
            if ctx.is_empty() {
                errs.push(format!("contexts[{i}]"), "empty context");
            }
            let mut members = Vec::with_capacity(ctx.len());
            for (j, label) in ctx.iter().enumerate() {
                match self.measurements.iter().position(|m| m == label) {
                    Some(m) if members.contains(&m) => {
                        errs.push(format!("contexts[{i}][{j}]"), format!("measurement {label:?} listed twice"))
                    }
                    Some(m) => members.push(m),
                    None => errs.push(format!("contexts[{i}][{j}]"), format!("unknown measurement {label:?}")),
                }
            }
            indices.push(members);
        }
        if !errs.0.is_empty() {
            return Err(DocumentError(errs.0));
        }

        let scenario = Scenario::new(self.measurements.clone(), outcomes.clone(), indices.clone())
            .map_err(|e| DocumentError(vec![SchemaError { path: "contexts".into(), message: e.to_string() }]))?;

        // file position k of context i holds global measurement indices[i][k]
        let to_section = |i: usize, tuple: &Tuple| -> std::result::Result<Section, String> {
            let parts = tuple.parts();
            let listed = &indices[i];
            if parts.len() != listed.len() {
                return Err(format!("tuple has {} entries, context {i} has arity {}", parts.len(), listed.len()));
            }
            let mut pairs = Vec::with_capacity(parts.len());
            for (m, p) in listed.iter().zip(&parts) {
                let v = outcomes.iter().position(|o| o == p).ok_or_else(|| format!("unknown outcome {p:?}"))?;
                pairs.push((*m, v));
            }
            pairs.sort_unstable();
            let domain = pairs.iter().map(|p| p.0).collect();
            Section::new(domain, pairs.into_iter().map(|p| p.1).collect()).map_err(|e| e.to_string())
        };

        let model = match &self.model {
            ModelEntry::Support(supports) => {
                if supports.len() != self.contexts.len() {
                    errs.push(
                        "model.support",
                        format!("{} support lists for {} contexts", supports.len(), self.contexts.len()),
                    );
                    return Err(DocumentError(errs.0));
                }
                let mut sets = Vec::with_capacity(supports.len());
                for (i, tuples) in supports.iter().enumerate() {
                    if tuples.is_empty() {
                        errs.push(format!("model.support[{i}]"), format!("context {i} has an empty support"));
                    }
                    let mut set = Vec::with_capacity(tuples.len());
                    for (k, t) in tuples.iter().enumerate() {
                        match to_section(i, t) {
                            Ok(s) => set.push(s),
                            Err(m) => errs.push(format!("model.support[{i}][{k}]"), m),
                        }
                    }
                    sets.push(set);
                }
                if !errs.0.is_empty() {
                    return Err(DocumentError(errs.0));
                }
                SupportModel::new(scenario.clone(), sets)
                    .map(ModelData::Support)
                    .map_err(|e| DocumentError(vec![SchemaError { path: "model.support".into(), message: e.to_string() }]))?
            }
            ModelEntry::Distribution(tables) => {
                if tables.len() != self.contexts.len() {
                    errs.push(
                        "model.distribution",
                        format!("{} tables for {} contexts", tables.len(), self.contexts.len()),
                    );
                    return Err(DocumentError(errs.0));
                }
                let mut dense = Vec::with_capacity(tables.len());
                for (i, table) in tables.iter().enumerate() {
                    let ctx = &scenario.contexts()[i];
                    let sections = scenario.enumerate_sections(&ctx.members).expect("context is a subset of X");
                    let mut weights = vec![BigRational::zero(); sections.len()];
                    let mut seen = HashSet::new();
                    let mut sum = BigRational::zero();
                    let mut ok = true;
                    for (key, value) in table {
                        let path = format!("model.distribution[{i}][{key:?}]");
                        let s = match to_section(i, &Tuple::Joined(key.clone())) {
                            Ok(s) => s,
                            Err(m) => {
                                errs.push(path, m);
                                ok = false;
                                continue;
                            }
                        };
                        let p = match parse_rational(value) {
                            Ok(p) => p,
                            Err(e) => {
                                errs.push(path, e.to_string());
                                ok = false;
                                continue;
                            }
                        };
                        if !seen.insert(s.clone()) {
                            errs.push(path, "tuple given twice");
                            ok = false;
                            continue;
                        }
                        let k = sections.binary_search(&s).expect("enumeration is sorted");
                        sum += &p;
                        weights[k] = p;
                    }
                    if ok && !sum.is_one() {
                        errs.push(
                            format!("model.distribution[{i}]"),
                            format!("context {i}: probabilities sum to {}, expected 1", format_rational(&sum)),
                        );
                    }
                    dense.push(weights);
                }
                if !errs.0.is_empty() {
                    return Err(DocumentError(errs.0));
                }
                EmpiricalModel::new(scenario.clone(), dense).map(ModelData::Empirical).map_err(|e| {
                    DocumentError(vec![SchemaError { path: "model.distribution".into(), message: e.to_string() }])
                })?
            }
        };
        Ok(Document { source: self.clone(), scenario, model })
    }
}

fn duplicates(errs: &mut Errors, path: &str, labels: &[String]) {
    let mut seen = HashSet::new();
    for (i, l) in labels.iter().enumerate() {
        if !seen.insert(l) {
            errs.push(format!("{path}[{i}]"), format!("duplicate label {l:?}"));
        }
    }
}
