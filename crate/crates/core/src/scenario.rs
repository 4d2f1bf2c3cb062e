//! Measurement scenarios.
//!
//! A scenario fixes a finite set of measurements `X`, a finite set of outcomes
//! `O` and a cover of `X` by contexts (sets of jointly performable
//! measurements). Measurements and outcomes are referred to by their index in
//! the scenario's label lists; every subset of measurements is kept sorted in
//! that global order so that sections, simplices and matrices built on top of
//! a scenario are deterministic.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// A set of measurement indices, sorted ascending and duplicate-free.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MeasurementSet(Vec<usize>);

impl MeasurementSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, m: usize) -> bool {
        self.0.binary_search(&m).is_ok()
    }

    /// Position of measurement `m` inside this set.
    pub fn position(&self, m: usize) -> Option<usize> {
        self.0.binary_search(&m).ok()
    }

    pub fn is_subset(&self, other: &MeasurementSet) -> bool {
        self.0.iter().all(|&m| other.contains(m))
    }

    pub fn intersection(&self, other: &MeasurementSet) -> MeasurementSet {
        Self(self.0.iter().copied().filter(|&m| other.contains(m)).collect())
    }

    pub fn union(&self, other: &MeasurementSet) -> MeasurementSet {
        self.0.iter().chain(other.0.iter()).copied().collect()
    }
}

impl FromIterator<usize> for MeasurementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }
}

impl<const N: usize> From<[usize; N]> for MeasurementSet {
    fn from(a: [usize; N]) -> Self {
        a.into_iter().collect()
    }
}

/// An assignment of one outcome to each measurement of `domain`.
///
/// `values[i]` is the outcome index of measurement `domain[i]`. The derived
/// ordering compares domains first and then values lexicographically, which
/// is the canonical enumeration order of `E(U)` for a fixed `U`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Section {
    domain: MeasurementSet,
    values: Vec<usize>,
}

impl Section {
    pub fn new(domain: MeasurementSet, values: Vec<usize>) -> Result<Self> {
        if domain.len() != values.len() {
            return Err(Error::Domain(format!(
                "section over {} measurements given {} values",
                domain.len(),
                values.len()
            )));
        }
        Ok(Self { domain, values })
    }

    /// The unique section over the empty set.
    pub fn empty() -> Self {
        Self { domain: MeasurementSet::empty(), values: Vec::new() }
    }

    pub fn domain(&self) -> &MeasurementSet {
        &self.domain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value_of(&self, m: usize) -> Option<usize> {
        self.domain.position(m).map(|i| self.values[i])
    }

    /// Function restriction `s | target`.
    pub fn restrict(&self, target: &MeasurementSet) -> Result<Section> {
        let values = target
            .iter()
            .map(|m| {
                self.value_of(m).ok_or_else(|| {
                    Error::Domain(format!(
                        "cannot restrict section over {:?} to {:?}",
                        self.domain.as_slice(),
                        target.as_slice()
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Section { domain: target.clone(), values })
    }

    /// Whether `self` and `other` agree on their common measurements.
    pub fn agrees_with(&self, other: &Section) -> bool {
        self.domain
            .iter()
            .zip(&self.values)
            .all(|(m, &v)| other.value_of(m).is_none_or(|w| w == v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub index: usize,
    pub members: MeasurementSet,
}

/// A q-simplex of the nerve: a list of `q + 1` distinct cover indices whose
/// contexts have nonempty common intersection (the carrier).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Simplex {
    pub vertices: Vec<usize>,
    pub carrier: MeasurementSet,
}

impl Simplex {
    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    measurements: Vec<String>,
    outcomes: Vec<String>,
    contexts: Vec<Context>,
}

impl Scenario {
    /// Builds a scenario from labels and contexts given as measurement
    /// indices. Context members are sorted into global order.
    pub fn new(
        measurements: Vec<String>,
        outcomes: Vec<String>,
        contexts: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if measurements.is_empty() {
            return Err(Error::InvalidScenario("no measurements".into()));
        }
        if outcomes.len() < 2 {
            return Err(Error::InvalidScenario("at least two outcomes are required".into()));
        }
        check_distinct("measurement", &measurements)?;
        check_distinct("outcome", &outcomes)?;
        if contexts.is_empty() {
            return Err(Error::InvalidScenario("empty cover".into()));
        }

        let mut seen = HashSet::new();
        let mut covered = vec![false; measurements.len()];
        let mut built = Vec::with_capacity(contexts.len());
        for (index, members) in contexts.into_iter().enumerate() {
            if members.is_empty() {
                return Err(Error::InvalidScenario(format!("context {index} is empty")));
            }
            let raw_len = members.len();
            let members: MeasurementSet = members.into_iter().collect();
            if members.len() != raw_len {
                return Err(Error::InvalidScenario(format!(
                    "context {index} lists a measurement twice"
                )));
            }
            if let Some(m) = members.iter().find(|&m| m >= measurements.len()) {
                return Err(Error::InvalidScenario(format!(
                    "context {index} refers to unknown measurement {m}"
                )));
            }
            if !seen.insert(members.clone()) {
                return Err(Error::InvalidScenario(format!("context {index} is a duplicate")));
            }
            for m in members.iter() {
                covered[m] = true;
            }
            built.push(Context { index, members });
        }
        if let Some(m) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidScenario(format!(
                "measurement {} is not covered by any context",
                measurements[m]
            )));
        }
        Ok(Self { measurements, outcomes, contexts: built })
    }

    /// Convenience constructor from string labels.
    pub fn from_labels(measurements: &[&str], outcomes: &[&str], contexts: &[&[&str]]) -> Result<Self> {
        let measurements: Vec<String> = measurements.iter().map(|s| s.to_string()).collect();
        let contexts = contexts
            .iter()
            .map(|c| {
                c.iter()
                    .map(|label| {
                        measurements.iter().position(|m| m == label).ok_or_else(|| {
                            Error::InvalidScenario(format!("unknown measurement {label}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(measurements, outcomes.iter().map(|s| s.to_string()).collect(), contexts)
    }

    pub fn measurements(&self) -> &[String] {
        &self.measurements
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn context(&self, i: usize) -> Result<&Context> {
        self.contexts
            .get(i)
            .ok_or_else(|| Error::Domain(format!("no context with index {i}")))
    }

    pub fn all_measurements(&self) -> MeasurementSet {
        (0..self.measurements.len()).collect()
    }

    pub fn measurement_index(&self, label: &str) -> Option<usize> {
        self.measurements.iter().position(|m| m == label)
    }

    pub fn outcome_index(&self, label: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o == label)
    }

    /// Pairs `(i, j)` where context `i` is strictly contained in context `j`.
    pub fn nested_contexts(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in &self.contexts {
            for b in &self.contexts {
                if a.index != b.index && a.members.is_subset(&b.members) {
                    out.push((a.index, b.index));
                }
            }
        }
        out
    }

    /// All sections of `E(subset)` in canonical order: lexicographic in the
    /// outcome indices, the last measurement varying fastest.
    pub fn enumerate_sections(&self, subset: &MeasurementSet) -> Result<Vec<Section>> {
        if let Some(m) = subset.iter().find(|&m| m >= self.measurements.len()) {
            return Err(Error::Domain(format!("unknown measurement index {m}")));
        }
        let k = self.outcomes.len();
        let n = subset.len();
        let total = k.checked_pow(n as u32).ok_or_else(|| {
            Error::Domain(format!("E(U) too large to enumerate ({k}^{n})"))
        })?;
        let mut out = Vec::with_capacity(total);
        let mut values = vec![0usize; n];
        loop {
            out.push(Section { domain: subset.clone(), values: values.clone() });
            let mut pos = n;
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                values[pos] += 1;
                if values[pos] < k {
                    break;
                }
                values[pos] = 0;
            }
        }
    }

    /// Intersection of the contexts listed in `vertices`.
    pub fn carrier(&self, vertices: &[usize]) -> Result<MeasurementSet> {
        let (first, rest) = vertices
            .split_first()
            .ok_or_else(|| Error::Domain("empty vertex list".into()))?;
        let mut acc = self.context(*first)?.members.clone();
        for &v in rest {
            acc = acc.intersection(&self.context(v)?.members);
        }
        Ok(acc)
    }

    /// Simplices of the nerve in dimensions `0..=max_q`, each level in
    /// lexicographic order of vertex lists. Lists with a repeated vertex are
    /// not generated.
    pub fn nerve(&self, max_q: usize) -> Nerve {
        let mut levels: Vec<Vec<Simplex>> = Vec::with_capacity(max_q + 1);
        levels.push(
            self.contexts
                .iter()
                .map(|c| Simplex { vertices: vec![c.index], carrier: c.members.clone() })
                .collect(),
        );
        for q in 1..=max_q {
            let mut next = Vec::new();
            for s in &levels[q - 1] {
                for c in &self.contexts {
                    if s.vertices.contains(&c.index) {
                        continue;
                    }
                    let carrier = s.carrier.intersection(&c.members);
                    if carrier.is_empty() {
                        continue;
                    }
                    let mut vertices = s.vertices.clone();
                    vertices.push(c.index);
                    next.push(Simplex { vertices, carrier });
                }
            }
            levels.push(next);
        }
        Nerve { levels }
    }

    /// The face `∂_j(σ)` obtained by omitting vertex `j`.
    pub fn face(&self, simplex: &Simplex, j: usize) -> Result<Simplex> {
        let q = simplex.vertices.len().saturating_sub(1);
        if q == 0 || j > q {
            return Err(Error::Domain(format!("face index {j} out of range for a {q}-simplex")));
        }
        let mut vertices = simplex.vertices.clone();
        vertices.remove(j);
        let carrier = self.carrier(&vertices)?;
        Ok(Simplex { vertices, carrier })
    }

    /// Whether the intersection graph of the cover is connected.
    pub fn is_connected(&self) -> bool {
        let n = self.contexts.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if !seen[j]
                    && !self.contexts[i].members.intersection(&self.contexts[j].members).is_empty()
                {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Renders a section as comma-joined outcome labels in domain order.
    pub fn section_label(&self, s: &Section) -> String {
        s.values().iter().map(|&v| self.outcomes[v].as_str()).collect::<Vec<_>>().join(",")
    }

    /// Renders a measurement subset as concatenated labels when every label
    /// is one character plus optional primes, comma-joined otherwise.
    pub fn set_label(&self, set: &MeasurementSet) -> String {
        let labels: Vec<&str> = set.iter().map(|m| self.measurements[m].as_str()).collect();
        let short = |l: &str| {
            let mut cs = l.chars();
            cs.next().is_some_and(char::is_alphanumeric) && cs.all(|c| c == '\'')
        };
        if labels.iter().all(|l| short(l)) {
            labels.concat()
        } else {
            labels.join(",")
        }
    }

    /// Parses a comma-joined outcome tuple into a section over `domain`.
    pub fn parse_section(&self, domain: &MeasurementSet, tuple: &str) -> Result<Section> {
        let parts: Vec<&str> = if tuple.is_empty() { Vec::new() } else { tuple.split(',').collect() };
        if parts.len() != domain.len() {
            return Err(Error::Domain(format!(
                "tuple {tuple:?} has {} entries, expected {}",
                parts.len(),
                domain.len()
            )));
        }
        let values = parts
            .iter()
            .map(|p| {
                self.outcome_index(p.trim())
                    .ok_or_else(|| Error::Domain(format!("unknown outcome {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Section::new(domain.clone(), values)
    }
}

fn check_distinct(kind: &str, labels: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::InvalidScenario(format!("duplicate {kind} label {l:?}")));
        }
    }
    Ok(())
}

/// The nerve of a cover, truncated at some maximal dimension.
#[derive(Debug, Clone)]
pub struct Nerve {
    levels: Vec<Vec<Simplex>>,
}

impl Nerve {
    pub fn max_dimension(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn simplices(&self, q: usize) -> &[Simplex] {
        self.levels.get(q).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Index of the simplex with the given vertex list in level `q`.
    pub fn position(&self, q: usize, vertices: &[usize]) -> Option<usize> {
        self.simplices(q)
            .binary_search_by(|s| s.vertices.as_slice().cmp(vertices))
            .ok()
    }
}

impl fmt::Display for MeasurementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}
