//! Diagnostics relating the oracle and the cohomological verdicts.

use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cohomology::{all_obstructions, ObstructionResult, Ring};
use crate::error::{Error, Result};
use crate::extendability::{classify, Classification, Verdict};
use crate::model::{ks_support, SupportModel};
use crate::scenario::{Scenario, Section};

/// Measurement degrees `d_m = |{C : m ∈ C}|` and whether their gcd divides
/// the number of contexts. Failure of the condition rules out a global
/// section of the Kochen-Specker support.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcdReport {
    pub degrees: Vec<usize>,
    pub gcd: usize,
    pub cover_size: usize,
    pub holds: bool,
}

pub fn gcd_condition(scenario: &Scenario) -> GcdReport {
    let mut degrees = vec![0usize; scenario.measurements().len()];
    for ctx in scenario.contexts() {
        for m in ctx.members.iter() {
            degrees[m] += 1;
        }
    }
    let gcd = degrees.iter().fold(0usize, |g, &d| g.gcd(&d));
    let cover_size = scenario.contexts().len();
    GcdReport { holds: cover_size.is_multiple_of(gcd), degrees, gcd, cover_size }
}

/// Checks, on a connected Kochen-Specker model, that a vanishing integer
/// obstruction forces the GCD condition, together with the invariant used to
/// prove it: every integer witness family has coefficient sum 1 in every
/// context.
///
/// Returns `true` when both hold (vacuously when nothing vanishes).
pub fn ks_vanishing_implies_gcd_check(model: &SupportModel) -> Result<bool> {
    let scenario = model.scenario();
    if ks_support(scenario)? != *model {
        return Err(Error::Domain("model does not carry the Kochen-Specker support".into()));
    }
    if !scenario.is_connected() {
        return Err(Error::Domain("cover is not connected".into()));
    }
    let results = all_obstructions(model, Ring::Integers)?;
    let mut any_vanishes = false;
    for r in results.values().filter(|r| r.vanishes) {
        any_vanishes = true;
        let family = r.witness.as_ref().expect("vanishing results carry a witness");
        if !family.iter().all(|lc| lc.coefficient_sum().is_one()) {
            return Ok(false);
        }
    }
    Ok(!any_vanishes || gcd_condition(scenario).holds)
}

/// Support sections whose obstruction vanishes although they do not extend
/// to a global section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FalsePositiveReport {
    pub ring: Ring,
    pub sections: Vec<(usize, Section)>,
    pub strongly_contextual: bool,
    /// The model is strongly contextual yet some obstruction vanishes.
    pub strong_false_positive: bool,
}

pub fn false_positives(model: &SupportModel, ring: Ring) -> Result<FalsePositiveReport> {
    let results = all_obstructions(model, ring)?;
    let classification = classify(model);
    Ok(join_false_positives(model, ring, &results, &classification))
}

/// [`false_positives`] from already computed obstructions and classification.
pub fn join_false_positives<'a, I>(
    model: &SupportModel,
    ring: Ring,
    results: I,
    classification: &Classification,
) -> FalsePositiveReport
where
    I: IntoIterator<Item = (&'a (usize, Section), &'a ObstructionResult)>,
{
    let mut sections = Vec::new();
    let mut any_vanishes = false;
    for ((c, s), r) in results {
        if !r.vanishes {
            continue;
        }
        any_vanishes = true;
        let idx = model.support(*c).binary_search(s).expect("obstructions are keyed by support sections");
        if !classification.extendable[*c][idx] {
            sections.push((*c, s.clone()));
        }
    }
    let strongly_contextual = classification.verdict == Verdict::StronglyContextual;
    FalsePositiveReport {
        ring,
        sections,
        strongly_contextual,
        strong_false_positive: strongly_contextual && any_vanishes,
    }
}
