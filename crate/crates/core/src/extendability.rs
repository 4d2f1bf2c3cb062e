//! Global sections of a support model, found by exhaustive backtracking.
//!
//! This is the ground truth the cohomological verdicts are compared against.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SupportModel;
use crate::scenario::Section;

/// Every assignment `g ∈ O^X` with `g|C ∈ supp(C)` for all contexts `C`, in
/// canonical order.
///
/// Measurements are assigned in global order; a branch is cut as soon as some
/// context whose members are all assigned restricts outside its support.
pub fn global_sections(model: &SupportModel) -> Vec<Section> {
    let scenario = model.scenario();
    let n = scenario.measurements().len();
    let k = scenario.outcomes().len();

    // contexts grouped by their last member: they become checkable there
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); n];
    let allowed: Vec<HashSet<&[usize]>> = model
        .supports()
        .iter()
        .map(|set| set.iter().map(Section::values).collect())
        .collect();
    for ctx in scenario.contexts() {
        let last = ctx.members.iter().last().expect("contexts are nonempty");
        closing[last].push(ctx.index);
    }

    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    let mut scratch = Vec::new();
    let mut depth = 0usize;
    // iterative depth-first search over the odometer
    let mut next_value = vec![0usize; n + 1];
    loop {
        if depth == n {
            out.push(
                Section::new(scenario.all_measurements(), assignment.clone())
                    .expect("full assignment"),
            );
            depth -= 1;
            continue;
        }
        if next_value[depth] == k {
            next_value[depth] = 0;
            if depth == 0 {
                break;
            }
            depth -= 1;
            continue;
        }
        assignment[depth] = next_value[depth];
        next_value[depth] += 1;
        let consistent = closing[depth].iter().all(|&c| {
            scratch.clear();
            scratch.extend(scenario.contexts()[c].members.iter().map(|m| assignment[m]));
            allowed[c].contains(scratch.as_slice())
        });
        if consistent {
            depth += 1;
        }
    }
    out
}

/// Whether the support section `t` of context `context` is the restriction of
/// some global section.
pub fn is_extendable_at(model: &SupportModel, context: usize, t: &Section) -> Result<bool> {
    if !model.contains(context, t) {
        return Err(Error::Domain(format!("section is not in the support of context {context}")));
    }
    let members = &model.scenario().context(context)?.members;
    Ok(global_sections(model)
        .iter()
        .any(|g| g.restrict(members).expect("global domain") == *t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Every support section extends to a global section.
    NonContextualPossibilistic,
    /// Some support section does not extend.
    Contextual,
    /// No support section extends; there is no global section at all.
    StronglyContextual,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    /// `extendable[c][i]` refers to the `i`-th section of `supp(C_c)`.
    pub extendable: Vec<Vec<bool>>,
    pub global_sections: Vec<Section>,
}

impl Classification {
    pub fn non_extendable(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.extendable
            .iter()
            .enumerate()
            .flat_map(|(c, flags)| flags.iter().enumerate().filter(|(_, f)| !**f).map(move |(i, _)| (c, i)))
    }
}

pub fn classify(model: &SupportModel) -> Classification {
    let global = global_sections(model);
    let extendable: Vec<Vec<bool>> = model
        .scenario()
        .contexts()
        .iter()
        .map(|ctx| {
            let reached: HashSet<Section> =
                global.iter().map(|g| g.restrict(&ctx.members).expect("global domain")).collect();
            model.support(ctx.index).iter().map(|t| reached.contains(t)).collect()
        })
        .collect();
    let verdict = if global.is_empty() {
        Verdict::StronglyContextual
    } else if extendable.iter().flatten().all(|&f| f) {
        Verdict::NonContextualPossibilistic
    } else {
        Verdict::Contextual
    };
    Classification { verdict, extendable, global_sections: global }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ks_support;
    use crate::scenario::Scenario;

    fn full(sc: &Scenario) -> SupportModel {
        let sup = sc
            .contexts()
            .iter()
            .map(|c| sc.enumerate_sections(&c.members).unwrap())
            .collect();
        SupportModel::new(sc.clone(), sup).unwrap()
    }

    #[test]
    fn triangle_has_no_global_section() {
        let tri = Scenario::from_labels(&["A", "B", "C"], &["0", "1"], &[&["A", "B"], &["B", "C"], &["C", "A"]])
            .unwrap();
        let s = ks_support(&tri).unwrap();
        assert!(global_sections(&s).is_empty());
        assert_eq!(classify(&s).verdict, Verdict::StronglyContextual);
    }

    #[test]
    fn unconstrained_model() {
        let sc = Scenario::from_labels(&["A", "B", "C"], &["0", "1"], &[&["A", "B"], &["B", "C"]]).unwrap();
        let s = full(&sc);
        assert_eq!(global_sections(&s), sc.enumerate_sections(&sc.all_measurements()).unwrap());
        let c = classify(&s);
        assert_eq!(c.verdict, Verdict::NonContextualPossibilistic);
        for t in s.support(1) {
            assert!(is_extendable_at(&s, 1, t).unwrap());
        }
    }

    #[test]
    fn section_outside_support_is_rejected() {
        let tri = Scenario::from_labels(&["A", "B", "C"], &["0", "1"], &[&["A", "B"], &["B", "C"], &["C", "A"]])
            .unwrap();
        let s = ks_support(&tri).unwrap();
        let t = Section::new(tri.contexts()[0].members.clone(), vec![1, 1]).unwrap();
        assert!(is_extendable_at(&s, 0, &t).is_err());
    }
}
