//! Empirical models and their possibilistic supports.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scenario::{MeasurementSet, Scenario, Section};

/// Parses a nonnegative rational written as `p/q` or `p`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::InvalidModel(format!("not an exact rational: {text:?}"));
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    if !digits(p) || !digits(q) {
        return Err(bad());
    }
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::InvalidModel(format!("zero denominator in {text:?}")));
    }
    Ok(BigRational::new(p, q))
}

/// Reduced `p/q` form; integers are written without a denominator.
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

/// A probability distribution on `E(domain)`, stored sparsely: sections with
/// probability zero are absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    domain: MeasurementSet,
    weights: BTreeMap<Section, BigRational>,
}

impl Distribution {
    pub fn new(domain: MeasurementSet, weights: impl IntoIterator<Item = (Section, BigRational)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut total = BigRational::zero();
        for (s, p) in weights {
            if s.domain() != &domain {
                return Err(Error::InvalidModel("section outside the distribution's domain".into()));
            }
            if p.is_negative() {
                return Err(Error::InvalidModel(format!("negative probability {p}")));
            }
            total += &p;
            if !p.is_zero() {
                *map.entry(s).or_insert_with(BigRational::zero) += p;
            }
        }
        if !total.is_one() {
            return Err(Error::InvalidModel(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { domain, weights: map })
    }

    pub fn domain(&self) -> &MeasurementSet {
        &self.domain
    }

    /// Probability of `s`; zero for sections outside the support.
    pub fn weight(&self, s: &Section) -> BigRational {
        self.weights.get(s).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &Section> {
        self.weights.keys()
    }

    /// The marginal on `target`: `d|U(s) = Σ_{t|U = s} d(t)`.
    pub fn marginalize(&self, target: &MeasurementSet) -> Result<Distribution> {
        if !target.is_subset(&self.domain) {
            return Err(Error::Domain(format!(
                "cannot marginalize from {} to {}",
                self.domain, target
            )));
        }
        let mut weights: BTreeMap<Section, BigRational> = BTreeMap::new();
        for (s, p) in &self.weights {
            *weights.entry(s.restrict(target)?).or_insert_with(BigRational::zero) += p;
        }
        Ok(Distribution { domain: target.clone(), weights })
    }
}

/// Failure of the no-signalling condition between two contexts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignallingViolation {
    pub contexts: (usize, usize),
    /// First section of `E(C_i ∩ C_j)` (canonical order) where the marginals differ.
    pub section: Section,
    pub left: BigRational,
    pub right: BigRational,
}

/// Failure of restriction-consistency between two support sets: `section` is
/// the restriction of a support section of `contexts.0` that is not the
/// restriction of any support section of `contexts.1`, or vice versa.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PossibilisticViolation {
    pub contexts: (usize, usize),
    pub section: Section,
    /// Which of the two contexts has `section` among its restrictions.
    pub present_in: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalModel {
    scenario: Scenario,
    tables: Vec<Distribution>,
}

impl EmpiricalModel {
    /// `tables[i][k]` is the probability of the `k`-th section of `E(C_i)` in
    /// canonical enumeration order.
    pub fn new(scenario: Scenario, tables: Vec<Vec<BigRational>>) -> Result<Self> {
        if tables.len() != scenario.contexts().len() {
            return Err(Error::InvalidModel(format!(
                "{} tables for {} contexts",
                tables.len(),
                scenario.contexts().len()
            )));
        }
        let mut dists = Vec::with_capacity(tables.len());
        for (ctx, table) in scenario.contexts().iter().zip(tables) {
            let sections = scenario.enumerate_sections(&ctx.members)?;
            if sections.len() != table.len() {
                return Err(Error::InvalidModel(format!(
                    "context {}: {} entries, expected {}",
                    ctx.index,
                    table.len(),
                    sections.len()
                )));
            }
            let d = Distribution::new(ctx.members.clone(), sections.into_iter().zip(table))
                .map_err(|e| Error::InvalidModel(format!("context {}: {}", ctx.index, strip(&e))))?;
            dists.push(d);
        }
        Ok(Self { scenario, tables: dists })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn table(&self, context: usize) -> &Distribution {
        &self.tables[context]
    }

    /// One violation per intersecting context pair whose marginals on the
    /// intersection differ; empty iff the model is no-signalling.
    pub fn check_no_signalling(&self) -> Vec<SignallingViolation> {
        let ctxs = self.scenario.contexts();
        let mut out = Vec::new();
        for i in 0..ctxs.len() {
            for j in i + 1..ctxs.len() {
                let common = ctxs[i].members.intersection(&ctxs[j].members);
                if common.is_empty() {
                    continue;
                }
                let left = self.tables[i].marginalize(&common).expect("intersection is a subset");
                let right = self.tables[j].marginalize(&common).expect("intersection is a subset");
                if left == right {
                    continue;
                }
                let sections = self.scenario.enumerate_sections(&common).expect("valid subset");
                if let Some(v) = sections.into_iter().find(|v| left.weight(v) != right.weight(v)) {
                    out.push(SignallingViolation {
                        contexts: (i, j),
                        left: left.weight(&v),
                        right: right.weight(&v),
                        section: v,
                    });
                }
            }
        }
        out
    }

    /// The support presheaf restricted to the cover. Rejects signalling models.
    pub fn support_of(&self) -> Result<SupportModel> {
        let violations = self.check_no_signalling();
        if !violations.is_empty() {
            return Err(Error::Signalling(violations));
        }
        SupportModel::new(
            self.scenario.clone(),
            self.tables.iter().map(|d| d.support().cloned().collect()).collect(),
        )
    }
}

fn strip(e: &Error) -> String {
    match e {
        Error::InvalidModel(m) | Error::Domain(m) => m.clone(),
        other => other.to_string(),
    }
}

/// Per-context sets of possible joint outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportModel {
    scenario: Scenario,
    supports: Vec<Vec<Section>>,
}

impl SupportModel {
    /// Support sets are sorted and deduplicated. Every set must be nonempty
    /// and contain only sections over its context.
    pub fn new(scenario: Scenario, supports: Vec<Vec<Section>>) -> Result<Self> {
        if supports.len() != scenario.contexts().len() {
            return Err(Error::InvalidModel(format!(
                "{} support sets for {} contexts",
                supports.len(),
                scenario.contexts().len()
            )));
        }
        let k = scenario.outcomes().len();
        let mut sorted = Vec::with_capacity(supports.len());
        for (ctx, mut set) in scenario.contexts().iter().zip(supports) {
            if set.is_empty() {
                return Err(Error::InvalidModel(format!("context {} has empty support", ctx.index)));
            }
            for s in &set {
                if s.domain() != &ctx.members || s.values().iter().any(|&v| v >= k) {
                    return Err(Error::InvalidModel(format!(
                        "context {}: support section is not an element of E(C)",
                        ctx.index
                    )));
                }
            }
            set.sort();
            set.dedup();
            sorted.push(set);
        }
        Ok(Self { scenario, supports: sorted })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn support(&self, context: usize) -> &[Section] {
        &self.supports[context]
    }

    pub fn supports(&self) -> &[Vec<Section>] {
        &self.supports
    }

    pub fn contains(&self, context: usize, s: &Section) -> bool {
        self.supports
            .get(context)
            .is_some_and(|set| set.binary_search(s).is_ok())
    }

    /// Number of (context, section) pairs in the support.
    pub fn total_size(&self) -> usize {
        self.supports.iter().map(Vec::len).sum()
    }

    /// `{s|U : s ∈ supp(C)}` in canonical order.
    pub fn restricted_support(&self, context: usize, target: &MeasurementSet) -> Result<Vec<Section>> {
        let mut out = self.supports[context]
            .iter()
            .map(|s| s.restrict(target))
            .collect::<Result<Vec<_>>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Pairwise restriction-consistency on every context intersection.
    pub fn consistency_violations(&self) -> Vec<PossibilisticViolation> {
        let ctxs = self.scenario.contexts();
        let mut out = Vec::new();
        for i in 0..ctxs.len() {
            for j in i + 1..ctxs.len() {
                let common = ctxs[i].members.intersection(&ctxs[j].members);
                if common.is_empty() {
                    continue;
                }
                let left = self.restricted_support(i, &common).expect("subset");
                let right = self.restricted_support(j, &common).expect("subset");
                if left == right {
                    continue;
                }
                let first = left
                    .iter()
                    .find(|s| right.binary_search(s).is_err())
                    .map(|s| (s.clone(), i))
                    .or_else(|| {
                        right.iter().find(|s| left.binary_search(s).is_err()).map(|s| (s.clone(), j))
                    })
                    .expect("sets differ");
                out.push(PossibilisticViolation { contexts: (i, j), section: first.0, present_in: first.1 });
            }
        }
        out
    }

    pub fn check_consistent(&self) -> Result<()> {
        let v = self.consistency_violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::PossibilisticSignalling(v))
        }
    }

    /// `S_e(U)` for a set `U` contained in some context.
    pub fn presheaf_sections(&self, target: &MeasurementSet) -> Result<Vec<Section>> {
        let ctx = self
            .scenario
            .contexts()
            .iter()
            .find(|c| target.is_subset(&c.members))
            .ok_or_else(|| Error::Domain(format!("{target} is not contained in any context")))?;
        self.restricted_support(ctx.index, target)
    }
}

fn require_binary(scenario: &Scenario) -> Result<()> {
    if scenario.outcomes() != ["0", "1"] {
        return Err(Error::Domain(format!(
            "binary outcomes [\"0\", \"1\"] required, found {:?}",
            scenario.outcomes()
        )));
    }
    Ok(())
}

/// The Kochen-Specker support: in each context, exactly one measurement
/// takes outcome 1.
pub fn ks_support(scenario: &Scenario) -> Result<SupportModel> {
    require_binary(scenario)?;
    let supports = scenario
        .contexts()
        .iter()
        .map(|c| {
            c.members
                .iter()
                .map(|m| {
                    let values = c.members.iter().map(|x| usize::from(x == m)).collect();
                    Section::new(c.members.clone(), values)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SupportModel::new(scenario.clone(), supports)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Support where each context admits exactly the sections whose number of
/// 1s has the given parity.
pub fn parity_support(scenario: &Scenario, parities: &[Parity]) -> Result<SupportModel> {
    require_binary(scenario)?;
    if parities.len() != scenario.contexts().len() {
        return Err(Error::Domain(format!(
            "{} parities for {} contexts",
            parities.len(),
            scenario.contexts().len()
        )));
    }
    let supports = scenario
        .contexts()
        .iter()
        .zip(parities)
        .map(|(c, &p)| {
            let want = usize::from(p == Parity::Odd);
            Ok(scenario
                .enumerate_sections(&c.members)?
                .into_iter()
                .filter(|s| s.values().iter().sum::<usize>() % 2 == want)
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    SupportModel::new(scenario.clone(), supports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn bell() -> Scenario {
        Scenario::from_labels(
            &["a", "a'", "b", "b'"],
            &["0", "1"],
            &[&["a", "b"], &["a", "b'"], &["a'", "b"], &["a'", "b'"]],
        )
        .unwrap()
    }

    fn prbox() -> EmpiricalModel {
        let h = || vec![q("1/2"), q("0"), q("0"), q("1/2")];
        EmpiricalModel::new(bell(), vec![h(), h(), h(), vec![q("0"), q("1/2"), q("1/2"), q("0")]]).unwrap()
    }

    #[test]
    fn rationals() {
        assert_eq!(q("2/4"), q("1/2"));
        assert_eq!(format_rational(&q("3/9")), "1/3");
        assert_eq!(format_rational(&q("1")), "1");
        for bad in ["-1/2", "0.5", "1/0", "", "a/b", "1/2/3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn marginals() {
        let sc = bell();
        let ab = sc.contexts()[0].members.clone();
        let secs = sc.enumerate_sections(&ab).unwrap();
        let uniform = Distribution::new(ab.clone(), secs.iter().cloned().map(|s| (s, q("1/4")))).unwrap();
        let m = uniform.marginalize(&[0].into()).unwrap();
        for s in sc.enumerate_sections(&[0].into()).unwrap() {
            assert_eq!(m.weight(&s), q("1/2"));
        }

        let point = Distribution::new(ab.clone(), [(secs[1].clone(), q("1"))]).unwrap();
        let mb = point.marginalize(&[2].into()).unwrap();
        assert_eq!(mb.support().collect::<Vec<_>>(), vec![&Section::new([2].into(), vec![1]).unwrap()]);

        let pr = prbox();
        let ma = pr.table(0).marginalize(&[0].into()).unwrap();
        assert_eq!(ma.weight(&Section::new([0].into(), vec![0]).unwrap()), q("1/2"));
        assert_eq!(ma.weight(&Section::new([0].into(), vec![1]).unwrap()), q("1/2"));

        assert!(pr.table(0).marginalize(&[1].into()).is_err());
    }

    #[test]
    fn prbox_is_no_signalling() {
        let pr = prbox();
        assert!(pr.check_no_signalling().is_empty());
        let s = pr.support_of().unwrap();
        assert_eq!(s.total_size(), 8);
        assert!(s.check_consistent().is_ok());
    }

    #[test]
    fn signalling_detected() {
        let sc = Scenario::from_labels(&["a", "b", "b'"], &["0", "1"], &[&["a", "b"], &["a", "b'"]]).unwrap();
        let m = EmpiricalModel::new(
            sc,
            vec![vec![q("1"), q("0"), q("0"), q("0")], vec![q("0"), q("0"), q("1"), q("0")]],
        )
        .unwrap();
        let v = m.check_no_signalling();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].contexts, (0, 1));
        assert_eq!(v[0].section.domain().as_slice(), &[0]);
        assert_ne!(v[0].left, v[0].right);
        assert!(matches!(m.support_of(), Err(Error::Signalling(_))));
    }

    #[test]
    fn single_context_never_signals() {
        let sc = Scenario::from_labels(&["a"], &["0", "1"], &[&["a"]]).unwrap();
        let m = EmpiricalModel::new(sc, vec![vec![q("1/3"), q("2/3")]]).unwrap();
        assert!(m.check_no_signalling().is_empty());
    }

    #[test]
    fn table_must_sum_to_one() {
        let sc = Scenario::from_labels(&["a"], &["0", "1"], &[&["a"]]).unwrap();
        let err = EmpiricalModel::new(sc, vec![vec![q("1/2"), q("49/100")]]).unwrap_err();
        assert!(err.to_string().contains("context 0"), "{err}");
    }

    #[test]
    fn deterministic_model_has_singleton_supports() {
        let one = |k: usize| (0..4).map(|i| if i == k { q("1") } else { q("0") }).collect::<Vec<_>>();
        // a=0, a'=1, b=1, b'=0
        let m = EmpiricalModel::new(bell(), vec![one(1), one(0), one(3), one(2)]).unwrap();
        let s = m.support_of().unwrap();
        assert!(s.supports().iter().all(|set| set.len() == 1));
    }

    #[test]
    fn ks_supports() {
        let tri = Scenario::from_labels(&["A", "B", "C"], &["0", "1"], &[&["A", "B"], &["B", "C"], &["C", "A"]])
            .unwrap();
        let s = ks_support(&tri).unwrap();
        for set in s.supports() {
            let labels: Vec<String> = set.iter().map(|x| tri.section_label(x)).collect();
            assert_eq!(labels, ["0,1", "1,0"]);
        }

        let single = Scenario::from_labels(&["A"], &["0", "1"], &[&["A"]]).unwrap();
        assert_eq!(ks_support(&single).unwrap().support(0), &[Section::new([0].into(), vec![1]).unwrap()]);

        let ternary = Scenario::from_labels(&["A"], &["0", "1", "2"], &[&["A"]]).unwrap();
        assert!(ks_support(&ternary).is_err());
    }

    #[test]
    fn parity_supports() {
        let sc = Scenario::from_labels(&["A", "B", "C"], &["0", "1"], &[&["A", "B"], &["C"]]).unwrap();
        let s = parity_support(&sc, &[Parity::Even, Parity::Odd]).unwrap();
        let labels: Vec<String> = s.support(0).iter().map(|x| sc.section_label(x)).collect();
        assert_eq!(labels, ["0,0", "1,1"]);
        let labels: Vec<String> = s.support(1).iter().map(|x| sc.section_label(x)).collect();
        assert_eq!(labels, ["1"]);
        assert!(parity_support(&sc, &[Parity::Even]).is_err());
    }

    #[test]
    fn inconsistent_support_reported() {
        let sc = Scenario::from_labels(&["a", "b", "c"], &["0", "1"], &[&["a", "b"], &["b", "c"]]).unwrap();
        let ab = sc.contexts()[0].members.clone();
        let bc = sc.contexts()[1].members.clone();
        let s = SupportModel::new(
            sc,
            vec![
                vec![Section::new(ab, vec![0, 0]).unwrap()],
                vec![Section::new(bc, vec![1, 0]).unwrap()],
            ],
        )
        .unwrap();
        let v = s.consistency_violations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].present_in, 0);
        assert!(s.check_consistent().is_err());
    }
}
