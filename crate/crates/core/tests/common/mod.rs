#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use contextuality::cohomology::{LinearCombination, Ring};
use contextuality::model::SupportModel;
use contextuality::scenario::{Scenario, Section};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random scenario with `n` measurements, at most `max_contexts` distinct
/// nonempty contexts, and the given number of outcomes.
pub fn random_scenario(rng: &mut ChaCha8Rng, n: usize, max_contexts: usize, outcomes: usize) -> Scenario {
    // cyclic covers of small contexts are where contextuality lives
    let k = if rng.random_bool(0.7) { rng.random_range(max_contexts.min(3)..=max_contexts) } else { rng.random_range(1..=max_contexts) };
    let mut masks = BTreeSet::new();
    for _ in 0..k {
        if n >= 2 && rng.random_bool(0.7) {
            let size = rng.random_range(2..=n.min(3));
            let mut m = 0u32;
            while m.count_ones() < size as u32 {
                m |= 1 << rng.random_range(0..n);
            }
            masks.insert(m);
        } else {
            masks.insert(rng.random_range(1u32..(1 << n)));
        }
    }
    let mut masks: Vec<u32> = masks.into_iter().collect();
    let covered = masks.iter().fold(0, |a, m| a | m);
    for m in 0..n {
        if covered & (1 << m) == 0 {
            let i = rng.random_range(0..masks.len());
            masks[i] |= 1 << m;
        }
    }
    masks.sort_unstable();
    masks.dedup();
    // shuffle context order so the base context is not always the smallest
    for i in (1..masks.len()).rev() {
        let j = rng.random_range(0..=i);
        masks.swap(i, j);
    }
    let contexts = masks.iter().map(|&m| (0..n).filter(|i| m & (1 << i) != 0).collect()).collect();
    Scenario::new(
        (0..n).map(|i| format!("m{i}")).collect(),
        (0..outcomes).map(|o| o.to_string()).collect(),
        contexts,
    )
    .expect("generated scenario is valid")
}

/// Random restriction-consistent support on a random binary scenario with at
/// most 5 contexts and 6 measurements, drawn from a mix of dense, sparse,
/// Kochen-Specker-shaped and parity supports so that every verdict occurs.
pub fn random_model(seed: u64) -> SupportModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=6);
    if rng.random_bool(0.3) {
        if let Some(m) = random_cycle(&mut rng) {
            return m;
        }
    }
    loop {
        let scenario = random_scenario(&mut rng, n, 5, 2);
        if let Some(m) = random_support(&mut rng, &scenario) {
            return m;
        }
    }
}

/// Cover `{m0 m1, m1 m2, ..., m(n-1) m0}` with parity supports plus a few
/// random extra sections. An odd total parity makes the bare model strongly
/// contextual; extras tend to make it merely contextual.
fn random_cycle(rng: &mut ChaCha8Rng) -> Option<SupportModel> {
    let n = rng.random_range(3..=5);
    let contexts = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    let scenario =
        Scenario::new((0..n).map(|i| format!("m{i}")).collect(), vec!["0".into(), "1".into()], contexts).unwrap();
    let parity: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
    let extra = rng.random_range(0.0..0.3);
    let mut supports: Vec<Vec<Section>> = scenario
        .contexts()
        .iter()
        .map(|c| {
            scenario
                .enumerate_sections(&c.members)
                .unwrap()
                .into_iter()
                .filter(|s| s.values().iter().sum::<usize>() % 2 == parity[c.index] || rng.random_bool(extra))
                .collect()
        })
        .collect();
    prune(&scenario, &mut supports);
    if supports.iter().any(Vec::is_empty) {
        return None;
    }
    Some(SupportModel::new(scenario, supports).unwrap())
}

/// `None` when pruning empties some context.
pub fn random_support(rng: &mut ChaCha8Rng, scenario: &Scenario) -> Option<SupportModel> {
    let k = scenario.outcomes().len();
    let kind = if k == 2 { rng.random_range(0..4) } else { rng.random_range(0..2) };
    let mut supports: Vec<Vec<Section>> = match kind {
        0 => {
            // dense, about half seeded with a global assignment
            let n = scenario.measurements().len();
            let seed: Option<Vec<usize>> =
                rng.random_bool(0.5).then(|| (0..n).map(|_| rng.random_range(0..k)).collect());
            let density = rng.random_range(0.5..0.9);
            filtered(rng, scenario, density, |c, s| {
                seed.as_ref().is_some_and(|g| c.iter().zip(s.values()).all(|(m, v)| g[*m] == *v))
            })
        }
        1 => {
            let density = rng.random_range(0.15..0.5);
            filtered(rng, scenario, density, |_, _| false)
        }
        2 => {
            // one 1 per context, plus the odd extra section
            filtered(rng, scenario, 0.1, |_, s| s.values().iter().sum::<usize>() == 1)
        }
        _ => {
            let parity: Vec<usize> = scenario.contexts().iter().map(|_| rng.random_range(0..2)).collect();
            scenario
                .contexts()
                .iter()
                .map(|c| {
                    scenario
                        .enumerate_sections(&c.members)
                        .unwrap()
                        .into_iter()
                        .filter(|s| s.values().iter().sum::<usize>() % 2 == parity[c.index])
                        .collect()
                })
                .collect()
        }
    };
    prune(scenario, &mut supports);
    if supports.iter().any(Vec::is_empty) {
        return None;
    }
    Some(SupportModel::new(scenario.clone(), supports).unwrap())
}

fn filtered<F>(rng: &mut ChaCha8Rng, scenario: &Scenario, density: f64, keep: F) -> Vec<Vec<Section>>
where
    F: Fn(&[usize], &Section) -> bool,
{
    scenario
        .contexts()
        .iter()
        .map(|c| {
            let members: Vec<usize> = c.members.iter().collect();
            scenario
                .enumerate_sections(&c.members)
                .unwrap()
                .into_iter()
                .filter(|s| keep(&members, s) || rng.random_bool(density))
                .collect()
        })
        .collect()
}

/// Removes sections until every section restricts into the support of every
/// other context on the overlap.
pub fn prune(scenario: &Scenario, supports: &mut [Vec<Section>]) {
    let ctxs = scenario.contexts();
    loop {
        let mut changed = false;
        for i in 0..ctxs.len() {
            for j in 0..ctxs.len() {
                if i == j {
                    continue;
                }
                let common = ctxs[i].members.intersection(&ctxs[j].members);
                if common.is_empty() {
                    continue;
                }
                let allowed: BTreeSet<Vec<usize>> =
                    supports[j].iter().map(|s| values_on(s, common.as_slice())).collect();
                let before = supports[i].len();
                supports[i].retain(|s| allowed.contains(&values_on(s, common.as_slice())));
                changed |= supports[i].len() != before;
            }
        }
        if !changed {
            return;
        }
    }
}

/// The values of `s` on the measurements `ms`, read off by position.
pub fn values_on(s: &Section, ms: &[usize]) -> Vec<usize> {
    let dom = s.domain().as_slice();
    ms.iter().map(|m| s.values()[dom.iter().position(|d| d == m).expect("m in domain")]).collect()
}

/// Every assignment in `O^X` whose restriction to each context lies in the
/// support, by plain enumeration.
pub fn exhaustive_global_sections(model: &SupportModel) -> Vec<Vec<usize>> {
    let scenario = model.scenario();
    let n = scenario.measurements().len();
    let k = scenario.outcomes().len();
    let supports: Vec<BTreeSet<Vec<usize>>> =
        model.supports().iter().map(|set| set.iter().map(|s| s.values().to_vec()).collect()).collect();
    let total = k.pow(n as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut g = vec![0; n];
        let mut c = code;
        for slot in g.iter_mut().rev() {
            *slot = c % k;
            c /= k;
        }
        let ok = scenario.contexts().iter().zip(&supports).all(|(ctx, set)| {
            let vals: Vec<usize> = ctx.members.iter().map(|m| g[m]).collect();
            set.contains(&vals)
        });
        if ok {
            out.push(g);
        }
    }
    out
}

/// Checks a witness family by summing coefficients over each overlap
/// directly, without the library's restriction maps.
pub fn witness_holds(model: &SupportModel, base: usize, t: &Section, family: &[LinearCombination], ring: Ring) -> bool {
    let ctxs = model.scenario().contexts();
    if family.len() != ctxs.len() {
        return false;
    }
    let reduce = |x: &BigInt| match ring {
        Ring::Integers => x.clone(),
        Ring::Mod2 => x.mod_floor(&BigInt::from(2)),
    };
    // r_base = 1·t
    let base_terms: Vec<(&Section, &BigInt)> = family[base].terms().collect();
    if base_terms.len() != 1 || base_terms[0].0 != t || reduce(base_terms[0].1) != BigInt::from(1) {
        return false;
    }
    for (j, r) in family.iter().enumerate() {
        if r.terms().any(|(s, _)| !model.support(j).contains(s)) {
            return false;
        }
    }
    for i in 0..ctxs.len() {
        for j in i + 1..ctxs.len() {
            let common = ctxs[i].members.intersection(&ctxs[j].members);
            if common.is_empty() {
                continue;
            }
            let fold = |r: &LinearCombination| {
                let mut acc: HashMap<Vec<usize>, BigInt> = HashMap::new();
                for (s, c) in r.terms() {
                    *acc.entry(values_on(s, common.as_slice())).or_insert_with(BigInt::zero) += c;
                }
                acc.into_iter().map(|(k, v)| (k, reduce(&v))).filter(|(_, v)| !v.is_zero()).collect::<HashMap<_, _>>()
            };
            if fold(&family[i]) != fold(&family[j]) {
                return false;
            }
        }
    }
    true
}

pub mod props;
