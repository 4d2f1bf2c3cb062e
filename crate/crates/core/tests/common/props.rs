//! Invariant checks shared by the property tests and the acceptance suite.
//! Each returns `Err` with a description on the first violation.

use std::collections::HashMap;

use contextuality::cohomology::{
    all_obstructions, all_obstructions_with, is_compatible_family, obstruction, obstruction_class_vanishes,
    CechComplex, LinearCombination, ObstructionOptions, ObstructionSystem, Ring,
};
use contextuality::extendability::{classify, global_sections};
use contextuality::model::SupportModel;
use contextuality::scenario::Section;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{exhaustive_global_sections, values_on, witness_holds};

pub type Check = Result<(), String>;

const RINGS: [Ring; 2] = [Ring::Integers, Ring::Mod2];

fn reduce(ring: Ring, x: &BigInt) -> BigInt {
    match ring {
        Ring::Integers => x.clone(),
        Ring::Mod2 => x.mod_floor(&BigInt::from(2)),
    }
}

/// `δ^1 ∘ δ^0 = 0`, both as a matrix product and on a random cochain.
pub fn coboundary_squares_to_zero(model: &SupportModel, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for ring in RINGS {
        let cx = CechComplex::new(model, ring, 2).map_err(|e| e.to_string())?;
        let d0 = cx.coboundary_matrix(0).map_err(|e| e.to_string())?;
        let d1 = cx.coboundary_matrix(1).map_err(|e| e.to_string())?;
        for i in 0..d1.rows() {
            for j in 0..d0.cols() {
                let s: BigInt = (0..d1.cols()).map(|k| d1.get(i, k) * d0.get(k, j)).sum();
                if !reduce(ring, &s).is_zero() {
                    return Err(format!("(δ1 δ0)[{i},{j}] = {s} over {ring}"));
                }
            }
        }
        let coords: Vec<BigInt> = (0..cx.dimension(0)).map(|_| BigInt::from(rng.random_range(-3..=3))).collect();
        let c = cx.from_vector(0, &coords).map_err(|e| e.to_string())?;
        let dd = cx.coboundary(&cx.coboundary(&c).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if !dd.values.iter().all(LinearCombination::is_zero) {
            return Err(format!("δδc ≠ 0 over {ring}"));
        }
    }
    Ok(())
}

fn compatible_by_hand(model: &SupportModel, family: &[LinearCombination], ring: Ring) -> bool {
    let ctxs = model.scenario().contexts();
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
                acc.into_iter()
                    .map(|(k, v)| (k, reduce(ring, &v)))
                    .filter(|(_, v)| !v.is_zero())
                    .collect::<HashMap<_, _>>()
            };
            if fold(&family[i]) != fold(&family[j]) {
                return false;
            }
        }
    }
    true
}

/// A 0-cochain is a cocycle exactly when its family is compatible. Tried on
/// random families, witness families, and restrictions of global sections.
pub fn cocycle_iff_compatible(model: &SupportModel, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctxs = model.scenario().contexts();
    for ring in RINGS {
        let cx = CechComplex::new(model, ring, 1).map_err(|e| e.to_string())?;
        let mut families: Vec<Vec<LinearCombination>> = Vec::new();
        for _ in 0..4 {
            let fam = ctxs
                .iter()
                .map(|c| {
                    let terms: Vec<(Section, BigInt)> = model
                        .support(c.index)
                        .iter()
                        .filter_map(|s| {
                            let keep = rng.random_bool(0.5);
                            keep.then(|| (s.clone(), BigInt::from(rng.random_range(-2..=2))))
                        })
                        .collect();
                    LinearCombination::from_terms(c.members.clone(), ring, terms).unwrap()
                })
                .collect();
            families.push(fam);
        }
        for g in global_sections(model).into_iter().take(3) {
            families.push(
                ctxs.iter()
                    .map(|c| LinearCombination::unit(g.restrict(&c.members).unwrap(), ring))
                    .collect(),
            );
        }
        for r in all_obstructions(model, ring).map_err(|e| e.to_string())?.into_values() {
            if let Some(w) = r.witness {
                families.push(w);
            }
        }
        families.push(ctxs.iter().map(|c| LinearCombination::zero(c.members.clone(), ring)).collect());
        for fam in families {
            let cocycle = cx.is_cocycle(&cx.cochain_from_family(&fam).map_err(|e| e.to_string())?).unwrap();
            let compatible = is_compatible_family(model, &fam).unwrap();
            let by_hand = compatible_by_hand(model, &fam, ring);
            if cocycle != compatible || compatible != by_hand {
                return Err(format!(
                    "over {ring}: cocycle {cocycle}, compatible {compatible}, direct check {by_hand}"
                ));
            }
        }
    }
    Ok(())
}

/// Extendable ⇒ vanishing over both rings.
pub fn extendable_implies_vanishing(model: &SupportModel) -> Check {
    let class = classify(model);
    for ring in RINGS {
        for ((c, s), r) in all_obstructions(model, ring).map_err(|e| e.to_string())? {
            let k = model.support(c).binary_search(&s).unwrap();
            if class.extendable[c][k] && !r.vanishes {
                return Err(format!("extendable section in context {c} does not vanish over {ring}"));
            }
        }
    }
    Ok(())
}

/// Vanishing over `Z` ⇒ vanishing over `Z/2`.
pub fn integer_vanishing_descends(model: &SupportModel) -> Check {
    let z = all_obstructions(model, Ring::Integers).map_err(|e| e.to_string())?;
    let z2 = all_obstructions(model, Ring::Mod2).map_err(|e| e.to_string())?;
    for (key, r) in &z {
        if r.vanishes && !z2[key].vanishes {
            return Err(format!("context {}: vanishes over Z but not over Z/2", key.0));
        }
    }
    Ok(())
}

/// Every witness passes direct substitution; every certificate checks
/// against a freshly built system.
pub fn witnesses_substitute(model: &SupportModel) -> Check {
    for ring in RINGS {
        for ((c, s), r) in all_obstructions(model, ring).map_err(|e| e.to_string())? {
            match (&r.witness, &r.certificate) {
                (Some(w), None) => {
                    if !witness_holds(model, c, &s, w, ring) {
                        return Err(format!("witness for context {c} over {ring} fails substitution"));
                    }
                    let sys = ObstructionSystem::build(model, c, &s).unwrap();
                    let x: Vec<BigInt> = sys.variables.iter().map(|(j, u)| w[*j].coefficient(u)).collect();
                    let ax = sys.matrix.mul_vec(&x).unwrap();
                    if ax.iter().zip(&sys.rhs).any(|(l, r)| !reduce(ring, &(l - r)).is_zero()) {
                        return Err(format!("solution vector for context {c} over {ring} fails A x = b"));
                    }
                }
                (None, Some(cert)) => {
                    let sys = ObstructionSystem::build(model, c, &s).unwrap();
                    if !cert.verify(&sys.matrix, &sys.rhs) {
                        return Err(format!("certificate for context {c} over {ring} fails"));
                    }
                }
                _ => return Err("result carries neither witness nor certificate".into()),
            }
        }
    }
    Ok(())
}

/// For a family of support sections agreeing with `t` on every overlap with
/// the base context, `δ^0` of the family vanishes on the base context.
pub fn relative_cocycle(model: &SupportModel, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctxs = model.scenario().contexts();
    for ring in RINGS {
        let cx = CechComplex::new(model, ring, 1).map_err(|e| e.to_string())?;
        for base in ctxs {
            for t in model.support(base.index) {
                let family: Vec<LinearCombination> = ctxs
                    .iter()
                    .map(|c| {
                        let agree: Vec<&Section> =
                            model.support(c.index).iter().filter(|u| u.agrees_with(t)).collect();
                        let pick = if c.index == base.index { t } else { agree[rng.random_range(0..agree.len())] };
                        LinearCombination::unit(pick.clone(), ring)
                    })
                    .collect();
                let z = cx.coboundary(&cx.cochain_from_family(&family).unwrap()).unwrap();
                if !cx.is_relative(&z, &base.members).unwrap() {
                    return Err(format!("δ0 of a family through context {} is not relative over {ring}", base.index));
                }
            }
        }
    }
    Ok(())
}

/// On connected covers the linear-system verdict equals the relative-class
/// verdict.
pub fn dual_route_agrees(model: &SupportModel) -> Check {
    if !model.scenario().is_connected() {
        return Ok(());
    }
    for ring in RINGS {
        for (c, set) in model.supports().iter().enumerate() {
            for s in set {
                let a = obstruction(model, c, s, ring).map_err(|e| e.to_string())?.vanishes;
                let b = obstruction_class_vanishes(model, c, s, ring).map_err(|e| e.to_string())?;
                if a != b {
                    return Err(format!("context {c} over {ring}: system says {a}, class says {b}"));
                }
            }
        }
    }
    Ok(())
}

/// Verdicts do not depend on the variable-identification shortcut.
pub fn identification_is_transparent(model: &SupportModel) -> Check {
    for ring in RINGS {
        let on = all_obstructions_with(model, ring, ObstructionOptions { identify_variables: true })
            .map_err(|e| e.to_string())?;
        let off = all_obstructions_with(model, ring, ObstructionOptions { identify_variables: false })
            .map_err(|e| e.to_string())?;
        for (key, r) in &on {
            if r.vanishes != off[key].vanishes {
                return Err(format!("context {} over {ring}: shortcut changes the verdict", key.0));
            }
        }
    }
    Ok(())
}

/// Backtracking and exhaustive enumeration find the same global sections.
pub fn oracle_matches_exhaustive(model: &SupportModel) -> Check {
    let fast: Vec<Vec<usize>> = global_sections(model).iter().map(|g| g.values().to_vec()).collect();
    let slow = exhaustive_global_sections(model);
    if fast != slow {
        return Err(format!("backtracking found {} global sections, enumeration {}", fast.len(), slow.len()));
    }
    Ok(())
}
