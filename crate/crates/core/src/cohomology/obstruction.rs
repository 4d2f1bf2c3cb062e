//! Deciding whether the obstruction `γ(s)` vanishes.
//!
//! `γ(s)` for `s ∈ S_e(C)` vanishes iff there is a family of linear
//! combinations `r_j ∈ F(C_j)` with `r_C = 1·s` and `r_j | C_j ∩ C_k = r_k | C_j ∩ C_k`
//! for every intersecting pair. The unknowns are the coefficients of the
//! support sections of every context other than `C`, and each intersecting
//! pair contributes one equation per section of its intersection.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{CechComplex, LinearCombination, Ring};
use crate::error::{Error, Result};
use crate::linalg::{solve_linear, verify_solution, Certificate, IntMatrix, Solution};
use crate::model::SupportModel;
use crate::scenario::Section;

/// Identifies an equation: the pair of contexts (ascending) and the section
/// of their intersection whose fibres are being compared.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EquationLabel {
    pub contexts: (usize, usize),
    pub section: Section,
}

/// The linear system `A c = b` for one base section.
#[derive(Debug, Clone)]
pub struct ObstructionSystem {
    pub base_context: usize,
    pub base_section: Section,
    /// Column `k` is the coefficient of `variables[k].1` in `r_{variables[k].0}`.
    pub variables: Vec<(usize, Section)>,
    pub equations: Vec<EquationLabel>,
    pub matrix: IntMatrix,
    pub rhs: Vec<BigInt>,
}

impl ObstructionSystem {
    pub fn build(model: &SupportModel, base: usize, t: &Section) -> Result<Self> {
        if !model.contains(base, t) {
            return Err(Error::Domain(format!("section is not in the support of context {base}")));
        }
        model.check_consistent()?;
        let ctxs = model.scenario().contexts();

        let mut variables = Vec::new();
        let mut column: BTreeMap<(usize, &Section), usize> = BTreeMap::new();
        for ctx in ctxs.iter().filter(|c| c.index != base) {
            for u in model.support(ctx.index) {
                column.insert((ctx.index, u), variables.len());
                variables.push((ctx.index, u.clone()));
            }
        }

        let mut equations = Vec::new();
        let mut rows: Vec<Vec<(usize, i64)>> = Vec::new();
        let mut rhs = Vec::new();
        for j in 0..ctxs.len() {
            for k in j + 1..ctxs.len() {
                let common = ctxs[j].members.intersection(&ctxs[k].members);
                if common.is_empty() {
                    continue;
                }
                for v in model.restricted_support(j, &common)? {
                    let mut row = Vec::new();
                    let mut constant = 0i64;
                    for (ctx, sign) in [(j, 1i64), (k, -1i64)] {
                        for u in model.support(ctx) {
                            if u.restrict(&common)? != v {
                                continue;
                            }
                            if ctx == base {
                                if u == t {
                                    constant += sign;
                                }
                            } else {
                                row.push((column[&(ctx, u)], sign));
                            }
                        }
                    }
                    equations.push(EquationLabel { contexts: (j, k), section: v });
                    rows.push(row);
                    rhs.push(BigInt::from(-constant));
                }
            }
        }

        let mut matrix = IntMatrix::zeros(rows.len(), variables.len());
        for (i, row) in rows.into_iter().enumerate() {
            for (col, sign) in row {
                matrix.add_to(i, col, &BigInt::from(sign));
            }
        }
        Ok(Self { base_context: base, base_section: t.clone(), variables, equations, matrix, rhs })
    }

    /// The family `{r_j}` encoded by a solution vector.
    pub fn family(&self, model: &SupportModel, x: &[BigInt], ring: Ring) -> Result<Vec<LinearCombination>> {
        let mut family: Vec<LinearCombination> = model
            .scenario()
            .contexts()
            .iter()
            .map(|c| LinearCombination::zero(c.members.clone(), ring))
            .collect();
        family[self.base_context] = LinearCombination::unit(self.base_section.clone(), ring);
        for ((ctx, u), c) in self.variables.iter().zip(x) {
            family[*ctx].add_term(u.clone(), c)?;
        }
        Ok(family)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObstructionOptions {
    /// Merge variables forced equal by an equation `x - y = 0` before solving.
    pub identify_variables: bool,
}

impl Default for ObstructionOptions {
    fn default() -> Self {
        Self { identify_variables: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionResult {
    pub ring: Ring,
    pub context: usize,
    pub section: Section,
    pub vanishes: bool,
    /// A compatible family with `r_context = 1·section`, when `vanishes`.
    pub witness: Option<Vec<LinearCombination>>,
    /// Unsolvability certificate over the rows of [`ObstructionSystem::build`],
    /// when not `vanishes`.
    pub certificate: Option<Certificate>,
}

impl ObstructionResult {
    /// Re-checks the witness or certificate against a freshly built system.
    pub fn verify(&self, model: &SupportModel) -> Result<bool> {
        match (&self.witness, &self.certificate) {
            (Some(w), None) if self.vanishes => verify_witness(model, self.context, &self.section, w, self.ring),
            (None, Some(c)) if !self.vanishes => {
                let sys = ObstructionSystem::build(model, self.context, &self.section)?;
                let ring_matches = matches!(
                    (self.ring, c),
                    (Ring::Integers, Certificate::Integer { .. }) | (Ring::Mod2, Certificate::Mod2 { .. })
                );
                Ok(ring_matches && c.verify(&sys.matrix, &sys.rhs))
            }
            _ => Ok(false),
        }
    }
}

/// Checks a candidate family directly with restrictions: `r_base = 1·t`,
/// each `r_j` is supported on `supp(C_j)`, and restrictions agree on every
/// intersecting pair.
pub fn verify_witness(
    model: &SupportModel,
    base: usize,
    t: &Section,
    family: &[LinearCombination],
    ring: Ring,
) -> Result<bool> {
    let ctxs = model.scenario().contexts();
    if family.len() != ctxs.len() {
        return Ok(false);
    }
    if family[base] != LinearCombination::unit(t.clone(), ring) {
        return Ok(false);
    }
    for (r, ctx) in family.iter().zip(ctxs) {
        if r.domain() != &ctx.members || r.ring() != ring || r.terms().any(|(s, _)| !model.contains(ctx.index, s)) {
            return Ok(false);
        }
    }
    super::is_compatible_family(model, family)
}

/// Decides `γ(t)` for the support section `t` of context `context`.
pub fn obstruction(model: &SupportModel, context: usize, t: &Section, ring: Ring) -> Result<ObstructionResult> {
    obstruction_with(model, context, t, ring, ObstructionOptions::default())
}

pub fn obstruction_with(
    model: &SupportModel,
    context: usize,
    t: &Section,
    ring: Ring,
    options: ObstructionOptions,
) -> Result<ObstructionResult> {
    let sys = ObstructionSystem::build(model, context, t)?;
    // both solvers take the integer matrix; the GF(2) path reads parities
    let solution = if options.identify_variables {
        solve_with_identification(&sys.matrix, &sys.rhs, ring)?
    } else {
        solve_linear(&sys.matrix, &sys.rhs, ring)?
    };
    let result = match solution {
        Solution::Solved(x) => ObstructionResult {
            ring,
            context,
            section: t.clone(),
            vanishes: true,
            witness: Some(sys.family(model, &x, ring)?),
            certificate: None,
        },
        Solution::Unsolvable(c) => ObstructionResult {
            ring,
            context,
            section: t.clone(),
            vanishes: false,
            witness: None,
            certificate: Some(c),
        },
    };
    if !result.verify(model)? {
        return Err(Error::Verification(format!(
            "obstruction result for context {context} failed its independent check"
        )));
    }
    Ok(result)
}

/// Obstructions for every support section, keyed by (context, section).
pub fn all_obstructions(model: &SupportModel, ring: Ring) -> Result<BTreeMap<(usize, Section), ObstructionResult>> {
    all_obstructions_with(model, ring, ObstructionOptions::default())
}

pub fn all_obstructions_with(
    model: &SupportModel,
    ring: Ring,
    options: ObstructionOptions,
) -> Result<BTreeMap<(usize, Section), ObstructionResult>> {
    model.check_consistent()?;
    let jobs: Vec<(usize, &Section)> = model
        .supports()
        .iter()
        .enumerate()
        .flat_map(|(c, set)| set.iter().map(move |s| (c, s)))
        .collect();
    jobs.into_par_iter()
        .map(|(c, s)| obstruction_with(model, c, s, ring, options).map(|r| ((c, s.clone()), r)))
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().collect())
}

/// Union-find with the merging edges recorded.
struct Identification {
    parent: Vec<usize>,
    /// (row, a, b): row `a - b = 0` (up to sign) merged the classes of `a` and `b`.
    edges: Vec<(usize, usize, usize)>,
}

impl Identification {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// Solves after collapsing variables tied by rows of the form `x - y = 0`.
/// Solutions are expanded and certificates are lifted back to the full
/// system, so callers see answers about `a` itself.
fn solve_with_identification(a: &IntMatrix, b: &[BigInt], ring: Ring) -> Result<Solution> {
    let n = a.cols();
    let mut ident = Identification { parent: (0..n).collect(), edges: Vec::new() };
    let mut merge_rows = vec![false; a.rows()];
    for i in 0..a.rows() {
        if !b[i].is_zero() {
            continue;
        }
        let nz: Vec<usize> = (0..n).filter(|&j| !a.get(i, j).is_zero()).collect();
        let [x, y] = nz[..] else { continue };
        if (a.get(i, x) + a.get(i, y)).is_zero() && a.get(i, x).magnitude().is_one() {
            let (rx, ry) = (ident.find(x), ident.find(y));
            if rx != ry {
                ident.parent[ry] = rx;
                ident.edges.push((i, x, y));
                merge_rows[i] = true;
            }
        }
    }

    let mut class_of = vec![0usize; n];
    let mut reps: Vec<usize> = Vec::new();
    let mut rep_class: BTreeMap<usize, usize> = BTreeMap::new();
    for j in 0..n {
        let r = ident.find(j);
        let next = reps.len();
        let c = *rep_class.entry(r).or_insert(next);
        if c == next {
            reps.push(r);
        }
        class_of[j] = c;
    }

    let kept: Vec<usize> = (0..a.rows()).filter(|&i| !merge_rows[i]).collect();
    let mut reduced = IntMatrix::zeros(kept.len(), reps.len());
    for (ri, &i) in kept.iter().enumerate() {
        for j in 0..n {
            let v = a.get(i, j);
            if !v.is_zero() {
                reduced.add_to(ri, class_of[j], v);
            }
        }
    }
    let reduced_rhs: Vec<BigInt> = kept.iter().map(|&i| b[i].clone()).collect();

    let solution = match solve_linear(&reduced, &reduced_rhs, ring)? {
        Solution::Solved(xr) => Solution::Solved((0..n).map(|j| xr[class_of[j]].clone()).collect()),
        Solution::Unsolvable(Certificate::Mod2 { rows }) => {
            let mut y = vec![BigRational::zero(); a.rows()];
            for r in rows {
                y[kept[r]] = BigRational::one();
            }
            let y = lift_multipliers(a, y, &ident.edges);
            let rows = (0..a.rows())
                .filter(|&i| y[i].to_integer().is_odd())
                .collect();
            Solution::Unsolvable(Certificate::Mod2 { rows })
        }
        Solution::Unsolvable(Certificate::Integer { multipliers }) => {
            let mut y = vec![BigRational::zero(); a.rows()];
            for (r, m) in multipliers.into_iter().enumerate() {
                y[kept[r]] = m;
            }
            Solution::Unsolvable(Certificate::Integer { multipliers: lift_multipliers(a, y, &ident.edges) })
        }
    };

    let ok = match &solution {
        Solution::Solved(x) => verify_solution(a, b, x, ring),
        Solution::Unsolvable(c) => c.verify(a, b),
    };
    if !ok {
        return Err(Error::Verification("variable identification produced an unverifiable answer".into()));
    }
    Ok(solution)
}

/// Adds multiples of the merging rows so that `yᵀA` vanishes on every
/// column except one per class, where it equals the class total. Used to
/// turn a certificate of the reduced system into one of the full system;
/// merging rows have zero right-hand side so `yᵀb` is unchanged.
fn lift_multipliers(a: &IntMatrix, mut y: Vec<BigRational>, edges: &[(usize, usize, usize)]) -> Vec<BigRational> {
    let n = a.cols();
    let q = |x: &BigInt| BigRational::from_integer(x.clone());
    let mut d: Vec<BigRational> = (0..n)
        .map(|j| {
            (0..a.rows())
                .filter(|&i| !y[i].is_zero())
                .map(|i| &y[i] * q(a.get(i, j)))
                .sum()
        })
        .collect();

    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &(row, x, z) in edges {
        adj[x].push((z, row));
        adj[z].push((x, row));
    }
    let mut visited = vec![false; n];
    for root in 0..n {
        if visited[root] {
            continue;
        }
        // breadth-first order, then settle nodes leaves-first
        let mut order = vec![(root, usize::MAX, usize::MAX)];
        visited[root] = true;
        let mut head = 0;
        while head < order.len() {
            let (v, _, _) = order[head];
            head += 1;
            for &(w, row) in &adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    order.push((w, v, row));
                }
            }
        }
        for &(v, parent, row) in order.iter().skip(1).rev() {
            let lambda = -(&d[v]) / q(a.get(row, v));
            d[parent] += &lambda * q(a.get(row, parent));
            d[v] = BigRational::zero();
            y[row] += lambda;
        }
    }
    y
}

/// Decides `γ(t)` from its definition as a relative cohomology class: with
/// `c = (s_j)` a family of support sections agreeing with `t` on `C ∩ C_j`
/// and `z = δ^0(c)`, the class vanishes iff `z = δ^0(c')` for some 0-cochain
/// `c'` of the relative presheaf (`c'_j | C ∩ C_j = 0` for every `j`).
///
/// On connected covers this agrees with [`obstruction`]. On disconnected
/// covers the relative condition also constrains contexts disjoint from `C`
/// (restriction to the empty set keeps the coefficient sum), which the
/// pairwise system does not.
pub fn obstruction_class_vanishes(model: &SupportModel, context: usize, t: &Section, ring: Ring) -> Result<bool> {
    if !model.contains(context, t) {
        return Err(Error::Domain(format!("section is not in the support of context {context}")));
    }
    let cx = CechComplex::new(model, ring, 1)?;
    let base = &model.scenario().context(context)?.members;

    let family = model
        .scenario()
        .contexts()
        .iter()
        .map(|ctx| {
            let common = base.intersection(&ctx.members);
            let target = t.restrict(&common)?;
            let s = model
                .support(ctx.index)
                .iter()
                .find(|u| u.restrict(&common).is_ok_and(|r| r == target))
                .ok_or_else(|| Error::Domain("no section family extends the base section".into()))?;
            Ok(LinearCombination::unit(s.clone(), ring))
        })
        .collect::<Result<Vec<_>>>()?;
    let c = cx.cochain_from_family(&family)?;
    let z = cx.to_vector(&cx.coboundary(&c)?)?;
    let d0 = cx.coboundary_matrix(0)?;

    // rows: δ^0 c' = z, then p(c'_j) = 0 for every context
    let nerve0 = cx.nerve().simplices(0);
    let mut relative_rows: Vec<Vec<usize>> = Vec::new();
    let mut offset = 0;
    for (j, s) in nerve0.iter().enumerate() {
        let common = base.intersection(&s.carrier);
        let basis = cx.basis(0, j);
        let targets = model.restricted_support(j, &common)?;
        for w in targets {
            let cols = basis
                .iter()
                .enumerate()
                .filter(|(_, u)| u.restrict(&common).is_ok_and(|r| r == w))
                .map(|(k, _)| offset + k)
                .collect();
            relative_rows.push(cols);
        }
        offset += basis.len();
    }
    let mut a = IntMatrix::zeros(d0.rows() + relative_rows.len(), d0.cols());
    for i in 0..d0.rows() {
        for j in 0..d0.cols() {
            a.set(i, j, d0.get(i, j).clone());
        }
    }
    for (r, cols) in relative_rows.iter().enumerate() {
        for &k in cols {
            a.set(d0.rows() + r, k, BigInt::one());
        }
    }
    let mut rhs = z;
    rhs.resize(a.rows(), BigInt::zero());
    Ok(matches!(solve_linear(&a, &rhs, ring)?, Solution::Solved(_)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ks_support;
    use crate::scenario::Scenario;

    fn triangle() -> SupportModel {
        let sc = Scenario::from_labels(&["A", "B", "C"], &["0", "1"], &[&["A", "B"], &["B", "C"], &["C", "A"]])
            .unwrap();
        ks_support(&sc).unwrap()
    }

    #[test]
    fn triangle_never_vanishes() {
        let m = triangle();
        for ring in [Ring::Integers, Ring::Mod2] {
            for opts in [ObstructionOptions { identify_variables: true }, ObstructionOptions { identify_variables: false }] {
                let all = all_obstructions_with(&m, ring, opts).unwrap();
                assert_eq!(all.len(), 6);
                assert!(all.values().all(|r| !r.vanishes && r.verify(&m).unwrap()));
            }
        }
    }

    #[test]
    fn system_shape_for_triangle() {
        let m = triangle();
        let t = m.support(0)[0].clone();
        let sys = ObstructionSystem::build(&m, 0, &t).unwrap();
        // 4 unknowns (two contexts × two sections), 3 pairs × 2 sections of the intersection
        assert_eq!(sys.variables.len(), 4);
        assert_eq!(sys.equations.len(), 6);
        assert!(sys.equations.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn section_outside_support_rejected() {
        let m = triangle();
        let t = Section::new(m.scenario().contexts()[0].members.clone(), vec![0, 0]).unwrap();
        assert!(obstruction(&m, 0, &t, Ring::Integers).is_err());
    }

    #[test]
    fn full_support_always_vanishes() {
        let sc = Scenario::from_labels(&["A", "B", "C"], &["0", "1"], &[&["A", "B"], &["B", "C"]]).unwrap();
        let sup = sc.contexts().iter().map(|c| sc.enumerate_sections(&c.members).unwrap()).collect();
        let m = SupportModel::new(sc, sup).unwrap();
        for ring in [Ring::Integers, Ring::Mod2] {
            assert!(all_obstructions(&m, ring).unwrap().values().all(|r| r.vanishes));
        }
    }

    #[test]
    fn tampered_witness_fails_verification() {
        let sc = Scenario::from_labels(&["A", "B", "C"], &["0", "1"], &[&["A", "B"], &["B", "C"]]).unwrap();
        let sup = sc.contexts().iter().map(|c| sc.enumerate_sections(&c.members).unwrap()).collect();
        let m = SupportModel::new(sc, sup).unwrap();
        let t = m.support(0)[0].clone();
        let mut r = obstruction(&m, 0, &t, Ring::Integers).unwrap();
        assert!(r.verify(&m).unwrap());
        let w = r.witness.as_mut().unwrap();
        w[1] = LinearCombination::zero(w[1].domain().clone(), Ring::Integers);
        assert!(!r.verify(&m).unwrap());
    }
}
