//! The Čech cochain complex of `F_R S_e` over the nerve of the cover.

use num_bigint::BigInt;
use num_traits::One;

use super::{LinearCombination, Ring};
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::model::SupportModel;
use crate::scenario::{MeasurementSet, Nerve, Section, Simplex};

/// An element of `C^q = ∏_{σ ∈ N(U)^q} F(|σ|)`, indexed like the nerve level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    pub degree: usize,
    pub values: Vec<LinearCombination>,
}

#[derive(Debug, Clone)]
pub struct CechComplex<'a> {
    model: &'a SupportModel,
    ring: Ring,
    nerve: Nerve,
    /// `bases[q][i]` spans `F(|σ|)` for the `i`-th q-simplex: `S_e(|σ|)`.
    bases: Vec<Vec<Vec<Section>>>,
}

impl<'a> CechComplex<'a> {
    /// Builds the complex up to degree `max_q`. The support must be
    /// restriction-consistent so that `S_e(|σ|)` is well defined.
    pub fn new(model: &'a SupportModel, ring: Ring, max_q: usize) -> Result<Self> {
        model.check_consistent()?;
        let nerve = model.scenario().nerve(max_q);
        let bases = (0..=max_q)
            .map(|q| {
                nerve
                    .simplices(q)
                    .iter()
                    .map(|s| model.restricted_support(s.vertices[0], &s.carrier))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { model, ring, nerve, bases })
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn model(&self) -> &SupportModel {
        self.model
    }

    pub fn nerve(&self) -> &Nerve {
        &self.nerve
    }

    pub fn basis(&self, q: usize, simplex: usize) -> &[Section] {
        &self.bases[q][simplex]
    }

    /// Rank of `C^q` as a free module.
    pub fn dimension(&self, q: usize) -> usize {
        self.bases.get(q).map_or(0, |level| level.iter().map(Vec::len).sum())
    }

    pub fn zero_cochain(&self, q: usize) -> Cochain {
        Cochain {
            degree: q,
            values: self
                .nerve
                .simplices(q)
                .iter()
                .map(|s| LinearCombination::zero(s.carrier.clone(), self.ring))
                .collect(),
        }
    }

    /// The 0-cochain of a family `{r_i ∈ F(C_i)}`.
    pub fn cochain_from_family(&self, family: &[LinearCombination]) -> Result<Cochain> {
        let simplices = self.nerve.simplices(0);
        if family.len() != simplices.len() {
            return Err(Error::Dimension(format!(
                "family of {} combinations for {} contexts",
                family.len(),
                simplices.len()
            )));
        }
        for (r, s) in family.iter().zip(simplices) {
            if r.domain() != &s.carrier {
                return Err(Error::Domain("family member over the wrong context".into()));
            }
        }
        Ok(Cochain { degree: 0, values: family.to_vec() })
    }

    /// `δ^q(ω)(σ) = Σ_j (-1)^j ω(∂_j σ) | |σ|`.
    pub fn coboundary(&self, omega: &Cochain) -> Result<Cochain> {
        let q = omega.degree;
        if q + 1 > self.nerve.max_dimension() {
            return Err(Error::Dimension(format!("nerve not built to degree {}", q + 1)));
        }
        if omega.values.len() != self.nerve.simplices(q).len() {
            return Err(Error::Dimension(format!("cochain is not indexed by N(U)^{q}")));
        }
        let values = self
            .nerve
            .simplices(q + 1)
            .iter()
            .map(|sigma| {
                let mut acc = LinearCombination::zero(sigma.carrier.clone(), self.ring);
                for j in 0..=q + 1 {
                    let face = self.face_index(sigma, j)?;
                    let term = omega.values[face].restrict(&sigma.carrier)?;
                    acc = if j % 2 == 0 { acc.plus(&term)? } else { acc.minus(&term)? };
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Cochain { degree: q + 1, values })
    }

    fn face_index(&self, sigma: &Simplex, j: usize) -> Result<usize> {
        let q = sigma.vertices.len() - 1;
        let mut vertices = sigma.vertices.clone();
        vertices.remove(j);
        self.nerve
            .position(q - 1, &vertices)
            .ok_or_else(|| Error::Domain(format!("face {vertices:?} missing from the nerve")))
    }

    pub fn is_cocycle(&self, omega: &Cochain) -> Result<bool> {
        Ok(self.coboundary(omega)?.values.iter().all(LinearCombination::is_zero))
    }

    /// Coordinates of a cochain in the canonical basis (simplices in nerve
    /// order, sections in canonical order within each).
    pub fn to_vector(&self, omega: &Cochain) -> Result<Vec<BigInt>> {
        let mut out = Vec::with_capacity(self.dimension(omega.degree));
        for (i, value) in omega.values.iter().enumerate() {
            let basis = self.basis(omega.degree, i);
            if value.terms().any(|(s, _)| basis.binary_search(s).is_err()) {
                return Err(Error::Domain("cochain value outside F(|σ|)".into()));
            }
            out.extend(basis.iter().map(|s| value.coefficient(s)));
        }
        Ok(out)
    }

    pub fn from_vector(&self, q: usize, coords: &[BigInt]) -> Result<Cochain> {
        if coords.len() != self.dimension(q) {
            return Err(Error::Dimension(format!(
                "{} coordinates for C^{q} of rank {}",
                coords.len(),
                self.dimension(q)
            )));
        }
        let mut offset = 0;
        let mut values = Vec::new();
        for (i, s) in self.nerve.simplices(q).iter().enumerate() {
            let basis = self.basis(q, i);
            let terms = basis.iter().cloned().zip(coords[offset..offset + basis.len()].iter().cloned());
            values.push(LinearCombination::from_terms(s.carrier.clone(), self.ring, terms)?);
            offset += basis.len();
        }
        Ok(Cochain { degree: q, values })
    }

    /// Matrix of `δ^q` from the basis of `C^q` to the basis of `C^{q+1}`,
    /// entries reduced in the ring.
    pub fn coboundary_matrix(&self, q: usize) -> Result<IntMatrix> {
        if q + 1 > self.nerve.max_dimension() {
            return Err(Error::Dimension(format!("nerve not built to degree {}", q + 1)));
        }
        let col_offsets = offsets(&self.bases[q]);
        let row_offsets = offsets(&self.bases[q + 1]);
        let mut m = IntMatrix::zeros(self.dimension(q + 1), self.dimension(q));
        for (si, sigma) in self.nerve.simplices(q + 1).iter().enumerate() {
            let row_basis = self.basis(q + 1, si);
            for j in 0..=q + 1 {
                let face = self.face_index(sigma, j)?;
                let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                for (k, u) in self.basis(q, face).iter().enumerate() {
                    let image = u.restrict(&sigma.carrier)?;
                    let r = row_basis
                        .binary_search(&image)
                        .map_err(|_| Error::Domain("restriction left S_e".into()))?;
                    m.add_to(row_offsets[si] + r, col_offsets[face] + k, &sign);
                }
            }
        }
        Ok(m.reduced(self.ring))
    }

    /// The presheaf map `p` onto `F|U`: each value is restricted to
    /// `U ∩ |σ|`. A cochain lies in the relative complex for `U` iff this
    /// projection vanishes.
    pub fn project(&self, omega: &Cochain, base: &MeasurementSet) -> Result<Vec<LinearCombination>> {
        omega
            .values
            .iter()
            .map(|v| v.restrict(&v.domain().intersection(base)))
            .collect()
    }

    pub fn is_relative(&self, omega: &Cochain, base: &MeasurementSet) -> Result<bool> {
        Ok(self.project(omega, base)?.iter().all(LinearCombination::is_zero))
    }
}

fn offsets(level: &[Vec<Section>]) -> Vec<usize> {
    let mut acc = 0;
    level
        .iter()
        .map(|b| {
            let o = acc;
            acc += b.len();
            o
        })
        .collect()
}

/// Matrix of `δ^q` for `F_R S_e`, `q ∈ {0, 1}`.
pub fn coboundary_matrix(model: &SupportModel, ring: Ring, q: usize) -> Result<IntMatrix> {
    if q > 1 {
        return Err(Error::Domain(format!("coboundary matrices are provided for q ≤ 1, not {q}")));
    }
    CechComplex::new(model, ring, q + 1)?.coboundary_matrix(q)
}

/// Whether the family is pairwise compatible: `r_i | C_i ∩ C_j = r_j | C_i ∩ C_j`
/// for all intersecting contexts.
pub fn is_compatible_family(model: &SupportModel, family: &[LinearCombination]) -> Result<bool> {
    let ctxs = model.scenario().contexts();
    for i in 0..ctxs.len() {
        for j in i + 1..ctxs.len() {
            let common = ctxs[i].members.intersection(&ctxs[j].members);
            if common.is_empty() {
                continue;
            }
            if family[i].restrict(&common)? != family[j].restrict(&common)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
