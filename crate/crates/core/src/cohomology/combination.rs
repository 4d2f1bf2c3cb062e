use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Ring;
use crate::error::{Error, Result};
use crate::scenario::{MeasurementSet, Section};

/// A finitely supported function from sections over `domain` to the ring,
/// i.e. a formal linear combination of sections. Zero coefficients are never
/// stored, so structural equality is equality in `F_R(E(domain))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCombination {
    domain: MeasurementSet,
    ring: Ring,
    terms: BTreeMap<Section, BigInt>,
}

impl LinearCombination {
    pub fn zero(domain: MeasurementSet, ring: Ring) -> Self {
        Self { domain, ring, terms: BTreeMap::new() }
    }

    /// The embedding `s ↦ 1·s`.
    pub fn unit(s: Section, ring: Ring) -> Self {
        let mut lc = Self::zero(s.domain().clone(), ring);
        lc.terms.insert(s, BigInt::one());
        lc
    }

    pub fn from_terms(
        domain: MeasurementSet,
        ring: Ring,
        terms: impl IntoIterator<Item = (Section, BigInt)>,
    ) -> Result<Self> {
        let mut lc = Self::zero(domain, ring);
        for (s, c) in terms {
            lc.add_term(s, &c)?;
        }
        Ok(lc)
    }

    pub fn domain(&self) -> &MeasurementSet {
        &self.domain
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Section, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: &Section) -> BigInt {
        self.terms.get(s).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, s: Section, c: &BigInt) -> Result<()> {
        if s.domain() != &self.domain {
            return Err(Error::Domain(format!(
                "section over {} added to a combination over {}",
                s.domain(),
                self.domain
            )));
        }
        let entry = self.terms.entry(s).or_insert_with(BigInt::zero);
        *entry = self.ring.reduce(&(&*entry + c));
        self.terms.retain(|_, v| !v.is_zero());
        Ok(())
    }

    /// Sum of all coefficients (reduced in the ring).
    pub fn coefficient_sum(&self) -> BigInt {
        self.ring.reduce(&self.terms.values().sum())
    }

    pub fn scaled(&self, k: &BigInt) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(s, c)| (s.clone(), self.ring.reduce(&(c * k))))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Self { domain: self.domain.clone(), ring: self.ring, terms }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if other.domain != self.domain || other.ring != self.ring {
            return Err(Error::Domain("adding combinations over different domains or rings".into()));
        }
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(s.clone(), c)?;
        }
        Ok(out)
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.plus(&other.scaled(&-BigInt::one()))
    }

    /// `F_R(f)`: the coefficient of `y` is the sum over the fibre `f⁻¹(y)`.
    /// `f` must be defined on every section carrying a nonzero coefficient.
    pub fn push_forward<F>(&self, target: MeasurementSet, f: F) -> Result<Self>
    where
        F: Fn(&Section) -> Option<Section>,
    {
        let mut out = Self::zero(target, self.ring);
        for (s, c) in &self.terms {
            let image = f(s).ok_or_else(|| {
                Error::Domain("push-forward map undefined on a section of the combination".into())
            })?;
            out.add_term(image, c)?;
        }
        Ok(out)
    }

    /// Push-forward along section restriction to `target ⊆ domain`.
    pub fn restrict(&self, target: &MeasurementSet) -> Result<Self> {
        if !target.is_subset(&self.domain) {
            return Err(Error::Domain(format!("cannot restrict from {} to {}", self.domain, target)));
        }
        self.push_forward(target.clone(), |s| s.restrict(target).ok())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sec(dom: &[usize], vals: &[usize]) -> Section {
        Section::new(dom.iter().copied().collect(), vals.to_vec()).unwrap()
    }

    // measurements: a=0, b'=1
    fn hardy_r2() -> LinearCombination {
        let ab = [0, 1];
        LinearCombination::from_terms(
            ab.into(),
            Ring::Integers,
            [
                (sec(&ab, &[0, 1]), BigInt::from(1)),
                (sec(&ab, &[1, 0]), BigInt::from(1)),
                (sec(&ab, &[1, 1]), BigInt::from(-1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn hardy_restrictions() {
        let r2 = hardy_r2();
        let on_a = r2.restrict(&[0].into()).unwrap();
        assert_eq!(on_a, LinearCombination::unit(sec(&[0], &[0]), Ring::Integers));
        let on_b = r2.restrict(&[1].into()).unwrap();
        assert_eq!(on_b, LinearCombination::unit(sec(&[1], &[0]), Ring::Integers));
    }

    #[test]
    fn identity_push_forward() {
        let r2 = hardy_r2();
        assert_eq!(r2.push_forward(r2.domain().clone(), |s| Some(s.clone())).unwrap(), r2);
    }

    #[test]
    fn fibre_cancellation() {
        let x = sec(&[0, 1], &[0, 0]);
        let y = sec(&[0, 1], &[0, 1]);
        let phi = LinearCombination::unit(x.clone(), Ring::Integers)
            .minus(&LinearCombination::unit(y, Ring::Integers))
            .unwrap();
        assert!(phi.restrict(&[0].into()).unwrap().is_zero());
        assert!(phi.push_forward([0].into(), |_| None).is_err());
    }

    #[test]
    fn restriction_of_unit_and_zero() {
        let s = sec(&[0, 2], &[1, 0]);
        let u = LinearCombination::unit(s.clone(), Ring::Mod2);
        assert_eq!(
            u.restrict(&[2].into()).unwrap(),
            LinearCombination::unit(s.restrict(&[2].into()).unwrap(), Ring::Mod2)
        );
        let z = LinearCombination::zero([0, 2].into(), Ring::Integers);
        assert!(z.restrict(&MeasurementSet::empty()).unwrap().is_zero());
        assert!(z.restrict(&[1].into()).is_err());
    }

    #[test]
    fn mod2_reduction() {
        let s = sec(&[0], &[1]);
        let mut lc = LinearCombination::zero([0].into(), Ring::Mod2);
        lc.add_term(s.clone(), &BigInt::from(3)).unwrap();
        assert_eq!(lc.coefficient(&s), BigInt::one());
        lc.add_term(s, &BigInt::one()).unwrap();
        assert!(lc.is_zero());
    }
}
