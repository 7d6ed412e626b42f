use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::{Assignment, Monomial, Scenario};

/// A multilinear polynomial in the observables, allowing products that are
/// not quantum-computable (two settings of one party).
///
/// Terms are kept in canonical monomial order with no zero coefficients, so
/// derived equality is structural equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtendedPolynomial {
    scenario: Scenario,
    terms: BTreeMap<Monomial, Rational>,
}

/// A Bell function: an [`ExtendedPolynomial`] whose monomials are all
/// computable, i.e. a linear functional on correlation space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BellPolynomial(ExtendedPolynomial);

fn check_same(a: &Scenario, b: &Scenario) -> Result<()> {
    if a != b {
        return Err(Error::ScenarioMismatch {
            left: a.to_string(),
            right: b.to_string(),
        });
    }
    Ok(())
}

fn accumulate(terms: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: &Rational) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c.clone());
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl ExtendedPolynomial {
    pub fn zero(scenario: Scenario) -> Self {
        ExtendedPolynomial {
            scenario,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(scenario: Scenario, c: Rational) -> Self {
        let mut p = Self::zero(scenario);
        accumulate(&mut p.terms, Monomial::identity(scenario.parties()), &c);
        p
    }

    /// The single observable `X_{party,setting}`.
    pub fn observable(scenario: Scenario, party: usize, setting: usize) -> Result<Self> {
        scenario.check_observable(party, setting)?;
        let mut idx = vec![0; scenario.parties()];
        idx[party] = setting;
        Self::from_terms(scenario, [(Monomial::from_index(&idx), Rational::one())])
    }

    /// Sums duplicate monomials and drops zeros.
    pub fn from_terms(
        scenario: Scenario,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Result<Self> {
        let mut out = Self::zero(scenario);
        for (m, c) in terms {
            if !m.fits(&scenario) {
                return Err(Error::IndexOutOfRange(format!(
                    "monomial {m} does not fit {scenario}"
                )));
            }
            accumulate(&mut out.terms, m, &c);
        }
        Ok(out)
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::identity(self.scenario.parties()))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_identity)
    }

    pub fn is_computable(&self) -> bool {
        self.terms.keys().all(Monomial::is_computable)
    }

    pub fn non_computable_terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().filter(|(m, _)| !m.is_computable())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.scenario);
        for (m, v) in &self.terms {
            accumulate(&mut out.terms, m.clone(), &(v * c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same(&self.scenario, &other.scenario)?;
        let mut out = self.clone();
        for (m, v) in &other.terms {
            accumulate(&mut out.terms, m.clone(), v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&Rational::from(-1)))
    }

    /// Distributes and reduces every squared observable to 1.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        check_same(&self.scenario, &other.scenario)?;
        let mut out = Self::zero(self.scenario);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                accumulate(&mut out.terms, ma.mul(mb), &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn square(&self) -> Self {
        self.multiply(self).expect("same scenario")
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<Rational> {
        check_same(&self.scenario, &a.scenario())?;
        let m = self.scenario.settings();
        Ok(self
            .terms
            .iter()
            .map(|(mono, c)| {
                if super::assignment::sign_of_mask(mono.global_mask(m), a.bits()) < 0 {
                    -c
                } else {
                    c.clone()
                }
            })
            .sum())
    }

    pub fn into_bell(self) -> Result<BellPolynomial> {
        if let Some((m, _)) = self.non_computable_terms().next() {
            return Err(Error::NonComputable(m.to_string()));
        }
        Ok(BellPolynomial(self))
    }
}

impl BellPolynomial {
    pub fn zero(scenario: Scenario) -> Self {
        BellPolynomial(ExtendedPolynomial::zero(scenario))
    }

    pub fn constant(scenario: Scenario, c: Rational) -> Self {
        BellPolynomial(ExtendedPolynomial::constant(scenario, c))
    }

    pub fn from_terms(
        scenario: Scenario,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Result<Self> {
        ExtendedPolynomial::from_terms(scenario, terms)?.into_bell()
    }

    /// From `(multi-index, coefficient)` pairs; indices range over `0..=M`.
    pub fn from_index_terms<I, V>(scenario: Scenario, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (V, Rational)>,
        V: AsRef<[usize]>,
    {
        let mut out = Vec::new();
        for (idx, c) in terms {
            let idx = idx.as_ref();
            if idx.len() != scenario.parties() || idx.iter().any(|&k| k > scenario.settings()) {
                return Err(Error::IndexOutOfRange(format!(
                    "multi-index {idx:?} in {scenario}"
                )));
            }
            out.push((Monomial::from_index(idx), c));
        }
        Self::from_terms(scenario, out)
    }

    pub fn extended(&self) -> &ExtendedPolynomial {
        &self.0
    }

    pub fn into_extended(self) -> ExtendedPolynomial {
        self.0
    }

    pub fn scenario(&self) -> Scenario {
        self.0.scenario
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.0.terms()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_zero()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.0.coefficient(m)
    }

    /// Coefficient of the correlator with the given multi-index.
    pub fn coefficient_at(&self, idx: &[usize]) -> Rational {
        self.0.coefficient(&Monomial::from_index(idx))
    }

    pub fn constant_term(&self) -> Rational {
        self.0.constant_term()
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<Rational> {
        self.0.evaluate(a)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        BellPolynomial(self.0.scale(c))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(BellPolynomial(self.0.add(&other.0)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(BellPolynomial(self.0.sub(&other.0)?))
    }

    /// `shift + scale * self`, the affine form used to place a Bell function
    /// on a root grid.
    pub fn affine(&self, shift: &Rational, scale: &Rational) -> Self {
        let c = BellPolynomial::constant(self.scenario(), shift.clone());
        c.add(&self.scale(scale)).expect("same scenario")
    }

    /// Exchange settings 1 and 2 at every party.
    pub fn swap_first_two_settings(&self) -> Result<Self> {
        if self.scenario().settings() < 2 {
            return Err(Error::InvalidArgument(
                "setting swap needs at least two settings".into(),
            ));
        }
        let terms = self.terms().map(|(m, c)| {
            let idx: Vec<usize> = m
                .index()
                .expect("computable")
                .into_iter()
                .map(|k| match k {
                    1 => 2,
                    2 => 1,
                    k => k,
                })
                .collect();
            (Monomial::from_index(&idx), c.clone())
        });
        BellPolynomial::from_terms(self.scenario(), terms)
    }
}

impl AsRef<ExtendedPolynomial> for ExtendedPolynomial {
    fn as_ref(&self) -> &ExtendedPolynomial {
        self
    }
}

impl AsRef<ExtendedPolynomial> for BellPolynomial {
    fn as_ref(&self) -> &ExtendedPolynomial {
        &self.0
    }
}

impl From<BellPolynomial> for ExtendedPolynomial {
    fn from(p: BellPolynomial) -> Self {
        p.0
    }
}

impl TryFrom<ExtendedPolynomial> for BellPolynomial {
    type Error = Error;
    fn try_from(p: ExtendedPolynomial) -> Result<Self> {
        p.into_bell()
    }
}

fn write_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (&'a Monomial, &'a Rational)>,
    label: impl Fn(&Monomial) -> String,
) -> fmt::Result {
    let mut first = true;
    for (m, c) in terms {
        let neg = c.is_negative();
        let mag = c.abs();
        match (first, neg) {
            (true, true) => write!(f, "-")?,
            (true, false) => {}
            (false, true) => write!(f, " - ")?,
            (false, false) => write!(f, " + ")?,
        }
        if m.is_identity() {
            write!(f, "{mag}")?;
        } else if mag == Rational::one() {
            write!(f, "{}", label(m))?;
        } else {
            write!(f, "{mag} {}", label(m))?;
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for ExtendedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms(), |m| m.to_string())
    }
}

impl fmt::Display for BellPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms(), |m| m.correlator_label())
    }
}
