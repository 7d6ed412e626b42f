//! Built-in Bell functions and the constructions that generate them.

mod tables;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;

use crate::bellpoly::{BellPolynomial, ExtendedPolynomial, Monomial, Scenario};
use crate::error::{Error, Result};
use crate::lhvlab::{self, SnClass, TightnessReport};
use crate::rational::Rational;

pub use tables::{i1_i2, i33, i42_table, i42prime};

/// `(X₁₁X₂₁ + X₁₁X₂₂ + X₁₂X₂₁ − X₁₂X₂₂)/2`.
pub fn chsh() -> BellPolynomial {
    let h = Rational::new(1, 2);
    BellPolynomial::from_index_terms(
        Scenario::new(2, 2).expect("valid"),
        [
            ([1usize, 1], h.clone()),
            ([1, 2], h.clone()),
            ([2, 1], h.clone()),
            ([2, 2], -h),
        ],
    )
    .expect("valid")
}

fn is_one(p: &ExtendedPolynomial) -> bool {
    p.is_constant() && p.constant_term() == Rational::one()
}

/// `½(X + Y + Z − XYZ)`, which squares to one whenever `X`, `Y` and `Z` do.
pub fn compose_xyz(
    x: &ExtendedPolynomial,
    y: &ExtendedPolynomial,
    z: &ExtendedPolynomial,
) -> Result<ExtendedPolynomial> {
    for (name, p) in [("X", x), ("Y", y), ("Z", z)] {
        if !is_one(&p.square()) {
            return Err(Error::Precondition(format!(
                "{name}² = {} is not 1",
                p.square()
            )));
        }
    }
    let xyz = x.multiply(y)?.multiply(z)?;
    Ok(x.add(y)?.add(z)?.sub(&xyz)?.scale(&Rational::new(1, 2)))
}

/// Append party `N` at setting `k` to every monomial.
fn with_last_party(p: &BellPolynomial, s: Scenario, k: usize) -> Result<BellPolynomial> {
    BellPolynomial::from_terms(
        s,
        p.terms().map(|(m, c)| {
            let mut idx = m.index().expect("computable");
            idx.push(k);
            (Monomial::from_index(&idx), c.clone())
        }),
    )
}

/// `½{B(X_{N,1} + X_{N,2}) + B′(X_{N,1} − X_{N,2})}` over `N` parties from
/// two `(N−1)`-party two-setting functions.
pub fn recursive_extend(b: &BellPolynomial, b_prime: &BellPolynomial) -> Result<BellPolynomial> {
    let s = b.scenario();
    if s != b_prime.scenario() {
        return Err(Error::ScenarioMismatch {
            left: s.to_string(),
            right: b_prime.scenario().to_string(),
        });
    }
    if s.settings() != 2 {
        return Err(Error::InvalidArgument(format!(
            "the recursion needs two settings per party, got {s}"
        )));
    }
    let next = Scenario::new(s.parties() + 1, 2)?;
    let sum = with_last_party(b, next, 1)?
        .add(&with_last_party(b, next, 2)?)?
        .add(&with_last_party(b_prime, next, 1)?)?
        .sub(&with_last_party(b_prime, next, 2)?)?;
    Ok(sum.scale(&Rational::new(1, 2)))
}

fn one_party_seed() -> BellPolynomial {
    BellPolynomial::from_index_terms(
        Scenario::new(1, 2).expect("valid"),
        [([1usize], Rational::one())],
    )
    .expect("valid")
}

/// MABK Bell function for `n` qubits, unrolled from `B₁ = X₁₁`, `B₁′ = X₁₂`.
pub fn mabk(n: usize) -> Result<BellPolynomial> {
    if !(2..=5).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "mabk is built for 2 to 5 parties, got {n}"
        )));
    }
    let mut b = one_party_seed();
    for _ in 1..n {
        let swapped = b.swap_first_two_settings()?;
        b = recursive_extend(&b, &swapped)?;
    }
    Ok(b)
}

/// The recursion with `B′` replaced by the identity on top of `mabk(n−1)`;
/// for `n = 2` the seed is used directly.
pub fn unit_partner(n: usize) -> Result<BellPolynomial> {
    if !(2..=5).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "unit_partner is built for 2 to 5 parties, got {n}"
        )));
    }
    let prev = if n == 2 {
        one_party_seed()
    } else {
        mabk(n - 1)?
    };
    let one = BellPolynomial::constant(prev.scenario(), Rational::one());
    recursive_extend(&prev, &one)
}

/// Readings of the four-qubit two-setting table, whose printed form lists
/// `Q1102` twice with opposite signs and omits `Q1021`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientVariant {
    /// Literal transcription; the two `Q1102` entries cancel.
    Printed,
    /// `Q1102` in the negative group read as `Q1021`.
    FirstDuplicateReplaced,
    /// `Q1102` in the positive group read as `Q1021`.
    SecondDuplicateReplaced,
    /// The whole `{0,1,1,2}` orbit with coefficient −1.
    OrbitSymmetric,
    /// Whichever concrete reading certification selects.
    Canonical,
}

impl CoefficientVariant {
    pub const CONCRETE: [CoefficientVariant; 4] = [
        CoefficientVariant::Printed,
        CoefficientVariant::FirstDuplicateReplaced,
        CoefficientVariant::SecondDuplicateReplaced,
        CoefficientVariant::OrbitSymmetric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoefficientVariant::Printed => "printed",
            CoefficientVariant::FirstDuplicateReplaced => "first-duplicate-replaced",
            CoefficientVariant::SecondDuplicateReplaced => "second-duplicate-replaced",
            CoefficientVariant::OrbitSymmetric => "orbit-symmetric",
            CoefficientVariant::Canonical => "canonical",
        }
    }
}

impl fmt::Display for CoefficientVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CoefficientVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::CONCRETE
            .iter()
            .chain(&[CoefficientVariant::Canonical])
            .copied()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Unknown(format!("coefficient variant {s:?}")))
    }
}

/// Shift and scale placing the four-qubit table on the three-point grid.
pub fn i42_class_form() -> (Rational, Rational) {
    (Rational::new(7, 16), Rational::new(9, 16))
}

pub fn i42prime_class_form() -> (Rational, Rational) {
    (Rational::new(6, 16), Rational::new(10, 16))
}

/// The certificates a reading of the four-qubit table is checked against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariantCertificate {
    pub variant: CoefficientVariant,
    pub class: SnClass,
    pub lhv_min: Rational,
    pub lhv_max: Rational,
    pub tightness: TightnessReport,
}

impl VariantCertificate {
    pub fn in_s3(&self) -> bool {
        self.class.n() == Some(3)
    }

    pub fn max_is_one(&self) -> bool {
        self.lhv_max == Rational::one()
    }

    pub fn is_facet(&self) -> bool {
        self.tightness.is_facet
    }

    pub fn passes_all(&self) -> bool {
        self.in_s3() && self.max_is_one() && self.is_facet()
    }

    /// Grid membership and the bound, which is what the root theorem needs.
    pub fn passes_bound_checks(&self) -> bool {
        self.in_s3() && self.max_is_one()
    }
}

pub fn certify_variant(variant: CoefficientVariant) -> Result<VariantCertificate> {
    let p = i42(variant)?;
    let (shift, scale) = i42_class_form();
    let class = lhvlab::classify(&p.affine(&shift, &scale))?;
    let (lhv_min, lhv_max) = lhvlab::lhv_bound(&p)?;
    let tightness = lhvlab::is_tight(&p, &Rational::one())?;
    Ok(VariantCertificate {
        variant: concrete(variant)?,
        class,
        lhv_min,
        lhv_max,
        tightness,
    })
}

/// Certificates for every concrete reading, in declaration order.
pub fn variant_certificates() -> Result<&'static [VariantCertificate]> {
    static CERTS: OnceLock<std::result::Result<Vec<VariantCertificate>, String>> = OnceLock::new();
    CERTS
        .get_or_init(|| {
            CoefficientVariant::CONCRETE
                .iter()
                .map(|&v| certify_variant(v).map_err(|e| e.to_string()))
                .collect()
        })
        .as_deref()
        .map_err(|e| Error::SelfCheck {
            name: "i42".into(),
            reason: e.clone(),
        })
}

/// The unique concrete reading whose shifted form lies in `S₃` with LHV
/// maximum exactly one. Facet status is reported separately by
/// [`variant_certificates`]; no reading is a facet.
pub fn resolve_canonical() -> Result<CoefficientVariant> {
    let passing: Vec<_> = variant_certificates()?
        .iter()
        .filter(|c| c.passes_bound_checks())
        .collect();
    match passing.as_slice() {
        [only] => Ok(only.variant),
        _ => Err(Error::SelfCheck {
            name: "i42".into(),
            reason: format!(
                "{} readings pass the grid and bound checks; exactly one is required",
                passing.len()
            ),
        }),
    }
}

fn concrete(variant: CoefficientVariant) -> Result<CoefficientVariant> {
    match variant {
        CoefficientVariant::Canonical => resolve_canonical(),
        v => Ok(v),
    }
}

/// Four-qubit two-setting function under a chosen reading of its table.
pub fn i42(variant: CoefficientVariant) -> Result<BellPolynomial> {
    match variant {
        CoefficientVariant::Canonical => Ok(i42_table(resolve_canonical()?)),
        v => Ok(i42_table(v)),
    }
}

/// Which polynomial an entry carries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryPolynomial {
    Bell(BellPolynomial),
    Extended(ExtendedPolynomial),
}

impl EntryPolynomial {
    pub fn as_extended(&self) -> &ExtendedPolynomial {
        match self {
            EntryPolynomial::Bell(p) => p.extended(),
            EntryPolynomial::Extended(p) => p,
        }
    }

    pub fn as_bell(&self) -> Option<&BellPolynomial> {
        match self {
            EntryPolynomial::Bell(p) => Some(p),
            EntryPolynomial::Extended(_) => None,
        }
    }
}

impl AsRef<ExtendedPolynomial> for EntryPolynomial {
    fn as_ref(&self) -> &ExtendedPolynomial {
        self.as_extended()
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub polynomial: EntryPolynomial,
    /// Claimed LHV maximum of the polynomial itself.
    pub claimed_bound: Rational,
    /// Claimed class of `shift + scale · polynomial`.
    pub claimed_class: SnClass,
    pub class_form: (Rational, Rational),
    pub note: &'static str,
}

impl CatalogEntry {
    fn new(
        name: &'static str,
        description: &'static str,
        polynomial: EntryPolynomial,
        claimed_bound: Rational,
        claimed_n: usize,
        note: &'static str,
    ) -> Self {
        CatalogEntry {
            name,
            description,
            polynomial,
            claimed_bound,
            claimed_class: SnClass::classified(claimed_n),
            class_form: (Rational::zero(), Rational::one()),
            note,
        }
    }

    fn with_class_form(mut self, form: (Rational, Rational)) -> Self {
        self.class_form = form;
        self
    }

    pub fn scenario(&self) -> Scenario {
        self.polynomial.as_extended().scenario()
    }

    /// `shift + scale · polynomial`, the form whose roots are classified.
    pub fn class_function(&self) -> ExtendedPolynomial {
        let (shift, scale) = &self.class_form;
        let p = self.polynomial.as_extended();
        ExtendedPolynomial::constant(p.scenario(), shift.clone())
            .add(&p.scale(scale))
            .expect("same scenario")
    }

    /// Re-derive the claimed class and bound by enumeration.
    pub fn self_check(&self) -> Result<()> {
        let fail = |reason: String| Error::SelfCheck {
            name: self.name.into(),
            reason,
        };
        let class = lhvlab::classify(&self.class_function())?;
        if class != self.claimed_class {
            return Err(fail(format!(
                "class {class} differs from claimed {}",
                self.claimed_class
            )));
        }
        let (_, max) = lhvlab::lhv_bound(&self.polynomial)?;
        if max != self.claimed_bound {
            return Err(fail(format!(
                "LHV maximum {max} differs from claimed {}",
                self.claimed_bound
            )));
        }
        Ok(())
    }
}

fn build_entries() -> Result<Vec<CatalogEntry>> {
    use EntryPolynomial::{Bell, Extended};
    let one = Rational::one();
    let (i1, i2) = i1_i2();
    Ok(vec![
        CatalogEntry::new(
            "chsh",
            "two-qubit CHSH",
            Bell(chsh()),
            one.clone(),
            2,
            "halved normalisation",
        ),
        CatalogEntry::new(
            "mabk3",
            "three-qubit MABK",
            Bell(mabk(3)?),
            one.clone(),
            2,
            "recursion from X11",
        ),
        CatalogEntry::new(
            "mabk4",
            "four-qubit MABK",
            Bell(mabk(4)?),
            one.clone(),
            2,
            "recursion from X11",
        ),
        CatalogEntry::new(
            "mabk5",
            "five-qubit MABK",
            Bell(mabk(5)?),
            one.clone(),
            2,
            "recursion from X11",
        ),
        CatalogEntry::new(
            "unitp3",
            "three-qubit recursion with identity partner",
            Bell(unit_partner(3)?),
            one.clone(),
            2,
            "B' replaced by 1",
        ),
        CatalogEntry::new(
            "unitp4",
            "four-qubit recursion with identity partner",
            Bell(unit_partner(4)?),
            one.clone(),
            2,
            "B' replaced by 1",
        ),
        CatalogEntry::new(
            "i42",
            "four-qubit two-setting, three roots",
            Bell(i42(CoefficientVariant::Canonical)?),
            one.clone(),
            3,
            "certified reading of the table",
        )
        .with_class_form(i42_class_form()),
        CatalogEntry::new(
            "i42p",
            "second four-qubit two-setting, three roots",
            Bell(i42prime()),
            one.clone(),
            3,
            "",
        )
        .with_class_form(i42prime_class_form()),
        CatalogEntry::new(
            "i33",
            "three-qubit three-setting, three roots",
            Bell(i33()),
            one.clone(),
            3,
            "",
        ),
        CatalogEntry::new(
            "i1",
            "CHSH half with a non-computable term",
            Extended(i1),
            one.clone(),
            2,
            "not quantum-computable",
        ),
        CatalogEntry::new(
            "i2",
            "CHSH half with a non-computable term",
            Extended(i2),
            one,
            2,
            "not quantum-computable",
        ),
    ])
}

/// The self-checked registry.
pub fn entries() -> Result<&'static [CatalogEntry]> {
    static REGISTRY: OnceLock<std::result::Result<Vec<CatalogEntry>, String>> = OnceLock::new();
    REGISTRY
        .get_or_init(|| {
            let entries = build_entries().map_err(|e| e.to_string())?;
            for e in &entries {
                e.self_check().map_err(|e| e.to_string())?;
            }
            Ok(entries)
        })
        .as_deref()
        .map_err(|e| Error::SelfCheck {
            name: "catalog".into(),
            reason: e.clone(),
        })
}

/// Look up an entry; `variant` only applies to `i42`.
pub fn lookup(name: &str, variant: Option<CoefficientVariant>) -> Result<CatalogEntry> {
    let entry = entries()?
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Unknown(format!("catalog entry {name:?}")))?;
    match variant {
        Some(v) if name == "i42" && v != CoefficientVariant::Canonical => {
            let mut e = entry.clone();
            e.polynomial = EntryPolynomial::Bell(i42(v)?);
            Ok(e)
        }
        Some(v) if name != "i42" && v != CoefficientVariant::Canonical => Err(
            Error::InvalidArgument(format!("{name} has no coefficient variants")),
        ),
        _ => Ok(entry.clone()),
    }
}
