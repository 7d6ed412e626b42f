//! Exhaustive local-hidden-variable analysis.
//!
//! Every deterministic strategy is visited, so spectra, bounds and facet
//! certificates are exact. Tightness is checked on the full
//! correlation-plus-marginals polytope whose coordinates are all computable
//! non-identity monomials.

mod enumerate;
pub mod rank;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::bellpoly::{sign_of_mask, Assignment, ExtendedPolynomial, Monomial, Scenario};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub(crate) use enumerate::for_each_value;
use enumerate::IntegerForm;

/// Default upper limit on `n` when searching for an `S_n` grid.
pub const DEFAULT_N_MAX: usize = 64;

/// Distinct values ("roots") of a Bell function over all deterministic
/// strategies, with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSpectrum {
    pub scenario: Scenario,
    pub entries: BTreeMap<Rational, u64>,
    pub total: u64,
}

impl RootSpectrum {
    pub fn distinct(&self) -> impl Iterator<Item = &Rational> {
        self.entries.keys()
    }

    pub fn multiplicity(&self, r: &Rational) -> u64 {
        self.entries.get(r).copied().unwrap_or(0)
    }

    pub fn min(&self) -> &Rational {
        self.entries.keys().next().expect("spectrum is never empty")
    }

    pub fn max(&self) -> &Rational {
        self.entries
            .keys()
            .next_back()
            .expect("spectrum is never empty")
    }

    /// True when every root is in `allowed`.
    pub fn within(&self, allowed: &[Rational]) -> bool {
        self.entries.keys().all(|r| allowed.contains(r))
    }
}

impl fmt::Display for RootSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(r, c)| format!("{r}: {c}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Serialize)]
struct RootEntry<'a> {
    root: &'a Rational,
    count: u64,
}

impl Serialize for RootSpectrum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let roots: Vec<RootEntry> = self
            .entries
            .iter()
            .map(|(root, &count)| RootEntry { root, count })
            .collect();
        let mut st = s.serialize_struct("RootSpectrum", 3)?;
        st.serialize_field("scenario", &self.scenario)?;
        st.serialize_field("total", &self.total)?;
        st.serialize_field("roots", &roots)?;
        st.end()
    }
}

/// Membership in `S_n`: all roots on the uniform grid `Λ_j = −1 + 2j/(n−1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum SnClass {
    Classified { n: usize, grid: Vec<Rational> },
    Unclassified { n_max: usize },
}

impl SnClass {
    pub fn classified(n: usize) -> Self {
        SnClass::Classified { n, grid: grid(n) }
    }

    pub fn n(&self) -> Option<usize> {
        match self {
            SnClass::Classified { n, .. } => Some(*n),
            SnClass::Unclassified { .. } => None,
        }
    }
}

impl fmt::Display for SnClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SnClass::Classified { n, .. } => write!(f, "S{n}"),
            SnClass::Unclassified { n_max } => write!(f, "unclassified (n <= {n_max})"),
        }
    }
}

/// `{−1 + 2j/(n−1) : j = 0..n−1}`.
pub fn grid(n: usize) -> Vec<Rational> {
    assert!(n >= 2, "grid needs n >= 2");
    let d = (n - 1) as i64;
    (0..n as i64).map(|j| Rational::new(2 * j - d, d)).collect()
}

/// Whether `r` lies on grid(n): `(r+1)(n−1)/2` must be an integer in `0..n`.
pub fn on_grid(r: &Rational, n: usize) -> bool {
    let t = (r + &Rational::one()) * Rational::new((n - 1) as i64, 2);
    t.is_integer() && !t.is_negative() && t <= Rational::from((n - 1) as i64)
}

/// Root spectrum of a Bell function over all `2^(N·M)` strategies.
pub fn enumerate_roots(p: &impl AsRef<ExtendedPolynomial>) -> Result<RootSpectrum> {
    let p = p.as_ref();
    let s = p.scenario();
    let total = s.check_enumerable()?;
    let entries = match IntegerForm::new(p) {
        Some(form) => {
            let mut counts: HashMap<i64, u64> = HashMap::new();
            form.gray_walk(total, |_, v| *counts.entry(v).or_insert(0) += 1);
            counts
                .into_iter()
                .map(|(v, c)| (form.to_rational(v), c))
                .collect()
        }
        None => {
            let mut entries = BTreeMap::new();
            for_each_value(p, |_, v| *entries.entry(v.clone()).or_insert(0) += 1)?;
            entries
        }
    };
    Ok(RootSpectrum {
        scenario: s,
        entries,
        total,
    })
}

/// Smallest `n` in `2..=n_max` whose grid holds every root.
pub fn classify_spectrum(spectrum: &RootSpectrum, n_max: usize) -> SnClass {
    (2..=n_max)
        .find(|&n| spectrum.distinct().all(|r| on_grid(r, n)))
        .map(SnClass::classified)
        .unwrap_or(SnClass::Unclassified { n_max })
}

pub fn classify(p: &impl AsRef<ExtendedPolynomial>) -> Result<SnClass> {
    classify_with_cap(p, DEFAULT_N_MAX)
}

pub fn classify_with_cap(p: &impl AsRef<ExtendedPolynomial>, n_max: usize) -> Result<SnClass> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("n_max must be at least 2".into()));
    }
    Ok(classify_spectrum(&enumerate_roots(p)?, n_max))
}

/// Exact `(min, max)` over all deterministic strategies.
pub fn lhv_bound(p: &impl AsRef<ExtendedPolynomial>) -> Result<(Rational, Rational)> {
    let p = p.as_ref();
    let s = p.scenario();
    let count = s.check_enumerable()?;
    if let Some(form) = IntegerForm::new(p) {
        let (mut lo, mut hi) = (i64::MAX, i64::MIN);
        form.gray_walk(count, |_, v| {
            lo = lo.min(v);
            hi = hi.max(v);
        });
        return Ok((form.to_rational(lo), form.to_rational(hi)));
    }
    let mut bounds: Option<(Rational, Rational)> = None;
    for_each_value(p, |_, v| {
        bounds = Some(match bounds.take() {
            None => (v.clone(), v.clone()),
            Some((lo, hi)) => (lo.min(v.clone()), hi.max(v.clone())),
        });
    })?;
    Ok(bounds.expect("at least one assignment"))
}

/// Coordinates `Q_{k_1..k_N}` of a strategy or state, indexed by computable
/// non-identity monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelationVector {
    pub scenario: Scenario,
    pub coordinates: BTreeMap<Monomial, Rational>,
}

impl CorrelationVector {
    pub fn get(&self, m: &Monomial) -> Rational {
        self.coordinates.get(m).cloned().unwrap_or_default()
    }

    pub fn at(&self, idx: &[usize]) -> Rational {
        self.get(&Monomial::from_index(idx))
    }

    pub fn dimension(&self) -> usize {
        self.coordinates.len()
    }
}

/// Global masks of the polytope coordinates in canonical order.
fn coordinate_masks(s: Scenario) -> Vec<u64> {
    s.correlators()
        .skip(1)
        .map(|m| m.global_mask(s.settings()))
        .collect()
}

fn vertex_row(masks: &[u64], bits: u64) -> Vec<i64> {
    masks
        .iter()
        .map(|&m| sign_of_mask(m, bits) as i64)
        .collect()
}

pub fn vertex_vector(a: &Assignment) -> CorrelationVector {
    let s = a.scenario();
    CorrelationVector {
        scenario: s,
        coordinates: s
            .correlators()
            .skip(1)
            .map(|m| {
                let v = Rational::from(a.sign_of(&m) as i64);
                (m, v)
            })
            .collect(),
    }
}

/// Affine dimension of the local polytope, by exact rank over every vertex.
pub fn polytope_dimension(s: Scenario) -> Result<i64> {
    let count = s.check_enumerable()?;
    let masks = coordinate_masks(s);
    Ok(rank::affine_rank(masks.len(), || {
        (0..count).map(|bits| vertex_row(&masks, bits))
    }))
}

/// Facet certificate for `⟨p⟩ ≤ bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TightnessReport {
    pub bound: Rational,
    pub valid: bool,
    pub lhv_min: Rational,
    pub lhv_max: Rational,
    pub saturating_count: u64,
    pub affine_rank: i64,
    pub polytope_dim: i64,
    pub is_facet: bool,
}

pub fn is_tight(p: &impl AsRef<ExtendedPolynomial>, bound: &Rational) -> Result<TightnessReport> {
    let p = p.as_ref();
    if !p.is_computable() {
        return Err(Error::NonComputable(
            "facets are only defined for computable Bell functions".into(),
        ));
    }
    let s = p.scenario();
    let (lhv_min, lhv_max) = lhv_bound(p)?;
    let mut saturating = Vec::new();
    for_each_value(p, |bits, v| {
        if v == bound {
            saturating.push(bits);
        }
    })?;
    // Walk order is Gray order; sort so the rank input is reproducible
    // regardless of which enumeration path ran.
    saturating.sort_unstable();
    let masks = coordinate_masks(s);
    let affine_rank = rank::affine_rank(masks.len(), || {
        saturating.iter().map(|&b| vertex_row(&masks, b))
    });
    let polytope_dim = polytope_dimension(s)?;
    let valid = lhv_max <= *bound;
    let is_facet = valid && lhv_max == *bound && affine_rank == polytope_dim - 1;
    Ok(TightnessReport {
        bound: bound.clone(),
        valid,
        lhv_min,
        lhv_max,
        saturating_count: saturating.len() as u64,
        affine_rank,
        polytope_dim,
        is_facet,
    })
}

/// `Σ wᵢ · p(aᵢ)` for a probability mixture of deterministic strategies.
pub fn lhv_expectation(
    p: &impl AsRef<ExtendedPolynomial>,
    mixture: &[(Rational, Assignment)],
) -> Result<Rational> {
    check_mixture(mixture)?;
    let p = p.as_ref();
    let mut acc = Rational::zero();
    for (w, a) in mixture {
        acc += &(w * &p.evaluate(a)?);
    }
    Ok(acc)
}

pub(crate) fn check_mixture(mixture: &[(Rational, Assignment)]) -> Result<()> {
    if mixture.is_empty() {
        return Err(Error::InvalidArgument("empty mixture".into()));
    }
    if mixture.iter().any(|(w, _)| w.is_negative()) {
        return Err(Error::InvalidArgument("negative mixture weight".into()));
    }
    let total: Rational = mixture.iter().map(|(w, _)| w).sum();
    if total != Rational::one() {
        return Err(Error::InvalidArgument(format!(
            "mixture weights sum to {total}, not 1"
        )));
    }
    Ok(())
}
