//! From a solved `(f, g)` pair to the Bell inequality it implies.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::bellpoly::{Assignment, BellPolynomial, ExtendedPolynomial};
use crate::error::{Error, Result};
use crate::lhvlab::{self, RootSpectrum, SnClass};
use crate::qviolation;
use crate::rational::Rational;

/// `⟨fg⟩² ≤ ⟨f²⟩·⟨g²⟩` with all three sides reduced to computable polynomials,
/// i.e. affine functions on correlation space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticConstraint {
    pub fg: BellPolynomial,
    pub ff: BellPolynomial,
    pub gg: BellPolynomial,
}

/// `⟨form⟩² ≤ square_bound` with `form` scaled to coprime integer
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearBound {
    pub form: BellPolynomial,
    pub square_bound: Rational,
}

fn computable(p: ExtendedPolynomial, what: &str) -> Result<BellPolynomial> {
    if let Some((m, _)) = p.non_computable_terms().next() {
        return Err(Error::NonComputable(format!("{m} survives in {what}")));
    }
    p.into_bell()
}

/// Reduce `fg`, `f²`, `g²`; fails if any non-computable term survives.
pub fn implied_inequality(
    f: &ExtendedPolynomial,
    g: &ExtendedPolynomial,
) -> Result<QuadraticConstraint> {
    Ok(QuadraticConstraint {
        fg: computable(f.multiply(g)?, "f*g")?,
        ff: computable(f.square(), "f^2")?,
        gg: computable(g.square(), "g^2")?,
    })
}

/// `(gcd of numerators) / (lcm of denominators)`, positive.
fn content(p: &BellPolynomial) -> Rational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for (_, c) in p.terms() {
        num = num.gcd(&c.numer());
        den = den.lcm(&c.denom());
    }
    Rational::from(BigRational::new(num, den))
}

impl QuadraticConstraint {
    /// Whether the constraint holds for a mixture of deterministic strategies.
    pub fn holds_for(&self, mixture: &[(Rational, Assignment)]) -> Result<bool> {
        let fg = lhvlab::lhv_expectation(&self.fg, mixture)?;
        let ff = lhvlab::lhv_expectation(&self.ff, mixture)?;
        let gg = lhvlab::lhv_expectation(&self.gg, mixture)?;
        Ok(&fg * &fg <= &ff * &gg)
    }

    /// When `fg` is a constant `k` and `f² = a + L`, `g² = a − L`, the
    /// constraint is `⟨L⟩² ≤ a² − k²`.
    pub fn linearize(&self) -> Option<LinearBound> {
        if !self.fg.extended().is_constant() {
            return None;
        }
        let sum = self.ff.add(&self.gg).ok()?;
        if !sum.extended().is_constant() {
            return None;
        }
        let a = sum.constant_term() * Rational::new(1, 2);
        let diff = self.ff.sub(&self.gg).ok()?.scale(&Rational::new(1, 2));
        if diff.is_zero() || !diff.constant_term().is_zero() {
            return None;
        }
        let k = self.fg.constant_term();
        let lambda = content(&diff);
        let form = diff.scale(&(Rational::one() / lambda.clone()));
        let square_bound = (&a * &a - &k * &k) / (&lambda * &lambda);
        Some(LinearBound { form, square_bound })
    }
}

impl fmt::Display for QuadraticConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})² ≤ ({})·({})", self.fg, self.ff, self.gg)
    }
}

impl LinearBound {
    /// `form / √square_bound`, bounded by 1 in absolute value, when the root
    /// is rational.
    pub fn bell_function(&self) -> Option<BellPolynomial> {
        let r = self.square_bound.sqrt_exact()?;
        if r.is_zero() {
            return None;
        }
        Some(self.form.scale(&(Rational::one() / r)))
    }
}

impl fmt::Display for LinearBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})² ≤ {}", self.form, self.square_bound)
    }
}

/// Outcome of applying the root-classification theorem to a Bell function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum TheoremBound {
    /// `|⟨B⟩_LHV| ≤ 1` holds.
    Certified {
        class: SnClass,
        #[serde(serialize_with = "display")]
        function: BellPolynomial,
    },
    /// Some root is off every grid; the spectrum is the evidence.
    Rejected { spectrum: RootSpectrum },
}

fn display<T: fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl TheoremBound {
    pub fn is_certified(&self) -> bool {
        matches!(self, TheoremBound::Certified { .. })
    }
}

impl fmt::Display for TheoremBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoremBound::Certified { class, function } => {
                write!(f, "|⟨{function}⟩| ≤ 1  [{class}]")
            }
            TheoremBound::Rejected { spectrum } => {
                write!(f, "rejected: roots {spectrum} lie on no uniform grid")
            }
        }
    }
}

/// Classify `b`; a Bell function in some `S_n` satisfies `|⟨b⟩_LHV| ≤ 1`.
pub fn theorem_bound(b: &BellPolynomial) -> Result<TheoremBound> {
    let spectrum = lhvlab::enumerate_roots(b)?;
    Ok(
        match lhvlab::classify_spectrum(&spectrum, lhvlab::DEFAULT_N_MAX) {
            class @ SnClass::Classified { .. } => TheoremBound::Certified {
                class,
                function: b.clone(),
            },
            SnClass::Unclassified { .. } => TheoremBound::Rejected { spectrum },
        },
    )
}

/// Quantum screen for a certified Bell function: flags it trivial when no
/// see-saw restart beats the LHV maximum by more than the triviality margin.
/// Rejected functions yield `None`.
pub fn screen_triviality(
    t: &TheoremBound,
    opts: &qviolation::SeesawOptions,
) -> Result<Option<qviolation::ViolationCheck>> {
    match t {
        TheoremBound::Certified { function, .. } => {
            qviolation::violation_check(function, opts).map(Some)
        }
        TheoremBound::Rejected { .. } => Ok(None),
    }
}

/// `⟨fg⟩² ≤ ⟨f²⟩⟨g²⟩` evaluated exactly over a mixture. Always true; exposed
/// for property testing.
pub fn cauchy_schwarz_property(
    f: &ExtendedPolynomial,
    g: &ExtendedPolynomial,
    mixture: &[(Rational, Assignment)],
) -> Result<bool> {
    lhvlab::check_mixture(mixture)?;
    let (mut fg, mut ff, mut gg) = (Rational::zero(), Rational::zero(), Rational::zero());
    for (w, a) in mixture {
        let x = f.evaluate(a)?;
        let y = g.evaluate(a)?;
        fg += &(w * &(&x * &y));
        ff += &(w * &(&x * &x));
        gg += &(w * &(&y * &y));
    }
    Ok(&fg * &fg <= &ff * &gg)
}
