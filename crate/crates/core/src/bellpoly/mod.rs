//! Exact multilinear polynomials in dichotomic observables `X_{j,k}`.

mod assignment;
pub mod io;
mod monomial;
mod polynomial;
pub mod relabel;
mod scenario;
mod substitute;

pub use assignment::Assignment;
pub use monomial::Monomial;
pub use polynomial::{BellPolynomial, ExtendedPolynomial};
pub use relabel::{find_relabeling, symmetry_report, Relabeling, SymmetryReport};
pub use scenario::{enumeration_cap, Scenario, DEFAULT_ENUM_CAP, ENUM_CAP_ENV};
pub use substitute::{bindings, compact_settings, substitute, Reindex, Substitution};

pub(crate) use assignment::sign_of_mask;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `Σ coeffs[i] · polys[i]`.
pub fn linear_combine(coeffs: &[Rational], polys: &[BellPolynomial]) -> Result<BellPolynomial> {
    if coeffs.len() != polys.len() || polys.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "linear_combine needs equal non-empty lists, got {} coefficients and {} polynomials",
            coeffs.len(),
            polys.len()
        )));
    }
    let mut acc = BellPolynomial::zero(polys[0].scenario());
    for (c, p) in coeffs.iter().zip(polys) {
        acc = acc.add(&p.scale(c))?;
    }
    Ok(acc)
}

/// Same as [`linear_combine`] in the extended algebra.
pub fn linear_combine_extended(
    coeffs: &[Rational],
    polys: &[ExtendedPolynomial],
) -> Result<ExtendedPolynomial> {
    if coeffs.len() != polys.len() || polys.is_empty() {
        return Err(Error::InvalidArgument(
            "linear_combine needs equal non-empty lists".into(),
        ));
    }
    let mut acc = ExtendedPolynomial::zero(polys[0].scenario());
    for (c, p) in coeffs.iter().zip(polys) {
        acc = acc.add(&p.scale(c))?;
    }
    Ok(acc)
}

pub fn multiply(p: &ExtendedPolynomial, q: &ExtendedPolynomial) -> Result<ExtendedPolynomial> {
    p.multiply(q)
}

pub fn evaluate(p: &impl AsRef<ExtendedPolynomial>, a: &Assignment) -> Result<Rational> {
    p.as_ref().evaluate(a)
}

pub fn is_computable(m: &Monomial) -> bool {
    m.is_computable()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s22() -> Scenario {
        Scenario::new(2, 2).unwrap()
    }

    fn chsh() -> BellPolynomial {
        let h = Rational::new(1, 2);
        BellPolynomial::from_index_terms(
            s22(),
            [
                ([1usize, 1], h.clone()),
                ([1, 2], h.clone()),
                ([2, 1], h.clone()),
                ([2, 2], -h),
            ],
        )
        .unwrap()
    }

    #[test]
    fn additive_inverse_gives_zero() {
        let z = linear_combine(&[Rational::one(), Rational::from(-1)], &[chsh(), chsh()]).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn scalar_scaling() {
        let p =
            BellPolynomial::from_index_terms(s22(), [([1usize, 0], Rational::new(1, 4))]).unwrap();
        let q = linear_combine(&[Rational::from(2)], &[p]).unwrap();
        assert_eq!(q.coefficient_at(&[1, 0]), Rational::new(1, 2));
    }

    #[test]
    fn linear_combine_errors() {
        assert!(linear_combine(&[], &[]).is_err());
        assert!(linear_combine(&[Rational::one()], &[chsh(), chsh()]).is_err());
        let other = BellPolynomial::constant(Scenario::new(3, 2).unwrap(), Rational::one());
        assert!(matches!(
            linear_combine(&[Rational::one(), Rational::one()], &[chsh(), other]),
            Err(Error::ScenarioMismatch { .. })
        ));
    }

    #[test]
    fn chsh_squares_to_one() {
        let b = chsh().into_extended();
        assert_eq!(
            multiply(&b, &b).unwrap(),
            ExtendedPolynomial::constant(s22(), Rational::one())
        );
        let one = ExtendedPolynomial::constant(s22(), Rational::one());
        let f = one.add(&b).unwrap();
        let g = one.sub(&b).unwrap();
        assert!(multiply(&f, &g).unwrap().is_zero());
    }

    #[test]
    fn chsh_at_all_plus_is_one() {
        assert_eq!(
            evaluate(&chsh(), &Assignment::all_plus(s22())).unwrap(),
            Rational::one()
        );
        assert_eq!(
            evaluate(&BellPolynomial::zero(s22()), &Assignment::all_plus(s22())).unwrap(),
            Rational::zero()
        );
    }

    #[test]
    fn computability_examples() {
        assert!(is_computable(&Monomial::from_index(&[1, 2])));
        assert!(!is_computable(&Monomial::from_settings(&[
            vec![1, 2],
            vec![]
        ])));
        assert!(is_computable(&Monomial::identity(2)));
    }
}
