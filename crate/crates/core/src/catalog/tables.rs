//! Coefficient tables, written as `(numerator, "idx idx ..")` groups over a
//! common denominator. Each `idx` is a string of setting digits.

use crate::bellpoly::{BellPolynomial, ExtendedPolynomial, Monomial, Scenario};
use crate::rational::Rational;

use super::CoefficientVariant;

fn table(parties: usize, settings: usize, den: i64, groups: &[(i64, &str)]) -> BellPolynomial {
    let s = Scenario::new(parties, settings).expect("valid");
    let terms = groups.iter().flat_map(|&(num, keys)| {
        keys.split_whitespace().map(move |key| {
            let idx: Vec<usize> = key.bytes().map(|b| usize::from(b - b'0')).collect();
            assert_eq!(idx.len(), parties, "{key}");
            (Monomial::from_index(&idx), Rational::new(num, den))
        })
    });
    BellPolynomial::from_terms(s, terms).expect("valid table")
}

const ORBIT_0112: &str = "0112 0121 0211 1012 1021 1102 1120 1201 1210 2011 2101 2110";

pub fn i42_table(variant: CoefficientVariant) -> BellPolynomial {
    use CoefficientVariant::*;
    let (minus, plus) = match variant {
        Printed | Canonical => (
            "1120 1210 2110 1102",
            "1201 2101 1012 1102 2011 0112 0121 0211",
        ),
        FirstDuplicateReplaced => (
            "1120 1210 2110 1021",
            "1201 2101 1012 1102 2011 0112 0121 0211",
        ),
        SecondDuplicateReplaced => (
            "1120 1210 2110 1102",
            "1201 2101 1012 1021 2011 0112 0121 0211",
        ),
        OrbitSymmetric => (ORBIT_0112, ""),
    };
    table(
        4,
        2,
        9,
        &[
            (-5, "1111"),
            (-2, "2222"),
            (-1, minus),
            (-1, "2200 2020 2002 0220 0202 0022"),
            (1, "2000 0200 0020 0002"),
            (2, "1000 0100 0010 0001"),
            (1, "1110 1101 1011 0111"),
            (1, plus),
            (2, "1112 1121 1211 2111"),
            (
                -1,
                "1220 2120 2210 1202 2102 2201 1022 2021 2012 0122 0221 0212",
            ),
            (1, "1122 1212 1221 2211 2121 2112"),
        ],
    )
}

pub fn i42prime() -> BellPolynomial {
    table(
        4,
        2,
        10,
        &[
            (
                -1,
                "1200 2100 1020 2010 1002 2001 0120 0210 0102 0201 0012 0021",
            ),
            (-1, "2222"),
            (1, "1112 1121 1211 2111"),
            (3, "1000 0100 0010 0001"),
            (1, "2000 0200 0020 0002"),
            (
                -1,
                "1220 2120 2210 1202 2102 2201 1022 2021 2012 0122 0221 0212",
            ),
            (1, "1122 1212 1221 2211 2121 2112"),
            (-1, "2220 2202 2022 0222"),
            (-3, "1111"),
        ],
    )
}

pub fn i33() -> BellPolynomial {
    table(
        3,
        3,
        8,
        &[
            (1, "223 232 322"),
            (-2, "211 121 112"),
            (1, "221 122 212"),
            (-1, "331 313 133"),
            (1, "321 312 213 231 123 132"),
            (2, "111"),
            (4, "222"),
            (-1, "333"),
        ],
    )
}

/// `I₁ = (1 + A₁B₁ − A₂B₂ + A₁A₂B₁B₂)/2` and
/// `I₂ = (1 + A₁B₂ + A₂B₁ − A₁A₂B₁B₂)/2`.
pub fn i1_i2() -> (ExtendedPolynomial, ExtendedPolynomial) {
    let s = Scenario::new(2, 2).expect("valid");
    let h = Rational::new(1, 2);
    let both = Monomial::from_settings(&[vec![1, 2], vec![1, 2]]);
    let m = |i: &[usize]| Monomial::from_index(i);
    let i1 = ExtendedPolynomial::from_terms(
        s,
        [
            (m(&[0, 0]), h.clone()),
            (m(&[1, 1]), h.clone()),
            (m(&[2, 2]), -h.clone()),
            (both.clone(), h.clone()),
        ],
    )
    .expect("valid");
    let i2 = ExtendedPolynomial::from_terms(
        s,
        [
            (m(&[0, 0]), h.clone()),
            (m(&[1, 2]), h.clone()),
            (m(&[2, 1]), h.clone()),
            (both, -h),
        ],
    )
    .expect("valid");
    (i1, i2)
}
