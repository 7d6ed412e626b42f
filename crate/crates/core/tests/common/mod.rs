//! Reference implementations used as oracles. Deliberately naive: values by
//! direct products over a private bit layout, rank by rational elimination.

#![allow(dead_code)]

use std::collections::BTreeMap;

use bellforge::bellpoly::{ExtendedPolynomial, Monomial, Scenario};
use bellforge::Rational;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `x[j][k-1]` for assignment number `n`, with observable `(j, k)` at bit
/// `j·M + k − 1`.
pub fn outcomes(s: Scenario, n: u64) -> Vec<Vec<i64>> {
    (0..s.parties())
        .map(|j| {
            (1..=s.settings())
                .map(|k| {
                    if n >> (j * s.settings() + k - 1) & 1 == 1 {
                        -1
                    } else {
                        1
                    }
                })
                .collect()
        })
        .collect()
}

pub fn monomial_value(m: &Monomial, x: &[Vec<i64>]) -> i64 {
    (0..x.len())
        .flat_map(|j| m.settings_of(j).into_iter().map(move |k| (j, k)))
        .map(|(j, k)| x[j][k - 1])
        .product()
}

pub fn value(p: &ExtendedPolynomial, x: &[Vec<i64>]) -> Rational {
    let mut acc = Rational::zero();
    for (m, c) in p.terms() {
        acc += &(c * &Rational::from(monomial_value(m, x)));
    }
    acc
}

pub fn count(s: Scenario) -> u64 {
    1u64 << (s.parties() * s.settings())
}

/// Multiset of values over all assignments.
pub fn spectrum(p: &ExtendedPolynomial) -> BTreeMap<Rational, u64> {
    let s = p.scenario();
    let mut out = BTreeMap::new();
    for n in 0..count(s) {
        *out.entry(value(p, &outcomes(s, n))).or_insert(0) += 1;
    }
    out
}

/// Every multi-index in `{0..M}^N` except all zeros.
pub fn correlators(s: Scenario) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; s.parties()];
    loop {
        let mut j = 0;
        while j < idx.len() {
            idx[j] += 1;
            if idx[j] <= s.settings() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == idx.len() {
            return out;
        }
        out.push(idx.clone());
    }
}

pub fn correlation_vector(s: Scenario, x: &[Vec<i64>]) -> Vec<i64> {
    correlators(s)
        .iter()
        .map(|idx| {
            idx.iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| x[j][k - 1])
                .product()
        })
        .collect()
}

/// Rank by Gaussian elimination over `BigRational`.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&v| BigRational::from_integer(BigInt::from(v)))
                .collect()
        })
        .collect();
    let width = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = &row[c] / &pivot_row[c];
                for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Dimension of the affine hull of the vertices where `p` equals `bound`.
pub fn saturating_affine_rank(p: &ExtendedPolynomial, bound: &Rational) -> (usize, i64) {
    let s = p.scenario();
    let pts: Vec<Vec<i64>> = (0..count(s))
        .map(|n| outcomes(s, n))
        .filter(|x| value(p, x) == *bound)
        .map(|x| correlation_vector(s, &x))
        .collect();
    if pts.is_empty() {
        return (0, -1);
    }
    let diffs: Vec<Vec<i64>> = pts[1..]
        .iter()
        .map(|v| v.iter().zip(&pts[0]).map(|(a, b)| a - b).collect())
        .collect();
    (pts.len(), rank(&diffs) as i64)
}

/// Smallest `n ≤ 64` whose grid `−1 + 2j/(n−1)` contains every root.
pub fn grid_class(roots: &[Rational]) -> Option<usize> {
    (2..=64usize).find(|&n| {
        roots.iter().all(|r| {
            let t = BigRational::new(r.numer(), r.denom()) + BigRational::one();
            let scaled = t * BigRational::from_integer(BigInt::from(n - 1))
                / BigRational::from_integer(BigInt::from(2));
            scaled.is_integer()
                && !scaled.is_negative()
                && scaled <= BigRational::from_integer(BigInt::from(n - 1))
        })
    })
}
