//! Exact rank by integer-preserving row reduction.
//!
//! Rows are reduced against an echelon basis using only integer multiply and
//! subtract, with each row divided by the gcd of its entries afterwards. The
//! word-sized path uses checked arithmetic; on overflow the whole computation
//! is redone over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

trait Scalar: Clone + PartialEq + Sized {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    /// `a*x - b*y`, or `None` on overflow.
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn gcd(a: &Self, b: &Self) -> Self;
    fn div_exact(&self, d: &Self) -> Self;
    fn is_one(&self) -> bool;
}

impl Scalar for i64 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn gcd(a: &Self, b: &Self) -> Self {
        Integer::gcd(a, b)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn gcd(a: &Self, b: &Self) -> Self {
        Integer::gcd(a, b).abs()
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_one(&self) -> bool {
        *self == BigInt::from(1)
    }
}

struct Echelon<T> {
    width: usize,
    /// Sorted by pivot column.
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: Scalar> Echelon<T> {
    fn new(width: usize) -> Self {
        Echelon {
            width,
            rows: Vec::new(),
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// `None` on overflow.
    fn insert(&mut self, mut row: Vec<T>) -> Option<()> {
        debug_assert_eq!(row.len(), self.width);
        for (pivot, basis) in &self.rows {
            let r = &row[*pivot];
            if r.is_zero() {
                continue;
            }
            let g = T::gcd(&basis[*pivot], r);
            let a = basis[*pivot].div_exact(&g);
            let b = r.div_exact(&g);
            for (x, y) in row.iter_mut().zip(basis) {
                *x = T::mul_sub(&a, x, &b, y)?;
            }
            normalize(&mut row);
        }
        if let Some(pivot) = row.iter().position(|x| !x.is_zero()) {
            let at = self.rows.partition_point(|(p, _)| *p < pivot);
            self.rows.insert(at, (pivot, row));
        }
        Some(())
    }
}

fn normalize<T: Scalar>(row: &mut [T]) {
    let mut g = T::zero();
    for x in row.iter() {
        if !x.is_zero() {
            g = T::gcd(&g, x);
            if g.is_one() {
                return;
            }
        }
    }
    if !g.is_zero() {
        for x in row.iter_mut() {
            *x = x.div_exact(&g);
        }
    }
}

fn rank_with<T: Scalar, I>(width: usize, rows: I, convert: impl Fn(i64) -> T) -> Option<usize>
where
    I: IntoIterator<Item = Vec<i64>>,
{
    let mut e = Echelon::<T>::new(width);
    for row in rows {
        if e.rank() == width {
            break;
        }
        e.insert(row.into_iter().map(&convert).collect())?;
    }
    Some(e.rank())
}

/// Exact rank of the integer rows produced by `rows()`, which may be called
/// twice if the word-sized pass overflows.
pub fn exact_rank<I, F>(width: usize, rows: F) -> usize
where
    F: Fn() -> I,
    I: IntoIterator<Item = Vec<i64>>,
{
    rank_with::<i64, _>(width, rows(), |x| x)
        .or_else(|| rank_with::<BigInt, _>(width, rows(), BigInt::from))
        .expect("arbitrary precision cannot overflow")
}

/// Dimension of the affine hull of a point set; −1 for the empty set.
pub fn affine_rank<I, F>(width: usize, points: F) -> i64
where
    F: Fn() -> I,
    I: IntoIterator<Item = Vec<i64>>,
{
    let homogeneous = || {
        points().into_iter().map(|p| {
            let mut row = Vec::with_capacity(p.len() + 1);
            row.push(1);
            row.extend(p);
            row
        })
    };
    exact_rank(width + 1, homogeneous) as i64 - 1
}
