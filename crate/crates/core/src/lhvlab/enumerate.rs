//! Walking every deterministic assignment.
//!
//! Coefficients are scaled to a common denominator so each assignment's value
//! is an exact `i64`. Assignments are visited in Gray-code order, flipping one
//! observable per step and updating only the terms that contain it; the value
//! reached is exactly the value a fresh evaluation would give.

use num_integer::Integer;

use crate::bellpoly::{Assignment, ExtendedPolynomial};
use crate::error::Result;
use crate::rational::Rational;

/// Integer image of a polynomial: `value(a) = Σ coeffs[i] · sign(masks[i], a) / scale`.
#[derive(Clone, Debug)]
pub(crate) struct IntegerForm {
    pub scale: i64,
    #[cfg_attr(not(test), allow(dead_code))]
    pub masks: Vec<u64>,
    pub coeffs: Vec<i64>,
    /// For each observable bit, the terms it appears in.
    by_bit: Vec<Vec<usize>>,
}

impl IntegerForm {
    /// `None` when the common denominator or the worst-case sum overflows.
    pub fn new(p: &ExtendedPolynomial) -> Option<Self> {
        let s = p.scenario();
        let mut scale: i64 = 1;
        for (_, c) in p.terms() {
            let (_, den) = c.to_i64_pair()?;
            let l = scale.lcm(&den);
            if l <= 0 || l > (1i64 << 40) {
                return None;
            }
            scale = l;
        }
        let mut masks = Vec::with_capacity(p.len());
        let mut coeffs = Vec::with_capacity(p.len());
        let mut total: i64 = 0;
        for (m, c) in p.terms() {
            let (num, den) = c.to_i64_pair()?;
            let v = num.checked_mul(scale / den)?;
            total = total.checked_add(v.checked_abs()?)?;
            masks.push(m.global_mask(s.settings()));
            coeffs.push(v);
        }
        if total > i64::MAX / 4 {
            return None;
        }
        let mut by_bit = vec![Vec::new(); s.observables()];
        for (t, &mask) in masks.iter().enumerate() {
            let mut m = mask;
            while m != 0 {
                by_bit[m.trailing_zeros() as usize].push(t);
                m &= m - 1;
            }
        }
        Some(IntegerForm {
            scale,
            masks,
            coeffs,
            by_bit,
        })
    }

    #[cfg(test)]
    pub fn value_at(&self, negative: u64) -> i64 {
        use crate::bellpoly::sign_of_mask;
        self.masks
            .iter()
            .zip(&self.coeffs)
            .map(|(&m, &c)| c * sign_of_mask(m, negative) as i64)
            .sum()
    }

    pub fn to_rational(&self, v: i64) -> Rational {
        Rational::new(v, self.scale)
    }

    /// Calls `f(assignment_bits, scaled_value)` for all `count` assignments in
    /// Gray-code order.
    pub fn gray_walk(&self, count: u64, mut f: impl FnMut(u64, i64)) {
        let mut signs: Vec<i64> = vec![1; self.coeffs.len()];
        let mut value: i64 = self.coeffs.iter().sum();
        let mut bits = 0u64;
        f(bits, value);
        for i in 1..count {
            let b = i.trailing_zeros() as usize;
            bits ^= 1 << b;
            for &t in &self.by_bit[b] {
                signs[t] = -signs[t];
                value += 2 * signs[t] * self.coeffs[t];
            }
            f(bits, value);
        }
    }
}

/// Visit every assignment with its exact value. Uses the integer Gray-code
/// walk when coefficients permit, plain rational evaluation otherwise.
pub(crate) fn for_each_value(
    p: &ExtendedPolynomial,
    mut f: impl FnMut(u64, &Rational),
) -> Result<()> {
    let s = p.scenario();
    let count = s.check_enumerable()?;
    match IntegerForm::new(p) {
        Some(form) => {
            // Cache conversions; spectra have few distinct values.
            let mut last: Option<(i64, Rational)> = None;
            form.gray_walk(count, |bits, v| {
                let r = match &last {
                    Some((lv, r)) if *lv == v => r.clone(),
                    _ => {
                        let r = form.to_rational(v);
                        last = Some((v, r.clone()));
                        r
                    }
                };
                f(bits, &r);
            });
        }
        None => {
            for a in Assignment::all(s)? {
                let v = p.evaluate(&a)?;
                f(a.bits(), &v);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bellpoly::{Monomial, Scenario};

    #[test]
    fn gray_walk_visits_each_assignment_once_with_exact_values() {
        let s = Scenario::new(2, 3).unwrap();
        let p = ExtendedPolynomial::from_terms(
            s,
            [
                (Monomial::from_index(&[1, 2]), Rational::new(3, 7)),
                (Monomial::from_index(&[3, 0]), Rational::new(-1, 2)),
                (
                    Monomial::from_settings(&[vec![1, 2], vec![3]]),
                    Rational::new(5, 3),
                ),
                (Monomial::identity(2), Rational::new(1, 6)),
            ],
        )
        .unwrap();
        let form = IntegerForm::new(&p).unwrap();
        let mut seen = [false; 64];
        form.gray_walk(64, |bits, v| {
            assert!(!seen[bits as usize]);
            seen[bits as usize] = true;
            assert_eq!(v, form.value_at(bits));
            let a = Assignment::from_bits(s, bits).unwrap();
            assert_eq!(form.to_rational(v), p.evaluate(&a).unwrap());
        });
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn huge_denominators_fall_back_to_rationals() {
        let s = Scenario::new(1, 2).unwrap();
        let p = ExtendedPolynomial::from_terms(
            s,
            [
                (Monomial::from_index(&[1]), Rational::new(1, (1 << 41) + 1)),
                (Monomial::from_index(&[2]), Rational::new(1, 3)),
            ],
        )
        .unwrap();
        assert!(IntegerForm::new(&p).is_none());
        let mut n = 0;
        for_each_value(&p, |_, _| n += 1).unwrap();
        assert_eq!(n, 4);
    }
}
