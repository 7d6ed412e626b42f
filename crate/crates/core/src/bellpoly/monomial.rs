use std::fmt;

use super::Scenario;

/// A reduced product of observables: for each party, the set of settings that
/// appear with exponent one. Bit `k-1` of `masks[j]` marks `X_{j,k}`.
///
/// Because `X^2 = 1`, multiplication is symmetric difference of the sets, and
/// the derived ordering agrees with lexicographic order on multi-indices for
/// computable monomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    masks: Vec<u32>,
}

impl Monomial {
    pub fn identity(parties: usize) -> Self {
        Monomial {
            masks: vec![0; parties],
        }
    }

    /// Computable monomial from a multi-index with entries in `0..=M`
    /// (0 is the identity factor).
    pub fn from_index(idx: &[usize]) -> Self {
        Monomial {
            masks: idx
                .iter()
                .map(|&k| if k == 0 { 0 } else { 1u32 << (k - 1) })
                .collect(),
        }
    }

    /// General monomial from per-party setting lists. Repeated settings cancel.
    pub fn from_settings(sets: &[Vec<usize>]) -> Self {
        Monomial {
            masks: sets
                .iter()
                .map(|ks| {
                    ks.iter()
                        .filter(|&&k| k > 0)
                        .fold(0u32, |m, &k| m ^ (1u32 << (k - 1)))
                })
                .collect(),
        }
    }

    pub fn parties(&self) -> usize {
        self.masks.len()
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    pub fn is_identity(&self) -> bool {
        self.masks.iter().all(|&m| m == 0)
    }

    /// True iff each party contributes at most one setting.
    pub fn is_computable(&self) -> bool {
        self.masks.iter().all(|m| m.count_ones() <= 1)
    }

    /// Multi-index of a computable monomial.
    pub fn index(&self) -> Option<Vec<usize>> {
        self.masks
            .iter()
            .map(|&m| match m.count_ones() {
                0 => Some(0),
                1 => Some(m.trailing_zeros() as usize + 1),
                _ => None,
            })
            .collect()
    }

    /// Settings used by one party, ascending.
    pub fn settings_of(&self, party: usize) -> Vec<usize> {
        let mut m = self.masks[party];
        let mut out = Vec::new();
        while m != 0 {
            out.push(m.trailing_zeros() as usize + 1);
            m &= m - 1;
        }
        out
    }

    pub fn contains(&self, party: usize, setting: usize) -> bool {
        setting > 0 && self.masks[party] & (1 << (setting - 1)) != 0
    }

    pub fn degree(&self) -> u32 {
        self.masks.iter().map(|m| m.count_ones()).sum()
    }

    /// Product with exponents reduced mod 2.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.parties(), other.parties());
        Monomial {
            masks: self
                .masks
                .iter()
                .zip(&other.masks)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    pub fn fits(&self, scenario: &Scenario) -> bool {
        let limit = if scenario.settings() >= 32 {
            u32::MAX
        } else {
            (1u32 << scenario.settings()) - 1
        };
        self.parties() == scenario.parties() && self.masks.iter().all(|&m| m & !limit == 0)
    }

    /// The monomial's observables packed into an assignment-shaped word.
    pub fn global_mask(&self, settings: usize) -> u64 {
        self.masks
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &m)| acc | (m as u64) << (j * settings))
    }

    /// Correlator label in `Q_{k1 k2 ..}` notation; settings
    /// above 9 are comma-separated.
    pub fn correlator_label(&self) -> String {
        match self.index() {
            Some(idx) if idx.iter().all(|&k| k < 10) => {
                let digits: String = idx.iter().map(|k| char::from(b'0' + *k as u8)).collect();
                format!("Q{digits}")
            }
            Some(idx) => {
                let parts: Vec<String> = idx.iter().map(|k| k.to_string()).collect();
                format!("Q({})", parts.join(","))
            }
            None => self.to_string(),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let mut first = true;
        for j in 0..self.parties() {
            for k in self.settings_of(j) {
                if !first {
                    write!(f, "·")?;
                }
                write!(f, "X[{},{}]", j + 1, k)?;
                first = false;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn computability() {
        assert!(Monomial::from_index(&[1, 2]).is_computable());
        assert!(!Monomial::from_settings(&[vec![1, 2], vec![]]).is_computable());
        assert!(Monomial::identity(3).is_computable());
    }

    #[test]
    fn idempotent_product() {
        let a = Monomial::from_index(&[1, 1]);
        let b = Monomial::from_index(&[1, 2]);
        let ab = a.mul(&b);
        assert_eq!(ab, Monomial::from_settings(&[vec![], vec![1, 2]]));
        assert!(!ab.is_computable());
        assert!(a.mul(&a).is_identity());
    }

    #[test]
    fn labels() {
        assert_eq!(Monomial::from_index(&[1, 0, 2]).correlator_label(), "Q102");
        assert_eq!(
            Monomial::from_settings(&[vec![1, 2], vec![1]]).to_string(),
            "X[1,1]·X[1,2]·X[2,1]"
        );
        assert_eq!(Monomial::from_index(&[12, 0]).correlator_label(), "Q(12,0)");
    }

    #[test]
    fn global_mask_layout() {
        let m = Monomial::from_index(&[2, 1]);
        assert_eq!(m.global_mask(2), 0b0110);
    }
}
