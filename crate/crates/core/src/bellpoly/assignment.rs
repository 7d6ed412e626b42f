use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Monomial, Scenario};

/// One deterministic local strategy: a ±1 value for every `X_{j,k}`.
///
/// Stored as a word whose bit `j*M + k - 1` is set when `X_{j,k} = -1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    scenario: Scenario,
    negative: u64,
}

impl Assignment {
    pub fn all_plus(scenario: Scenario) -> Self {
        Assignment {
            scenario,
            negative: 0,
        }
    }

    pub fn from_bits(scenario: Scenario, negative: u64) -> Result<Self> {
        let n = scenario.observables();
        if n < 64 && negative >> n != 0 {
            return Err(Error::IndexOutOfRange(format!(
                "assignment word {negative:#x} has bits beyond {n} observables"
            )));
        }
        Ok(Assignment { scenario, negative })
    }

    /// From per-party value lists, `values[j][k-1] = X_{j,k}`.
    pub fn from_values(scenario: Scenario, values: &[Vec<i8>]) -> Result<Self> {
        if values.len() != scenario.parties()
            || values.iter().any(|v| v.len() != scenario.settings())
        {
            return Err(Error::InvalidArgument(format!(
                "assignment shape does not match {scenario}"
            )));
        }
        let mut negative = 0u64;
        for (j, row) in values.iter().enumerate() {
            for (k0, &v) in row.iter().enumerate() {
                match v {
                    1 => {}
                    -1 => negative |= 1 << scenario.bit(j, k0 + 1),
                    _ => {
                        return Err(Error::InvalidArgument(format!(
                            "X[{},{}] = {v} is not ±1",
                            j + 1,
                            k0 + 1
                        )))
                    }
                }
            }
        }
        Ok(Assignment { scenario, negative })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn bits(&self) -> u64 {
        self.negative
    }

    /// Value of `X_{party,setting}`; setting 0 is the identity and always +1.
    pub fn value(&self, party: usize, setting: usize) -> i8 {
        if setting == 0 {
            return 1;
        }
        if self.negative >> self.scenario.bit(party, setting) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn with_value(mut self, party: usize, setting: usize, value: i8) -> Self {
        let bit = 1u64 << self.scenario.bit(party, setting);
        if value < 0 {
            self.negative |= bit;
        } else {
            self.negative &= !bit;
        }
        self
    }

    /// ±1 value of a monomial at this assignment.
    pub fn sign_of(&self, m: &Monomial) -> i8 {
        sign_of_mask(m.global_mask(self.scenario.settings()), self.negative)
    }

    /// All `2^(N*M)` assignments in binary order.
    pub fn all(scenario: Scenario) -> Result<impl Iterator<Item = Assignment>> {
        let count = scenario.check_enumerable()?;
        Ok((0..count).map(move |negative| Assignment { scenario, negative }))
    }
}

#[inline]
pub(crate) fn sign_of_mask(mask: u64, negative: u64) -> i8 {
    if (mask & negative).count_ones() & 1 == 1 {
        -1
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_round_trip() {
        let s = Scenario::new(2, 2).unwrap();
        let a = Assignment::from_values(s, &[vec![1, -1], vec![1, -1]]).unwrap();
        assert_eq!(a.value(0, 1), 1);
        assert_eq!(a.value(0, 2), -1);
        assert_eq!(a.value(1, 2), -1);
        assert_eq!(a.value(1, 0), 1);
        assert_eq!(a.sign_of(&Monomial::from_index(&[2, 2])), 1);
        assert_eq!(a.sign_of(&Monomial::from_index(&[1, 2])), -1);
    }

    #[test]
    fn rejects_bad_input() {
        let s = Scenario::new(2, 2).unwrap();
        assert!(Assignment::from_values(s, &[vec![1, 0], vec![1, 1]]).is_err());
        assert!(Assignment::from_values(s, &[vec![1, 1]]).is_err());
        assert!(Assignment::from_bits(s, 1 << 4).is_err());
    }

    #[test]
    fn enumerates_every_strategy() {
        let s = Scenario::new(2, 2).unwrap();
        assert_eq!(Assignment::all(s).unwrap().count(), 16);
    }
}
