use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Monomial;

/// Hard representation limit on settings per party (one `u32` mask per party).
pub const MAX_SETTINGS: usize = 32;
/// Hard representation limit on `parties * settings` (one `u64` per assignment).
pub const MAX_OBSERVABLES: usize = 64;
/// Default cap on the number of deterministic assignments we are willing to
/// enumerate, i.e. `parties * settings <= 24`.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 24;

/// Environment variable overriding [`DEFAULT_ENUM_CAP`].
pub const ENUM_CAP_ENV: &str = "BELLFORGE_MAX_ENUM";

/// `N` parties each choosing among `M` dichotomic observables.
///
/// Parties are indexed from 0. Settings are indexed `1..=M`; setting 0 stands
/// for the identity observable, so a multi-index `[k_1, .., k_N]` with entries
/// in `0..=M` names one correlator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawScenario")]
pub struct Scenario {
    parties: usize,
    settings: usize,
}

#[derive(Deserialize)]
struct RawScenario {
    parties: usize,
    settings: usize,
}

impl TryFrom<RawScenario> for Scenario {
    type Error = Error;
    fn try_from(raw: RawScenario) -> Result<Self> {
        Scenario::new(raw.parties, raw.settings)
    }
}

impl Scenario {
    pub fn new(parties: usize, settings: usize) -> Result<Self> {
        if parties == 0 || settings == 0 {
            return Err(Error::InvalidScenario(format!(
                "need at least one party and one setting, got N={parties}, M={settings}"
            )));
        }
        if settings > MAX_SETTINGS || parties * settings > MAX_OBSERVABLES {
            return Err(Error::InvalidScenario(format!(
                "N={parties}, M={settings} exceeds the representation limit \
                 (M <= {MAX_SETTINGS}, N*M <= {MAX_OBSERVABLES})"
            )));
        }
        Ok(Scenario { parties, settings })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn settings(&self) -> usize {
        self.settings
    }

    /// Number of dichotomic observables, `N * M`.
    pub fn observables(&self) -> usize {
        self.parties * self.settings
    }

    /// Number of computable monomials including the identity, `(M+1)^N`.
    pub fn num_correlators(&self) -> usize {
        (self.settings + 1).pow(self.parties as u32)
    }

    /// Bit position of observable `X_{party, setting}` in an assignment word.
    pub fn bit(&self, party: usize, setting: usize) -> usize {
        debug_assert!(party < self.parties && (1..=self.settings).contains(&setting));
        party * self.settings + setting - 1
    }

    pub fn check_observable(&self, party: usize, setting: usize) -> Result<()> {
        if party >= self.parties || setting == 0 || setting > self.settings {
            return Err(Error::IndexOutOfRange(format!(
                "X[{},{}] in N={}, M={}",
                party + 1,
                setting,
                self.parties,
                self.settings
            )));
        }
        Ok(())
    }

    /// Every computable monomial in canonical (lexicographic multi-index)
    /// order, starting with the identity.
    pub fn correlators(&self) -> impl Iterator<Item = Monomial> + '_ {
        let n = self.parties;
        let base = self.settings + 1;
        (0..self.num_correlators()).map(move |mut code| {
            let mut idx = vec![0usize; n];
            for slot in idx.iter_mut().rev() {
                *slot = code % base;
                code /= base;
            }
            Monomial::from_index(&idx)
        })
    }

    /// Number of deterministic assignments, after checking it against the
    /// enumeration cap.
    pub fn check_enumerable(&self) -> Result<u64> {
        let cap = enumeration_cap();
        let bits = self.observables();
        if bits >= 63 || (1u64 << bits) > cap {
            return Err(Error::TooLarge { bits, cap });
        }
        Ok(1u64 << bits)
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(N={}, M={})", self.parties, self.settings)
    }
}

/// The current enumeration cap, honouring `BELLFORGE_MAX_ENUM`.
pub fn enumeration_cap() -> u64 {
    std::env::var(ENUM_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .unwrap_or(DEFAULT_ENUM_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_and_oversized() {
        assert!(Scenario::new(0, 2).is_err());
        assert!(Scenario::new(2, 0).is_err());
        assert!(Scenario::new(2, 33).is_err());
        assert!(Scenario::new(9, 8).is_err());
        assert!(Scenario::new(8, 8).is_ok());
    }

    #[test]
    fn enumeration_cap_applies() {
        assert_eq!(Scenario::new(2, 2).unwrap().check_enumerable().unwrap(), 16);
        assert!(matches!(
            Scenario::new(5, 5).unwrap().check_enumerable(),
            Err(Error::TooLarge { bits: 25, .. })
        ));
    }

    #[test]
    fn correlators_are_lexicographic() {
        let s = Scenario::new(2, 2).unwrap();
        let all: Vec<_> = s.correlators().map(|m| m.index().unwrap()).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[8], vec![2, 2]);
        let mut sorted: Vec<_> = s.correlators().collect();
        sorted.sort();
        assert_eq!(sorted, s.correlators().collect::<Vec<_>>());
    }

    #[test]
    fn deserialization_validates() {
        let bad: std::result::Result<Scenario, _> =
            serde_json::from_str(r#"{"parties":0,"settings":2}"#);
        assert!(bad.is_err());
        let good: Scenario = serde_json::from_str(r#"{"parties":3,"settings":3}"#).unwrap();
        assert_eq!(good.num_correlators(), 64);
    }
}
