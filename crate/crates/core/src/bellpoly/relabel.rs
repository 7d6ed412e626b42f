//! Relabelings of a scenario: permute parties, permute each party's settings,
//! and flip outcome signs. Two Bell polynomials related by a relabeling
//! describe the same inequality.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::{BellPolynomial, Monomial, Scenario};

/// Search spaces above this size are refused rather than ground through.
pub const MAX_RELABELINGS: u128 = 200_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Relabeling {
    /// Original party `j` becomes party `party_perm[j]`.
    pub party_perm: Vec<usize>,
    /// Original `X_{j,k}` becomes setting `setting_perms[j][k-1]` (1-based).
    pub setting_perms: Vec<Vec<usize>>,
    /// Original `X_{j,k}` is negated when `flips[j][k-1]`.
    pub flips: Vec<Vec<bool>>,
}

impl Relabeling {
    pub fn identity(s: Scenario) -> Self {
        Relabeling {
            party_perm: (0..s.parties()).collect(),
            setting_perms: vec![(1..=s.settings()).collect(); s.parties()],
            flips: vec![vec![false; s.settings()]; s.parties()],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.party_perm.iter().enumerate().all(|(i, &p)| i == p) && self.is_pure_party_permutation()
    }

    /// No setting permutation and no flips.
    pub fn is_pure_party_permutation(&self) -> bool {
        self.setting_perms
            .iter()
            .all(|row| row.iter().enumerate().all(|(i, &k)| k == i + 1))
            && self.flips.iter().flatten().all(|f| !f)
    }

    pub fn apply(&self, p: &BellPolynomial) -> Result<BellPolynomial> {
        let s = p.scenario();
        if self.party_perm.len() != s.parties() {
            return Err(Error::ScenarioMismatch {
                left: format!("relabeling for {} parties", self.party_perm.len()),
                right: s.to_string(),
            });
        }
        let terms = p.terms().map(|(m, c)| {
            let (idx, negate) = self.map_index(&m.index().expect("computable"));
            (
                Monomial::from_index(&idx),
                if negate { -c } else { c.clone() },
            )
        });
        BellPolynomial::from_terms(s, terms)
    }

    fn map_index(&self, idx: &[usize]) -> (Vec<usize>, bool) {
        let mut out = vec![0; idx.len()];
        let mut negate = false;
        for (j, &k) in idx.iter().enumerate() {
            if k > 0 {
                out[self.party_perm[j]] = self.setting_perms[j][k - 1];
                negate ^= self.flips[j][k - 1];
            }
        }
        (out, negate)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn search_size(s: Scenario) -> u128 {
    let fact = |n: usize| (1..=n as u128).product::<u128>();
    let m_fact = fact(s.settings());
    let setting_space = (0..s.parties()).fold(1u128, |acc, _| acc.saturating_mul(m_fact));
    fact(s.parties())
        .saturating_mul(setting_space)
        .saturating_mul(1u128 << s.observables().min(100))
}

/// Enumerate every relabeling mapping `p` onto `q`, stopping after the first
/// when `first_only`.
fn search(p: &BellPolynomial, q: &BellPolynomial, first_only: bool) -> Result<Vec<Relabeling>> {
    let s = p.scenario();
    if s != q.scenario() {
        return Err(Error::ScenarioMismatch {
            left: s.to_string(),
            right: q.scenario().to_string(),
        });
    }
    let size = search_size(s);
    if size > MAX_RELABELINGS {
        return Err(Error::TooLarge {
            bits: s.observables(),
            cap: MAX_RELABELINGS as u64,
        });
    }
    if p.len() != q.len() {
        return Ok(Vec::new());
    }

    let n = s.parties();
    let m = s.settings();
    let source: Vec<(Vec<usize>, Rational)> = p
        .terms()
        .map(|(mono, c)| (mono.index().unwrap(), c.clone()))
        .collect();
    let target: HashMap<Vec<usize>, Rational> = q
        .terms()
        .map(|(mono, c)| (mono.index().unwrap(), c.clone()))
        .collect();

    let party_perms = permutations(n);
    let setting_perms: Vec<Vec<usize>> = permutations(m)
        .into_iter()
        .map(|perm| perm.into_iter().map(|k| k + 1).collect())
        .collect();

    let mut found = Vec::new();
    for pp in &party_perms {
        // odometer over per-party setting permutations
        let mut choice = vec![0usize; n];
        loop {
            let sp: Vec<Vec<usize>> = choice.iter().map(|&c| setting_perms[c].clone()).collect();
            let base = Relabeling {
                party_perm: pp.clone(),
                setting_perms: sp,
                flips: vec![vec![false; m]; n],
            };
            // Image monomials and their flip masks; magnitudes must match first.
            let mut images = Vec::with_capacity(source.len());
            let mut ok = true;
            for (idx, c) in &source {
                let (img, _) = base.map_index(idx);
                match target.get(&img) {
                    Some(t) if t.abs() == c.abs() => {
                        let mask = Monomial::from_index(idx).global_mask(m);
                        images.push((mask, c == t));
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                for flipbits in 0u64..(1u64 << s.observables()) {
                    let fits = images.iter().all(|&(mask, same_sign)| {
                        ((mask & flipbits).count_ones() & 1 == 0) == same_sign
                    });
                    if fits {
                        let mut r = base.clone();
                        for j in 0..n {
                            for k in 1..=m {
                                r.flips[j][k - 1] = flipbits >> s.bit(j, k) & 1 == 1;
                            }
                        }
                        found.push(r);
                        if first_only {
                            return Ok(found);
                        }
                    }
                }
            }
            // advance odometer
            let mut pos = 0;
            loop {
                if pos == n {
                    break;
                }
                choice[pos] += 1;
                if choice[pos] < setting_perms.len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
    }
    Ok(found)
}

/// A relabeling taking `p` to `q`, if one exists.
pub fn find_relabeling(p: &BellPolynomial, q: &BellPolynomial) -> Result<Option<Relabeling>> {
    Ok(search(p, q, true)?.into_iter().next())
}

/// Every relabeling that leaves `p` invariant.
pub fn automorphisms(p: &BellPolynomial) -> Result<Vec<Relabeling>> {
    search(p, p, false)
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    /// Order of the full invariance group (parties, settings, outcome flips).
    pub order: usize,
    /// Party permutations realised by at least one automorphism.
    pub party_permutations: Vec<Vec<usize>>,
    /// Party permutations that are automorphisms on their own.
    pub pure_party_permutations: Vec<Vec<usize>>,
}

pub fn symmetry_report(p: &BellPolynomial) -> Result<SymmetryReport> {
    let all = automorphisms(p)?;
    let mut party_permutations: Vec<Vec<usize>> =
        all.iter().map(|r| r.party_perm.clone()).collect();
    party_permutations.sort();
    party_permutations.dedup();
    let mut pure_party_permutations: Vec<Vec<usize>> = all
        .iter()
        .filter(|r| r.is_pure_party_permutation())
        .map(|r| r.party_perm.clone())
        .collect();
    pure_party_permutations.sort();
    Ok(SymmetryReport {
        order: all.len(),
        party_permutations,
        pure_party_permutations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chsh() -> BellPolynomial {
        let h = Rational::new(1, 2);
        BellPolynomial::from_index_terms(
            Scenario::new(2, 2).unwrap(),
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
    fn identity_is_an_automorphism() {
        let p = chsh();
        let id = Relabeling::identity(p.scenario());
        assert!(id.is_identity());
        assert_eq!(id.apply(&p).unwrap(), p);
    }

    #[test]
    fn chsh_symmetry_group_has_order_16() {
        // 128 relabelings of (2,2) act on the 8 CHSH variants as one orbit.
        let report = symmetry_report(&chsh()).unwrap();
        assert_eq!(report.order, 16);
        assert_eq!(report.pure_party_permutations, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn finds_a_relabeling_between_chsh_variants() {
        let p = chsh();
        let h = Rational::new(1, 2);
        // (Q11 - Q12 - Q21 - Q22)/2
        let q = BellPolynomial::from_index_terms(
            p.scenario(),
            [
                ([1usize, 1], h.clone()),
                ([1, 2], -h.clone()),
                ([2, 1], -h.clone()),
                ([2, 2], -h),
            ],
        )
        .unwrap();
        let r = find_relabeling(&p, &q).unwrap().expect("equivalent");
        assert_eq!(r.apply(&p).unwrap(), q);
        let scaled = q.scale(&Rational::from(2));
        assert!(find_relabeling(&p, &scaled).unwrap().is_none());
    }
}
