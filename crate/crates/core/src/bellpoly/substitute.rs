use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::{Assignment, BellPolynomial, Monomial, Scenario};

/// Where each original `(party, setting)` ended up after a substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reindex {
    /// `parties[j]` is the new index of original party `j`, if it survived.
    pub parties: Vec<Option<usize>>,
    /// `settings[j][k-1]` is the new setting of original `X_{j,k}`, if unbound.
    pub settings: Vec<Vec<Option<usize>>>,
}

#[derive(Clone, Debug)]
pub struct Substitution {
    pub polynomial: BellPolynomial,
    pub reindex: Reindex,
    pub bindings: BTreeMap<(usize, usize), i8>,
    original: Scenario,
}

impl Substitution {
    /// Merge an assignment of the reduced scenario with the bound values into
    /// an assignment of the original scenario.
    pub fn lift(&self, reduced: &Assignment) -> Result<Assignment> {
        if reduced.scenario() != self.polynomial.scenario() {
            return Err(Error::ScenarioMismatch {
                left: reduced.scenario().to_string(),
                right: self.polynomial.scenario().to_string(),
            });
        }
        let mut a = Assignment::all_plus(self.original);
        for j in 0..self.original.parties() {
            for k in 1..=self.original.settings() {
                let v = match (self.bindings.get(&(j, k)), self.reindex.parties[j]) {
                    (Some(&v), _) => v,
                    (None, Some(nj)) => {
                        let nk = self.reindex.settings[j][k - 1].expect("unbound setting kept");
                        reduced.value(nj, nk)
                    }
                    (None, None) => unreachable!("dropped party with unbound setting"),
                };
                a = a.with_value(j, k, v);
            }
        }
        Ok(a)
    }
}

/// Fix some observables to ±1 and re-express the polynomial over the smaller
/// scenario. Parties whose settings are all bound drop out; the remaining
/// settings of each party are renumbered `1..` in their original order.
pub fn substitute(
    p: &BellPolynomial,
    bindings: &BTreeMap<(usize, usize), i8>,
) -> Result<Substitution> {
    let s = p.scenario();
    for (&(j, k), &v) in bindings {
        s.check_observable(j, k)?;
        if v != 1 && v != -1 {
            return Err(Error::InvalidArgument(format!(
                "X[{},{}] bound to {v}, expected ±1",
                j + 1,
                k
            )));
        }
    }

    let mut parties = Vec::with_capacity(s.parties());
    let mut settings = Vec::with_capacity(s.parties());
    let mut next_party = 0;
    let mut new_m = 0;
    for j in 0..s.parties() {
        let mut next = 0;
        let row: Vec<Option<usize>> = (1..=s.settings())
            .map(|k| {
                if bindings.contains_key(&(j, k)) {
                    None
                } else {
                    next += 1;
                    Some(next)
                }
            })
            .collect();
        if next > 0 {
            parties.push(Some(next_party));
            next_party += 1;
            new_m = new_m.max(next);
        } else {
            parties.push(None);
        }
        settings.push(row);
    }
    if next_party == 0 {
        return Err(Error::InvalidArgument(
            "substitution binds every observable; use evaluate instead".into(),
        ));
    }
    let reduced = Scenario::new(next_party, new_m)?;

    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        let idx = m.index().expect("Bell polynomial is computable");
        let mut sign = 1i8;
        let mut new_idx = vec![0usize; next_party];
        for (j, &k) in idx.iter().enumerate() {
            if k == 0 {
                continue;
            }
            if let Some(&v) = bindings.get(&(j, k)) {
                sign *= v;
            } else {
                let nj = parties[j].expect("party with an unbound setting survives");
                new_idx[nj] = settings[j][k - 1].expect("unbound");
            }
        }
        let c = if sign < 0 { -c } else { c.clone() };
        terms.push((Monomial::from_index(&new_idx), c));
    }

    Ok(Substitution {
        polynomial: BellPolynomial::from_terms(reduced, terms)?,
        reindex: Reindex { parties, settings },
        bindings: bindings.clone(),
        original: s,
    })
}

/// Drop settings that never occur and renumber the rest, reporting the map
/// `settings[j][k-1]` from old to new setting.
pub fn compact_settings(p: &BellPolynomial) -> Result<(BellPolynomial, Vec<Vec<Option<usize>>>)> {
    let s = p.scenario();
    let mut used = vec![vec![false; s.settings()]; s.parties()];
    for (m, _) in p.terms() {
        for (j, k) in m.index().expect("computable").into_iter().enumerate() {
            if k > 0 {
                used[j][k - 1] = true;
            }
        }
    }
    let map: Vec<Vec<Option<usize>>> = used
        .iter()
        .map(|row| {
            let mut next = 0;
            row.iter()
                .map(|&u| {
                    u.then(|| {
                        next += 1;
                        next
                    })
                })
                .collect()
        })
        .collect();
    let new_m = map
        .iter()
        .map(|row| row.iter().flatten().count())
        .max()
        .unwrap_or(0)
        .max(1);
    let reduced = Scenario::new(s.parties(), new_m)?;
    let terms = p.terms().map(|(m, c)| {
        let idx: Vec<usize> = m
            .index()
            .expect("computable")
            .into_iter()
            .enumerate()
            .map(|(j, k)| if k == 0 { 0 } else { map[j][k - 1].unwrap() })
            .collect();
        (Monomial::from_index(&idx), c.clone())
    });
    Ok((BellPolynomial::from_terms(reduced, terms)?, map))
}

/// Convenience: bindings from `(party, setting, value)` triples.
pub fn bindings(items: &[(usize, usize, i8)]) -> BTreeMap<(usize, usize), i8> {
    items.iter().map(|&(j, k, v)| ((j, k), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

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
    fn empty_bindings_leave_polynomial_unchanged() {
        let sub = substitute(&chsh(), &BTreeMap::new()).unwrap();
        assert_eq!(sub.polynomial, chsh());
        assert_eq!(sub.reindex.parties, vec![Some(0), Some(1)]);
    }

    #[test]
    fn binding_a_whole_party_drops_it() {
        let sub = substitute(&chsh(), &bindings(&[(1, 1, 1), (1, 2, -1)])).unwrap();
        // A1 + A2 ... : (A1 - A1 + A2 + A2)/2 = A2
        let expected = BellPolynomial::from_index_terms(
            Scenario::new(1, 2).unwrap(),
            [([2usize], Rational::one())],
        )
        .unwrap();
        assert_eq!(sub.polynomial, expected);
        assert_eq!(sub.reindex.parties, vec![Some(0), None]);
    }

    #[test]
    fn partial_binding_renumbers_settings() {
        let sub = substitute(&chsh(), &bindings(&[(0, 1, -1)])).unwrap();
        assert_eq!(sub.reindex.settings[0], vec![None, Some(1)]);
        assert_eq!(sub.polynomial.scenario(), Scenario::new(2, 2).unwrap());
    }

    #[test]
    fn bad_bindings() {
        assert!(substitute(&chsh(), &bindings(&[(2, 1, 1)])).is_err());
        assert!(substitute(&chsh(), &bindings(&[(0, 3, 1)])).is_err());
        assert!(substitute(&chsh(), &bindings(&[(0, 1, 0)])).is_err());
        let all = bindings(&[(0, 1, 1), (0, 2, 1), (1, 1, 1), (1, 2, 1)]);
        assert!(substitute(&chsh(), &all).is_err());
    }

    #[test]
    fn compaction_reports_map() {
        let s = Scenario::new(2, 3).unwrap();
        let p = BellPolynomial::from_index_terms(s, [([3usize, 1], Rational::one())]).unwrap();
        let (q, map) = compact_settings(&p).unwrap();
        assert_eq!(q.scenario(), Scenario::new(2, 1).unwrap());
        assert_eq!(map[0], vec![None, None, Some(1)]);
        assert_eq!(q.coefficient_at(&[1, 1]), Rational::one());
    }
}
