//! The canonical inequality file:
//!
//! ```json
//! {"scenario":{"parties":2,"settings":2},"terms":[{"idx":[1,1],"num":1,"den":2}]}
//! ```
//!
//! `idx` entries range over `0..=M` with 0 the identity. Writers emit terms in
//! canonical order, so reading and re-writing a canonical file is
//! byte-identical. Non-computable monomials (only in extended polynomials)
//! use `"sets":[[k,..],..]` in place of `idx`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::{BellPolynomial, ExtendedPolynomial, Monomial, Scenario};

#[derive(Debug, Serialize, Deserialize)]
struct FileTerm {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    idx: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sets: Option<Vec<Vec<usize>>>,
    num: i64,
    den: i64,
}

#[derive(Debug, Serialize, Deserialize)]
struct InequalityFile {
    scenario: Scenario,
    terms: Vec<FileTerm>,
}

/// `{"num":p,"den":q}` wire form of a rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalDto {
    pub num: i64,
    pub den: i64,
}

impl TryFrom<&Rational> for RationalDto {
    type Error = Error;
    fn try_from(r: &Rational) -> Result<Self> {
        let (num, den) = r
            .to_i64_pair()
            .ok_or_else(|| Error::Overflow(format!("{r} does not fit the 64-bit file format")))?;
        Ok(RationalDto { num, den })
    }
}

impl TryFrom<RationalDto> for Rational {
    type Error = Error;
    fn try_from(d: RationalDto) -> Result<Self> {
        Rational::try_new(d.num, d.den)
    }
}

fn term_to_file(m: &Monomial, c: &Rational) -> Result<FileTerm> {
    let RationalDto { num, den } = RationalDto::try_from(c)?;
    Ok(match m.index() {
        Some(idx) => FileTerm {
            idx: Some(idx),
            sets: None,
            num,
            den,
        },
        None => FileTerm {
            idx: None,
            sets: Some((0..m.parties()).map(|j| m.settings_of(j)).collect()),
            num,
            den,
        },
    })
}

pub fn extended_to_json(p: &ExtendedPolynomial) -> Result<String> {
    let file = InequalityFile {
        scenario: p.scenario(),
        terms: p
            .terms()
            .map(|(m, c)| term_to_file(m, c))
            .collect::<Result<_>>()?,
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn to_json(p: &BellPolynomial) -> Result<String> {
    extended_to_json(p.extended())
}

pub fn extended_from_json(text: &str) -> Result<ExtendedPolynomial> {
    let file: InequalityFile = serde_json::from_str(text)?;
    let s = file.scenario;
    let mut terms = Vec::with_capacity(file.terms.len());
    for t in file.terms {
        let m = match (t.idx, t.sets) {
            (Some(idx), None) => {
                if idx.len() != s.parties() || idx.iter().any(|&k| k > s.settings()) {
                    return Err(Error::Parse(format!("multi-index {idx:?} invalid for {s}")));
                }
                Monomial::from_index(&idx)
            }
            (None, Some(sets)) => {
                if sets.len() != s.parties()
                    || sets.iter().flatten().any(|&k| k == 0 || k > s.settings())
                {
                    return Err(Error::Parse(format!(
                        "setting sets {sets:?} invalid for {s}"
                    )));
                }
                Monomial::from_settings(&sets)
            }
            _ => {
                return Err(Error::Parse(
                    "each term needs exactly one of idx/sets".into(),
                ))
            }
        };
        let c = Rational::try_new(t.num, t.den)
            .map_err(|_| Error::Parse(format!("zero denominator in term {m}")))?;
        terms.push((m, c));
    }
    ExtendedPolynomial::from_terms(s, terms)
}

pub fn from_json(text: &str) -> Result<BellPolynomial> {
    extended_from_json(text)?.into_bell()
}
