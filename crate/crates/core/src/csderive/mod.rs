//! Bell inequalities from the Cauchy–Schwarz inequality
//! `⟨fg⟩² ≤ ⟨f²⟩⟨g²⟩`.
//!
//! `f` and `g` are linear combinations of computable monomials with symbolic
//! coefficients. Expanding `fg`, `f²` and `g²` produces monomials with two
//! settings of one party, which quantum mechanics cannot evaluate; requiring
//! their coefficients to vanish gives a system of quadratic equations in the
//! symbols. Each solution yields a Bell inequality.

mod file;
mod implied;
mod solve;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bellpoly::{ExtendedPolynomial, Monomial, Scenario};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub use file::ansatz_from_json;
pub use implied::{
    cauchy_schwarz_property, implied_inequality, screen_triviality, theorem_bound, LinearBound,
    QuadraticConstraint, TheoremBound,
};
pub use solve::{solve_numeric, NumericSolution, SolveOptions, SNAP_MAX_DEN};

/// Largest `(M+1)^N` accepted for symbolic expansion.
pub const MAX_CORRELATORS: usize = 256;

/// A coefficient symbol shared by one or more monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolClass {
    pub name: String,
    pub members: Vec<Monomial>,
}

impl SymbolClass {
    pub fn new(name: impl Into<String>, members: Vec<Monomial>) -> Self {
        SymbolClass {
            name: name.into(),
            members,
        }
    }

    fn is_constant(&self) -> bool {
        self.members.iter().all(|m| m.is_identity())
    }
}

/// Coefficient ansatz `f = Σ C_χ χ`, `g = Σ D_χ χ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ansatz {
    scenario: Scenario,
    f: Vec<SymbolClass>,
    g: Vec<SymbolClass>,
}

fn symbol_suffix(m: &Monomial) -> String {
    m.correlator_label()[1..].to_string()
}

impl Ansatz {
    /// One independent symbol per computable monomial on each side, named
    /// `C<idx>` and `D<idx>`.
    pub fn full(scenario: Scenario) -> Result<Self> {
        check_size(scenario)?;
        let side = |prefix: &str| -> Vec<SymbolClass> {
            scenario
                .correlators()
                .map(|m| SymbolClass::new(format!("{prefix}{}", symbol_suffix(&m)), vec![m]))
                .collect()
        };
        Ok(Ansatz {
            scenario,
            f: side("C"),
            g: side("D"),
        })
    }

    /// Ansatz with symbols tied across symmetry classes. Monomials not named
    /// by any class have coefficient zero.
    pub fn with_classes(
        scenario: Scenario,
        f: Vec<SymbolClass>,
        g: Vec<SymbolClass>,
    ) -> Result<Self> {
        check_size(scenario)?;
        let mut names = std::collections::BTreeSet::new();
        for side in [&f, &g] {
            let mut seen = std::collections::BTreeSet::new();
            for class in side {
                if !names.insert(class.name.as_str()) {
                    return Err(Error::InvalidArgument(format!(
                        "symbol {} declared twice",
                        class.name
                    )));
                }
                if class.members.is_empty() {
                    return Err(Error::InvalidArgument(format!(
                        "symbol {} has no monomials",
                        class.name
                    )));
                }
                for m in &class.members {
                    if !m.fits(&scenario) || !m.is_computable() {
                        return Err(Error::InvalidArgument(format!(
                            "{m} is not a computable monomial of {scenario}"
                        )));
                    }
                    if !seen.insert(m.clone()) {
                        return Err(Error::InvalidArgument(format!(
                            "{m} belongs to two symbol classes"
                        )));
                    }
                }
            }
        }
        Ok(Ansatz { scenario, f, g })
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn f_symbols(&self) -> &[SymbolClass] {
        &self.f
    }

    pub fn g_symbols(&self) -> &[SymbolClass] {
        &self.g
    }

    pub fn symbol_names(&self) -> Vec<String> {
        self.f
            .iter()
            .chain(&self.g)
            .map(|c| c.name.clone())
            .collect()
    }

    fn side_polynomial(
        &self,
        side: &[SymbolClass],
        values: &BTreeMap<String, Rational>,
    ) -> Result<ExtendedPolynomial> {
        let mut terms = Vec::new();
        for class in side {
            let c = values
                .get(&class.name)
                .ok_or_else(|| Error::MissingSymbol(class.name.clone()))?;
            terms.extend(class.members.iter().map(|m| (m.clone(), c.clone())));
        }
        ExtendedPolynomial::from_terms(self.scenario, terms)
    }

    /// `f` with the given symbol values substituted.
    pub fn f_polynomial(&self, values: &BTreeMap<String, Rational>) -> Result<ExtendedPolynomial> {
        self.side_polynomial(&self.f, values)
    }

    pub fn g_polynomial(&self, values: &BTreeMap<String, Rational>) -> Result<ExtendedPolynomial> {
        self.side_polynomial(&self.g, values)
    }
}

fn check_size(s: Scenario) -> Result<()> {
    if s.num_correlators() > MAX_CORRELATORS {
        return Err(Error::InvalidArgument(format!(
            "{s} has {} correlators; symbolic expansion is limited to {MAX_CORRELATORS}",
            s.num_correlators()
        )));
    }
    Ok(())
}

/// Which product an equation comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Product {
    Fg,
    Ff,
    Gg,
}

impl fmt::Display for Product {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Product::Fg => "f*g",
            Product::Ff => "f^2",
            Product::Gg => "g^2",
        })
    }
}

/// `Σ c_ab x_a x_b = 0`: the coefficient of one non-computable monomial in
/// one product. Keys satisfy `a ≤ b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub product: Product,
    pub monomial: Monomial,
    pub form: BTreeMap<(usize, usize), Rational>,
}

impl Equation {
    pub fn label(&self) -> String {
        format!("[{}] {}", self.product, self.monomial)
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        self.form
            .iter()
            .map(|((a, b), c)| c * &(&x[*a] * &x[*b]))
            .sum()
    }

    pub fn format(&self, names: &[String]) -> String {
        let mut out = String::new();
        for (i, ((a, b), c)) in self.form.iter().enumerate() {
            out.push_str(match (i, c.is_negative()) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            });
            let mag = c.abs();
            if mag != Rational::one() {
                out.push_str(&format!("{mag}·"));
            }
            if a == b {
                out.push_str(&format!("{}²", names[*a]));
            } else {
                out.push_str(&format!("{}·{}", names[*a], names[*b]));
            }
        }
        out.push_str(" = 0");
        out
    }
}

/// The equations a valid `(f, g)` must satisfy. Symbols `0..f_count` belong to
/// `f`, the rest to `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub scenario: Scenario,
    pub symbols: Vec<String>,
    pub f_count: usize,
    /// Symbols standing only for the identity; excluded from normalisation.
    pub constant: Vec<bool>,
    pub equations: Vec<Equation>,
}

impl ConstraintSystem {
    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    fn values_vector(&self, values: &BTreeMap<String, Rational>) -> Result<Vec<Rational>> {
        self.symbols
            .iter()
            .map(|s| {
                values
                    .get(s)
                    .cloned()
                    .ok_or_else(|| Error::MissingSymbol(s.clone()))
            })
            .collect()
    }
}

impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.equations {
            writeln!(f, "{:<28} {}", e.label(), e.format(&self.symbols))?;
        }
        Ok(())
    }
}

/// Expand `fg`, `f²`, `g²` symbolically and collect one equation per
/// non-computable monomial per product.
pub fn build_constraints(a: &Ansatz) -> Result<ConstraintSystem> {
    check_size(a.scenario)?;
    let f_count = a.f.len();
    let classes: Vec<&SymbolClass> = a.f.iter().chain(&a.g).collect();
    let mut acc: BTreeMap<(Product, Monomial), BTreeMap<(usize, usize), i64>> = BTreeMap::new();
    let mut pair = |product: Product, s: usize, t: usize| {
        let key = (s.min(t), s.max(t));
        for x in &classes[s].members {
            for y in &classes[t].members {
                let m = x.mul(y);
                if !m.is_computable() {
                    *acc.entry((product, m)).or_default().entry(key).or_insert(0) += 1;
                }
            }
        }
    };
    let g_range = f_count..classes.len();
    for s in 0..f_count {
        for t in g_range.clone() {
            pair(Product::Fg, s, t);
        }
        for t in 0..f_count {
            pair(Product::Ff, s, t);
        }
    }
    for s in g_range.clone() {
        for t in g_range.clone() {
            pair(Product::Gg, s, t);
        }
    }
    let equations = acc
        .into_iter()
        .filter_map(|((product, monomial), form)| {
            let form: BTreeMap<_, _> = form
                .into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|(k, c)| (k, Rational::from(c)))
                .collect();
            (!form.is_empty()).then_some(Equation {
                product,
                monomial,
                form,
            })
        })
        .collect();
    Ok(ConstraintSystem {
        scenario: a.scenario,
        symbols: a.symbol_names(),
        f_count,
        constant: classes.iter().map(|c| c.is_constant()).collect(),
        equations,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Residual {
    pub equation: String,
    pub value: Rational,
}

/// Exact residual of every equation at a symbol assignment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualReport {
    pub residuals: Vec<Residual>,
    pub pass: bool,
}

impl ResidualReport {
    pub fn nonzero(&self) -> impl Iterator<Item = &Residual> {
        self.residuals.iter().filter(|r| !r.value.is_zero())
    }
}

pub fn verify_solution(
    cs: &ConstraintSystem,
    values: &BTreeMap<String, Rational>,
) -> Result<ResidualReport> {
    let x = cs.values_vector(values)?;
    let residuals: Vec<Residual> = cs
        .equations
        .iter()
        .map(|e| Residual {
            equation: e.label(),
            value: e.evaluate(&x),
        })
        .collect();
    let pass = residuals.iter().all(|r| r.value.is_zero());
    Ok(ResidualReport { residuals, pass })
}

/// Parse `[(name, value)]` pairs into a symbol map.
pub fn symbol_values<S: Into<String>>(
    pairs: impl IntoIterator<Item = (S, Rational)>,
) -> BTreeMap<String, Rational> {
    pairs.into_iter().map(|(s, v)| (s.into(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_qubit_ansatz() -> Ansatz {
        let s = Scenario::new(2, 2).unwrap();
        let m = |idx: &[&[usize]]| idx.iter().map(|i| Monomial::from_index(i)).collect();
        let side = |p: &str| {
            vec![
                SymbolClass::new(format!("{p}0"), m(&[&[0, 0]])),
                SymbolClass::new(format!("{p}1"), m(&[&[1, 0], &[0, 1]])),
                SymbolClass::new(format!("{p}2"), m(&[&[2, 0], &[0, 2]])),
                SymbolClass::new(format!("{p}3"), m(&[&[1, 1]])),
                SymbolClass::new(format!("{p}4"), m(&[&[1, 2], &[2, 1]])),
                SymbolClass::new(format!("{p}5"), m(&[&[2, 2]])),
            ]
        };
        Ansatz::with_classes(s, side("C"), side("D")).unwrap()
    }

    fn family(c0: i64, c: Rational, d0: i64, d: Rational) -> BTreeMap<String, Rational> {
        let mut v = BTreeMap::new();
        for (p, x0, x) in [("C", c0, c), ("D", d0, d)] {
            v.insert(format!("{p}0"), Rational::from(x0));
            v.insert(format!("{p}1"), Rational::zero());
            v.insert(format!("{p}2"), Rational::zero());
            v.insert(format!("{p}3"), x.clone());
            v.insert(format!("{p}4"), x.clone());
            v.insert(format!("{p}5"), -x);
        }
        v
    }

    #[test]
    fn full_ansatz_has_two_symbols_per_correlator() {
        let a = Ansatz::full(Scenario::new(2, 2).unwrap()).unwrap();
        assert_eq!(a.symbol_names().len(), 18);
        assert_eq!(a.symbol_names()[0], "C00");
        assert_eq!(a.symbol_names()[9 + 5], "D12");
        assert!(Ansatz::full(Scenario::new(5, 3).unwrap()).is_err());
    }

    #[test]
    fn constant_ansatz_has_no_equations() {
        let s = Scenario::new(2, 2).unwrap();
        let c = |n: &str| vec![SymbolClass::new(n, vec![Monomial::identity(2)])];
        let a = Ansatz::with_classes(s, c("C0"), c("D0")).unwrap();
        assert!(build_constraints(&a).unwrap().is_empty());
    }

    #[test]
    fn single_party_two_settings() {
        let s = Scenario::new(1, 2).unwrap();
        let f = vec![
            SymbolClass::new("C1", vec![Monomial::from_index(&[1])]),
            SymbolClass::new("C2", vec![Monomial::from_index(&[2])]),
        ];
        let cs = build_constraints(&Ansatz::with_classes(s, f, vec![]).unwrap()).unwrap();
        assert_eq!(cs.len(), 1);
        let e = &cs.equations[0];
        assert_eq!(e.product, Product::Ff);
        assert_eq!(e.monomial, Monomial::from_settings(&[vec![1, 2]]));
        assert_eq!(e.form, BTreeMap::from([((0, 1), Rational::from(2))]));
        assert_eq!(e.format(&cs.symbols), "2·C1·C2 = 0");
    }

    #[test]
    fn chsh_family_solves_the_two_qubit_system() {
        let cs = build_constraints(&two_qubit_ansatz()).unwrap();
        let h = Rational::new(1, 2);
        let r = verify_solution(&cs, &family(1, h.clone(), 1, h.clone())).unwrap();
        assert!(r.pass, "{:?}", r.nonzero().collect::<Vec<_>>());
        let r = verify_solution(&cs, &family(7, Rational::new(-3, 5), -2, h.clone())).unwrap();
        assert!(r.pass);
        let zero = symbol_values(cs.symbols.iter().map(|s| (s.clone(), Rational::zero())));
        assert!(verify_solution(&cs, &zero).unwrap().pass);
        let mut bad = family(1, h.clone(), 1, h);
        *bad.get_mut("C3").unwrap() += &Rational::one();
        let r = verify_solution(&cs, &bad).unwrap();
        assert!(!r.pass);
        assert!(r.nonzero().any(|x| x.equation.contains("X[2,1]·X[2,2]")));
    }

    #[test]
    fn numeric_search_finds_the_chsh_family() {
        let cs = build_constraints(&two_qubit_ansatz()).unwrap();
        let sols = solve_numeric(&cs, &SolveOptions::default()).unwrap();
        let in_family = |v: &BTreeMap<String, Rational>, p: &str| {
            let g = |i: usize| v[&format!("{p}{i}")].clone();
            g(1).is_zero() && g(2).is_zero() && !g(3).is_zero() && g(3) == g(4) && g(4) == -g(5)
        };
        let hits = sols
            .iter()
            .filter_map(|s| s.exact.as_ref())
            .filter(|v| in_family(v, "C") && in_family(v, "D"))
            .count();
        assert!(hits > 0, "{} solutions, none in the family", sols.len());
    }

    #[test]
    fn missing_symbols_are_reported() {
        let cs = build_constraints(&two_qubit_ansatz()).unwrap();
        assert!(matches!(
            verify_solution(&cs, &BTreeMap::new()),
            Err(Error::MissingSymbol(_))
        ));
    }

    #[test]
    fn invalid_classes_are_rejected() {
        let s = Scenario::new(2, 2).unwrap();
        let dup = vec![
            SymbolClass::new("C1", vec![Monomial::from_index(&[1, 0])]),
            SymbolClass::new("C2", vec![Monomial::from_index(&[1, 0])]),
        ];
        assert!(Ansatz::with_classes(s, dup, vec![]).is_err());
        let nc = vec![SymbolClass::new(
            "C1",
            vec![Monomial::from_settings(&[vec![1, 2], vec![]])],
        )];
        assert!(Ansatz::with_classes(s, nc, vec![]).is_err());
        let same_name = vec![SymbolClass::new("X", vec![Monomial::identity(2)])];
        assert!(Ansatz::with_classes(s, same_name.clone(), same_name).is_err());
    }
}
