//! Ansatz files:
//!
//! ```json
//! {"scenario":{"parties":2,"settings":2},
//!  "f":[{"name":"C0","members":[[0,0]]}, ..],
//!  "g":[{"name":"D0","members":[[0,0]]}, ..],
//!  "solution":{"C0":"1","C3":"1/2", ..}}
//! ```
//!
//! Members are multi-indices; `solution` is optional.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::bellpoly::{Monomial, Scenario};
use crate::error::{Error, Result};
use crate::rational::Rational;

use super::{Ansatz, SymbolClass};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassEntry {
    name: String,
    members: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnsatzFile {
    scenario: Scenario,
    f: Vec<ClassEntry>,
    #[serde(default)]
    g: Vec<ClassEntry>,
    #[serde(default)]
    solution: Option<BTreeMap<String, String>>,
}

fn classes(s: Scenario, entries: Vec<ClassEntry>) -> Result<Vec<SymbolClass>> {
    entries
        .into_iter()
        .map(|e| {
            let members = e
                .members
                .iter()
                .map(|idx| {
                    if idx.len() != s.parties() || idx.iter().any(|&k| k > s.settings()) {
                        return Err(Error::Parse(format!(
                            "member {idx:?} of {} invalid for {s}",
                            e.name
                        )));
                    }
                    Ok(Monomial::from_index(idx))
                })
                .collect::<Result<_>>()?;
            Ok(SymbolClass::new(e.name, members))
        })
        .collect()
}

/// Parse an ansatz and, when present, its proposed solution.
pub fn ansatz_from_json(text: &str) -> Result<(Ansatz, Option<BTreeMap<String, Rational>>)> {
    let file: AnsatzFile = serde_json::from_str(text)?;
    let s = file.scenario;
    let ansatz = Ansatz::with_classes(s, classes(s, file.f)?, classes(s, file.g)?)?;
    let solution = file
        .solution
        .map(|m| {
            m.into_iter()
                .map(|(k, v)| Ok((k, v.parse::<Rational>()?)))
                .collect::<Result<BTreeMap<_, _>>>()
        })
        .transpose()?;
    Ok((ansatz, solution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csderive::{build_constraints, verify_solution};

    const TEXT: &str = r#"{
        "scenario": {"parties": 2, "settings": 2},
        "f": [{"name": "C0", "members": [[0, 0]]},
              {"name": "C1", "members": [[1, 1], [1, 2], [2, 1]]},
              {"name": "C2", "members": [[2, 2]]}],
        "g": [{"name": "D0", "members": [[0, 0]]},
              {"name": "D1", "members": [[1, 1], [1, 2], [2, 1]]},
              {"name": "D2", "members": [[2, 2]]}],
        "solution": {"C0": "1", "C1": "1/2", "C2": "-1/2",
                     "D0": "1", "D1": "-1/2", "D2": "1/2"}
    }"#;

    #[test]
    fn reads_and_verifies() {
        let (a, sol) = ansatz_from_json(TEXT).unwrap();
        assert_eq!(a.symbol_names().len(), 6);
        let cs = build_constraints(&a).unwrap();
        assert!(verify_solution(&cs, &sol.unwrap()).unwrap().pass);
    }

    #[test]
    fn rejects_bad_members_and_values() {
        let bad = TEXT.replace("[[2, 2]]}],\n        \"g\"", "[[3, 2]]}],\n        \"g\"");
        assert!(matches!(ansatz_from_json(&bad), Err(Error::Parse(_))));
        let bad = TEXT.replace("\"1/2\", \"C2\"", "\"x\", \"C2\"");
        assert!(ansatz_from_json(&bad).is_err());
        assert!(ansatz_from_json("{}").is_err());
    }
}
