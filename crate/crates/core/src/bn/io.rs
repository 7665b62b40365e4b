use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{canonical_parents, DiscreteBn};
use crate::error::{Error, Result};
use crate::graph::{Dag, GraphJson};

/// JSON form of a network.
///
/// ```json
/// {"graph": {"vertices": ["A", "Y"], "edges": [["A", "Y"]],
///            "treatment": "A", "outcome": "Y"},
///  "cards": {"A": 2, "Y": 2},
///  "cpts": {"A": {"parents": [], "table": [[0.5, 0.5]]},
///           "Y": {"parents": ["A"], "table": [[0.6, 0.4], [0.3, 0.7]]}}}
/// ```
///
/// `parents` must follow the graph's topological order and `table` has one
/// row per parent state, ordered lexicographically with the last parent
/// varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BnJson {
    pub graph: GraphJson,
    pub cards: BTreeMap<String, usize>,
    pub cpts: BTreeMap<String, CptJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CptJson {
    pub parents: Vec<String>,
    pub table: Vec<Vec<f64>>,
}

impl From<&DiscreteBn> for BnJson {
    fn from(bn: &DiscreteBn) -> Self {
        let g = &bn.graph;
        let mut cards = BTreeMap::new();
        let mut cpts = BTreeMap::new();
        for v in 0..g.n() {
            cards.insert(g.label(v).to_string(), bn.cards[v]);
            let c = &bn.cpts[v];
            cpts.insert(
                g.label(v).to_string(),
                CptJson {
                    parents: c.parents.iter().map(|&p| g.label(p).to_string()).collect(),
                    table: c.table.chunks(c.card).map(<[f64]>::to_vec).collect(),
                },
            );
        }
        BnJson { graph: GraphJson::from(g), cards, cpts }
    }
}

impl TryFrom<&BnJson> for DiscreteBn {
    type Error = Error;

    fn try_from(j: &BnJson) -> Result<DiscreteBn> {
        let g = Dag::try_from(&j.graph)?;
        let mut cards = Vec::with_capacity(g.n());
        for l in g.labels() {
            let c = j.cards.get(l).ok_or_else(|| Error::InvalidCpt {
                vertex: l.clone(),
                msg: "missing cardinality".into(),
            })?;
            cards.push(*c);
        }
        if let Some(extra) = j.cards.keys().chain(j.cpts.keys()).find(|l| !g.contains(l)) {
            return Err(Error::UnknownLabel(extra.clone()));
        }
        let mut tables = Vec::with_capacity(g.n());
        for v in 0..g.n() {
            let l = g.label(v);
            let cpt = j.cpts.get(l).ok_or_else(|| Error::InvalidCpt {
                vertex: l.into(),
                msg: "missing table".into(),
            })?;
            let want: Vec<&str> = canonical_parents(&g, v).iter().map(|&p| g.label(p)).collect();
            if cpt.parents != want {
                return Err(Error::InvalidCpt {
                    vertex: l.into(),
                    msg: format!("parents must be {want:?} (topological order), got {:?}", cpt.parents),
                });
            }
            if let Some(r) = cpt.table.iter().position(|row| row.len() != cards[v]) {
                return Err(Error::InvalidCpt {
                    vertex: l.into(),
                    msg: format!("row {r} has {} entries, expected {}", cpt.table[r].len(), cards[v]),
                });
            }
            tables.push(cpt.table.concat());
        }
        DiscreteBn::new(g, cards, tables)
    }
}

impl DiscreteBn {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&BnJson::from(self)).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<DiscreteBn> {
        let j: BnJson = serde_json::from_str(text)?;
        DiscreteBn::try_from(&j)
    }

    pub fn load(path: &Path) -> Result<DiscreteBn> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = r#"{"graph": {"vertices": ["A", "Y"], "edges": [["A", "Y"]],
        "treatment": "A", "outcome": "Y"},
        "cards": {"A": 2, "Y": 2},
        "cpts": {"A": {"parents": [], "table": [[0.5, 0.5]]},
                 "Y": {"parents": ["A"], "table": [[0.6, 0.4], [0.3, 0.7]]}}}"#;

    #[test]
    fn parse_and_round_trip() {
        let bn = DiscreteBn::from_json(CHAIN).unwrap();
        assert_eq!(bn.cpt(1).row(1), &[0.3, 0.7]);
        assert_eq!(DiscreteBn::from_json(&bn.to_json()).unwrap(), bn);
    }

    #[test]
    fn wrong_parent_order() {
        let g = crate::golden::graph("motivating").unwrap();
        let bn = DiscreteBn::random_law(&g, &vec![2; g.n()], 5, 0.1).unwrap();
        let mut j = BnJson::from(&bn);
        j.cpts.get_mut("W4").unwrap().parents.reverse();
        assert!(matches!(DiscreteBn::try_from(&j), Err(Error::InvalidCpt { .. })));
    }

    #[test]
    fn missing_cardinality() {
        let text = CHAIN.replace(r#""A": 2, "Y": 2}"#, r#""A": 2}"#);
        assert!(DiscreteBn::from_json(&text).is_err());
    }
}
