//! Pairwise Markov and causal Markov equivalence tests.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::taxonomy::classify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivReport {
    pub markov: bool,
    pub causal_markov: bool,
}

fn skeleton(g: &Dag) -> BTreeSet<(String, String)> {
    g.edge_labels()
        .into_iter()
        .map(|(p, c)| if p < c { (p, c) } else { (c, p) })
        .collect()
}

/// Unshielded colliders `a -> c <- b`, stored as `(min(a,b), c, max(a,b))`.
fn colliders(g: &Dag) -> BTreeSet<(String, String, String)> {
    let mut out = BTreeSet::new();
    for c in 0..g.n() {
        let pa = g.parents_of(c);
        for (k, &a) in pa.iter().enumerate() {
            for &b in &pa[k + 1..] {
                if !g.adjacent(a, b) {
                    let (x, y) = (g.label(a).to_string(), g.label(b).to_string());
                    let (x, y) = if x < y { (x, y) } else { (y, x) };
                    out.insert((x, g.label(c).to_string(), y));
                }
            }
        }
    }
    out
}

pub fn markov_equivalent(g1: &Dag, g2: &Dag) -> Result<bool> {
    if g1.vertex_set() != g2.vertex_set() {
        return Err(Error::Precondition("graphs have different vertex sets".into()));
    }
    Ok(skeleton(g1) == skeleton(g2) && colliders(g1) == colliders(g2))
}

/// Markov equivalent and sharing the optimal adjustment set.
pub fn causal_markov_equivalent(g1: &Dag, g2: &Dag) -> Result<bool> {
    if g1.treatment_label() != g2.treatment_label() || g1.outcome_label() != g2.outcome_label() {
        return Err(Error::Precondition("graphs have different treatment or outcome".into()));
    }
    let (t1, t2) = (classify(g1)?, classify(g2)?);
    Ok(markov_equivalent(g1, g2)? && t1.o == t2.o)
}

pub fn compare(g1: &Dag, g2: &Dag) -> Result<EquivReport> {
    Ok(EquivReport {
        markov: markov_equivalent(g1, g2)?,
        causal_markov: causal_markov_equivalent(g1, g2)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;
    use crate::graph::parse_graph;

    fn p(s: &str) -> Dag {
        parse_graph(s).unwrap()
    }

    #[test]
    fn textbook_cases() {
        let chain = p("!treatment A\n!outcome C\nA -> B\nB -> C\n");
        let rev = p("!treatment A\n!outcome C\nC -> B\nB -> A\n");
        let coll = p("!treatment A\n!outcome C\nA -> B\nC -> B\n");
        assert!(markov_equivalent(&chain, &rev).unwrap());
        assert!(!markov_equivalent(&chain, &coll).unwrap());
        assert!(markov_equivalent(&chain, &chain).unwrap());
    }

    #[test]
    fn golden_pairs() {
        let g = golden::graph("motivating").unwrap();
        let h = golden::graph("motivating_equivalent").unwrap();
        assert_eq!(compare(&g, &h).unwrap(), EquivReport { markov: true, causal_markov: true });
        let g = golden::graph("mediator_g3").unwrap();
        let h = golden::graph("mediator_g3_equiv").unwrap();
        assert!(causal_markov_equivalent(&g, &h).unwrap());
    }

    #[test]
    fn extra_edge_breaks_equivalence() {
        let g = golden::graph("two_confounders_g2").unwrap();
        let h = golden::graph("two_confounders_g3").unwrap();
        assert!(!causal_markov_equivalent(&g, &h).unwrap());
    }

    #[test]
    fn vertex_mismatch() {
        let g = golden::graph("motivating").unwrap();
        let h = golden::graph("motivating_reduced").unwrap();
        assert!(markov_equivalent(&g, &h).is_err());
    }
}
