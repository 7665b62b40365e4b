//! Criteria deciding whether a baseline covariate (`W`) or a mediator (`M`)
//! is uninformative, and the resulting irreducible informative set.
//!
//! Both criteria look at the chain of children of the candidate `v` that lie
//! in the same class, `v = c_0, c_1, ..., c_r` in topological order, and at a
//! target set `T` (`O` for covariates, `{A, Y} ∪ O_min` for mediators):
//!
//! * (i)    `v ⫫ T | {c_r} ∪ Pa(c_r) ∖ {v}`
//! * (ii a) `c_{t-1} -> c_t`
//! * (ii b) `Pa(c_t) ⊆ Pa(c_{t-1}) ∪ {c_{t-1}}`
//! * (ii c) `Pa(c_{t-1}) ∖ Pa(c_t) ⫫ T | Pa(c_t)`

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dag, VertexSet};
use crate::taxonomy::{classify_masks, Masks, Taxonomy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clause {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii_a")]
    IiA,
    #[serde(rename = "ii_b")]
    IiB,
    #[serde(rename = "ii_c")]
    IiC,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "W")]
    W,
    #[serde(rename = "M")]
    M,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub clause: Clause,
    /// Chain position for the (ii) clauses, starting at 1; 0 for (i).
    pub t: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub vertex: String,
    pub kind: Kind,
    pub satisfied: bool,
    pub failed_clause: Option<Failure>,
    pub chain: Vec<String>,
}

/// Index form of a verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub vertex: usize,
    pub kind: Kind,
    pub failure: Option<Failure>,
    pub chain: Vec<usize>,
}

impl Verdict {
    pub fn satisfied(&self) -> bool {
        self.failure.is_none()
    }

    pub fn to_report(&self, g: &Dag) -> CriterionVerdict {
        CriterionVerdict {
            vertex: g.label(self.vertex).to_string(),
            kind: self.kind,
            satisfied: self.satisfied(),
            failed_clause: self.failure,
            chain: self.chain.iter().map(|&c| g.label(c).to_string()).collect(),
        }
    }
}

fn chain_in(g: &Dag, v: usize, class: &[bool]) -> Vec<usize> {
    let mut ch: Vec<usize> = g.children_of(v).iter().copied().filter(|&c| class[c]).collect();
    g.sort_topologically(&mut ch);
    ch
}

fn parents_mask(g: &Dag, v: usize) -> Vec<bool> {
    let mut m = vec![false; g.n()];
    for &p in g.parents_of(v) {
        m[p] = true;
    }
    m
}

fn first_failure(g: &Dag, v: usize, chain: &[usize], target: &[bool]) -> Option<Failure> {
    let n = g.n();
    let last = *chain.last()?;
    let mut cond = parents_mask(g, last);
    cond[last] = true;
    cond[v] = false;
    let mut x = vec![false; n];
    x[v] = true;
    if !g.d_separated_mask(&x, target, &cond) {
        return Some(Failure { clause: Clause::I, t: 0 });
    }
    let mut prev = v;
    for (k, &cur) in chain.iter().enumerate() {
        let t = k + 1;
        if !g.has_edge(prev, cur) {
            return Some(Failure { clause: Clause::IiA, t });
        }
        let pa_prev = parents_mask(g, prev);
        let pa_cur = parents_mask(g, cur);
        if (0..n).any(|u| pa_cur[u] && !pa_prev[u] && u != prev) {
            return Some(Failure { clause: Clause::IiB, t });
        }
        let diff: Vec<bool> = (0..n).map(|u| pa_prev[u] && !pa_cur[u]).collect();
        if !g.d_separated_mask(&diff, target, &pa_cur) {
            return Some(Failure { clause: Clause::IiC, t });
        }
        prev = cur;
    }
    None
}

/// Covariate criterion for `v ∈ W ∖ O`, with the taxonomy given as masks.
pub fn w_verdict(g: &Dag, masks: &Masks, v: usize) -> Result<Verdict> {
    if !masks.w[v] || masks.o[v] {
        return Err(Error::Precondition(format!("{} is not in W \\ O", g.label(v))));
    }
    let chain = chain_in(g, v, &masks.w);
    if chain.is_empty() {
        return Err(Error::Internal(format!("{} has no child in W", g.label(v))));
    }
    let failure = first_failure(g, v, &chain, &masks.o);
    Ok(Verdict { vertex: v, kind: Kind::W, failure, chain })
}

/// Mediator criterion for `v ∈ M ∖ {Y}`, with the taxonomy given as masks.
pub fn m_verdict(g: &Dag, masks: &Masks, v: usize) -> Result<Verdict> {
    if !masks.m[v] || v == g.outcome() {
        return Err(Error::Precondition(format!("{} is not in M \\ {{Y}}", g.label(v))));
    }
    let chain = chain_in(g, v, &masks.m);
    if chain.is_empty() {
        return Err(Error::Internal(format!("{} has no child in M", g.label(v))));
    }
    let mut target = masks.o_min.clone();
    target[g.treatment()] = true;
    target[g.outcome()] = true;
    let failure = first_failure(g, v, &chain, &target);
    Ok(Verdict { vertex: v, kind: Kind::M, failure, chain })
}

fn masks_from(g: &Dag, tax: &Taxonomy) -> Result<Masks> {
    Ok(Masks {
        n: g.mask_of(&tax.n)?,
        i: g.mask_of(&tax.i)?,
        w: g.mask_of(&tax.w)?,
        m: g.mask_of(&tax.m)?,
        o: g.mask_of(&tax.o)?,
        o_min: g.mask_of(&tax.o_min)?,
    })
}

pub fn w_criterion(g: &Dag, tax: &Taxonomy, wj: &str) -> Result<CriterionVerdict> {
    let v = g.index_of(wj)?;
    Ok(w_verdict(g, &masks_from(g, tax)?, v)?.to_report(g))
}

pub fn m_criterion(g: &Dag, tax: &Taxonomy, mi: &str) -> Result<CriterionVerdict> {
    let v = g.index_of(mi)?;
    Ok(m_verdict(g, &masks_from(g, tax)?, v)?.to_report(g))
}

/// Verdicts for every vertex in `W ∖ O` and `M ∖ {Y}`, in declaration order.
pub fn verdicts(g: &Dag) -> Result<Vec<Verdict>> {
    let masks = classify_masks(g)?;
    let mut out = Vec::new();
    for v in 0..g.n() {
        if masks.w[v] && !masks.o[v] {
            out.push(w_verdict(g, &masks, v)?);
        } else if masks.m[v] && v != g.outcome() {
            out.push(m_verdict(g, &masks, v)?);
        }
    }
    Ok(out)
}

pub fn check_all(g: &Dag) -> Result<Vec<CriterionVerdict>> {
    Ok(verdicts(g)?.iter().map(|v| v.to_report(g)).collect())
}

pub fn informative_mask(g: &Dag) -> Result<Vec<bool>> {
    let masks = classify_masks(g)?;
    let mut keep = masks.o.clone();
    keep[g.treatment()] = true;
    keep[g.outcome()] = true;
    for v in verdicts(g)? {
        if !v.satisfied() {
            keep[v.vertex] = true;
        }
    }
    Ok(keep)
}

/// `{A, Y} ∪ O` plus every covariate and mediator failing its criterion.
pub fn informative_set(g: &Dag) -> Result<VertexSet> {
    Ok(g.set_of_mask(&informative_mask(g)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::golden;
    use crate::taxonomy::classify;

    fn set(xs: &[&str]) -> VertexSet {
        xs.iter().copied().collect()
    }

    fn verdict(name: &str, v: &str) -> CriterionVerdict {
        let g = golden::graph(name).unwrap();
        let tax = classify(&g).unwrap();
        if tax.w.contains(v) {
            w_criterion(&g, &tax, v).unwrap()
        } else {
            m_criterion(&g, &tax, v).unwrap()
        }
    }

    #[test]
    fn motivating_verdicts() {
        let w4 = verdict("motivating", "W4");
        assert!(w4.satisfied);
        assert_eq!(w4.chain, vec!["O1"]);
        for w in ["W2", "W3"] {
            let v = verdict("motivating", w);
            assert_eq!(v.failed_clause.map(|f| f.clause), Some(Clause::IiB), "{w}");
        }
    }

    #[test]
    fn three_mediator_verdicts() {
        let m1 = verdict("three_mediators", "M1");
        assert_eq!(m1.failed_clause.unwrap().clause, Clause::I);
        assert!(verdict("three_mediators", "M2").satisfied);
        assert!(verdict("three_mediators", "M3").satisfied);
    }

    #[test]
    fn single_mediator_is_uninformative() {
        assert!(verdict("mediator_g1", "M").satisfied);
        assert!(!verdict("mediator_g2", "M").satisfied);
    }

    #[test]
    fn wrong_class_is_rejected() {
        let g = golden::graph("motivating").unwrap();
        let tax = classify(&g).unwrap();
        assert!(w_criterion(&g, &tax, "O1").is_err());
        assert!(m_criterion(&g, &tax, "Y").is_err());
    }

    #[test]
    fn informative_sets() {
        let g = golden::graph("motivating").unwrap();
        assert_eq!(informative_set(&g).unwrap(), set(&["A", "Y", "O1", "W2", "W3"]));
        let g = golden::graph("long_chain").unwrap();
        let mut want = g.vertex_set();
        for v in ["I1", "W1", "W2", "W6"] {
            want.remove(v);
        }
        assert_eq!(informative_set(&g).unwrap(), want);
    }

    #[test]
    fn verdict_json_shape() {
        let v = verdict("motivating", "W2");
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["failed_clause"]["clause"], "ii_b");
        assert_eq!(j["kind"], "W");
    }
}
