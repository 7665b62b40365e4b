//! Partition of the vertices relative to treatment and outcome.
//!
//! * `N`: not an ancestor of `Y`
//! * `I`: reaches `Y` only through `A`
//! * `M`: on a causal path from `A` to `Y` (contains `Y`)
//! * `W`: the remaining ancestors of `Y`
//! * `O`: parents of `M` outside `M ∪ {A}`, the optimal adjustment set
//! * `O_min`: the smallest part of `O` that separates `A` from the rest of `O`

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dag, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taxonomy {
    #[serde(rename = "N")]
    pub n: VertexSet,
    #[serde(rename = "I")]
    pub i: VertexSet,
    #[serde(rename = "W")]
    pub w: VertexSet,
    #[serde(rename = "M")]
    pub m: VertexSet,
    #[serde(rename = "O")]
    pub o: VertexSet,
    #[serde(rename = "O_min")]
    pub o_min: VertexSet,
}

/// Index-mask form of [`Taxonomy`], used by the other modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Masks {
    pub n: Vec<bool>,
    pub i: Vec<bool>,
    pub w: Vec<bool>,
    pub m: Vec<bool>,
    pub o: Vec<bool>,
    pub o_min: Vec<bool>,
}

impl Masks {
    pub fn to_taxonomy(&self, g: &Dag) -> Taxonomy {
        Taxonomy {
            n: g.set_of_mask(&self.n),
            i: g.set_of_mask(&self.i),
            w: g.set_of_mask(&self.w),
            m: g.set_of_mask(&self.m),
            o: g.set_of_mask(&self.o),
            o_min: g.set_of_mask(&self.o_min),
        }
    }
}

pub fn check_assumption(g: &Dag) -> Result<()> {
    if g.is_ancestor(g.treatment(), g.outcome()) {
        Ok(())
    } else {
        Err(Error::AssumptionViolation(format!(
            "treatment {} is not an ancestor of outcome {}",
            g.treatment_label(),
            g.outcome_label()
        )))
    }
}

pub fn classify_masks(g: &Dag) -> Result<Masks> {
    check_assumption(g)?;
    let n = g.n();
    let (a, y) = (g.treatment(), g.outcome());
    let an_y = g.ancestors_mask(&[y]);
    let de_a = g.descendants_mask(&[a]);
    let mut only_a = vec![false; n];
    only_a[a] = true;

    let mut nn = vec![false; n];
    let mut ii = vec![false; n];
    let mut ww = vec![false; n];
    let mut mm = vec![false; n];
    for v in 0..n {
        if v == a {
            continue;
        }
        if !an_y[v] {
            nn[v] = true;
        } else if de_a[v] {
            mm[v] = true;
        } else if !g.has_causal_path_idx(v, y, &only_a) {
            ii[v] = true;
        } else {
            ww[v] = true;
        }
    }
    let mut oo = vec![false; n];
    for v in (0..n).filter(|&v| mm[v]) {
        for &p in g.parents_of(v) {
            if !mm[p] && p != a {
                oo[p] = true;
            }
        }
    }
    let mut x = vec![false; n];
    x[a] = true;
    let o_min = minimal_separator_mask(g, &x, &vec![false; n], &oo)?;
    Ok(Masks {
        n: nn,
        i: ii,
        w: ww,
        m: mm,
        o: oo,
        o_min,
    })
}

/// Computes the taxonomy. Fails when `A` is not an ancestor of `Y`.
pub fn classify(g: &Dag) -> Result<Taxonomy> {
    Ok(classify_masks(g)?.to_taxonomy(g))
}

pub fn minimal_separator_mask(g: &Dag, x: &[bool], y: &[bool], c: &[bool]) -> Result<Vec<bool>> {
    let n = g.n();
    if !g.d_separated_mask(x, y, c) {
        return Err(Error::Precondition(
            "the candidate set does not separate the two sides".into(),
        ));
    }
    let mut s = c.to_vec();
    let mut rest: Vec<bool> = y.to_vec();
    for &v in g.topo_order().iter().rev() {
        if !c[v] {
            continue;
        }
        s[v] = false;
        rest[v] = true;
        if !g.d_separated_mask(x, &rest, &s) {
            s[v] = true;
            rest[v] = y[v];
        }
    }
    debug_assert_eq!(s.len(), n);
    Ok(s)
}

/// The inclusion-minimal `s ⊆ c` with `x ⫫ y ∪ (c∖s) | s`, assuming
/// `x ⫫ y | c`.
pub fn minimal_dseparator_within(
    g: &Dag,
    x: &VertexSet,
    y: &VertexSet,
    c: &VertexSet,
) -> Result<VertexSet> {
    let s = minimal_separator_mask(g, &g.mask_of(x)?, &g.mask_of(y)?, &g.mask_of(c)?)?;
    Ok(g.set_of_mask(&s))
}
