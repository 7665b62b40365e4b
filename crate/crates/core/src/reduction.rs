//! Projection operators and the graph reduction loop.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::criteria::{m_verdict, w_verdict};
use crate::error::{Error, Result};
use crate::graph::{Dag, VertexSet};
use crate::taxonomy::classify_masks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reason {
    N,
    I,
    #[serde(rename = "W-criterion")]
    WCriterion,
    #[serde(rename = "M-criterion")]
    MCriterion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Removal {
    pub vertex: String,
    pub reason: Reason,
    pub pi: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub input: Dag,
    pub output: Dag,
    pub removed: Vec<Removal>,
}

/// Mixed graph obtained by marginalizing a DAG in the usual latent sense.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatentProjectionView {
    pub vertices: VertexSet,
    pub directed_edges: BTreeSet<(String, String)>,
    /// Each pair is stored with its endpoints in lexicographic order.
    pub bidirected_edges: BTreeSet<(String, String)>,
}

// Rebuilds `g` without the vertices in `drop`, with `edges` given over the
// old indices (edges touching dropped vertices are discarded).
fn rebuild(g: &Dag, drop: &[bool], edges: &BTreeSet<(usize, usize)>) -> Result<Dag> {
    let mut new_index = vec![usize::MAX; g.n()];
    let mut labels = Vec::new();
    for v in 0..g.n() {
        if !drop[v] {
            new_index[v] = labels.len();
            labels.push(g.label(v).to_string());
        }
    }
    let e: Vec<(usize, usize)> = edges
        .iter()
        .filter(|&&(p, c)| !drop[p] && !drop[c])
        .map(|&(p, c)| (new_index[p], new_index[c]))
        .collect();
    Dag::from_indices(labels, &e, new_index[g.treatment()], new_index[g.outcome()]).map_err(|e| {
        Error::Internal(format!("projection produced an invalid graph: {e}"))
    })
}

/// Removes `N ∪ I`, first adding `u -> v` whenever a causal path from `u`
/// to `v` has all of its interior in `I`.
pub fn project_out_ni(g: &Dag) -> Result<Dag> {
    let masks = classify_masks(g)?;
    let drop: Vec<bool> = (0..g.n()).map(|v| masks.n[v] || masks.i[v]).collect();
    let mut edges: BTreeSet<(usize, usize)> = g.edges().into_iter().collect();
    for u in (0..g.n()).filter(|&u| !drop[u]) {
        let mut seen = vec![false; g.n()];
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            for &c in g.children_of(x) {
                if seen[c] {
                    continue;
                }
                seen[c] = true;
                if masks.i[c] {
                    stack.push(c);
                } else if !drop[c] {
                    edges.insert((u, c));
                }
            }
        }
    }
    rebuild(g, &drop, &edges)
}

fn project_vertex_idx(g: &Dag, vi: usize, pi: &[usize]) -> Result<Dag> {
    let label = |v: usize| g.label(v).to_string();
    let mut expected = g.children_of(vi).to_vec();
    let mut given = pi.to_vec();
    expected.sort_unstable();
    given.sort_unstable();
    if expected != given {
        return Err(Error::Precondition(format!(
            "pi must list exactly the children of {}",
            label(vi)
        )));
    }
    for j in 0..pi.len() {
        for k in j + 1..pi.len() {
            if g.is_ancestor(pi[k], pi[j]) {
                return Err(Error::Precondition(format!(
                    "pi is not topological: {} precedes its ancestor {}",
                    label(pi[j]),
                    label(pi[k])
                )));
            }
        }
    }
    // Nesting of parent sets along pi, for all but the last child.
    let mut prev = vi;
    for &cur in pi.iter().take(pi.len().saturating_sub(1)) {
        let ok = g
            .parents_of(cur)
            .iter()
            .all(|&p| p == prev || g.parents_of(prev).contains(&p));
        if !ok {
            return Err(Error::Precondition(format!(
                "parents of {} are not nested in those of {}",
                label(cur),
                label(prev)
            )));
        }
        prev = cur;
    }
    let mut edges: BTreeSet<(usize, usize)> = g.edges().into_iter().collect();
    for (j, &c) in pi.iter().enumerate() {
        for &p in g.parents_of(vi) {
            edges.insert((p, c));
        }
        for &earlier in &pi[..j] {
            edges.insert((earlier, c));
        }
    }
    let mut drop = vec![false; g.n()];
    drop[vi] = true;
    rebuild(g, &drop, &edges)
}

/// Removes `vi` after saturating edges from its parents to its children and
/// among its children along `pi`.
pub fn project_vertex(g: &Dag, vi: &str, pi: &[&str]) -> Result<Dag> {
    let v = g.index_of(vi)?;
    if v == g.treatment() || v == g.outcome() {
        return Err(Error::Precondition("cannot project out treatment or outcome".into()));
    }
    let p = pi.iter().map(|l| g.index_of(l)).collect::<Result<Vec<_>>>()?;
    project_vertex_idx(g, v, &p)
}

/// Graph reduction with the loop visiting vertices in declaration order.
pub fn reduce(g: &Dag) -> Result<ReductionReport> {
    let order: Vec<&str> = g.labels().iter().map(String::as_str).collect();
    reduce_with_order(g, &order)
}

/// Graph reduction with the loop visiting vertices in `order`, which must be
/// a permutation of the vertices of `g`.
pub fn reduce_with_order(g: &Dag, order: &[&str]) -> Result<ReductionReport> {
    let mut seen = vec![false; g.n()];
    for l in order {
        let v = g.index_of(l)?;
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::Precondition(format!("`{l}` repeated in visit order")));
        }
    }
    if seen.contains(&false) {
        return Err(Error::Precondition("visit order must list every vertex".into()));
    }

    let masks = classify_masks(g)?;
    let mut removed = Vec::new();
    for v in 0..g.n() {
        let reason = if masks.n[v] {
            Reason::N
        } else if masks.i[v] {
            Reason::I
        } else {
            continue;
        };
        removed.push(Removal { vertex: g.label(v).to_string(), reason, pi: vec![] });
    }
    let mut cur = project_out_ni(g)?;
    let protected: Vec<bool> = (0..g.n())
        .map(|v| masks.o[v] || v == g.treatment() || v == g.outcome())
        .collect();

    for l in order {
        let v0 = g.index_of(l)?;
        if protected[v0] || masks.n[v0] || masks.i[v0] {
            continue;
        }
        let cm = classify_masks(&cur)?;
        let v = cur.index_of(l)?;
        let (verdict, reason) = if cm.w[v] && !cm.o[v] {
            (w_verdict(&cur, &cm, v)?, Reason::WCriterion)
        } else if cm.m[v] && v != cur.outcome() {
            (m_verdict(&cur, &cm, v)?, Reason::MCriterion)
        } else {
            continue;
        };
        if !verdict.satisfied() {
            continue;
        }
        let mut pi = match reason {
            Reason::WCriterion => verdict.chain.clone(),
            _ => cur.children_of(v).to_vec(),
        };
        if reason == Reason::WCriterion && cur.has_edge(v, cur.treatment()) {
            pi.push(cur.treatment());
        } else if reason == Reason::MCriterion {
            cur.sort_topologically(&mut pi);
        }
        let pi_labels = pi.iter().map(|&c| cur.label(c).to_string()).collect();
        cur = project_vertex_idx(&cur, v, &pi)?;
        removed.push(Removal { vertex: l.to_string(), reason, pi: pi_labels });
    }
    Ok(ReductionReport { input: g.clone(), output: cur, removed })
}

/// Latent projection of `g` onto `keep`.
pub fn latent_projection(g: &Dag, keep: &VertexSet) -> Result<LatentProjectionView> {
    let kept = g.mask_of(keep)?;
    if !kept[g.treatment()] || !kept[g.outcome()] {
        return Err(Error::Precondition("treatment and outcome must be kept".into()));
    }
    let n = g.n();
    // reach[u][v]: a directed path u -> ... -> v with interior outside `keep`.
    let reach: Vec<Vec<bool>> = (0..n)
        .map(|u| {
            let mut r = vec![false; n];
            let mut stack = vec![u];
            while let Some(x) = stack.pop() {
                for &c in g.children_of(x) {
                    if !r[c] {
                        r[c] = true;
                        if !kept[c] {
                            stack.push(c);
                        }
                    }
                }
            }
            r
        })
        .collect();
    let mut directed = BTreeSet::new();
    let mut bidirected = BTreeSet::new();
    for a in (0..n).filter(|&a| kept[a]) {
        for b in (0..n).filter(|&b| kept[b] && reach[a][b]) {
            directed.insert((g.label(a).to_string(), g.label(b).to_string()));
        }
    }
    for u in (0..n).filter(|&u| !kept[u]) {
        let hits: Vec<usize> = (0..n).filter(|&v| kept[v] && reach[u][v]).collect();
        for (k, &a) in hits.iter().enumerate() {
            for &b in &hits[k + 1..] {
                let (x, y) = (g.label(a).to_string(), g.label(b).to_string());
                bidirected.insert(if x < y { (x, y) } else { (y, x) });
            }
        }
    }
    Ok(LatentProjectionView {
        vertices: keep.clone(),
        directed_edges: directed,
        bidirected_edges: bidirected,
    })
}
