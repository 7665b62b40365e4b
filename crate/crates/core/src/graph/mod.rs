//! Vertex-labelled DAGs with a designated treatment and outcome.
//!
//! Vertices are identified by their string label. Internally every vertex
//! also has a dense index equal to its declaration position, and all the
//! algorithms run on index masks; the label-based methods are thin wrappers.

mod dsep;
mod parse;

use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};
use std::cmp::Reverse;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use parse::{is_valid_label, parse_graph};

/// A set of vertex labels. Iterates in lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(BTreeSet<String>);

impl VertexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.0.contains(label)
    }

    pub fn insert(&mut self, label: impl Into<String>) -> bool {
        self.0.insert(label.into())
    }

    pub fn remove(&mut self, label: &str) -> bool {
        self.0.remove(label)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn to_vec(&self) -> Vec<String> {
        self.0.iter().cloned().collect()
    }
}

impl<S: Into<String>> FromIterator<S> for VertexSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        VertexSet(iter.into_iter().map(Into::into).collect())
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a String;
    type IntoIter = std::collections::btree_set::Iter<'a, String>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Immutable directed acyclic graph with a treatment and an outcome vertex.
///
/// Equality ignores declaration order: two graphs are equal when their
/// vertex sets, edge sets, treatment and outcome coincide.
#[derive(Debug, Clone)]
pub struct Dag {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    topo: Vec<usize>,
    rank: Vec<usize>,
    treatment: usize,
    outcome: usize,
}

impl Dag {
    /// Builds a graph from labels and label pairs `(parent, child)`.
    pub fn new<S: AsRef<str>>(
        vertices: &[S],
        edges: &[(S, S)],
        treatment: &str,
        outcome: &str,
    ) -> Result<Dag> {
        let labels: Vec<String> = vertices.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex `{l}`")));
            }
        }
        let lookup = |l: &str| index.get(l).copied().ok_or_else(|| Error::UnknownLabel(l.to_string()));
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (p, c) in edges {
            idx_edges.push((lookup(p.as_ref())?, lookup(c.as_ref())?));
        }
        let t = lookup(treatment)?;
        let y = lookup(outcome)?;
        Self::from_indices(labels, &idx_edges, t, y)
    }

    /// Builds a graph from labels and index pairs into `labels`.
    pub fn from_indices(
        labels: Vec<String>,
        edges: &[(usize, usize)],
        treatment: usize,
        outcome: usize,
    ) -> Result<Dag> {
        let n = labels.len();
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex `{l}`")));
            }
        }
        if treatment >= n || outcome >= n {
            return Err(Error::InvalidGraph("treatment or outcome out of range".into()));
        }
        if treatment == outcome {
            return Err(Error::InvalidGraph(format!(
                "treatment and outcome are both `{}`",
                labels[treatment]
            )));
        }
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut seen = HashSet::with_capacity(edges.len());
        for &(p, c) in edges {
            if p >= n || c >= n {
                return Err(Error::InvalidGraph("edge endpoint out of range".into()));
            }
            if p == c {
                return Err(Error::InvalidGraph(format!("self-loop on `{}`", labels[p])));
            }
            if !seen.insert((p, c)) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge {} -> {}",
                    labels[p], labels[c]
                )));
            }
            parents[c].push(p);
            children[p].push(c);
        }
        for v in parents.iter_mut().chain(children.iter_mut()) {
            v.sort_unstable();
        }
        let topo = kahn(&parents, &children).map_err(|v| Error::Cycle(labels[v].clone()))?;
        let mut rank = vec![0; n];
        for (r, &v) in topo.iter().enumerate() {
            rank[v] = r;
        }
        Ok(Dag {
            labels,
            index,
            parents,
            children,
            topo,
            rank,
            treatment,
            outcome,
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn treatment(&self) -> usize {
        self.treatment
    }

    pub fn outcome(&self) -> usize {
        self.outcome
    }

    pub fn treatment_label(&self) -> &str {
        &self.labels[self.treatment]
    }

    pub fn outcome_label(&self) -> &str {
        &self.labels[self.outcome]
    }

    /// Parents of `v`, in declaration order.
    pub fn parents_of(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    /// Children of `v`, in declaration order.
    pub fn children_of(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.children[from].binary_search(&to).is_ok()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// All edges as index pairs, ordered by parent then child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (p, ch) in self.children.iter().enumerate() {
            out.extend(ch.iter().map(|&c| (p, c)));
        }
        out
    }

    pub fn edge_labels(&self) -> Vec<(String, String)> {
        self.edges()
            .into_iter()
            .map(|(p, c)| (self.labels[p].clone(), self.labels[c].clone()))
            .collect()
    }

    /// Deterministic topological order, ties broken by declaration order.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    /// Position of `v` in [`Dag::topo_order`].
    pub fn topo_rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    pub fn topo_sort(&self) -> Vec<String> {
        self.topo.iter().map(|&v| self.labels[v].clone()).collect()
    }

    /// Sorts `vs` in place by topological rank.
    pub fn sort_topologically(&self, vs: &mut [usize]) {
        vs.sort_by_key(|&v| self.rank[v]);
    }

    /// Reflexive ancestors of `seeds`.
    pub fn ancestors_mask(&self, seeds: &[usize]) -> Vec<bool> {
        reach(&self.parents, seeds, self.n())
    }

    /// Reflexive descendants of `seeds`.
    pub fn descendants_mask(&self, seeds: &[usize]) -> Vec<bool> {
        reach(&self.children, seeds, self.n())
    }

    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        self.ancestors_mask(&[b])[a]
    }

    /// True iff there is a directed path `from -> ... -> to` whose
    /// non-endpoint vertices all lie outside `avoid`. A vertex trivially
    /// reaches itself.
    pub fn has_causal_path_idx(&self, from: usize, to: usize, avoid: &[bool]) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.n()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for &c in &self.children[v] {
                if c == to {
                    return true;
                }
                if !seen[c] && !avoid[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        false
    }

    pub fn mask_of(&self, set: &VertexSet) -> Result<Vec<bool>> {
        let mut m = vec![false; self.n()];
        for l in set.iter() {
            m[self.index_of(l)?] = true;
        }
        Ok(m)
    }

    pub fn indices_of(&self, set: &VertexSet) -> Result<Vec<usize>> {
        let mut v = set
            .iter()
            .map(|l| self.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        v.sort_unstable();
        Ok(v)
    }

    pub fn set_of_mask(&self, mask: &[bool]) -> VertexSet {
        mask.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.labels[i].clone())
            .collect()
    }

    pub fn set_of(&self, idx: &[usize]) -> VertexSet {
        idx.iter().map(|&i| self.labels[i].clone()).collect()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.labels.iter().cloned().collect()
    }

    pub fn ancestors(&self, set: &VertexSet) -> Result<VertexSet> {
        let seeds = self.indices_of(set)?;
        Ok(self.set_of_mask(&self.ancestors_mask(&seeds)))
    }

    pub fn descendants(&self, set: &VertexSet) -> Result<VertexSet> {
        let seeds = self.indices_of(set)?;
        Ok(self.set_of_mask(&self.descendants_mask(&seeds)))
    }

    pub fn parents(&self, set: &VertexSet) -> Result<VertexSet> {
        let mut out = VertexSet::new();
        for v in self.indices_of(set)? {
            for &p in &self.parents[v] {
                out.insert(self.labels[p].clone());
            }
        }
        Ok(out)
    }

    pub fn children(&self, set: &VertexSet) -> Result<VertexSet> {
        let mut out = VertexSet::new();
        for v in self.indices_of(set)? {
            for &c in &self.children[v] {
                out.insert(self.labels[c].clone());
            }
        }
        Ok(out)
    }

    pub fn has_causal_path(&self, from: &str, to: &str, avoiding: &VertexSet) -> Result<bool> {
        let f = self.index_of(from)?;
        let t = self.index_of(to)?;
        let avoid = self.mask_of(avoiding)?;
        Ok(self.has_causal_path_idx(f, t, &avoid))
    }

    /// The induced subgraph on `keep` (which must retain treatment and outcome).
    pub fn induced(&self, keep: &[bool]) -> Result<Dag> {
        let mut new_index = vec![usize::MAX; self.n()];
        let mut labels = Vec::new();
        for v in 0..self.n() {
            if keep[v] {
                new_index[v] = labels.len();
                labels.push(self.labels[v].clone());
            }
        }
        if !keep[self.treatment] || !keep[self.outcome] {
            return Err(Error::Precondition(
                "induced subgraph must keep treatment and outcome".into(),
            ));
        }
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .filter(|&(p, c)| keep[p] && keep[c])
            .map(|(p, c)| (new_index[p], new_index[c]))
            .collect();
        Dag::from_indices(
            labels,
            &edges,
            new_index[self.treatment],
            new_index[self.outcome],
        )
    }

    /// Same graph with declaration order permuted: vertex `order[k]` becomes
    /// the k-th declared vertex.
    pub fn relabel_order(&self, order: &[usize]) -> Result<Dag> {
        let mut pos = vec![usize::MAX; self.n()];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        if order.len() != self.n() || pos.contains(&usize::MAX) {
            return Err(Error::Precondition("order must be a permutation".into()));
        }
        let labels = order.iter().map(|&v| self.labels[v].clone()).collect();
        let edges: Vec<_> = self.edges().into_iter().map(|(p, c)| (pos[p], pos[c])).collect();
        Dag::from_indices(labels, &edges, pos[self.treatment], pos[self.outcome])
    }

    /// Serializes to the line-oriented graph format. Re-parsing the output
    /// yields a graph with the same declaration order.
    pub fn to_graph_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("!treatment {}\n", self.treatment_label()));
        out.push_str(&format!("!outcome {}\n", self.outcome_label()));
        let mut declared = vec![false; self.n()];
        let mut written: HashSet<(usize, usize)> = HashSet::new();
        for v in 0..self.n() {
            if declared[v] {
                continue;
            }
            // An edge from an already declared parent introduces `v` in order.
            if let Some(&p) = self.parents[v].iter().find(|&&p| declared[p]) {
                out.push_str(&format!("{} -> {}\n", self.labels[p], self.labels[v]));
                written.insert((p, v));
            } else {
                out.push_str(&format!("{}\n", self.labels[v]));
            }
            declared[v] = true;
        }
        for (p, c) in self.edges() {
            if !written.contains(&(p, c)) {
                out.push_str(&format!("{} -> {}\n", self.labels[p], self.labels[c]));
            }
        }
        out
    }

    fn canonical_edges(&self) -> BTreeSet<(&str, &str)> {
        self.edges()
            .into_iter()
            .map(|(p, c)| (self.labels[p].as_str(), self.labels[c].as_str()))
            .collect()
    }
}

impl PartialEq for Dag {
    fn eq(&self, other: &Self) -> bool {
        self.treatment_label() == other.treatment_label()
            && self.outcome_label() == other.outcome_label()
            && self.vertex_set() == other.vertex_set()
            && self.canonical_edges() == other.canonical_edges()
    }
}

impl Eq for Dag {}

impl fmt::Display for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_graph_text())
    }
}

/// JSON form of a graph: `{"vertices": [...], "edges": [[p, c], ...],
/// "treatment": .., "outcome": ..}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub treatment: String,
    pub outcome: String,
}

impl From<&Dag> for GraphJson {
    fn from(g: &Dag) -> Self {
        GraphJson {
            vertices: g.labels.clone(),
            edges: g.edge_labels(),
            treatment: g.treatment_label().to_string(),
            outcome: g.outcome_label().to_string(),
        }
    }
}

impl TryFrom<&GraphJson> for Dag {
    type Error = Error;
    fn try_from(j: &GraphJson) -> Result<Dag> {
        Dag::new(&j.vertices, &j.edges, &j.treatment, &j.outcome)
    }
}

impl Serialize for Dag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dag {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GraphJson::deserialize(d)?;
        Dag::try_from(&j).map_err(serde::de::Error::custom)
    }
}

fn kahn(parents: &[Vec<usize>], children: &[Vec<usize>]) -> std::result::Result<Vec<usize>, usize> {
    let n = parents.len();
    let mut indeg: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &c in &children[v] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).find(|&v| indeg[v] > 0).unwrap_or(0))
    }
}

fn reach(adj: &[Vec<usize>], seeds: &[usize], n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    for &s in seeds {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}
