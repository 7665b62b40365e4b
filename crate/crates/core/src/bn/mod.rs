//! Finite-state Bayesian networks over a [`Dag`].
//!
//! Vertex `v` takes states `0..card(v)`. Its conditional probability table
//! is stored densely: parents are ordered by the graph's topological order,
//! rows enumerate parent states lexicographically (last parent fastest) and
//! each row holds `card(v)` probabilities.

mod data;
mod io;

use rand::Rng as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::rng::{self, Rng};

pub use data::Dataset;
pub use io::{BnJson, CptJson};

/// Largest joint state space the enumeration routines accept.
pub const MAX_CONFIGS: u128 = 10_000_000;

/// Tolerance on CPT row sums.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    parents: Vec<usize>,
    strides: Vec<usize>,
    card: usize,
    table: Vec<f64>,
}

impl Cpt {
    fn new(parents: Vec<usize>, cards: &[usize], card: usize, table: Vec<f64>) -> Cpt {
        let mut strides = vec![0; parents.len()];
        let mut s = 1;
        for k in (0..parents.len()).rev() {
            strides[k] = s;
            s *= cards[parents[k]];
        }
        Cpt { parents, strides, card, table }
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn card(&self) -> usize {
        self.card
    }

    pub fn n_rows(&self) -> usize {
        self.table.len() / self.card
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Row index for a full joint state.
    pub fn row_of(&self, state: &[usize]) -> usize {
        self.parents
            .iter()
            .zip(&self.strides)
            .map(|(&p, &s)| state[p] * s)
            .sum()
    }

    /// Row index for parent states listed in `parents()` order.
    pub fn row_of_parents(&self, pstates: &[usize]) -> usize {
        pstates.iter().zip(&self.strides).map(|(&x, &s)| x * s).sum()
    }

    /// Parent states of row `r`, in `parents()` order.
    pub fn parent_states(&self, mut r: usize, cards: &[usize]) -> Vec<usize> {
        let mut out = vec![0; self.parents.len()];
        for k in (0..self.parents.len()).rev() {
            let c = cards[self.parents[k]];
            out[k] = r % c;
            r /= c;
        }
        out
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.table[r * self.card..(r + 1) * self.card]
    }

    pub fn prob(&self, state: &[usize], own: usize) -> f64 {
        self.table[self.row_of(state) * self.card + own]
    }
}

/// Positivity and normalization certificate returned by [`DiscreteBn::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub configurations: u128,
    pub max_row_error: f64,
    /// `min over parent states of P(A = a | Pa(A))` when positivity was checked.
    pub min_treatment_prob: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBn {
    graph: Dag,
    cards: Vec<usize>,
    cpts: Vec<Cpt>,
}

/// Fully enumerated joint law, one row per configuration.
#[derive(Debug, Clone)]
pub struct Joint {
    width: usize,
    states: Vec<usize>,
    probs: Vec<f64>,
}

impl Joint {
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn state(&self, k: usize) -> &[usize] {
        &self.states[k * self.width..(k + 1) * self.width]
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.probs[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.states.chunks(self.width.max(1)).zip(self.probs.iter().copied())
    }
}

/// Canonical parent order of `v`: by topological rank.
pub fn canonical_parents(g: &Dag, v: usize) -> Vec<usize> {
    let mut p = g.parents_of(v).to_vec();
    g.sort_topologically(&mut p);
    p
}

impl DiscreteBn {
    /// Builds and validates a network. `tables[v]` is the flattened CPT of
    /// vertex `v` in canonical layout.
    pub fn new(graph: Dag, cards: Vec<usize>, tables: Vec<Vec<f64>>) -> Result<DiscreteBn> {
        let n = graph.n();
        if cards.len() != n || tables.len() != n {
            return Err(Error::InvalidCpt {
                vertex: "*".into(),
                msg: "need one cardinality and one table per vertex".into(),
            });
        }
        let mut cpts = Vec::with_capacity(n);
        for (v, table) in tables.into_iter().enumerate() {
            if cards[v] == 0 {
                return Err(Error::InvalidCpt {
                    vertex: graph.label(v).into(),
                    msg: "cardinality must be at least 1".into(),
                });
            }
            let parents = canonical_parents(&graph, v);
            let rows: usize = parents.iter().map(|&p| cards[p]).product();
            if table.len() != rows * cards[v] {
                return Err(Error::InvalidCpt {
                    vertex: graph.label(v).into(),
                    msg: format!("expected {} x {} entries, got {}", rows, cards[v], table.len()),
                });
            }
            cpts.push(Cpt::new(parents, &cards, cards[v], table));
        }
        let bn = DiscreteBn { graph, cards, cpts };
        bn.check_rows()?;
        Ok(bn)
    }

    pub fn graph(&self) -> &Dag {
        &self.graph
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn card(&self, v: usize) -> usize {
        self.cards[v]
    }

    pub fn cpt(&self, v: usize) -> &Cpt {
        &self.cpts[v]
    }

    fn check_rows(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (v, cpt) in self.cpts.iter().enumerate() {
            for r in 0..cpt.n_rows() {
                let row = cpt.row(r);
                if let Some(&x) = row.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                    return Err(Error::InvalidCpt {
                        vertex: self.graph.label(v).into(),
                        msg: format!("entry {x} outside [0, 1] in row {:?}", cpt.parent_states(r, &self.cards)),
                    });
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::Normalization {
                        vertex: self.graph.label(v).into(),
                        row: cpt.parent_states(r, &self.cards),
                        sum,
                    });
                }
                worst = worst.max((sum - 1.0).abs());
            }
        }
        Ok(worst)
    }

    /// Re-checks every row and, when asked, that `P(A = a | pa) ≥ epsilon`
    /// for every parent state of the treatment.
    pub fn validate(&self, positivity: Option<(usize, f64)>) -> Result<Certificate> {
        let max_row_error = self.check_rows()?;
        let min_treatment_prob = match positivity {
            None => None,
            Some((a, eps)) => Some(self.check_positivity(a, eps)?),
        };
        Ok(Certificate { configurations: self.n_configs(), max_row_error, min_treatment_prob })
    }

    pub fn check_positivity(&self, a: usize, eps: f64) -> Result<f64> {
        let t = self.graph.treatment();
        let cpt = &self.cpts[t];
        if a >= cpt.card {
            return Err(Error::StateOutOfRange {
                vertex: self.graph.label(t).into(),
                state: a,
                card: cpt.card,
            });
        }
        let mut min = f64::INFINITY;
        for r in 0..cpt.n_rows() {
            let p = cpt.row(r)[a];
            if p < eps {
                return Err(Error::Positivity {
                    treatment: self.graph.label(t).into(),
                    level: a,
                    parents: cpt.parents.iter().map(|&p| self.graph.label(p).to_string()).collect(),
                    state: cpt.parent_states(r, &self.cards),
                    prob: p,
                    epsilon: eps,
                });
            }
            min = min.min(p);
        }
        Ok(min)
    }

    pub fn n_configs(&self) -> u128 {
        self.cards.iter().map(|&c| c as u128).product()
    }

    fn check_enumerable(&self) -> Result<()> {
        let k = self.n_configs();
        if k > MAX_CONFIGS {
            Err(Error::StateSpaceTooLarge(k))
        } else {
            Ok(())
        }
    }

    fn check_state(&self, state: &[usize]) -> Result<()> {
        if state.len() != self.graph.n() {
            return Err(Error::Precondition(format!(
                "state has {} entries, graph has {} vertices",
                state.len(),
                self.graph.n()
            )));
        }
        for (v, &s) in state.iter().enumerate() {
            if s >= self.cards[v] {
                return Err(Error::StateOutOfRange {
                    vertex: self.graph.label(v).into(),
                    state: s,
                    card: self.cards[v],
                });
            }
        }
        Ok(())
    }

    pub(crate) fn joint_unchecked(&self, state: &[usize]) -> f64 {
        self.cpts
            .iter()
            .enumerate()
            .map(|(v, c)| c.prob(state, state[v]))
            .product()
    }

    /// `p(v)` for a full configuration given in declaration order.
    pub fn joint_prob(&self, state: &[usize]) -> Result<f64> {
        self.check_state(state)?;
        Ok(self.joint_unchecked(state))
    }

    /// Enumerates every configuration (last vertex varying fastest).
    pub fn enumerate(&self) -> Result<Joint> {
        self.check_enumerable()?;
        let n = self.graph.n();
        let total = self.n_configs() as usize;
        let mut states = Vec::with_capacity(total * n);
        let mut probs = Vec::with_capacity(total);
        let mut cur = vec![0usize; n];
        for _ in 0..total {
            states.extend_from_slice(&cur);
            probs.push(self.joint_unchecked(&cur));
            for v in (0..n).rev() {
                cur[v] += 1;
                if cur[v] < self.cards[v] {
                    break;
                }
                cur[v] = 0;
            }
        }
        Ok(Joint { width: n, states, probs })
    }

    /// `E[f(V) | given]` by enumeration; `given` lists `(vertex, state)`.
    pub fn cond_expectation<F: Fn(&[usize]) -> f64>(&self, f: F, given: &[(usize, usize)]) -> Result<f64> {
        for &(v, s) in given {
            if v >= self.graph.n() || s >= self.cards[v] {
                return Err(Error::Precondition("conditioning assignment out of range".into()));
            }
        }
        let joint = self.enumerate()?;
        let (mut num, mut den) = (0.0, 0.0);
        for (st, p) in joint.iter() {
            if given.iter().all(|&(v, s)| st[v] == s) {
                num += p * f(st);
                den += p;
            }
        }
        if den <= 0.0 {
            let desc: Vec<String> = given
                .iter()
                .map(|&(v, s)| format!("{}={}", self.graph.label(v), s))
                .collect();
            return Err(Error::ZeroConditioningEvent(desc.join(", ")));
        }
        Ok(num / den)
    }

    /// Label-keyed form of [`DiscreteBn::cond_expectation`].
    pub fn cond_expectation_labels<F: Fn(&[usize]) -> f64>(
        &self,
        f: F,
        given: &[(&str, usize)],
    ) -> Result<f64> {
        let g = given
            .iter()
            .map(|&(l, s)| Ok((self.graph.index_of(l)?, s)))
            .collect::<Result<Vec<_>>>()?;
        self.cond_expectation(f, &g)
    }

    /// Law with each CPT row drawn as `eps + (1 - card * eps) * D`, where
    /// `D` is a flat Dirichlet draw. Requires `0 < eps < 1 / card` for every
    /// vertex so that all entries are at least `eps`.
    pub fn random_law(g: &Dag, cards: &[usize], seed: u64, eps: f64) -> Result<DiscreteBn> {
        if cards.len() != g.n() {
            return Err(Error::Precondition("need one cardinality per vertex".into()));
        }
        if let Some(v) = (0..g.n()).find(|&v| !(eps > 0.0 && eps * (cards[v] as f64) < 1.0)) {
            return Err(Error::Precondition(format!(
                "epsilon {eps} infeasible for {} with {} states",
                g.label(v),
                cards[v]
            )));
        }
        let mut rng = rng::stream(seed);
        let mut tables = Vec::with_capacity(g.n());
        for v in 0..g.n() {
            let rows: usize = g.parents_of(v).iter().map(|&p| cards[p]).product();
            let k = cards[v];
            let mut table = Vec::with_capacity(rows * k);
            for _ in 0..rows {
                let draws: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
                let total: f64 = draws.iter().sum();
                let scale = 1.0 - k as f64 * eps;
                let row: Vec<f64> = draws.iter().map(|d| eps + scale * d / total).collect();
                let s: f64 = row.iter().sum();
                table.extend(row.iter().map(|x| x / s));
            }
            tables.push(table);
        }
        DiscreteBn::new(g.clone(), cards.to_vec(), tables)
    }

    /// Marginal law over the vertices of `target`, factorized along
    /// `target`: each CPT is `P(v | Pa(v, target))` computed from the joint.
    /// Rows whose parent state has probability zero are set uniform.
    pub fn marginalize(&self, target: &Dag) -> Result<DiscreteBn> {
        if target.treatment_label() != self.graph.treatment_label()
            || target.outcome_label() != self.graph.outcome_label()
        {
            return Err(Error::Precondition("target graph has a different treatment or outcome".into()));
        }
        let map: Vec<usize> = target
            .labels()
            .iter()
            .map(|l| self.graph.index_of(l))
            .collect::<Result<_>>()?;
        let cards: Vec<usize> = map.iter().map(|&v| self.cards[v]).collect();
        let joint = self.enumerate()?;
        let mut tables = Vec::with_capacity(target.n());
        for v in 0..target.n() {
            let parents = canonical_parents(target, v);
            let shell = Cpt::new(parents.clone(), &cards, cards[v], vec![]);
            let rows: usize = parents.iter().map(|&p| cards[p]).product();
            let mut acc = vec![0.0; rows * cards[v]];
            let mut sub = vec![0; target.n()];
            for (st, p) in joint.iter() {
                for (k, &u) in map.iter().enumerate() {
                    sub[k] = st[u];
                }
                acc[shell.row_of(&sub) * cards[v] + sub[v]] += p;
            }
            for r in 0..rows {
                let row = &mut acc[r * cards[v]..(r + 1) * cards[v]];
                let s: f64 = row.iter().sum();
                for x in row.iter_mut() {
                    *x = if s > 0.0 { *x / s } else { 1.0 / cards[v] as f64 };
                }
            }
            tables.push(acc);
        }
        DiscreteBn::new(target.clone(), cards, tables)
    }

    /// Copy with row `r` of vertex `v` replaced by `(1 - t) * row + t * other`.
    pub fn perturbed(&self, v: usize, r: usize, other: &[f64], t: f64) -> Result<DiscreteBn> {
        let mut out = self.clone();
        let card = self.cards[v];
        if other.len() != card || r >= self.cpts[v].n_rows() {
            return Err(Error::Precondition("perturbation row has the wrong shape".into()));
        }
        let row = &mut out.cpts[v].table[r * card..(r + 1) * card];
        for (x, &o) in row.iter_mut().zip(other) {
            *x = (1.0 - t) * *x + t * o;
        }
        Ok(out)
    }

    /// Draws `n` i.i.d. rows by ancestral sampling.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset> {
        if n == 0 {
            return Err(Error::Precondition("sample size must be positive".into()));
        }
        Ok(self.sample_with(n, &mut rng::stream(seed)))
    }

    pub fn sample_with(&self, n: usize, rng: &mut Rng) -> Dataset {
        let k = self.graph.n();
        let mut data = vec![0usize; n * k];
        for i in 0..n {
            let row = &mut data[i * k..(i + 1) * k];
            for &v in self.graph.topo_order() {
                let cpt = &self.cpts[v];
                let probs = cpt.row(cpt.row_of(row));
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut s = probs.len() - 1;
                for (j, &p) in probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        s = j;
                        break;
                    }
                }
                row[v] = s;
            }
        }
        Dataset::from_parts(self.graph.labels().to_vec(), data)
            .expect("sampled rows match the column count")
    }
}
