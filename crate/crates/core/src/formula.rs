//! Symbolic g-formulas and their renderings.
//!
//! A formula is the truncated factorization of a graph: one factor
//! `p(v | pa(v))` per non-treatment vertex, with the treatment fixed at the
//! level placeholder `a` wherever it appears as a parent.

use std::collections::{BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::bn::DiscreteBn;
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::taxonomy::check_assumption;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub child: String,
    /// Parents in topological order (including the treatment, if present).
    pub parents: Vec<String>,
    pub substitute_a: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GFormula {
    pub target: String,
    pub treatment: String,
    pub outcome: String,
    /// Summation variables, outcome first and then working back towards
    /// the roots.
    pub sum_vars: Vec<String>,
    /// Factors in topological order of their child.
    pub factors: Vec<Factor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Format> {
        match s {
            "text" => Ok(Format::Text),
            "latex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            _ => Err(Error::Precondition(format!("unknown format `{s}`"))),
        }
    }
}

// Sinks first; ties go to the earliest declared vertex.
fn outcome_first(g: &Dag) -> Vec<usize> {
    let mut outdeg: Vec<usize> = (0..g.n()).map(|v| g.children_of(v).len()).collect();
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..g.n()).filter(|&v| outdeg[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(g.n());
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &p in g.parents_of(v) {
            outdeg[p] -= 1;
            if outdeg[p] == 0 {
                ready.push(Reverse(p));
            }
        }
    }
    order
}

/// The g-formula of `g`.
pub fn derive_gformula(g: &Dag) -> Result<GFormula> {
    check_assumption(g)?;
    let t = g.treatment();
    let factors = g
        .topo_order()
        .iter()
        .filter(|&&v| v != t)
        .map(|&v| {
            let mut pa = g.parents_of(v).to_vec();
            g.sort_topologically(&mut pa);
            Factor {
                child: g.label(v).to_string(),
                parents: pa.iter().map(|&p| g.label(p).to_string()).collect(),
                substitute_a: pa.contains(&t),
            }
        })
        .collect();
    let sum_vars = outcome_first(g)
        .into_iter()
        .filter(|&v| v != t)
        .map(|v| g.label(v).to_string())
        .collect();
    Ok(GFormula {
        target: "a".into(),
        treatment: g.treatment_label().to_string(),
        outcome: g.outcome_label().to_string(),
        sum_vars,
        factors,
    })
}

fn latex_name(label: &str) -> String {
    let lower = label.to_lowercase();
    let stem = lower.trim_end_matches(|c: char| c.is_ascii_digit());
    let digits = &lower[stem.len()..];
    let stem = stem.replace('_', "\\_");
    match (stem.is_empty(), digits.len()) {
        (true, _) | (false, 0) => format!("{stem}{digits}"),
        (false, 1) => format!("{stem}_{digits}"),
        _ => format!("{stem}_{{{digits}}}"),
    }
}

impl GFormula {
    fn factor_of(&self, child: &str) -> Option<&Factor> {
        self.factors.iter().find(|f| f.child == child)
    }

    // Factors in summation order; conditioning lists start with `a`.
    fn pieces(&self, name: impl Fn(&str) -> String) -> Vec<(String, Vec<String>)> {
        self.sum_vars
            .iter()
            .filter_map(|v| self.factor_of(v))
            .map(|f| {
                let mut given = Vec::new();
                if f.substitute_a {
                    given.push(self.target.clone());
                }
                given.extend(f.parents.iter().filter(|p| **p != self.treatment).map(|p| name(p)));
                (name(&f.child), given)
            })
            .collect()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("formula serializes"),
            Format::Text => {
                let name = |l: &str| l.to_lowercase();
                let vars: Vec<String> = self.sum_vars.iter().map(|v| name(v)).collect();
                let mut out = if vars.len() == 1 {
                    format!("sum_{} ", vars[0])
                } else {
                    format!("sum_{{{}}} ", vars.join(","))
                };
                out.push_str(&name(&self.outcome));
                for (c, given) in self.pieces(name) {
                    if given.is_empty() {
                        out.push_str(&format!(" * p({c})"));
                    } else {
                        out.push_str(&format!(" * p({c}|{})", given.join(",")));
                    }
                }
                out
            }
            Format::Latex => {
                let vars: Vec<String> = self.sum_vars.iter().map(|v| latex_name(v)).collect();
                let mut out = format!("\\sum_{{{}}} {}", vars.join(", "), latex_name(&self.outcome));
                for (c, given) in self.pieces(latex_name) {
                    if given.is_empty() {
                        out.push_str(&format!(" \\, p({c})"));
                    } else {
                        out.push_str(&format!(" \\, p({c} \\mid {})", given.join(", ")));
                    }
                }
                out
            }
        }
    }

    pub fn from_json(text: &str) -> Result<GFormula> {
        Ok(serde_json::from_str(text)?)
    }

    /// Labels mentioned anywhere in the formula.
    pub fn labels(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.sum_vars.iter().cloned().collect();
        for f in &self.factors {
            out.insert(f.child.clone());
            out.extend(f.parents.iter().cloned());
        }
        out.insert(self.treatment.clone());
        out
    }

    /// Evaluates the formula at level `a`, computing every factor as a
    /// conditional of the joint law of `bn`.
    pub fn evaluate(&self, bn: &DiscreteBn, a: usize) -> Result<f64> {
        let g = bn.graph();
        let t = g.index_of(&self.treatment)?;
        let y = g.index_of(&self.outcome)?;
        let cards = bn.cards();
        if a >= cards[t] {
            return Err(Error::StateOutOfRange { vertex: self.treatment.clone(), state: a, card: cards[t] });
        }
        // For each factor: child index, parent indices and p(child, parents).
        let mut tables = Vec::with_capacity(self.factors.len());
        let joint = bn.enumerate()?;
        for f in &self.factors {
            let c = g.index_of(&f.child)?;
            let pa = f.parents.iter().map(|p| g.index_of(p)).collect::<Result<Vec<_>>>()?;
            let rows: usize = pa.iter().map(|&p| cards[p]).product();
            let mut acc = vec![0.0; rows * cards[c]];
            for (st, p) in joint.iter() {
                let r = pa.iter().fold(0, |acc, &q| acc * cards[q] + st[q]);
                acc[r * cards[c] + st[c]] += p;
            }
            tables.push((c, pa, acc));
        }
        let mut state = vec![0usize; g.n()];
        state[t] = a;
        self.eval_rec(&tables, cards, y, 0, 1.0, &mut state)
    }

    fn eval_rec(
        &self,
        tables: &[(usize, Vec<usize>, Vec<f64>)],
        cards: &[usize],
        y: usize,
        k: usize,
        weight: f64,
        state: &mut [usize],
    ) -> Result<f64> {
        if k == tables.len() {
            return Ok(weight * state[y] as f64);
        }
        let (c, pa, acc) = &tables[k];
        let r = pa.iter().fold(0, |a, &q| a * cards[q] + state[q]);
        let row = &acc[r * cards[*c]..(r + 1) * cards[*c]];
        let total: f64 = row.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroConditioningEvent(format!(
                "parents of {} in factor {k}",
                self.factors[k].child
            )));
        }
        let mut out = 0.0;
        for (s, &p) in row.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            state[*c] = s;
            out += self.eval_rec(tables, cards, y, k + 1, weight * p / total, state)?;
        }
        Ok(out)
    }
}
