//! Exact identifying functionals, the efficient influence function and
//! plugin estimators.
//!
//! The outcome enters every formula through its state index, so for a
//! binary outcome the functionals are probabilities `P(Y(a) = 1)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bn::{Dataset, DiscreteBn, Joint};
use crate::error::{Error, Result};
use crate::graph::{Dag, VertexSet};
use crate::taxonomy::classify_masks;

/// Source of conditional distributions `p(v | pa(v))` for the g-formula.
pub trait CondTable {
    /// Distribution of `v` given the parent states found in `state`, or
    /// `None` when it is undefined.
    fn row(&self, v: usize, state: &[usize]) -> Option<&[f64]>;
}

impl CondTable for DiscreteBn {
    fn row(&self, v: usize, state: &[usize]) -> Option<&[f64]> {
        let c = self.cpt(v);
        Some(c.row(c.row_of(state)))
    }
}

/// Evaluates the truncated factorization with `A = a` over the ancestors of
/// `Y`. Undefined rows reached with positive weight are returned as
/// `(vertex, state)` pairs.
pub fn g_formula_sum<T: CondTable>(
    g: &Dag,
    cards: &[usize],
    a: usize,
    table: &T,
) -> std::result::Result<f64, Vec<(usize, Vec<usize>)>> {
    let an_y = g.ancestors_mask(&[g.outcome()]);
    let order: Vec<usize> = g
        .topo_order()
        .iter()
        .copied()
        .filter(|&v| an_y[v] && v != g.treatment())
        .collect();
    let mut state = vec![0usize; g.n()];
    state[g.treatment()] = a;
    let mut missing = BTreeSet::new();
    let total = dfs(g, cards, table, &order, 0, 1.0, &mut state, &mut missing);
    if missing.is_empty() {
        Ok(total)
    } else {
        Err(missing.into_iter().collect())
    }
}

#[allow(clippy::too_many_arguments)]
fn dfs<T: CondTable>(
    g: &Dag,
    cards: &[usize],
    table: &T,
    order: &[usize],
    k: usize,
    weight: f64,
    state: &mut [usize],
    missing: &mut BTreeSet<(usize, Vec<usize>)>,
) -> f64 {
    if k == order.len() {
        return weight * state[g.outcome()] as f64;
    }
    let v = order[k];
    let Some(row) = table.row(v, state) else {
        missing.insert((v, state.to_vec()));
        return 0.0;
    };
    let mut total = 0.0;
    for (s, &p) in row.iter().enumerate().take(cards[v]) {
        if p == 0.0 {
            continue;
        }
        state[v] = s;
        total += dfs(g, cards, table, order, k + 1, weight * p, state, missing);
    }
    state[v] = 0;
    total
}

fn require_positive(bn: &DiscreteBn, a: usize) -> Result<()> {
    bn.check_positivity(a, f64::MIN_POSITIVE).map(|_| ())
}

/// `Ψ_a`: the g-formula of the network's own graph at treatment level `a`.
pub fn g_functional_exact(bn: &DiscreteBn, a: usize) -> Result<f64> {
    require_positive(bn, a)?;
    g_formula_sum(bn.graph(), bn.cards(), a, bn)
        .map_err(|_| Error::Internal("network rows are always defined".into()))
}

fn mixed_index(state: &[usize], vars: &[usize], cards: &[usize]) -> usize {
    vars.iter().fold(0, |acc, &v| acc * cards[v] + state[v])
}

fn space(vars: &[usize], cards: &[usize]) -> usize {
    vars.iter().map(|&v| cards[v]).product()
}

fn describe(g: &Dag, vars: &[usize], mut idx: usize, cards: &[usize]) -> String {
    let mut st = vec![0; vars.len()];
    for k in (0..vars.len()).rev() {
        st[k] = idx % cards[vars[k]];
        idx /= cards[vars[k]];
    }
    let parts: Vec<String> = vars.iter().zip(&st).map(|(&v, s)| format!("{}={}", g.label(v), s)).collect();
    parts.join(", ")
}

/// `Σ_l E[Y | A = a, L = l] P(l)`.
pub fn adjustment_exact(bn: &DiscreteBn, l: &VertexSet, a: usize) -> Result<f64> {
    let g = bn.graph();
    let vars = g.indices_of(l)?;
    let (t, y) = (g.treatment(), g.outcome());
    let cards = bn.cards();
    let k = space(&vars, cards);
    let (mut pl, mut pal, mut eyl) = (vec![0.0; k], vec![0.0; k], vec![0.0; k]);
    for (st, p) in bn.enumerate()?.iter() {
        let i = mixed_index(st, &vars, cards);
        pl[i] += p;
        if st[t] == a {
            pal[i] += p;
            eyl[i] += p * st[y] as f64;
        }
    }
    let mut total = 0.0;
    for i in 0..k {
        if pl[i] == 0.0 {
            continue;
        }
        if pal[i] == 0.0 {
            return Err(Error::ZeroConditioningEvent(format!(
                "{}={a}, {}",
                g.label(t),
                describe(g, &vars, i, cards)
            )));
        }
        total += eyl[i] / pal[i] * pl[i];
    }
    Ok(total)
}

/// `Σ_m p(m | a) Σ_{a'} E[Y | a', m] p(a')`.
///
/// Cells with `p(a', m) = 0` are left out of the inner sum, whose weights
/// are then renormalized over the remaining levels.
pub fn front_door_exact(bn: &DiscreteBn, m: &VertexSet, a: usize) -> Result<f64> {
    let g = bn.graph();
    let vars = g.indices_of(m)?;
    let (t, y) = (g.treatment(), g.outcome());
    let cards = bn.cards();
    let (ka, km) = (cards[t], space(&vars, cards));
    let mut pa = vec![0.0; ka];
    let mut pam = vec![0.0; ka * km];
    let mut eyam = vec![0.0; ka * km];
    for (st, p) in bn.enumerate()?.iter() {
        let i = mixed_index(st, &vars, cards);
        pa[st[t]] += p;
        pam[st[t] * km + i] += p;
        eyam[st[t] * km + i] += p * st[y] as f64;
    }
    if a >= ka || pa[a] == 0.0 {
        return Err(Error::ZeroConditioningEvent(format!("{}={a}", g.label(t))));
    }
    let mut total = 0.0;
    for i in 0..km {
        let pm_a = pam[a * km + i] / pa[a];
        if pm_a == 0.0 {
            continue;
        }
        // Treatment levels never seen with this mediator state are dropped
        // and the remaining p(a') renormalized.
        let (mut inner, mut mass) = (0.0, 0.0);
        for ap in (0..ka).filter(|&ap| pam[ap * km + i] > 0.0) {
            inner += eyam[ap * km + i] / pam[ap * km + i] * pa[ap];
            mass += pa[ap];
        }
        total += pm_a * inner / mass;
    }
    Ok(total)
}

/// Precomputed pieces of the efficient influence function at level `a`.
///
/// `b(o) = E[Y | A = a, O = o]`, `rho(o') = P(A = a | O_min = o')`, and the
/// influence function is evaluated once for every configuration of
/// positive probability.
#[derive(Debug, Clone)]
pub struct EifContext {
    pub level: usize,
    pub o: Vec<usize>,
    pub o_min: Vec<usize>,
    /// Indexed by the mixed-radix state of `o` (first vertex slowest);
    /// `NaN` where `P(A = a, O = o) = 0`.
    pub b_table: Vec<f64>,
    /// Indexed by the mixed-radix state of `o_min`; `NaN` where `P(o') = 0`.
    pub rho_table: Vec<f64>,
    psi: f64,
    cards: Vec<usize>,
    joint: Joint,
    values: Vec<f64>,
}

impl EifContext {
    pub fn new(bn: &DiscreteBn, a: usize) -> Result<EifContext> {
        let g = bn.graph();
        require_positive(bn, a)?;
        let masks = classify_masks(g)?;
        let cards = bn.cards().to_vec();
        let (t, y) = (g.treatment(), g.outcome());
        let o: Vec<usize> = (0..g.n()).filter(|&v| masks.o[v]).collect();
        let o_min: Vec<usize> = (0..g.n()).filter(|&v| masks.o_min[v]).collect();
        let joint = bn.enumerate()?;

        let ko = space(&o, &cards);
        let (mut pao, mut eyo) = (vec![0.0; ko], vec![0.0; ko]);
        let km = space(&o_min, &cards);
        let (mut pm, mut pam) = (vec![0.0; km], vec![0.0; km]);
        for (st, p) in joint.iter() {
            let im = mixed_index(st, &o_min, &cards);
            pm[im] += p;
            if st[t] == a {
                pam[im] += p;
                let io = mixed_index(st, &o, &cards);
                pao[io] += p;
                eyo[io] += p * st[y] as f64;
            }
        }
        let b_table: Vec<f64> = (0..ko)
            .map(|i| if pao[i] > 0.0 { eyo[i] / pao[i] } else { f64::NAN })
            .collect();
        let mut rho_table = vec![f64::NAN; km];
        for i in 0..km {
            if pm[i] > 0.0 {
                if pam[i] <= 0.0 {
                    return Err(Error::Positivity {
                        treatment: g.label(t).into(),
                        level: a,
                        parents: o_min.iter().map(|&v| g.label(v).to_string()).collect(),
                        state: describe_state(&o_min, i, &cards),
                        prob: 0.0,
                        epsilon: 0.0,
                    });
                }
                rho_table[i] = pam[i] / pm[i];
            }
        }

        let b_of = |st: &[usize]| b_table[mixed_index(st, &o, &cards)];
        let t_of = |st: &[usize]| {
            if st[t] == a {
                st[y] as f64 / rho_table[mixed_index(st, &o_min, &cards)]
            } else {
                0.0
            }
        };
        let mut values = vec![0.0; joint.len()];
        for u in 0..g.n() {
            let is_w = masks.w[u];
            if !is_w && !masks.m[u] {
                continue;
            }
            let cpt = bn.cpt(u);
            let (rows, card) = (cpt.n_rows(), cpt.card());
            let (mut num_pu, mut den_pu) = (vec![0.0; rows * card], vec![0.0; rows * card]);
            let (mut num_p, mut den_p) = (vec![0.0; rows], vec![0.0; rows]);
            for (st, p) in joint.iter() {
                if p == 0.0 {
                    continue;
                }
                let f = if is_w { b_of(st) } else { t_of(st) };
                let r = cpt.row_of(st);
                num_pu[r * card + st[u]] += p * f;
                den_pu[r * card + st[u]] += p;
                num_p[r] += p * f;
                den_p[r] += p;
            }
            for (k, (st, p)) in joint.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let r = cpt.row_of(st);
                let c = r * card + st[u];
                values[k] += num_pu[c] / den_pu[c] - num_p[r] / den_p[r];
            }
        }
        for (k, (_, p)) in joint.iter().enumerate() {
            if p == 0.0 {
                values[k] = f64::NAN;
            }
        }
        let psi = g_functional_exact(bn, a)?;
        Ok(EifContext { level: a, o, o_min, b_table, rho_table, psi, cards, joint, values })
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    /// Influence function at a full configuration of positive probability.
    pub fn eif_at(&self, state: &[usize]) -> Result<f64> {
        if state.len() != self.cards.len() || state.iter().zip(&self.cards).any(|(s, c)| s >= c) {
            return Err(Error::Precondition("state does not match the network".into()));
        }
        let idx = state.iter().zip(&self.cards).fold(0, |acc, (&s, &c)| acc * c + s);
        let v = self.values[idx];
        if v.is_nan() {
            Err(Error::ZeroConditioningEvent("configuration outside the support".into()))
        } else {
            Ok(v)
        }
    }

    /// `(configuration, probability, influence value)` over the support.
    pub fn support(&self) -> impl Iterator<Item = (&[usize], f64, f64)> {
        self.joint
            .iter()
            .zip(&self.values)
            .filter(|((_, p), _)| *p > 0.0)
            .map(|((s, p), &v)| (s, p, v))
    }

    pub fn mean(&self) -> f64 {
        self.support().map(|(_, p, v)| p * v).sum()
    }

    pub fn variance(&self) -> f64 {
        self.support().map(|(_, p, v)| p * v * v).sum()
    }
}

fn describe_state(vars: &[usize], mut idx: usize, cards: &[usize]) -> Vec<usize> {
    let mut st = vec![0; vars.len()];
    for k in (0..vars.len()).rev() {
        st[k] = idx % cards[vars[k]];
        idx /= cards[vars[k]];
    }
    st
}

pub fn eif_exact(bn: &DiscreteBn, a: usize, v: &[usize]) -> Result<f64> {
    EifContext::new(bn, a)?.eif_at(v)
}

/// Semiparametric variance bound: the variance of the influence function.
pub fn eif_variance(bn: &DiscreteBn, a: usize) -> Result<f64> {
    Ok(EifContext::new(bn, a)?.variance())
}

/// Asymptotic variance of the nonparametric adjustment estimator with
/// covariates `l`, from its influence function
/// `I(A=a) / P(A=a | l) * (Y - b(l)) + b(l) - Ψ`.
pub fn adjustment_if_variance(bn: &DiscreteBn, l: &VertexSet, a: usize) -> Result<f64> {
    let g = bn.graph();
    let vars = g.indices_of(l)?;
    let (t, y) = (g.treatment(), g.outcome());
    let cards = bn.cards();
    let k = space(&vars, cards);
    let (mut pl, mut pal, mut eyl) = (vec![0.0; k], vec![0.0; k], vec![0.0; k]);
    let joint = bn.enumerate()?;
    for (st, p) in joint.iter() {
        let i = mixed_index(st, &vars, cards);
        pl[i] += p;
        if st[t] == a {
            pal[i] += p;
            eyl[i] += p * st[y] as f64;
        }
    }
    let psi = adjustment_exact(bn, l, a)?;
    let mut var = 0.0;
    for (st, p) in joint.iter() {
        if p == 0.0 {
            continue;
        }
        let i = mixed_index(st, &vars, cards);
        let b = eyl[i] / pal[i];
        let ind = if st[t] == a { 1.0 } else { 0.0 };
        let phi = ind / (pal[i] / pl[i]) * (st[y] as f64 - b) + b - psi;
        var += p * phi * phi;
    }
    Ok(var)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationStats {
    pub replications: usize,
    pub mean: f64,
    pub variance: f64,
    pub n_times_variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimator: String,
    pub level: usize,
    pub value: f64,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub replication: Option<ReplicationStats>,
}

/// Conditional frequency tables of a dataset along a graph.
struct Empirical {
    rows: Vec<Vec<f64>>,
    defined: Vec<Vec<bool>>,
    strides: Vec<Vec<(usize, usize)>>,
    cards: Vec<usize>,
}

impl Empirical {
    fn new(data: &Dataset, g: &Dag, laplace: f64) -> Result<Empirical> {
        let cols: Vec<usize> = g.labels().iter().map(|l| data.column(l)).collect::<Result<_>>()?;
        let observed = data.observed_cards();
        let cards: Vec<usize> = cols.iter().map(|&c| observed[c]).collect();
        let mut rows = Vec::with_capacity(g.n());
        let mut defined = Vec::with_capacity(g.n());
        let mut strides = Vec::with_capacity(g.n());
        for v in 0..g.n() {
            let parents = crate::bn::canonical_parents(g, v);
            let mut st = Vec::with_capacity(parents.len());
            let mut s = 1;
            for &p in parents.iter().rev() {
                st.push((p, s));
                s *= cards[p];
            }
            let n_rows = s;
            let card = cards[v];
            let mut counts = vec![0.0; n_rows * card];
            for i in 0..data.n() {
                let row = data.row(i);
                let r: usize = st.iter().map(|&(p, k)| row[cols[p]] * k).sum();
                counts[r * card + row[cols[v]]] += data.weight(i);
            }
            let mut ok = vec![false; n_rows];
            for r in 0..n_rows {
                let cell = &mut counts[r * card..(r + 1) * card];
                let total: f64 = cell.iter().sum::<f64>() + laplace * card as f64;
                if total > 0.0 {
                    ok[r] = true;
                    for x in cell.iter_mut() {
                        *x = (*x + laplace) / total;
                    }
                }
            }
            rows.push(counts);
            defined.push(ok);
            strides.push(st);
        }
        Ok(Empirical { rows, defined, strides, cards })
    }
}

impl CondTable for Empirical {
    fn row(&self, v: usize, state: &[usize]) -> Option<&[f64]> {
        let r: usize = self.strides[v].iter().map(|&(p, k)| state[p] * k).sum();
        let card = self.cards[v];
        self.defined[v][r].then(|| &self.rows[v][r * card..(r + 1) * card])
    }
}

fn empty_cells(g: &Dag, missing: Vec<(usize, Vec<usize>)>) -> Error {
    let cells = missing
        .into_iter()
        .map(|(v, st)| {
            let pa = crate::bn::canonical_parents(g, v);
            let given: Vec<String> = pa.iter().map(|&p| format!("{}={}", g.label(p), st[p])).collect();
            format!("p({} | {})", g.label(v), given.join(", "))
        })
        .collect();
    Error::EmptyCell(cells)
}

/// Maximum-likelihood plugin of the g-formula of `g`, optionally with
/// additive smoothing `laplace` on every conditional table.
pub fn plugin_g(data: &Dataset, g: &Dag, a: usize, laplace: f64) -> Result<EstimateReport> {
    if laplace < 0.0 {
        return Err(Error::Precondition("smoothing must be non-negative".into()));
    }
    let emp = Empirical::new(data, g, laplace)?;
    let mut cards = emp.cards.clone();
    cards[g.treatment()] = cards[g.treatment()].max(a + 1);
    let value = g_formula_sum(g, &cards, a, &emp).map_err(|m| empty_cells(g, m))?;
    Ok(EstimateReport { estimator: "plugin_g".into(), level: a, value, n: data.n(), replication: None })
}

/// `Σ_l P_n(l) · mean(Y | A = a, l)`, the empirical adjustment formula.
pub fn plugin_adjustment(data: &Dataset, g: &Dag, l: &VertexSet, a: usize) -> Result<EstimateReport> {
    let t = data.column(g.treatment_label())?;
    let y = data.column(g.outcome_label())?;
    let cols: Vec<usize> = l.iter().map(|x| data.column(x)).collect::<Result<_>>()?;
    let mut cells: std::collections::BTreeMap<Vec<usize>, [f64; 3]> = Default::default();
    let mut total = 0.0;
    for i in 0..data.n() {
        let row = data.row(i);
        let w = data.weight(i);
        let key: Vec<usize> = cols.iter().map(|&c| row[c]).collect();
        let cell = cells.entry(key).or_insert([0.0; 3]);
        cell[0] += w;
        if row[t] == a {
            cell[1] += w;
            cell[2] += w * row[y] as f64;
        }
        total += w;
    }
    let mut value = 0.0;
    let mut missing = Vec::new();
    let names: Vec<&str> = l.iter().collect();
    for (key, [nl, nal, syl]) in &cells {
        if *nl == 0.0 {
            continue;
        }
        if *nal == 0.0 {
            let given: Vec<String> = names.iter().zip(key).map(|(n, s)| format!("{n}={s}")).collect();
            missing.push(format!("E({} | {}={a}, {})", g.outcome_label(), g.treatment_label(), given.join(", ")));
            continue;
        }
        value += nl / total * syl / nal;
    }
    if !missing.is_empty() {
        return Err(Error::EmptyCell(missing));
    }
    Ok(EstimateReport {
        estimator: "plugin_adjustment".into(),
        level: a,
        value,
        n: data.n(),
        replication: None,
    })
}

/// Dataset holding every configuration of `bn` once, weighted by its
/// probability.
pub fn population_dataset(bn: &DiscreteBn) -> Result<Dataset> {
    let joint = bn.enumerate()?;
    let mut data = Vec::with_capacity(joint.len() * bn.graph().n());
    let mut w = Vec::with_capacity(joint.len());
    for (st, p) in joint.iter() {
        data.extend_from_slice(st);
        w.push(p);
    }
    Dataset::weighted(bn.graph().labels().to_vec(), data, w)
}
