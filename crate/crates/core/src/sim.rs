//! Monte-Carlo comparison of the full plugin, the reduced plugin and the
//! optimal adjustment estimator on the six-vertex example graph.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bn::{canonical_parents, Dataset, DiscreteBn};
use crate::error::{Error, Result};
use crate::functionals::{plugin_adjustment, plugin_g};
use crate::golden;
use crate::graph::{Dag, VertexSet};
use crate::rng::replication_stream;

/// Redraws allowed per replication before giving up.
pub const MAX_REDRAWS: usize = 1000;

pub const ESTIMATORS: [&str; 3] = ["adjustment", "plugin_g_original", "plugin_g_reduced"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    A,
    B,
}

impl Setting {
    /// Default `(m, k)`.
    pub fn defaults(self) -> (usize, usize) {
        match self {
            Setting::A => (5, 50),
            Setting::B => (50, 10),
        }
    }
}

/// What a replication does when a sample leaves a needed cell empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmptyCellPolicy {
    Error,
    Redraw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub setting: Setting,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub on_empty: EmptyCellPolicy,
}

impl SimConfig {
    pub fn new(setting: Setting, n: usize, replications: usize, seed: u64) -> SimConfig {
        let (m, k) = setting.defaults();
        SimConfig { setting, m, k, n, replications, seed, on_empty: EmptyCellPolicy::Redraw }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 5 {
            return Err(Error::Precondition(format!("k must be at least 5, got {}", self.k)));
        }
        if self.m < 2 {
            return Err(Error::Precondition(format!("m must be at least 2, got {}", self.m)));
        }
        if self.n < 1 || self.replications < 1 {
            return Err(Error::Precondition("n and the replication count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub n: usize,
    pub estimator: String,
    pub mean: f64,
    pub n_times_variance: f64,
    /// `None` when there is a single replication.
    pub monte_carlo_se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTable {
    pub config: SimConfig,
    pub rows: Vec<SimRow>,
    /// n·Var(original) − n·Var(reduced).
    pub g_plugin_difference: f64,
    /// Combined SE of the two rows, `sqrt(se1² + se2²)`.
    pub g_plugin_difference_se: Option<f64>,
    /// SE of the difference from paired squared deviations. Much smaller
    /// than the combined SE since both plugins see the same samples.
    pub g_plugin_difference_paired_se: Option<f64>,
    pub redraws: usize,
}

impl SimTable {
    pub fn row(&self, estimator: &str) -> Option<&SimRow> {
        self.rows.iter().find(|r| r.estimator == estimator)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "setting {:?}, m={}, k={}, reps={}, seed={}\n{:>8}  {:<18} {:>10} {:>12} {:>10}\n",
            self.config.setting,
            self.config.m,
            self.config.k,
            self.config.replications,
            self.config.seed,
            "n",
            "estimator",
            "mean",
            "n*var",
            "mc_se"
        );
        for r in &self.rows {
            let se = r.monte_carlo_se.map_or("undefined".to_string(), |s| format!("{s:.4}"));
            out.push_str(&format!(
                "{:>8}  {:<18} {:>10.5} {:>12.5} {:>10}\n",
                r.n, r.estimator, r.mean, r.n_times_variance, se
            ));
        }
        if self.redraws > 0 {
            out.push_str(&format!("redrawn samples: {}\n", self.redraws));
        }
        out
    }
}

/// Per-replication estimates, ordered as [`ESTIMATORS`].
#[derive(Debug, Clone, PartialEq)]
pub struct Replications {
    pub values: Vec<[f64; 3]>,
    pub redraws: usize,
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// The data-generating law over the six-vertex graph
/// `W2, W3 -> W4 -> {A, O1}`, `{A, O1} -> Y`.
pub fn build_sim_dgp(cfg: &SimConfig) -> Result<DiscreteBn> {
    cfg.validate()?;
    let g = golden::graph("motivating_projected")?;
    let (m, k) = (cfg.m, cfg.k);
    let q_raw: Vec<f64> = (0..k).map(|w| if w < 5 { 0.0 } else { logistic((w as f64 + 1.0) / 5.0) }).collect();
    let q_total: f64 = q_raw.iter().sum();
    let card_of = |l: &str| match l {
        "W2" | "W3" => m,
        "W4" => k,
        _ => 2,
    };
    let cards: Vec<usize> = g.labels().iter().map(|l| card_of(l)).collect();
    let mut tables = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let parents = canonical_parents(&g, v);
        let n_rows: usize = parents.iter().map(|&p| cards[p]).product();
        let mut table = Vec::with_capacity(n_rows * cards[v]);
        for r in 0..n_rows {
            // Decode the row, last parent fastest.
            let mut rest = r;
            let mut st = vec![0usize; g.n()];
            for &p in parents.iter().rev() {
                st[p] = rest % cards[p];
                rest /= cards[p];
            }
            let at = |l: &str| st[g.index_of(l).expect("fixture label")];
            let bernoulli = |p1: f64| [1.0 - p1, p1];
            match g.label(v) {
                "W2" | "W3" => table.extend(std::iter::repeat_n(1.0 / m as f64, m)),
                "W4" => {
                    if at("W2") == at("W3") {
                        table.extend((0..k).map(|w| if w < 5 { 0.2 } else { 0.0 }));
                    } else {
                        table.extend(q_raw.iter().map(|q| q / q_total));
                    }
                }
                "O1" => table.extend(bernoulli(if at("W4") < 5 { 0.99 } else { 0.01 })),
                "A" => table.extend(bernoulli(logistic((at("W4") as f64 + 1.0) / 5.0 - 2.0))),
                "Y" => {
                    let (a, o) = (at("A") as f64, at("O1") as f64);
                    table.extend(bernoulli(logistic((o - 0.5) * (9.0 * a + 5.0))));
                }
                other => return Err(Error::Internal(format!("unexpected vertex {other}"))),
            }
        }
        tables.push(table);
    }
    DiscreteBn::new(g, cards, tables)
}

struct Estimators {
    original: Dag,
    reduced: Dag,
    o: VertexSet,
}

impl Estimators {
    fn new() -> Result<Estimators> {
        Ok(Estimators {
            original: golden::graph("motivating_projected")?,
            reduced: golden::graph("motivating_reduced")?,
            o: VertexSet::from_iter(["O1"]),
        })
    }

    fn apply(&self, data: &Dataset) -> Result<[f64; 3]> {
        Ok([
            plugin_adjustment(data, &self.original, &self.o, 1)?.value,
            plugin_g(data, &self.original, 1, 0.0)?.value,
            plugin_g(data, &self.reduced, 1, 0.0)?.value,
        ])
    }
}

/// Runs the replications in parallel. Replication `r` draws from the
/// stream derived from `(seed, r)`, so results do not depend on scheduling.
pub fn run_replications(cfg: &SimConfig) -> Result<Replications> {
    let bn = build_sim_dgp(cfg)?;
    let est = Estimators::new()?;
    let out: Vec<([f64; 3], usize)> = (0..cfg.replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = replication_stream(cfg.seed, r as u64);
            let mut redraws = 0;
            loop {
                let data = bn.sample_with(cfg.n, &mut rng);
                match est.apply(&data) {
                    Ok(v) => return Ok((v, redraws)),
                    Err(Error::EmptyCell(_)) if cfg.on_empty == EmptyCellPolicy::Redraw && redraws < MAX_REDRAWS => {
                        redraws += 1
                    }
                    Err(e) => return Err(Error::Replication { replication: r, source: Box::new(e) }),
                }
            }
        })
        .collect::<Result<_>>()?;
    Ok(Replications {
        redraws: out.iter().map(|x| x.1).sum(),
        values: out.into_iter().map(|x| x.0).collect(),
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

// Sample variance and the standard error of that variance, computed from
// the squared deviations.
fn variance_with_se(xs: &[f64]) -> (f64, Option<f64>) {
    let r = xs.len();
    if r < 2 {
        return (0.0, None);
    }
    let mu = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - mu) * (x - mu)).collect();
    let var = sq.iter().sum::<f64>() / (r - 1) as f64;
    let m = mean(&sq);
    let sd = (sq.iter().map(|s| (s - m) * (s - m)).sum::<f64>() / (r - 1) as f64).sqrt();
    (var, Some(sd / (r as f64).sqrt()))
}

impl Replications {
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[j]).collect()
    }

    pub fn table(&self, cfg: &SimConfig) -> SimTable {
        let n = cfg.n as f64;
        let rows: Vec<SimRow> = ESTIMATORS
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let col = self.column(j);
                let (var, se) = variance_with_se(&col);
                SimRow {
                    n: cfg.n,
                    estimator: name.to_string(),
                    mean: mean(&col),
                    n_times_variance: n * var,
                    monte_carlo_se: se.map(|s| n * s),
                }
            })
            .collect();
        // Paired squared deviations give the joint SE of the difference.
        let (x, y) = (self.column(1), self.column(2));
        let (mx, my) = (mean(&x), mean(&y));
        let r = x.len();
        let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (a - mx).powi(2) - (b - my).powi(2)).collect();
        let (diff, paired_se) = if r < 2 {
            (0.0, None)
        } else {
            let md = mean(&d);
            let sd = (d.iter().map(|v| (v - md).powi(2)).sum::<f64>() / (r - 1) as f64).sqrt();
            (n * d.iter().sum::<f64>() / (r - 1) as f64, Some(n * sd / (r as f64).sqrt()))
        };
        let combined_se = match (rows[1].monte_carlo_se, rows[2].monte_carlo_se) {
            (Some(a), Some(b)) => Some(a.hypot(b)),
            _ => None,
        };
        SimTable {
            config: cfg.clone(),
            rows,
            g_plugin_difference: diff,
            g_plugin_difference_se: combined_se,
            g_plugin_difference_paired_se: paired_se,
            redraws: self.redraws,
        }
    }
}

pub fn run_simulation(cfg: &SimConfig) -> Result<SimTable> {
    Ok(run_replications(cfg)?.table(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SimConfig {
        SimConfig::new(Setting::A, 300, 8, 11)
    }

    #[test]
    fn dgp_values() {
        let bn = build_sim_dgp(&cfg()).unwrap();
        let g = bn.graph();
        let o1 = g.index_of("O1").unwrap();
        let w4 = g.index_of("W4").unwrap();
        let mut st = vec![0; g.n()];
        st[w4] = 3;
        assert_eq!(bn.cpt(o1).prob(&st, 1), 0.99);
        st[w4] = 7;
        assert_eq!(bn.cpt(o1).prob(&st, 1), 0.01);
        let y = g.index_of("Y").unwrap();
        st[g.treatment()] = 1;
        st[o1] = 1;
        assert!((bn.cpt(y).prob(&st, 1) - 1.0 / (1.0 + (-7.0f64).exp())).abs() < 1e-15);
        bn.validate(Some((1, 1e-3))).unwrap();
    }

    #[test]
    fn w4_support() {
        let bn = build_sim_dgp(&cfg()).unwrap();
        let g = bn.graph();
        let w4 = g.index_of("W4").unwrap();
        let (w2, w3) = (g.index_of("W2").unwrap(), g.index_of("W3").unwrap());
        let mut st = vec![0; g.n()];
        st[w2] = 1;
        st[w3] = 1;
        let same: Vec<f64> = (0..50).map(|s| bn.cpt(w4).prob(&st, s)).collect();
        assert!(same[..5].iter().all(|&p| p == 0.2) && same[5..].iter().all(|&p| p == 0.0));
        st[w3] = 2;
        let diff: Vec<f64> = (0..50).map(|s| bn.cpt(w4).prob(&st, s)).collect();
        assert!(diff[..5].iter().all(|&p| p == 0.0));
        assert!(diff[5] < diff[49]);
    }

    #[test]
    fn invalid_configs() {
        let mut c = cfg();
        c.k = 4;
        assert!(build_sim_dgp(&c).is_err());
        let mut c = cfg();
        c.m = 1;
        assert!(c.validate().is_err());
    }

    #[test]
    fn deterministic() {
        assert_eq!(run_simulation(&cfg()).unwrap(), run_simulation(&cfg()).unwrap());
    }

    #[test]
    fn single_replication_has_no_se() {
        let mut c = cfg();
        c.replications = 1;
        let t = run_simulation(&c).unwrap();
        assert!(t.rows.iter().all(|r| r.monte_carlo_se.is_none() && r.n_times_variance == 0.0));
    }

    #[test]
    fn empty_cells_reported_with_replication() {
        let mut c = SimConfig::new(Setting::B, 50, 2, 1);
        c.on_empty = EmptyCellPolicy::Error;
        match run_simulation(&c).unwrap_err() {
            Error::Replication { source, .. } => assert!(matches!(*source, Error::EmptyCell(_))),
            e => panic!("{e:?}"),
        }
    }
}
