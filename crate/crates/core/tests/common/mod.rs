//! Random graphs and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use causal_reduce::bn::DiscreteBn;
use causal_reduce::Dag;
use proptest::prelude::*;
use rand::seq::SliceRandom;

pub const GOLDEN_GRAPHS: [&str; 12] = [
    "motivating",
    "motivating_equivalent",
    "taxonomy_demo",
    "mediator_g1",
    "mediator_g2",
    "mediator_g3",
    "two_confounders_g1",
    "two_confounders_g2",
    "two_confounders_g3",
    "three_mediators",
    "long_chain",
    "saturation_demo",
];

/// Builds a DAG on `V0..V{n-1}` with edges `order[i] -> order[j]` (i < j)
/// wherever `bits` is set. Treatment and outcome are picked among ancestor
/// pairs using `pick`; if no pair exists an edge is added.
pub fn build_dag(n: usize, order: &[usize], bits: &[bool], pick: usize) -> Dag {
    let labels: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
    let mut edges = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if bits[k] {
                edges.push((order[i], order[j]));
            }
            k += 1;
        }
    }
    let reach = reachability(n, &edges);
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).map(move |y| (a, y))).filter(|&(a, y)| a != y && reach[a][y]).collect();
    let (t, y) = if pairs.is_empty() {
        edges.push((order[0], order[n - 1]));
        (order[0], order[n - 1])
    } else {
        pairs[pick % pairs.len()]
    };
    Dag::from_indices(labels, &edges, t, y).expect("edges follow a total order")
}

pub fn arb_dag(min_n: usize, max_n: usize) -> impl Strategy<Value = Dag> {
    (min_n..=max_n).prop_flat_map(|n| {
        (
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
            prop::collection::vec(prop::bool::weighted(0.4), n * (n - 1) / 2),
            any::<usize>(),
        )
            .prop_map(move |(order, bits, pick)| build_dag(n, &order, &bits, pick))
    })
}

pub fn random_dag<R: rand::Rng>(rng: &mut R, n: usize, p: f64) -> Dag {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let bits: Vec<bool> = (0..n * (n - 1) / 2).map(|_| rng.random_bool(p)).collect();
    build_dag(n, &order, &bits, rng.random::<u32>() as usize)
}

/// `reach[a][b]` iff a directed path a -> ... -> b exists (reflexive).
pub fn reachability(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut reach = vec![vec![false; n]; n];
    for (v, row) in reach.iter_mut().enumerate() {
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if !row[u] {
                row[u] = true;
                stack.extend(edges.iter().filter(|e| e.0 == u).map(|e| e.1));
            }
        }
    }
    reach
}

pub fn reach_of(g: &Dag) -> Vec<Vec<bool>> {
    reachability(g.n(), &g.edges())
}

/// Every simple path between `x` and `y` in the skeleton.
pub fn simple_paths(g: &Dag, x: usize, y: usize) -> Vec<Vec<usize>> {
    fn go(g: &Dag, y: usize, path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let u = *path.last().unwrap();
        if u == y {
            out.push(path.clone());
            return;
        }
        for w in 0..g.n() {
            if !on[w] && g.adjacent(u, w) {
                on[w] = true;
                path.push(w);
                go(g, y, path, on, out);
                path.pop();
                on[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut on = vec![false; g.n()];
    on[x] = true;
    go(g, y, &mut vec![x], &mut on, &mut out);
    out
}

/// Whether a path is open given `z`, judged vertex by vertex.
pub fn path_open(g: &Dag, reach: &[Vec<bool>], path: &[usize], z: &[bool]) -> bool {
    path.windows(3).all(|w| {
        let (p, k, q) = (w[0], w[1], w[2]);
        if g.has_edge(p, k) && g.has_edge(q, k) {
            (0..g.n()).any(|d| z[d] && reach[k][d])
        } else {
            !z[k]
        }
    })
}

/// d-separation by enumerating every path, with the overlap convention.
pub fn dsep_oracle(g: &Dag, x: &[bool], y: &[bool], z: &[bool]) -> bool {
    let reach = reach_of(g);
    let xs: Vec<usize> = (0..g.n()).filter(|&v| x[v] && !z[v]).collect();
    let ys: Vec<usize> = (0..g.n()).filter(|&v| y[v] && !z[v]).collect();
    for &a in &xs {
        for &b in &ys {
            if a == b {
                return false;
            }
            if simple_paths(g, a, b).iter().any(|p| path_open(g, &reach, p, z)) {
                return false;
            }
        }
    }
    true
}

/// Directed path `from -> ... -> to` with interior outside `avoid`.
pub fn causal_path_oracle(g: &Dag, from: usize, to: usize, avoid: &[bool]) -> bool {
    from == to
        || simple_paths(g, from, to).iter().any(|p| {
            p.windows(2).all(|w| g.has_edge(w[0], w[1])) && p[1..p.len() - 1].iter().all(|&v| !avoid[v])
        })
}

pub fn mask(n: usize, bits: u32) -> Vec<bool> {
    (0..n).map(|i| bits >> i & 1 == 1).collect()
}

/// Marginal law over `cols` of an enumerated joint.
pub fn marginal(states: &[Vec<usize>], probs: &[f64], cols: &[usize]) -> HashMap<Vec<usize>, f64> {
    let mut out = HashMap::new();
    for (s, p) in states.iter().zip(probs) {
        *out.entry(cols.iter().map(|&c| s[c]).collect()).or_insert(0.0) += p;
    }
    out
}

/// Checks every local Markov statement `v ⫫ nd(v) | pa(v)` of `g` against a
/// joint law whose columns are labelled `columns`. Returns the largest
/// violation of `p(v,pa,nd) p(pa) = p(v,pa) p(pa,nd)`.
pub fn local_markov_gap(g: &Dag, columns: &[String], states: &[Vec<usize>], probs: &[f64]) -> f64 {
    let col = |v: usize| columns.iter().position(|c| c == g.label(v)).expect("column present");
    let reach = reach_of(g);
    let mut worst: f64 = 0.0;
    for v in 0..g.n() {
        let pa: Vec<usize> = g.parents_of(v).iter().map(|&p| col(p)).collect();
        let nd: Vec<usize> =
            (0..g.n()).filter(|&u| !reach[v][u] && !g.has_edge(u, v)).map(col).collect();
        let cv = col(v);
        let all: Vec<usize> = [vec![cv], pa.clone(), nd.clone()].concat();
        let vpa: Vec<usize> = [vec![cv], pa.clone()].concat();
        let pand: Vec<usize> = [pa.clone(), nd.clone()].concat();
        let m_all = marginal(states, probs, &all);
        let m_vpa = marginal(states, probs, &vpa);
        let m_pand = marginal(states, probs, &pand);
        let m_pa = marginal(states, probs, &pa);
        for (key, &pall) in &m_all {
            let kpa = key[1..1 + pa.len()].to_vec();
            let kvpa = key[..1 + pa.len()].to_vec();
            let kpand = key[1..].to_vec();
            let lhs = pall * m_pa[&kpa];
            let rhs = m_vpa[&kvpa] * m_pand[&kpand];
            worst = worst.max((lhs - rhs).abs());
        }
    }
    worst
}

pub fn joint_of(bn: &DiscreteBn) -> (Vec<Vec<usize>>, Vec<f64>) {
    let j = bn.enumerate().unwrap();
    j.iter().map(|(s, p)| (s.to_vec(), p)).unzip()
}

pub fn random_cards<R: rand::Rng>(rng: &mut R, n: usize, max: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(2..=max)).collect()
}

/// Finite-difference and influence-function versions of the derivative of
/// `Ψ_a` along the path moving row `r` of `v` towards `other`.
pub fn pathwise_pair(bn: &DiscreteBn, a: usize, v: usize, r: usize, other: &[f64]) -> (f64, f64) {
    use causal_reduce::functionals::{g_functional_exact, EifContext};
    let h = 1e-5;
    let up = g_functional_exact(&bn.perturbed(v, r, other, h).unwrap(), a).unwrap();
    let down = g_functional_exact(&bn.perturbed(v, r, other, -h).unwrap(), a).unwrap();
    let fd = (up - down) / (2.0 * h);
    let ctx = EifContext::new(bn, a).unwrap();
    let cpt = bn.cpt(v);
    let row = cpt.row(r);
    let ip = ctx
        .support()
        .filter(|(s, _, _)| cpt.row_of(s) == r)
        .map(|(s, p, phi)| p * phi * (other[s[v]] - row[s[v]]) / row[s[v]])
        .sum();
    (fd, ip)
}

/// Relative agreement with an absolute floor for derivatives near zero.
pub fn pathwise_ok(fd: f64, ip: f64) -> bool {
    (fd - ip).abs() <= 1e-6 * fd.abs().max(1e-4)
}
