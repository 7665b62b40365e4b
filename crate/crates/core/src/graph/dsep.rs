use std::collections::VecDeque;

use super::{Dag, VertexSet};
use crate::error::Result;

impl Dag {
    /// d-separation on index masks. Overlaps are resolved by dropping `z`
    /// from both `x` and `y`; an empty side is separated from anything.
    pub fn d_separated_mask(&self, x: &[bool], y: &[bool], z: &[bool]) -> bool {
        let n = self.n();
        let xs: Vec<usize> = (0..n).filter(|&v| x[v] && !z[v]).collect();
        let ys: Vec<bool> = (0..n).map(|v| y[v] && !z[v]).collect();
        if xs.is_empty() || !ys.contains(&true) {
            return true;
        }
        let reach = self.d_reachable(&xs, z);
        !(0..n).any(|v| ys[v] && reach[v])
    }

    /// Vertices d-connected to some vertex of `xs` given `z` (Bayes ball).
    /// The sources themselves count as reachable.
    pub fn d_reachable(&self, xs: &[usize], z: &[bool]) -> Vec<bool> {
        let n = self.n();
        let zs: Vec<usize> = (0..n).filter(|&v| z[v]).collect();
        let an_z = self.ancestors_mask(&zs);
        // visited[v][0]: arrived from a child (moving up), [1]: from a parent.
        let mut visited = vec![[false; 2]; n];
        let mut reach = vec![false; n];
        let mut queue: VecDeque<(usize, usize)> = xs.iter().map(|&v| (v, 0)).collect();
        while let Some((v, dir)) = queue.pop_front() {
            if visited[v][dir] {
                continue;
            }
            visited[v][dir] = true;
            if !z[v] {
                reach[v] = true;
            }
            if dir == 0 {
                if !z[v] {
                    queue.extend(self.parents_of(v).iter().map(|&p| (p, 0)));
                    queue.extend(self.children_of(v).iter().map(|&c| (c, 1)));
                }
            } else {
                if !z[v] {
                    queue.extend(self.children_of(v).iter().map(|&c| (c, 1)));
                }
                if an_z[v] {
                    queue.extend(self.parents_of(v).iter().map(|&p| (p, 0)));
                }
            }
        }
        reach
    }

    pub fn d_separated(&self, x: &VertexSet, y: &VertexSet, z: &VertexSet) -> Result<bool> {
        let (x, y, z) = (self.mask_of(x)?, self.mask_of(y)?, self.mask_of(z)?);
        Ok(self.d_separated_mask(&x, &y, &z))
    }

    /// Whether some path between `a` and `b` has every non-collider outside
    /// `c` and every collider in An({a, b}). Searches simple paths.
    pub fn inducing_path_exists_idx(&self, a: usize, b: usize, c: &[bool]) -> bool {
        if a == b {
            return false;
        }
        let an_ab = self.ancestors_mask(&[a, b]);
        let mut on_path = vec![false; self.n()];
        on_path[a] = true;
        self.inducing_dfs(a, None, b, c, &an_ab, &mut on_path)
    }

    // `into_v` is Some(true) when the edge used to reach `v` points into `v`.
    fn inducing_dfs(
        &self,
        v: usize,
        into_v: Option<bool>,
        b: usize,
        c: &[bool],
        an_ab: &[bool],
        on_path: &mut [bool],
    ) -> bool {
        let steps = self
            .children_of(v)
            .iter()
            .map(|&w| (w, false))
            .chain(self.parents_of(v).iter().map(|&w| (w, true)));
        for (w, next_into_v) in steps {
            if on_path[w] {
                continue;
            }
            if let Some(prev_into_v) = into_v {
                let collider = prev_into_v && next_into_v;
                let ok = if collider { an_ab[v] } else { !c[v] };
                if !ok {
                    continue;
                }
            }
            if w == b {
                return true;
            }
            on_path[w] = true;
            // The edge v -> w points into w exactly when w is a child.
            if self.inducing_dfs(w, Some(!next_into_v), b, c, an_ab, on_path) {
                return true;
            }
            on_path[w] = false;
        }
        false
    }

    pub fn inducing_path_exists(&self, a: &str, b: &str, c: &VertexSet) -> Result<bool> {
        let (a, b) = (self.index_of(a)?, self.index_of(b)?);
        Ok(self.inducing_path_exists_idx(a, b, &self.mask_of(c)?))
    }
}
