//! Fill-reducing orderings from the symmetric sparsity pattern.
//!
//! Nested dissection splits each connected region at the middle level of a
//! breadth-first level structure rooted at a pseudo-peripheral node. Regions
//! at or below the leaf size are ordered by greedy minimum degree.

use std::collections::BTreeSet;

use crate::sparse::SparseComplexMatrix;

/// Undirected adjacency without self loops.
#[derive(Debug, Clone)]
pub struct Graph {
    ptr: Vec<usize>,
    adj: Vec<usize>,
}

impl Graph {
    /// Pattern of `A + Aᵀ` minus the diagonal.
    pub fn from_pattern(a: &SparseComplexMatrix) -> Self {
        let n = a.n();
        let mut deg = vec![0usize; n];
        for (i, j, _) in a.iter() {
            if i != j {
                deg[i] += 1;
                deg[j] += 1;
            }
        }
        let mut ptr = vec![0usize; n + 1];
        for i in 0..n {
            ptr[i + 1] = ptr[i] + deg[i];
        }
        let mut next = ptr.clone();
        let mut adj = vec![0usize; ptr[n]];
        for (i, j, _) in a.iter() {
            if i != j {
                adj[next[i]] = j;
                next[i] += 1;
                adj[next[j]] = i;
                next[j] += 1;
            }
        }
        // Sort and deduplicate each list in place, then compact.
        let mut out_ptr = vec![0usize; n + 1];
        let mut w = 0;
        for i in 0..n {
            let (s, e) = (ptr[i], ptr[i + 1]);
            adj[s..e].sort_unstable();
            let mut last = usize::MAX;
            for r in s..e {
                let v = adj[r];
                if v != last {
                    adj[w] = v;
                    w += 1;
                    last = v;
                }
            }
            out_ptr[i + 1] = w;
        }
        adj.truncate(w);
        Graph { ptr: out_ptr, adj }
    }

    pub fn n(&self) -> usize {
        self.ptr.len() - 1
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[self.ptr[i]..self.ptr[i + 1]]
    }
}

/// Nested-dissection elimination order: `order[k]` is the node eliminated
/// `k`-th.
pub fn nested_dissection(g: &Graph, leaf_size: usize) -> Vec<usize> {
    let n = g.n();
    let mut nd = Dissector {
        g,
        leaf: leaf_size.max(1),
        region: vec![0; n],
        next_region: 1,
        dist: vec![usize::MAX; n],
        order: Vec::with_capacity(n),
    };
    nd.dissect((0..n).collect(), 0);
    debug_assert_eq!(nd.order.len(), n);
    nd.order
}

struct Dissector<'a> {
    g: &'a Graph,
    leaf: usize,
    region: Vec<u32>,
    next_region: u32,
    dist: Vec<usize>,
    order: Vec<usize>,
}

impl Dissector<'_> {
    fn fresh(&mut self, nodes: &[usize]) -> u32 {
        let r = self.next_region;
        self.next_region += 1;
        for &v in nodes {
            self.region[v] = r;
        }
        r
    }

    /// BFS levels from `root` within region `rid`; leaves `dist` set for the
    /// visited nodes.
    fn levels(&mut self, root: usize, rid: u32) -> Vec<Vec<usize>> {
        let mut levels = vec![vec![root]];
        self.dist[root] = 0;
        loop {
            let d = levels.len();
            let mut next = Vec::new();
            for &v in &levels[d - 1] {
                for &w in self.g.neighbors(v) {
                    if self.region[w] == rid && self.dist[w] == usize::MAX {
                        self.dist[w] = d;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return levels;
            }
            levels.push(next);
        }
    }

    fn clear_dist(&mut self, nodes: &[usize]) {
        for &v in nodes {
            self.dist[v] = usize::MAX;
        }
    }

    fn dissect(&mut self, nodes: Vec<usize>, rid: u32) {
        if nodes.len() <= self.leaf {
            self.minimum_degree(&nodes, rid);
            return;
        }
        // Split into connected components first.
        let mut levels = self.levels(nodes[0], rid);
        let reached: usize = levels.iter().map(Vec::len).sum();
        if reached < nodes.len() {
            let mut comps = Vec::new();
            for &v in &nodes {
                if self.dist[v] == usize::MAX {
                    let lv = self.levels(v, rid);
                    comps.push(lv.concat());
                }
            }
            comps.push(levels.concat());
            self.clear_dist(&nodes);
            for c in comps {
                let r = self.fresh(&c);
                self.dissect(c, r);
            }
            return;
        }
        // Pseudo-peripheral root: restart from a minimum-degree node of the
        // last level while the eccentricity grows.
        for _ in 0..8 {
            let last = levels.last().expect("nonempty");
            let cand = *last
                .iter()
                .min_by_key(|&&v| (self.g.neighbors(v).iter().filter(|&&w| self.region[w] == rid).count(), v))
                .expect("nonempty");
            self.clear_dist(&nodes);
            let trial = self.levels(cand, rid);
            if trial.len() <= levels.len() {
                self.clear_dist(&nodes);
                levels = self.levels(levels[0][0], rid);
                break;
            }
            levels = trial;
        }
        if levels.len() < 3 {
            self.clear_dist(&nodes);
            if nodes.len() <= 4 * self.leaf {
                self.minimum_degree(&nodes, rid);
            } else {
                self.order.extend(levels.concat());
            }
            return;
        }
        let total = nodes.len();
        let mut best = (usize::MAX, 1);
        let mut below = levels[0].len();
        for (l, lev) in levels.iter().enumerate().skip(1).take(levels.len() - 2) {
            let above = total - below - lev.len();
            let imbalance = below.abs_diff(above);
            if imbalance < best.0 {
                best = (imbalance, l);
            }
            below += lev.len();
        }
        let l = best.1;
        let mut part_a: Vec<usize> = levels[..l].concat();
        let part_b: Vec<usize> = levels[l + 1..].concat();
        let mut sep = Vec::with_capacity(levels[l].len());
        for &v in &levels[l] {
            let touches_b = self.g.neighbors(v).iter().any(|&w| self.region[w] == rid && self.dist[w] == l + 1);
            if touches_b {
                sep.push(v);
            } else {
                part_a.push(v);
            }
        }
        self.clear_dist(&nodes);
        let ra = self.fresh(&part_a);
        let rb = self.fresh(&part_b);
        self.fresh(&sep);
        self.dissect(part_a, ra);
        self.dissect(part_b, rb);
        self.order.extend(sep);
    }

    /// Greedy minimum degree on the explicit elimination graph of a region.
    fn minimum_degree(&mut self, nodes: &[usize], rid: u32) {
        let m = nodes.len();
        let mut sorted: Vec<(usize, usize)> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        sorted.sort_unstable();
        let local = |v: usize| sorted.binary_search_by_key(&v, |&(g, _)| g).ok().map(|p| sorted[p].1);
        let mut adj: Vec<BTreeSet<usize>> = nodes
            .iter()
            .map(|&v| self.g.neighbors(v).iter().filter(|&&w| self.region[w] == rid).filter_map(|&w| local(w)).collect())
            .collect();
        let mut done = vec![false; m];
        for _ in 0..m {
            let v = (0..m).filter(|&i| !done[i]).min_by_key(|&i| (adj[i].len(), i)).expect("remaining");
            done[v] = true;
            self.order.push(nodes[v]);
            let nbrs: Vec<usize> = std::mem::take(&mut adj[v]).into_iter().collect();
            for &a in &nbrs {
                adj[a].remove(&v);
                for &b in &nbrs {
                    if a != b {
                        adj[a].insert(b);
                    }
                }
            }
        }
    }
}
