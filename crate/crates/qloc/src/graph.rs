//! Bounded-degree graphs: girth, powers, the random ensemble, coarse-graining
//! and edge colouring.

use crate::gf2::BitVec;
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::{BTreeSet, VecDeque};

pub const UNREACHABLE: usize = usize::MAX;

/// Undirected simple graph with sorted adjacency lists. Equality compares
/// the edge structure only.
#[derive(Clone, Debug)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    degree_bound: usize,
}

impl PartialEq for Graph {
    fn eq(&self, o: &Graph) -> bool {
        self.adj == o.adj
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges, out-of-range
    /// endpoints and vertices exceeding `degree_bound`.
    pub fn new(n: usize, edges: &[(usize, usize)], degree_bound: usize) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Invalid(format!("edge ({a},{b}) out of range for {n} vertices")));
            }
            if a == b {
                return Err(Error::Invalid(format!("self-loop at {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Invalid(format!("duplicate edge ({a},{b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for (v, nb) in adj.iter_mut().enumerate() {
            if nb.len() > degree_bound {
                return Err(Error::Invalid(format!("vertex {v} has degree {} > {degree_bound}", nb.len())));
            }
            nb.sort_unstable();
        }
        Ok(Graph { adj, degree_bound })
    }

    /// Builds a graph whose degree bound is its maximum degree; duplicate edges are merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let set: BTreeSet<(usize, usize)> = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        let list: Vec<_> = set.into_iter().collect();
        let mut deg = vec![0usize; n];
        for &(a, b) in &list {
            if a < n && b < n {
                deg[a] += 1;
                deg[b] += 1;
            }
        }
        Graph::new(n, &list, deg.into_iter().max().unwrap_or(0))
    }

    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], degree_bound: 0 }
    }

    pub fn path(n: usize) -> Self {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        let e: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    pub fn complete(n: usize) -> Self {
        let e: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    pub fn star(leaves: usize) -> Self {
        let e: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves + 1, &e).unwrap()
    }

    /// Complete binary tree of the given height (height 0 is a single vertex),
    /// vertices in breadth-first order.
    pub fn binary_tree(height: usize) -> Self {
        let n = (1usize << (height + 1)) - 1;
        let e: Vec<_> = (1..n).map(|v| ((v - 1) / 2, v)).collect();
        Graph::from_edges(n, &e).unwrap()
    }

    /// `L x L` periodic square lattice.
    pub fn torus(l: usize) -> Self {
        let id = |r: usize, c: usize| (r % l) * l + (c % l);
        let mut e = Vec::new();
        for r in 0..l {
            for c in 0..l {
                e.push((id(r, c), id(r, c + 1)));
                e.push((id(r, c), id(r + 1, c)));
            }
        }
        Graph::from_edges(l * l, &e).unwrap()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.adj.len() && self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges `(a, b)` with `a < b` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, nb) in self.adj.iter().enumerate() {
            for &b in nb {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// BFS distances from `src`; unreachable vertices get [`UNREACHABLE`].
    pub fn distances_from(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![UNREACHABLE; self.adj.len()];
        let mut q = VecDeque::new();
        dist[src] = 0;
        q.push_back(src);
        while let Some(v) = q.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == UNREACHABLE {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    pub fn all_distances(&self) -> Vec<Vec<usize>> {
        (0..self.adj.len()).into_par_iter().map(|v| self.distances_from(v)).collect()
    }

    /// Lexicographically least shortest path from `a` to `b`.
    pub fn shortest_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        let db = self.distances_from(b);
        if db[a] == UNREACHABLE {
            return None;
        }
        let mut path = vec![a];
        let mut v = a;
        while v != b {
            v = *self.adj[v].iter().find(|&&w| db[w] + 1 == db[v]).unwrap();
            path.push(v);
        }
        Some(path)
    }

    /// Length of the shortest cycle, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let n = self.adj.len();
        (0..n)
            .into_par_iter()
            .filter_map(|s| {
                let mut dist = vec![UNREACHABLE; n];
                let mut parent = vec![UNREACHABLE; n];
                let mut best = UNREACHABLE;
                let mut q = VecDeque::new();
                dist[s] = 0;
                q.push_back(s);
                while let Some(v) = q.pop_front() {
                    if 2 * dist[v] + 1 >= best {
                        break;
                    }
                    for &w in &self.adj[v] {
                        if dist[w] == UNREACHABLE {
                            dist[w] = dist[v] + 1;
                            parent[w] = v;
                            q.push_back(w);
                        } else if parent[v] != w {
                            best = best.min(dist[v] + dist[w] + 1);
                        }
                    }
                }
                (best != UNREACHABLE).then_some(best)
            })
            .min()
    }

    /// Graph with an edge between vertices at distance `1..=r`.
    pub fn power(&self, r: usize) -> Result<Graph> {
        if r < 1 {
            return Err(Error::Invalid("graph power requires R >= 1".into()));
        }
        let n = self.adj.len();
        let lists: Vec<Vec<usize>> = (0..n)
            .into_par_iter()
            .map(|v| {
                let mut dist = vec![UNREACHABLE; n];
                let mut q = VecDeque::new();
                let mut out = Vec::new();
                dist[v] = 0;
                q.push_back(v);
                while let Some(u) = q.pop_front() {
                    if dist[u] == r {
                        continue;
                    }
                    for &w in &self.adj[u] {
                        if dist[w] == UNREACHABLE {
                            dist[w] = dist[u] + 1;
                            out.push(w);
                            q.push_back(w);
                        }
                    }
                }
                out.sort_unstable();
                out
            })
            .collect();
        let bound = lists.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Graph { adj: lists, degree_bound: bound })
    }

    /// Induced subgraph on the vertices with `keep[v]`, relabelled in order.
    /// Returns the subgraph and the old index of every new vertex.
    pub fn induced(&self, keep: &[bool]) -> (Graph, Vec<usize>) {
        let old: Vec<usize> = (0..self.adj.len()).filter(|&v| keep[v]).collect();
        let mut new_id = vec![UNREACHABLE; self.adj.len()];
        for (k, &v) in old.iter().enumerate() {
            new_id[v] = k;
        }
        let adj = old
            .iter()
            .map(|&v| self.adj[v].iter().filter(|&&w| keep[w]).map(|&w| new_id[w]).collect())
            .collect();
        (Graph { adj, degree_bound: self.degree_bound }, old)
    }

    pub fn is_connected(&self) -> bool {
        self.adj.is_empty() || self.distances_from(0).iter().all(|&d| d != UNREACHABLE)
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.adj.len();
        let mut comp = vec![UNREACHABLE; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != UNREACHABLE {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut k = 0;
            while k < members.len() {
                let v = members[k];
                k += 1;
                for &w in &self.adj[v] {
                    if comp[w] == UNREACHABLE {
                        comp[w] = id;
                        members.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

/// Disjoint clusters covering every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clustering {
    pub clusters: Vec<Vec<usize>>,
    pub max_cluster_size: usize,
}

impl Clustering {
    pub fn new(clusters: Vec<Vec<usize>>) -> Self {
        let max_cluster_size = clusters.iter().map(Vec::len).max().unwrap_or(0);
        Clustering { clusters, max_cluster_size }
    }

    pub fn singletons(n: usize) -> Self {
        Clustering::new((0..n).map(|v| vec![v]).collect())
    }

    /// Cluster index of every vertex; fails on overlap, gaps or oversize clusters.
    pub fn assignment(&self, n: usize) -> Result<Vec<usize>> {
        let mut of = vec![UNREACHABLE; n];
        for (k, c) in self.clusters.iter().enumerate() {
            if c.len() > self.max_cluster_size {
                return Err(Error::Invalid(format!("cluster {k} exceeds size {}", self.max_cluster_size)));
            }
            for &v in c {
                if v >= n {
                    return Err(Error::Invalid(format!("cluster {k} contains unknown vertex {v}")));
                }
                if of[v] != UNREACHABLE {
                    return Err(Error::Invalid(format!("vertex {v} in clusters {} and {k}", of[v])));
                }
                of[v] = k;
            }
        }
        if let Some(v) = of.iter().position(|&k| k == UNREACHABLE) {
            return Err(Error::Invalid(format!("vertex {v} is in no cluster")));
        }
        Ok(of)
    }
}

/// One vertex per cluster, an edge whenever some underlying edge crosses.
pub fn coarse_grain(g: &Graph, c: &Clustering) -> Result<Graph> {
    let of = c.assignment(g.vertex_count())?;
    let e: Vec<_> = g.edges().into_iter().filter(|&(a, b)| of[a] != of[b]).map(|(a, b)| (of[a], of[b])).collect();
    Graph::from_edges(c.clusters.len(), &e)
}

/// Greedy proper edge colouring; returns the colour classes.
pub fn edge_color(g: &Graph) -> Vec<Vec<(usize, usize)>> {
    let n = g.vertex_count();
    let mut used: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut classes: Vec<Vec<(usize, usize)>> = Vec::new();
    for (a, b) in g.edges() {
        let col = (0..).find(|k| !used[a].contains(k) && !used[b].contains(k)).unwrap();
        used[a].insert(col);
        used[b].insert(col);
        if classes.len() <= col {
            classes.resize(col + 1, Vec::new());
        }
        classes[col].push((a, b));
    }
    classes
}

pub fn count_triangles(g: &Graph) -> usize {
    let mut t = 0;
    for (a, b) in g.edges() {
        // common neighbours above b
        let (na, nb) = (g.neighbors(a), g.neighbors(b));
        let (mut i, mut j) = (0, 0);
        while i < na.len() && j < nb.len() {
            match na[i].cmp(&nb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    if na[i] > b {
                        t += 1;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnsembleParams {
    pub n: usize,
    pub d: usize,
    pub r: usize,
    pub seed: u64,
}

impl EnsembleParams {
    pub fn validate(&self) -> Result<()> {
        if self.d < 4 || self.d % 4 != 0 {
            return Err(Error::Invalid(format!("d = {} must be a positive multiple of 4", self.d)));
        }
        if self.r < 1 || self.n == 0 {
            return Err(Error::Invalid("ensemble needs r >= 1 and n > 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct EnsembleSample {
    pub e0: Graph,
    pub e: Graph,
    pub removed_loop_vertices: usize,
    pub removed_degree_edges: usize,
    /// Original index in `e0` of every vertex of `e`.
    pub kept: Vec<usize>,
}

/// Random graph `E0` (each vertex picks `d/4` random partners, repeats kept
/// once), then deletion of every vertex on a cycle of length at most `2r` and
/// of every vertex of degree above `d`.
pub fn sample_counterexample_graph(p: &EnsembleParams) -> Result<EnsembleSample> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let n = p.n;
    let mut edges = BTreeSet::new();
    if n > 1 {
        for i in 0..n {
            for _ in 0..p.d / 4 {
                let mut k = rng.random_range(0..n - 1);
                if k >= i {
                    k += 1;
                }
                edges.insert((i.min(k), i.max(k)));
            }
        }
    }
    let list: Vec<_> = edges.into_iter().collect();
    let e0 = Graph::from_edges(n, &list)?;
    let on_loop = short_cycle_vertices(&e0, 2 * p.r);
    let high: Vec<bool> = (0..n).map(|v| e0.degree(v) > p.d).collect();
    let removed_loop_vertices = on_loop.iter().filter(|&&b| b).count();
    let removed_degree_edges = list.iter().filter(|&&(a, b)| high[a] || high[b]).count();
    let keep: Vec<bool> = (0..n).map(|v| !on_loop[v] && !high[v]).collect();
    let (mut e, kept) = e0.induced(&keep);
    e.degree_bound = p.d;
    Ok(EnsembleSample { e0, e, removed_loop_vertices, removed_degree_edges, kept })
}

/// One seed of the ensemble experiment.
#[derive(Clone, Debug)]
pub struct EnsembleTrial {
    pub params: EnsembleParams,
    pub kept_vertices: usize,
    /// Fraction of the `n` vertices deleted for lying on a short cycle.
    pub removed_loop_fraction: f64,
    pub power_triangles: usize,
    pub search: ClusterSearch,
}

/// Samples `E`, then searches for a triangle-free coarse-graining of `E^r`.
pub fn ensemble_trial(p: &EnsembleParams, max_c: usize, budget: usize) -> Result<EnsembleTrial> {
    let s = sample_counterexample_graph(p)?;
    let g = s.e.power(p.r)?;
    let search = search_triangle_free_clustering(&g, max_c, budget, p.seed)?;
    Ok(EnsembleTrial {
        params: *p,
        kept_vertices: s.e.vertex_count(),
        removed_loop_fraction: s.removed_loop_vertices as f64 / p.n as f64,
        power_triangles: count_triangles(&g),
        search,
    })
}

/// Marks vertices lying on a cycle of length at most `len`.
pub fn short_cycle_vertices(g: &Graph, len: usize) -> Vec<bool> {
    let n = g.vertex_count();
    let mut mark = vec![false; n];
    for (a, b) in g.edges() {
        // shortest a-b path avoiding the edge itself
        if let Some(path) = path_avoiding_edge(g, a, b, len.saturating_sub(1)) {
            for v in path {
                mark[v] = true;
            }
        }
    }
    // every vertex of such a cycle is found from one of its edges; cycles
    // through a vertex are witnessed by its incident edges
    mark
}

fn path_avoiding_edge(g: &Graph, a: usize, b: usize, max_len: usize) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    let mut parent = vec![UNREACHABLE; n];
    let mut dist = vec![UNREACHABLE; n];
    let mut q = VecDeque::new();
    dist[a] = 0;
    q.push_back(a);
    while let Some(v) = q.pop_front() {
        if dist[v] >= max_len {
            continue;
        }
        for &w in g.neighbors(v) {
            if v == a && w == b {
                continue;
            }
            if dist[w] == UNREACHABLE {
                dist[w] = dist[v] + 1;
                parent[w] = v;
                if w == b {
                    let mut path = vec![b];
                    let mut u = b;
                    while u != a {
                        u = parent[u];
                        path.push(u);
                    }
                    return Some(path);
                }
                q.push_back(w);
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct ClusterSearch {
    pub clustering: Clustering,
    pub residual_triangles: usize,
    pub success: bool,
    pub restarts_used: usize,
}

/// Randomized greedy merging of adjacent clusters (size at most `max_c`)
/// that lowers the coarse-grained triangle count; `budget` restarts.
pub fn search_triangle_free_clustering(g: &Graph, max_c: usize, budget: usize, seed: u64) -> Result<ClusterSearch> {
    if max_c < 1 {
        return Err(Error::Invalid("maxC must be at least 1".into()));
    }
    let mut best: Option<ClusterSearch> = None;
    for attempt in 0..budget.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let (clusters, t) = greedy_merge(g, max_c, &mut rng);
        if best.as_ref().is_none_or(|b| t < b.residual_triangles) {
            best = Some(ClusterSearch {
                clustering: Clustering { clusters, max_cluster_size: max_c },
                residual_triangles: t,
                success: t == 0,
                restarts_used: attempt + 1,
            });
        }
        if t == 0 {
            break;
        }
    }
    let mut b = best.unwrap();
    b.restarts_used = b.restarts_used.max(1);
    Ok(b)
}

struct Coarse {
    adj: Vec<BitVec>,
    members: Vec<Vec<usize>>,
    alive: Vec<bool>,
}

impl Coarse {
    fn edges_within(&self, s: &BitVec) -> usize {
        s.ones().map(|v| self.adj[v].and(s).count_ones()).sum::<usize>() / 2
    }

    fn triangles_at(&self, a: usize) -> usize {
        self.edges_within(&self.adj[a])
    }

    fn merge_delta(&self, a: usize, b: usize) -> isize {
        let mut nm = self.adj[a].or(&self.adj[b]);
        nm.set(a, false);
        nm.set(b, false);
        let common = self.adj[a].and(&self.adj[b]).count_ones();
        self.edges_within(&nm) as isize - self.triangles_at(a) as isize - self.triangles_at(b) as isize + common as isize
    }

    fn merge(&mut self, a: usize, b: usize) {
        let nb: Vec<usize> = self.adj[b].ones().collect();
        for w in nb {
            self.adj[w].set(b, false);
            if w != a {
                self.adj[w].set(a, true);
                self.adj[a].set(w, true);
            }
        }
        self.adj[a].set(b, false);
        self.adj[b] = BitVec::zeros(self.adj.len());
        let moved = std::mem::take(&mut self.members[b]);
        self.members[a].extend(moved);
        self.alive[b] = false;
    }

    fn triangles(&self) -> usize {
        (0..self.adj.len()).filter(|&v| self.alive[v]).map(|v| self.triangles_at(v)).sum::<usize>() / 3
    }
}

fn greedy_merge<R: Rng>(g: &Graph, max_c: usize, rng: &mut R) -> (Vec<Vec<usize>>, usize) {
    let n = g.vertex_count();
    let mut cg = Coarse {
        adj: (0..n)
            .map(|v| {
                let mut b = BitVec::zeros(n);
                for &w in g.neighbors(v) {
                    b.set(w, true);
                }
                b
            })
            .collect(),
        members: (0..n).map(|v| vec![v]).collect(),
        alive: vec![true; n],
    };
    loop {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for a in (0..n).filter(|&a| cg.alive[a]) {
            for b in cg.adj[a].ones() {
                if a < b && cg.members[a].len() + cg.members[b].len() <= max_c {
                    pairs.push((a, b));
                }
            }
        }
        pairs.shuffle(rng);
        let mut improved = false;
        for (a, b) in pairs {
            if !cg.alive[a] || !cg.alive[b] || !cg.adj[a].get(b) || cg.members[a].len() + cg.members[b].len() > max_c {
                continue;
            }
            if cg.merge_delta(a, b) < 0 {
                cg.merge(a, b);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let t = cg.triangles();
    let mut clusters: Vec<Vec<usize>> = cg.members.into_iter().filter(|m| !m.is_empty()).collect();
    for c in clusters.iter_mut() {
        c.sort_unstable();
    }
    clusters.sort();
    (clusters, t)
}

/// Clustering of a rooted tree (given by parent pointers) whose image in the
/// coarse-grained `T^r` is a tree: the root alone, and for every vertex `p` at
/// depth divisible by `r` the descendants of `p` at depths
/// `depth(p)+1 ..= depth(p)+r`.
pub fn tree_power_clustering(parent: &[Option<usize>], r: usize) -> Result<Clustering> {
    if r < 1 {
        return Err(Error::Invalid("tree clustering needs R >= 1".into()));
    }
    let n = parent.len();
    let depth = tree_depths(parent)?;
    let mut key_of = vec![UNREACHABLE; n];
    for v in 0..n {
        if depth[v] == 0 {
            key_of[v] = v;
            continue;
        }
        let target = r * ((depth[v] - 1) / r);
        let mut a = v;
        while depth[a] > target {
            a = parent[a].unwrap();
        }
        key_of[v] = a;
    }
    let mut groups: std::collections::BTreeMap<(usize, bool), Vec<usize>> = Default::default();
    for v in 0..n {
        groups.entry((key_of[v], depth[v] == 0)).or_default().push(v);
    }
    Ok(Clustering::new(groups.into_values().collect()))
}

/// Bands of `r` consecutive depths: a vertex at depth `d` with band `k =
/// d / r` joins the cluster of its ancestor at depth `r * (k - 1)` (the root
/// for `k = 0`). Any vertex set of depth span below `r` with a common
/// ancestor inside the set's depth range meets at most two clusters, a parent
/// and one of its children in the coarse tree.
pub fn tree_band_clustering(parent: &[Option<usize>], r: usize) -> Result<Clustering> {
    if r < 1 {
        return Err(Error::Invalid("band clustering needs width >= 1".into()));
    }
    let depth = tree_depths(parent)?;
    let mut groups: std::collections::BTreeMap<(usize, usize), Vec<usize>> = Default::default();
    for v in 0..parent.len() {
        let band = depth[v] / r;
        let target = r * band.saturating_sub(1);
        let mut a = v;
        while depth[a] > target {
            a = parent[a].unwrap();
        }
        groups.entry((band, a)).or_default().push(v);
    }
    Ok(Clustering::new(groups.into_values().collect()))
}

/// Depth of every vertex of a rooted forest.
pub fn tree_depths(parent: &[Option<usize>]) -> Result<Vec<usize>> {
    let n = parent.len();
    let mut depth = vec![UNREACHABLE; n];
    for v in 0..n {
        let mut chain = Vec::new();
        let mut a = v;
        while depth[a] == UNREACHABLE {
            chain.push(a);
            if chain.len() > n {
                return Err(Error::Invalid("parent pointers contain a cycle".into()));
            }
            match parent[a] {
                Some(p) => a = p,
                None => {
                    depth[a] = 0;
                    chain.pop();
                    break;
                }
            }
        }
        while let Some(u) = chain.pop() {
            depth[u] = depth[parent[u].unwrap()] + 1;
        }
    }
    Ok(depth)
}

/// BFS parent pointers of a forest rooted at the least vertex of each component.
pub fn bfs_parents(g: &Graph) -> Vec<Option<usize>> {
    let n = g.vertex_count();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    q.push_back(w);
                }
            }
        }
    }
    parent
}

/// Each vertex `v` split into `2v, 2v+1`, joined to each other and to both
/// copies of every neighbour.
pub fn doubled_graph(g: &Graph) -> Graph {
    let mut e = Vec::new();
    for v in 0..g.vertex_count() {
        e.push((2 * v, 2 * v + 1));
    }
    for (a, b) in g.edges() {
        for s in 0..2 {
            for t in 0..2 {
                e.push((2 * a + s, 2 * b + t));
            }
        }
    }
    Graph::from_edges(2 * g.vertex_count(), &e).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_triangles(g: &Graph) -> usize {
        let n = g.vertex_count();
        let mut t = 0;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                        t += 1;
                    }
                }
            }
        }
        t
    }

    /// Girth by trying every edge as the closing edge of a cycle.
    fn brute_girth(g: &Graph) -> Option<usize> {
        g.edges()
            .into_iter()
            .filter_map(|(a, b)| path_avoiding_edge(g, a, b, usize::MAX).map(|p| p.len()))
            .min()
    }

    fn brute_power(g: &Graph, r: usize) -> Vec<(usize, usize)> {
        let d = g.all_distances();
        let n = g.vertex_count();
        let mut e = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if d[a][b] != UNREACHABLE && d[a][b] <= r {
                    e.push((a, b));
                }
            }
        }
        e
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (2..max_n).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |pairs| {
                let e: Vec<_> = pairs.into_iter().filter(|(a, b)| a != b).collect();
                Graph::from_edges(n, &e).unwrap()
            })
        })
    }

    #[test]
    fn girth_examples() {
        assert_eq!(Graph::complete(3).girth(), Some(3));
        assert_eq!(Graph::binary_tree(3).girth(), None);
        assert_eq!(Graph::cycle(5).girth(), Some(5));
    }

    #[test]
    fn power_examples() {
        let p = Graph::path(3).power(2).unwrap();
        assert_eq!(p.edges(), vec![(0, 1), (0, 2), (1, 2)]);
        let c5 = Graph::cycle(5);
        assert_eq!(c5.power(1).unwrap().edges(), c5.edges());
        let k5 = c5.power(2).unwrap();
        assert_eq!(k5.edge_count(), 10);
        assert_eq!(count_triangles(&k5), 10);
        assert!(c5.power(0).is_err());
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(Graph::new(3, &[(0, 0)], 2).is_err());
        assert!(Graph::new(3, &[(0, 1), (1, 0)], 2).is_err());
        assert!(Graph::new(3, &[(0, 1), (0, 2)], 1).is_err());
        assert!(Graph::new(2, &[(0, 2)], 2).is_err());
    }

    #[test]
    fn ensemble_single_vertex() {
        let s = sample_counterexample_graph(&EnsembleParams { n: 1, d: 4, r: 1, seed: 0 }).unwrap();
        assert_eq!(s.e0.vertex_count(), 1);
        assert_eq!(s.e0.edge_count(), 0);
    }

    #[test]
    fn ensemble_rejects_bad_d() {
        assert!(sample_counterexample_graph(&EnsembleParams { n: 10, d: 6, r: 1, seed: 0 }).is_err());
    }

    #[test]
    fn coarse_grain_examples() {
        let g = Graph::cycle(6);
        assert_eq!(coarse_grain(&g, &Clustering::singletons(6)).unwrap(), g);
        let p = Graph::from_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        assert_eq!(coarse_grain(&doubled_graph(&p), &Clustering::new((0..5).map(|v| vec![2 * v, 2 * v + 1]).collect())).unwrap(), p);
        let bad = Clustering::new(vec![vec![0, 1], vec![1, 2]]);
        assert!(coarse_grain(&Graph::path(3), &bad).is_err());
        let gap = Clustering::new(vec![vec![0, 1]]);
        assert!(coarse_grain(&Graph::path(3), &gap).is_err());
    }

    #[test]
    fn tree_power_clustering_gives_tree() {
        for (height, r) in [(3, 2), (4, 2), (5, 2), (6, 3)] {
            let t = Graph::binary_tree(height);
            let c = tree_power_clustering(&bfs_parents(&t), r).unwrap();
            let cg = coarse_grain(&t.power(r).unwrap(), &c).unwrap();
            assert_eq!(cg.girth(), None, "height {height} r {r}");
            assert!(cg.is_connected());
        }
    }

    #[test]
    fn band_clusters_hold_downward_balls() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for r in 1..4 {
            // random tree by attaching each vertex to an earlier one
            let n = 40;
            let edges: Vec<(usize, usize)> = (1..n).map(|v| (rand::Rng::random_range(&mut rng, 0..v), v)).collect();
            let t = Graph::from_edges(n, &edges).unwrap();
            let parent = bfs_parents(&t);
            let depth = tree_depths(&parent).unwrap();
            let asg = tree_band_clustering(&parent, r).unwrap().assignment(n).unwrap();
            for top in 0..n {
                let below: BTreeSet<usize> = (0..n)
                    .filter(|&v| {
                        let mut a = v;
                        while depth[a] > depth[top] {
                            a = parent[a].unwrap();
                        }
                        a == top && depth[v] < depth[top] + r
                    })
                    .map(|v| asg[v])
                    .collect();
                assert!(below.len() <= 2, "r {r} top {top}");
            }
        }
    }

    #[test]
    fn edge_color_examples() {
        let c4 = edge_color(&Graph::cycle(4));
        assert_eq!(c4.len(), 2);
        assert!(c4.iter().all(|k| k.len() == 2));
        assert_eq!(edge_color(&Graph::star(3)).len(), 3);
    }

    #[test]
    fn clustering_search_examples() {
        let t = Graph::binary_tree(4);
        let r = search_triangle_free_clustering(&t, 1, 5, 0).unwrap();
        assert!(r.success);
        assert_eq!(r.restarts_used, 1);
        assert!(search_triangle_free_clustering(&t, 0, 5, 0).is_err());
    }

    #[test]
    fn squared_depth_five_tree_cluster_sizes() {
        let t = Graph::binary_tree(5);
        let t2 = t.power(2).unwrap();
        let c = tree_power_clustering(&bfs_parents(&t), 2).unwrap();
        assert_eq!(c.clusters.iter().map(Vec::len).max(), Some(6));
        assert_eq!(coarse_grain(&t2, &c).unwrap().girth(), None);
        let three = search_triangle_free_clustering(&t2, 3, SEARCH_RESTARTS, 0).unwrap();
        assert!(!three.success && three.residual_triangles > 0);
        assert!(search_triangle_free_clustering(&t2, 8, SEARCH_RESTARTS, 0).unwrap().success);
    }

    const SEARCH_RESTARTS: usize = 200;

    proptest! {
        #[test]
        fn triangles_match_brute_force(g in arb_graph(50)) {
            prop_assert_eq!(count_triangles(&g), brute_triangles(&g));
        }

        #[test]
        fn girth_matches_brute_force(g in arb_graph(25)) {
            prop_assert_eq!(g.girth(), brute_girth(&g));
        }

        #[test]
        fn power_properties(g in arb_graph(25), r in 1usize..4) {
            let p = g.power(r).unwrap();
            prop_assert_eq!(p.edges(), brute_power(&g, r));
            prop_assert_eq!(g.power(1).unwrap().power(r).unwrap(), g.power(r).unwrap());
            let q = g.power(r + 1).unwrap();
            prop_assert!(p.edges().iter().all(|&(a, b)| q.has_edge(a, b)));
        }

        #[test]
        fn edge_color_is_proper(g in arb_graph(40)) {
            let classes = edge_color(&g);
            let mut all: Vec<_> = classes.iter().flatten().copied().collect();
            all.sort();
            prop_assert_eq!(all, g.edges());
            for k in &classes {
                let mut seen = BTreeSet::new();
                for &(a, b) in k {
                    prop_assert!(seen.insert(a) && seen.insert(b));
                }
            }
            prop_assert!(classes.len() <= (2 * g.max_degree()).saturating_sub(1));
        }

        #[test]
        fn singleton_coarse_grain_identity(g in arb_graph(30)) {
            prop_assert_eq!(coarse_grain(&g, &Clustering::singletons(g.vertex_count())).unwrap(), g.clone());
        }

        #[test]
        fn ensemble_output_girth_and_degree(seed in any::<u64>(), n in 1usize..120, r in 1usize..3) {
            let s = sample_counterexample_graph(&EnsembleParams { n, d: 8, r, seed }).unwrap();
            prop_assert!(s.e.max_degree() <= 8);
            if let Some(gi) = s.e.girth() { prop_assert!(gi > 2 * r); }
        }

        #[test]
        fn search_result_is_valid(g in arb_graph(30), max_c in 1usize..4, seed in any::<u64>()) {
            let r = search_triangle_free_clustering(&g, max_c, 3, seed).unwrap();
            let cg = coarse_grain(&g, &r.clustering).unwrap();
            prop_assert_eq!(count_triangles(&cg), r.residual_triangles);
            prop_assert_eq!(r.success, r.residual_triangles == 0);
        }
    }
}
