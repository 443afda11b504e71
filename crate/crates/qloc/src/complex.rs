//! Simplicial 2-complexes: interaction complexes, shields, coarse-graining,
//! truncated covers and set-localizability.

use crate::graph::{Clustering, Graph, UNREACHABLE};
use crate::hamiltonian::CommutingHamiltonian;
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

/// A simplicial 2-complex on 0-cells `0..n`. 1-cells are sorted pairs and
/// 2-cells sorted triples, each stored once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex2 {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    triangles: BTreeSet<[usize; 3]>,
}

fn pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn triple(a: usize, b: usize, c: usize) -> [usize; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

impl Complex2 {
    /// Validates ranges and that every 2-cell boundary consists of 1-cells.
    /// Duplicates are merged.
    pub fn new(n: usize, edges: &[(usize, usize)], triangles: &[[usize; 3]]) -> Result<Self> {
        let mut es = BTreeSet::new();
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::Invalid(format!("bad 1-cell ({a},{b})")));
            }
            es.insert(pair(a, b));
        }
        let mut ts = BTreeSet::new();
        for t in triangles {
            let s = triple(t[0], t[1], t[2]);
            if s[0] == s[1] || s[1] == s[2] || s[2] >= n {
                return Err(Error::Invalid(format!("bad 2-cell {t:?}")));
            }
            for (a, b) in [(s[0], s[1]), (s[1], s[2]), (s[0], s[2])] {
                if !es.contains(&(a, b)) {
                    return Err(Error::Invalid(format!("2-cell {s:?} lacks boundary 1-cell ({a},{b})")));
                }
            }
            ts.insert(s);
        }
        Ok(Complex2 { n, edges: es, triangles: ts })
    }

    /// The 1-skeleton of `g` with no 2-cells.
    pub fn from_graph(g: &Graph) -> Self {
        Complex2 { n: g.vertex_count(), edges: g.edges().into_iter().collect(), triangles: BTreeSet::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn triangles(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.triangles.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Total number of cells of all dimensions.
    pub fn cell_count(&self) -> usize {
        self.n + self.edges.len() + self.triangles.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&pair(a, b))
    }

    pub fn has_triangle(&self, a: usize, b: usize, c: usize) -> bool {
        self.triangles.contains(&triple(a, b, c))
    }

    pub fn skeleton(&self) -> Graph {
        let es: Vec<_> = self.edges.iter().copied().collect();
        Graph::from_edges(self.n, &es).expect("validated 1-cells")
    }

    /// 2-cells containing the 1-cell `(a, b)`.
    pub fn triangles_on_edge(&self, a: usize, b: usize) -> Vec<[usize; 3]> {
        let (a, b) = pair(a, b);
        self.triangles.iter().filter(|t| t.contains(&a) && t.contains(&b)).copied().collect()
    }

    /// Largest 1-skeleton distance within `set`; `UNREACHABLE` if disconnected.
    pub fn diameter_of(&self, set: &[usize]) -> usize {
        let g = self.skeleton();
        let mut best = 0;
        for &a in set {
            let d = g.distances_from(a);
            for &b in set {
                best = best.max(d[b]);
            }
        }
        best
    }

    /// Removes the 0-cells with `keep[v] == false` together with attached
    /// cells. Returns the complex and the old index of each new 0-cell.
    pub fn induced(&self, keep: &[bool]) -> (Complex2, Vec<usize>) {
        let old: Vec<usize> = (0..self.n).filter(|&v| keep[v]).collect();
        let mut new = vec![UNREACHABLE; self.n];
        for (k, &v) in old.iter().enumerate() {
            new[v] = k;
        }
        let edges = self.edges.iter().filter(|&&(a, b)| keep[a] && keep[b]).map(|&(a, b)| (new[a], new[b])).collect();
        let triangles =
            self.triangles.iter().filter(|t| t.iter().all(|&v| keep[v])).map(|t| triple(new[t[0]], new[t[1]], new[t[2]])).collect();
        (Complex2 { n: old.len(), edges, triangles }, old)
    }
}

/// 0-cell per site, 1-cell per co-occurring pair, 2-cell per co-occurring triple.
pub fn interaction_complex(h: &CommutingHamiltonian) -> Complex2 {
    let mut edges = BTreeSet::new();
    let mut triangles = BTreeSet::new();
    for t in &h.terms {
        let s = &t.support;
        for a in 0..s.len() {
            for b in a + 1..s.len() {
                edges.insert(pair(s[a], s[b]));
                for c in b + 1..s.len() {
                    triangles.insert(triple(s[a], s[b], s[c]));
                }
            }
        }
    }
    Complex2 { n: h.site_count(), edges, triangles }
}

/// Attaches a 2-cell to every 3-clique of `g`.
pub fn attach_triangles(g: &Graph) -> Complex2 {
    let mut triangles = BTreeSet::new();
    for (a, b) in g.edges() {
        for &c in g.neighbors(b) {
            if c > b && g.has_edge(a, c) {
                triangles.insert([a, b, c]);
            }
        }
    }
    Complex2 { n: g.vertex_count(), edges: g.edges().into_iter().collect(), triangles }
}

/// A connected class of boundary-crossing pairs `(interior, exterior)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shield {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl Shield {
    pub fn interior(&self) -> BTreeSet<usize> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn exterior(&self) -> BTreeSet<usize> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    pub fn transpose(&self) -> Shield {
        Shield { pairs: self.pairs.iter().map(|&(i, j)| (j, i)).collect() }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    /// Classes as sorted member lists, ordered by smallest member.
    fn classes(&mut self) -> Vec<Vec<usize>> {
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.0.len() {
            let r = self.find(x);
            by_root.entry(r).or_default().push(x);
        }
        by_root.into_values().collect()
    }
}

pub(crate) fn union_find_classes(n: usize, links: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(n);
    for &(a, b) in links {
        uf.union(a, b);
    }
    uf.classes()
}

/// Shields of `x`, sorted by their smallest pair.
pub fn shields(k: &Complex2, x: &[usize]) -> Vec<Shield> {
    let mut inside = vec![false; k.n];
    for &v in x {
        inside[v] = true;
    }
    let mut pairs = Vec::new();
    for (a, b) in k.edges() {
        if inside[a] && !inside[b] {
            pairs.push((a, b));
        } else if inside[b] && !inside[a] {
            pairs.push((b, a));
        }
    }
    pairs.sort_unstable();
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut links = Vec::new();
    for t in k.triangles() {
        let ins: Vec<usize> = t.iter().copied().filter(|&v| inside[v]).collect();
        let out: Vec<usize> = t.iter().copied().filter(|&v| !inside[v]).collect();
        match (ins.len(), out.len()) {
            (1, 2) => links.push((index[&(ins[0], out[0])], index[&(ins[0], out[1])])),
            (2, 1) => links.push((index[&(ins[0], out[0])], index[&(ins[1], out[0])])),
            _ => {}
        }
    }
    union_find_classes(pairs.len(), &links)
        .into_iter()
        .map(|cls| Shield { pairs: cls.into_iter().map(|i| pairs[i]).collect() })
        .collect()
}

/// Term indices of `H = H_X + sum_s H_{X,s} + H_complement`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShieldSplit {
    pub inside: Vec<usize>,
    pub shields: Vec<Shield>,
    pub per_shield: Vec<Vec<usize>>,
    pub outside: Vec<usize>,
}

impl ShieldSplit {
    /// The three parts as Hamiltonians on the original sites.
    pub fn hamiltonians(&self, h: &CommutingHamiltonian) -> (CommutingHamiltonian, Vec<CommutingHamiltonian>, CommutingHamiltonian) {
        let pick = |idx: &[usize]| {
            let set: BTreeSet<usize> = idx.iter().copied().collect();
            h.subset(|k, _| set.contains(&k))
        };
        (pick(&self.inside), self.per_shield.iter().map(|s| pick(s)).collect(), pick(&self.outside))
    }
}

/// Groups the terms of `h` by the shield of `x` their crossing pairs belong to.
pub fn split_by_shields(h: &CommutingHamiltonian, x: &[usize]) -> Result<ShieldSplit> {
    let k = interaction_complex(h);
    let sh = shields(&k, x);
    let inside: BTreeSet<usize> = x.iter().copied().collect();
    let mut owner = HashMap::new();
    for (s, shield) in sh.iter().enumerate() {
        for &p in &shield.pairs {
            owner.insert(p, s);
        }
    }
    let mut split = ShieldSplit { inside: Vec::new(), shields: sh, per_shield: Vec::new(), outside: Vec::new() };
    split.per_shield = vec![Vec::new(); split.shields.len()];
    for (t, term) in h.terms.iter().enumerate() {
        let ins: Vec<usize> = term.support.iter().copied().filter(|v| inside.contains(v)).collect();
        let out: Vec<usize> = term.support.iter().copied().filter(|v| !inside.contains(v)).collect();
        if out.is_empty() {
            split.inside.push(t);
        } else if ins.is_empty() {
            split.outside.push(t);
        } else {
            let owners: BTreeSet<usize> = ins.iter().flat_map(|&i| out.iter().map(move |&j| (i, j))).map(|p| owner[&p]).collect();
            if owners.len() != 1 {
                return Err(Error::Inconsistent(format!("term {t} crosses shields {owners:?}")));
            }
            split.per_shield[*owners.iter().next().unwrap()].push(t);
        }
    }
    Ok(split)
}

/// Result of checking the three set-localizability conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetLocalizableReport {
    pub ok: bool,
    pub violations: Vec<String>,
    /// Sorted neighbor lists of the sets.
    pub neighbors: Vec<Vec<usize>>,
}

/// Checks diameter, coverage and transposed-shield matching for `sets`.
pub fn check_set_localizable(k: &Complex2, sets: &[Vec<usize>], r: usize) -> SetLocalizableReport {
    let mut violations = Vec::new();
    for (a, s) in sets.iter().enumerate() {
        if s.iter().any(|&v| v >= k.n) {
            violations.push(format!("set {a} has a 0-cell out of range"));
            continue;
        }
        let d = k.diameter_of(s);
        if d > r {
            violations.push(format!("condition 1: set {a} has diameter {} > {r}", fmt_dist(d)));
        }
    }
    let mut covered = vec![false; k.n];
    for s in sets {
        for &v in s {
            if v < k.n {
                covered[v] = true;
            }
        }
    }
    if let Some(v) = covered.iter().position(|&c| !c) {
        violations.push(format!("condition 2: 0-cell {v} is in no set"));
    }
    let all: Vec<Vec<Shield>> = sets.iter().map(|s| shields(k, s)).collect();
    let mut index: HashMap<&Shield, Vec<usize>> = HashMap::new();
    for (b, list) in all.iter().enumerate() {
        for s in list {
            index.entry(s).or_default().push(b);
        }
    }
    let mut neighbors = vec![BTreeSet::new(); sets.len()];
    for (a, list) in all.iter().enumerate() {
        for s in list {
            let t = s.transpose();
            let matches: Vec<usize> = index.get(&t).map(|v| v.iter().copied().filter(|&b| b != a).collect()).unwrap_or_default();
            if matches.is_empty() {
                let p = s.pairs.iter().next().unwrap();
                violations.push(format!("condition 3: shield of set {a} through ({},{}) has no transposed partner", p.0, p.1));
            }
            for b in matches {
                neighbors[a].insert(b);
                neighbors[b].insert(a);
            }
        }
    }
    SetLocalizableReport {
        ok: violations.is_empty(),
        violations,
        neighbors: neighbors.into_iter().map(|s| s.into_iter().collect()).collect(),
    }
}

fn fmt_dist(d: usize) -> String {
    if d == UNREACHABLE {
        "infinite".into()
    } else {
        d.to_string()
    }
}

/// A cover truncated at a path-length bound. Node `(i, P)` projects to `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverComplex {
    pub nodes: Vec<(usize, Vec<usize>)>,
    pub complex: Complex2,
    pub depth: usize,
}

impl CoverComplex {
    pub fn projection(&self, node: usize) -> usize {
        self.nodes[node].0
    }

    /// Nodes over each base 0-cell.
    pub fn fibers(&self, base_n: usize) -> Vec<Vec<usize>> {
        let mut f = vec![Vec::new(); base_n];
        for (k, (i, _)) in self.nodes.iter().enumerate() {
            f[*i].push(k);
        }
        f
    }

    /// Clusters the nodes by path, the coarse-graining that maps the cover onto a tree.
    pub fn path_clustering(&self) -> Clustering {
        let mut by_path: BTreeMap<&Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (k, (_, p)) in self.nodes.iter().enumerate() {
            by_path.entry(p).or_default().push(k);
        }
        Clustering::new(by_path.into_values().collect())
    }
}

fn extends_by_one(p: &[usize], q: &[usize]) -> bool {
    (q.len() == p.len() + 1 && q.starts_with(p)) || (p.len() == q.len() + 1 && p.starts_with(q))
}

/// Labels 0-cells by non-backtracking paths of neighboring sets from a root
/// set, up to `depth` entries, and lifts cells by the path-adjacency rules.
pub fn build_cover(k: &Complex2, sets: &[Vec<usize>], depth: usize) -> Result<CoverComplex> {
    if depth == 0 {
        return Err(Error::Invalid("cover depth must be at least 1".into()));
    }
    let report = check_set_localizable(k, sets, UNREACHABLE - 1);
    if let Some(v) = report.violations.iter().find(|v| v.starts_with("condition 3")) {
        return Err(Error::Invalid(v.clone()));
    }
    if let Some(v) = report.violations.iter().find(|v| !v.starts_with("condition 1")) {
        return Err(Error::Invalid(v.clone()));
    }
    let nb = &report.neighbors;
    // Roots: one set per component of the neighbor graph, added while 0-cells stay uncovered.
    let mut comp = vec![UNREACHABLE; sets.len()];
    let mut covered = vec![false; k.n];
    let mut roots = Vec::new();
    for a in 0..sets.len() {
        if comp[a] != UNREACHABLE {
            continue;
        }
        let mut members = vec![a];
        comp[a] = a;
        let mut q = VecDeque::from([a]);
        while let Some(b) = q.pop_front() {
            for &c in &nb[b] {
                if comp[c] == UNREACHABLE {
                    comp[c] = a;
                    members.push(c);
                    q.push_back(c);
                }
            }
        }
        if members.iter().any(|&b| sets[b].iter().any(|&v| !covered[v])) {
            roots.push(a);
            for &b in &members {
                for &v in &sets[b] {
                    covered[v] = true;
                }
            }
        }
    }
    let mut paths: Vec<Vec<usize>> = Vec::new();
    let mut frontier: Vec<Vec<usize>> = roots.iter().map(|&a| vec![a]).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for p in &frontier {
            if p.len() < depth {
                let last = p[p.len() - 1];
                for &b in &nb[last] {
                    if p.len() >= 2 && p[p.len() - 2] == b {
                        continue;
                    }
                    let mut q = p.clone();
                    q.push(b);
                    next.push(q);
                }
            }
        }
        paths.append(&mut frontier);
        frontier = next;
    }
    let mut nodes = Vec::new();
    let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); k.n];
    for p in &paths {
        let mut members = sets[*p.last().unwrap()].clone();
        members.sort_unstable();
        members.dedup();
        for i in members {
            by_vertex[i].push(nodes.len());
            nodes.push((i, p.clone()));
        }
    }
    let related = |x: usize, y: usize| nodes[x].1 == nodes[y].1 || extends_by_one(&nodes[x].1, &nodes[y].1);
    let mut edges = Vec::new();
    for (a, b) in k.edges() {
        for &x in &by_vertex[a] {
            for &y in &by_vertex[b] {
                if related(x, y) {
                    edges.push((x, y));
                }
            }
        }
    }
    let mut triangles = Vec::new();
    for t in k.triangles() {
        for &x in &by_vertex[t[0]] {
            for &y in &by_vertex[t[1]] {
                if !related(x, y) {
                    continue;
                }
                for &z in &by_vertex[t[2]] {
                    let (px, py, pz) = (&nodes[x].1, &nodes[y].1, &nodes[z].1);
                    let ok = if px == py && py == pz {
                        true
                    } else if px == py {
                        extends_by_one(px, pz)
                    } else if py == pz {
                        extends_by_one(py, px)
                    } else if px == pz {
                        extends_by_one(px, py)
                    } else {
                        false
                    };
                    if ok {
                        triangles.push([x, y, z]);
                    }
                }
            }
        }
    }
    let complex = Complex2::new(nodes.len(), &edges, &triangles)?;
    Ok(CoverComplex { nodes, complex, depth })
}

/// One 0-cell per cluster; 2-cells only for underlying 2-cells meeting three distinct clusters.
pub fn coarse_grain_complex(k: &Complex2, c: &Clustering) -> Result<Complex2> {
    let assign = c.assignment(k.n)?;
    let edges: Vec<(usize, usize)> =
        k.edges().filter(|&(a, b)| assign[a] != assign[b]).map(|(a, b)| (assign[a], assign[b])).collect();
    let triangles: Vec<[usize; 3]> = k
        .triangles()
        .map(|t| [assign[t[0]], assign[t[1]], assign[t[2]]])
        .filter(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
        .collect();
    Complex2::new(c.clusters.len(), &edges, &triangles)
}

/// Outcome of the removal search on each sampled complex.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperfiniteReport {
    pub epsilon: f64,
    pub range: usize,
    pub seed: u64,
    pub trials: usize,
    pub successes: usize,
    /// Removed fraction of 0-cells in each successful trial.
    pub removed_fractions: Vec<f64>,
}

impl HyperfiniteReport {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

/// Attempts per sampled complex in [`hyperfinite_experiment`].
pub const HYPERFINITE_RESTARTS: usize = 8;

/// For each of `trials` complexes drawn from `family`, searches for a removal
/// of at most `epsilon * n` 0-cells after which a cluster map of range `r`
/// verifies as good.
pub fn hyperfinite_experiment(
    family: &(dyn Fn(u64) -> Complex2 + Sync),
    epsilon: f64,
    r: usize,
    trials: usize,
    seed: u64,
) -> Result<HyperfiniteReport> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Invalid(format!("epsilon {epsilon} outside [0,1)")));
    }
    let outcomes: Vec<Option<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let k = family(seed.wrapping_add(t as u64));
            (0..HYPERFINITE_RESTARTS).find_map(|a| {
                let s = seed ^ ((t as u64) << 32) ^ (a as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
                localize_after_removal(&k, epsilon, r, s)
            })
        })
        .collect();
    let removed_fractions: Vec<f64> = outcomes.iter().flatten().copied().collect();
    Ok(HyperfiniteReport { epsilon, range: r, seed, trials, successes: removed_fractions.len(), removed_fractions })
}

/// Clusters into balls of radius `(r-1)/2` around shuffled centres, removes
/// 0-cells breaking triangles that meet three clusters, and verifies the
/// resulting cluster map. Returns the removed fraction on success.
fn localize_after_removal(k: &Complex2, epsilon: f64, r: usize, seed: u64) -> Option<f64> {
    let n = k.n;
    let budget = (epsilon * n as f64).floor() as usize;
    let radius = r.saturating_sub(1) / 2;
    let g = k.skeleton();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut cluster = vec![UNREACHABLE; n];
    let mut count = 0;
    for &c in &order {
        if cluster[c] != UNREACHABLE {
            continue;
        }
        let d = g.distances_from(c);
        for v in 0..n {
            if d[v] <= radius && cluster[v] == UNREACHABLE {
                cluster[v] = count;
            }
        }
        count += 1;
    }
    let mut keep = vec![true; n];
    let mut removed = 0;
    loop {
        let bad: Vec<[usize; 3]> = k
            .triangles()
            .filter(|t| t.iter().all(|&v| keep[v]))
            .filter(|t| cluster[t[0]] != cluster[t[1]] && cluster[t[1]] != cluster[t[2]] && cluster[t[0]] != cluster[t[2]])
            .collect();
        if bad.is_empty() {
            break;
        }
        if removed == budget {
            return None;
        }
        let mut hits = vec![0usize; n];
        for t in &bad {
            for &v in t {
                hits[v] += 1;
            }
        }
        let v = (0..n).max_by_key(|&v| (hits[v], std::cmp::Reverse(v))).unwrap();
        keep[v] = false;
        removed += 1;
    }
    let (sub, old) = k.induced(&keep);
    // Clusters split into connected pieces of the remaining 1-skeleton.
    let sg = sub.skeleton();
    let links: Vec<(usize, usize)> = sg.edges().into_iter().filter(|&(a, b)| cluster[old[a]] == cluster[old[b]]).collect();
    let clustering = Clustering::new(union_find_classes(sub.n, &links));
    let m = crate::localize::map_from_clustering(&sub, &clustering, r).ok()?;
    let report = crate::localize::verify_good(&m);
    report.is_good().then_some(removed as f64 / n.max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Term;
    use crate::instances;
    use proptest::prelude::*;

    #[test]
    fn interaction_complex_counts() {
        let one = CommutingHamiltonian::new(&[2, 2, 2], vec![Term::pauli_str(&[1, 2], "+ZZ").unwrap()]).unwrap();
        let k = interaction_complex(&one);
        assert_eq!((k.vertex_count(), k.edge_count(), k.triangle_count()), (3, 1, 0));
        let tri = CommutingHamiltonian::new(&[2; 4], vec![Term::pauli_str(&[1, 2, 3], "+ZZZ").unwrap()]).unwrap();
        let k = interaction_complex(&tri);
        assert_eq!((k.edge_count(), k.triangle_count()), (3, 1));
        let plaquette = CommutingHamiltonian::new(&[2; 4], vec![Term::pauli_str(&[0, 1, 2, 3], "+ZZZZ").unwrap()]).unwrap();
        let k = interaction_complex(&plaquette);
        assert_eq!((k.edge_count(), k.triangle_count()), (6, 4));
    }

    #[test]
    fn attach_triangles_matches_count() {
        assert_eq!(attach_triangles(&Graph::complete(3)).triangle_count(), 1);
        assert_eq!(attach_triangles(&Graph::binary_tree(3)).triangle_count(), 0);
        let c52 = Graph::cycle(5).power(2).unwrap();
        assert_eq!(attach_triangles(&c52).triangle_count(), crate::graph::count_triangles(&c52));
        assert_eq!(attach_triangles(&c52).triangle_count(), 10);
    }

    #[test]
    fn rejects_missing_boundary() {
        assert!(Complex2::new(3, &[(0, 1), (1, 2)], &[[0, 1, 2]]).is_err());
        assert!(Complex2::new(2, &[(0, 0)], &[]).is_err());
    }

    #[test]
    fn example_has_five_shields() {
        let (k, x) = instances::five_shield_example();
        let sh = shields(&k, &x);
        assert_eq!(sh.len(), 5);
        let strip = sh.iter().find(|s| s.pairs.len() == 5).unwrap();
        assert_eq!(strip.interior(), BTreeSet::from([0, 1, 2]));
        assert_eq!(strip.exterior(), BTreeSet::from([4, 5, 6]));
        // The top and bottom interior 0-cells each lie in one more shield.
        for v in [0, 2] {
            assert_eq!(sh.iter().filter(|s| s.interior().contains(&v)).count(), 2);
        }
    }

    #[test]
    fn small_shield_cases() {
        let k = attach_triangles(&Graph::complete(3));
        let sh = shields(&k, &[0]);
        assert_eq!(sh.len(), 1);
        assert_eq!(sh[0].exterior(), BTreeSet::from([1, 2]));
        let k = Complex2::new(3, &[(1, 2)], &[]).unwrap();
        assert!(shields(&k, &[0]).is_empty());
    }

    #[test]
    fn ring_split() {
        let h = instances::ring_zz(6);
        let s = split_by_shields(&h, &[3]).unwrap();
        assert_eq!(s.shields.len(), 2);
        assert_eq!(s.per_shield, vec![vec![2], vec![3]]);
        assert!(s.inside.is_empty());
        assert_eq!(s.outside.len(), 4);
        let far = CommutingHamiltonian::new(&[2; 4], vec![Term::pauli_str(&[2, 3], "+ZZ").unwrap()]).unwrap();
        assert!(split_by_shields(&far, &[0]).unwrap().shields.is_empty());
    }

    #[test]
    fn example_split_groups() {
        let h = instances::five_shield_example_hamiltonian();
        let (_, x) = instances::five_shield_example();
        let s = split_by_shields(&h, &x).unwrap();
        assert_eq!(s.per_shield.len(), 5);
        assert!(s.per_shield.iter().all(|p| !p.is_empty()));
        let (hx, parts, hc) = s.hamiltonians(&h);
        assert_eq!(hx.terms.len() + parts.iter().map(|p| p.terms.len()).sum::<usize>() + hc.terms.len(), h.terms.len());
    }

    /// Unrolls the 6-cycle onto the integers: the cover over the pair sets
    /// `{a, a+1}` reached from set 0 must be a path whose projections step by
    /// one modulo 6.
    #[test]
    fn cycle_cover_unrolls() {
        let g = Graph::cycle(6);
        let k = Complex2::from_graph(&g);
        let sets: Vec<Vec<usize>> = (0..6).map(|a| vec![a, (a + 1) % 6]).collect();
        let rep = check_set_localizable(&k, &sets, 1);
        assert!(rep.ok, "{:?}", rep.violations);
        assert_eq!(rep.neighbors[0], vec![2, 4]);
        let cover = build_cover(&k, &sets, 3).unwrap();
        let cg = cover.complex.skeleton();
        assert_eq!(cg.vertex_count(), 10);
        assert_eq!(cg.edge_count(), 9);
        assert!(cg.is_connected() && cg.girth().is_none() && cg.max_degree() == 2);
        let end = (0..10).find(|&v| cg.degree(v) == 1).unwrap();
        let d = cg.distances_from(end);
        let mut walk: Vec<usize> = (0..10).collect();
        walk.sort_by_key(|&v| d[v]);
        let proj: Vec<usize> = walk.iter().map(|&v| cover.projection(v)).collect();
        let step = (proj[1] + 6 - proj[0]) % 6;
        assert!(step == 1 || step == 5);
        for w in proj.windows(2) {
            assert_eq!((w[1] + 6 - w[0]) % 6, step);
        }
        let coarse = coarse_grain_complex(&cover.complex, &cover.path_clustering()).unwrap();
        assert_eq!(coarse.triangle_count(), 0);
        assert!(coarse.skeleton().girth().is_none());
    }

    #[test]
    fn tree_cover_is_base() {
        let g = Graph::binary_tree(3);
        let k = attach_triangles(&g);
        let sets: Vec<Vec<usize>> = (0..g.vertex_count()).map(|v| vec![v]).collect();
        assert!(check_set_localizable(&k, &sets, 0).ok);
        for depth in [1, 3, 6] {
            let cover = build_cover(&k, &sets, depth).unwrap();
            let expect = (depth).min(4);
            let levels = cover.nodes.iter().map(|n| n.1.len()).max().unwrap();
            assert_eq!(levels, expect);
            if depth >= 4 {
                assert_eq!(cover.complex.vertex_count(), g.vertex_count());
                assert_eq!(cover.complex.edge_count(), g.edge_count());
                let f = cover.fibers(g.vertex_count());
                assert!(f.iter().all(|x| x.len() == 1));
            }
        }
    }

    #[test]
    fn thin_torus_cover_is_a_line() {
        // Triangulated 3 x 8 torus; sets are the 3-cycles of columns.
        let (w, len) = (3, 8);
        let id = |r: usize, c: usize| (c % len) * w + r % w;
        let mut edges = Vec::new();
        let mut tris = Vec::new();
        for c in 0..len {
            for r in 0..w {
                edges.extend([(id(r, c), id(r + 1, c)), (id(r, c), id(r, c + 1)), (id(r, c), id(r + 1, c + 1))]);
                tris.push([id(r, c), id(r + 1, c), id(r + 1, c + 1)]);
                tris.push([id(r, c), id(r, c + 1), id(r + 1, c + 1)]);
            }
        }
        let k = Complex2::new(w * len, &edges, &tris).unwrap();
        let sets: Vec<Vec<usize>> = (0..len).map(|c| (0..w).map(|r| id(r, c)).collect()).collect();
        assert!(check_set_localizable(&k, &sets, 1).ok);
        let cover = build_cover(&k, &sets, 5).unwrap();
        let coarse = coarse_grain_complex(&cover.complex, &cover.path_clustering()).unwrap();
        let cg = coarse.skeleton();
        assert_eq!(coarse.triangle_count(), 0);
        assert_eq!(cg.edge_count() + 1, cg.vertex_count());
        assert!(cg.max_degree() <= 2 && cg.is_connected());
    }

    #[test]
    fn set_conditions() {
        let k = attach_triangles(&Graph::path(5));
        let everything = vec![(0..5).collect::<Vec<_>>()];
        assert!(check_set_localizable(&k, &everything, 4).ok);
        assert!(!check_set_localizable(&k, &everything, 3).ok);
        let partial = vec![vec![0, 1], vec![1, 2]];
        let rep = check_set_localizable(&k, &partial, 4);
        assert!(rep.violations.iter().any(|v| v.starts_with("condition 2")));
        // Radius-1 balls around levels 0 and 2 of a binary tree.
        let g = Graph::binary_tree(4);
        let depth = crate::graph::tree_depths(&crate::graph::bfs_parents(&g)).unwrap();
        let k = attach_triangles(&g);
        let mut sets = Vec::new();
        for v in 0..g.vertex_count() {
            if depth[v] % 2 == 0 {
                let mut s = vec![v];
                s.extend(g.neighbors(v).iter().copied().filter(|&w| depth[w] > depth[v]));
                sets.push(s);
            }
        }
        let rep = check_set_localizable(&k, &sets, 2);
        assert!(rep.ok, "{:?}", rep.violations);
    }

    #[test]
    fn coarse_grain_rules() {
        let k = attach_triangles(&Graph::complete(3));
        assert_eq!(coarse_grain_complex(&k, &Clustering::singletons(3)).unwrap(), k);
        let merged = coarse_grain_complex(&k, &Clustering::new(vec![vec![0, 1], vec![2]])).unwrap();
        assert_eq!((merged.edge_count(), merged.triangle_count()), (1, 0));
        let g = Graph::binary_tree(4);
        let parents = crate::graph::bfs_parents(&g);
        let c = crate::graph::tree_power_clustering(&parents, 2).unwrap();
        let coarse = coarse_grain_complex(&attach_triangles(&g.power(2).unwrap()), &c).unwrap();
        assert_eq!(coarse.triangle_count(), 0);
    }

    #[test]
    fn hyperfinite_cases() {
        let graphlike = |_: u64| Complex2::from_graph(&Graph::cycle(12));
        let rep = hyperfinite_experiment(&graphlike, 0.0, 2, 2, 1).unwrap();
        assert_eq!(rep.success_rate(), 1.0);
        let lattice = |_: u64| instances::triangulated_lattice(12);
        let rep = hyperfinite_experiment(&lattice, 0.2, 9, 2, 7).unwrap();
        assert_eq!(rep.success_rate(), 1.0);
        assert!(rep.removed_fractions.iter().all(|&f| f <= 0.2));
        assert!(hyperfinite_experiment(&lattice, 1.5, 9, 1, 7).is_err());
    }

    fn arb_complex() -> impl Strategy<Value = Complex2> {
        (3usize..9, proptest::collection::vec((0usize..9, 0usize..9), 0..20)).prop_map(|(n, raw)| {
            let edges: Vec<(usize, usize)> = raw.into_iter().map(|(a, b)| (a % n, b % n)).filter(|(a, b)| a != b).collect();
            attach_triangles(&Graph::from_edges(n, &edges).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn shields_partition_crossing_pairs(k in arb_complex(), mask in 0u32..512) {
            let x: Vec<usize> = (0..k.vertex_count()).filter(|v| mask >> v & 1 == 1).collect();
            let sh = shields(&k, &x);
            let mut seen = BTreeSet::new();
            for s in &sh {
                for &p in &s.pairs {
                    prop_assert!(seen.insert(p));
                    prop_assert!(x.contains(&p.0) && !x.contains(&p.1) && k.has_edge(p.0, p.1));
                }
            }
            let crossing = k.edges().filter(|&(a, b)| x.contains(&a) != x.contains(&b)).count();
            prop_assert_eq!(seen.len(), crossing);
        }

        #[test]
        fn cover_projects_onto_cells(k in arb_complex(), depth in 1usize..4) {
            let sets: Vec<Vec<usize>> = (0..k.vertex_count()).map(|v| vec![v]).collect();
            if let Ok(cover) = build_cover(&k, &sets, depth) {
                for (a, b) in cover.complex.edges() {
                    prop_assert!(k.has_edge(cover.projection(a), cover.projection(b)));
                }
                for t in cover.complex.triangles() {
                    prop_assert!(k.has_triangle(cover.projection(t[0]), cover.projection(t[1]), cover.projection(t[2])));
                    let paths: BTreeSet<&Vec<usize>> = t.iter().map(|&v| &cover.nodes[v].1).collect();
                    prop_assert!(paths.len() <= 2);
                }
                // Singleton sets make the neighbor graph the 1-skeleton, rooted at
                // the least 0-cell of each component.
                let g = k.skeleton();
                let fibers = cover.fibers(k.vertex_count());
                for comp in g.components() {
                    let d = g.distances_from(*comp.iter().min().unwrap());
                    for v in comp {
                        prop_assert_eq!(!fibers[v].is_empty(), d[v] < depth);
                    }
                }
            }
        }
    }
}
