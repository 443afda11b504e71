//! Combinatorial maps from a 2-complex onto a graph: the high-girth collapse,
//! goodness checks, distortion bounds and bad-cell normalization.
//!
//! A map sends every source 0-cell to a target 0-cell and every source 1-cell
//! `(i, j)`, `i < j`, to a walk from the image of `i` to the image of `j`. A
//! 2-cell covers the tree spanned by its boundary walks and may carry a
//! centre image. Pre-images are assembled from three kinds of points: source
//! 0-cells, points on source 1-cells at the fraction given by the walk
//! position, and one symbolic interior point per 2-cell at distance 1/2 from
//! each of its 0-cells. Within one 2-cell all points mapping to the same
//! target point are joined.

use crate::complex::{attach_triangles, coarse_grain_complex, union_find_classes, Complex2};
use crate::graph::{Clustering, Graph, UNREACHABLE};
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizationMap {
    pub source: Complex2,
    pub target: Graph,
    pub vertex_image: Vec<usize>,
    /// Walk of each source 1-cell `(i, j)` with `i < j`, from the image of `i`.
    pub edge_path: BTreeMap<(usize, usize), Vec<usize>>,
    /// 2-cells whose centre maps to a target 0-cell.
    pub cell_center: BTreeMap<[usize; 3], usize>,
    pub range: usize,
}

impl LocalizationMap {
    /// Checks that every source cell has an image inside the target.
    pub fn new(
        source: Complex2,
        target: Graph,
        vertex_image: Vec<usize>,
        edge_path: BTreeMap<(usize, usize), Vec<usize>>,
        cell_center: BTreeMap<[usize; 3], usize>,
        range: usize,
    ) -> Result<Self> {
        let tn = target.vertex_count();
        if vertex_image.len() != source.vertex_count() || vertex_image.iter().any(|&a| a >= tn) {
            return Err(Error::Invalid("vertex images do not match the complexes".into()));
        }
        for e in source.edges() {
            match edge_path.get(&e) {
                Some(w) if !w.is_empty() && w.iter().all(|&a| a < tn) => {}
                _ => return Err(Error::Invalid(format!("1-cell {e:?} has no walk in the target"))),
            }
        }
        if edge_path.len() != source.edge_count() {
            return Err(Error::Invalid("walk given for a pair that is not a 1-cell".into()));
        }
        for (t, &a) in &cell_center {
            if !source.has_triangle(t[0], t[1], t[2]) || a >= tn {
                return Err(Error::Invalid(format!("centre of {t:?} is not valid")));
            }
        }
        Ok(LocalizationMap { source, target, vertex_image, edge_path, cell_center, range })
    }

    /// Walk from the image of `a` to the image of `b`.
    pub fn walk(&self, a: usize, b: usize) -> Vec<usize> {
        let w = &self.edge_path[&(a.min(b), a.max(b))];
        if a < b {
            w.clone()
        } else {
            w.iter().rev().copied().collect()
        }
    }

    pub fn l_max(&self) -> usize {
        self.edge_path.values().map(|w| w.len() - 1).max().unwrap_or(0)
    }

    /// Closed boundary walk of a 2-cell, starting and ending at the image of `t[0]`.
    pub fn boundary_walk(&self, t: [usize; 3]) -> Vec<usize> {
        let mut w = self.walk(t[0], t[1]);
        w.extend_from_slice(&self.walk(t[1], t[2])[1..]);
        w.extend_from_slice(&self.walk(t[2], t[0])[1..]);
        w
    }
}

/// Whether a closed walk in a graph reduces to a point by removing backtracks.
pub fn is_contractible(closed: &[usize]) -> bool {
    let mut s: Vec<usize> = Vec::new();
    for &v in closed {
        if s.len() >= 2 && s[s.len() - 2] == v {
            s.pop();
        } else if s.last() != Some(&v) {
            s.push(v);
        }
    }
    while s.len() >= 3 && s[1] == s[s.len() - 2] {
        s.remove(0);
        s.pop();
    }
    s.len() == 1
}

/// First Betti number `E - V + components`.
pub fn first_betti(k1: &Graph) -> usize {
    k1.edge_count() + k1.components().len() - k1.vertex_count()
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Point {
    Vertex(usize),
    /// Point on 1-cell `(u, v)`, `u < v`, at distance `s` from `u`.
    OnEdge(usize, usize, f64),
    Cell([usize; 3]),
}

/// What a pre-image point refers to, so normalization can relabel it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Origin {
    Vertex(usize),
    Visit((usize, usize), usize),
    Cell([usize; 3]),
}

#[derive(Clone, Debug, Default)]
struct PreImage {
    points: Vec<Point>,
    origins: Vec<Origin>,
    links: Vec<(usize, usize)>,
}

impl PreImage {
    fn add(&mut self, p: Point, o: Origin) -> usize {
        self.points.push(p);
        self.origins.push(o);
        self.points.len() - 1
    }

    fn components(&self) -> Vec<Vec<usize>> {
        union_find_classes(self.points.len(), &self.links)
    }
}

struct PreImages {
    vertex: Vec<PreImage>,
    edge: BTreeMap<(usize, usize), PreImage>,
}

fn preimages(m: &LocalizationMap) -> PreImages {
    let tn = m.target.vertex_count();
    let mut vertex = vec![PreImage::default(); tn];
    let mut edge: BTreeMap<(usize, usize), PreImage> = BTreeMap::new();
    let mut vidx = vec![0; m.source.vertex_count()];
    for (v, &a) in m.vertex_image.iter().enumerate() {
        vidx[v] = vertex[a].add(Point::Vertex(v), Origin::Vertex(v));
    }
    // visits[e][t]: index of walk position t inside the pre-image of w[t];
    // crossings[e][t]: index of the step t -> t+1 inside its edge pre-image.
    let mut visits: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut crossings: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (&(u, v), w) in &m.edge_path {
        let len = w.len() - 1;
        let mut vis = vec![vidx[u]; w.len()];
        vis[len] = vidx[v];
        if len == 0 {
            vertex[w[0]].links.push((vidx[u], vidx[v]));
        }
        for t in 1..len {
            vis[t] = vertex[w[t]].add(Point::OnEdge(u, v, t as f64 / len as f64), Origin::Visit((u, v), t));
        }
        let mut cr = Vec::with_capacity(len);
        for t in 0..len {
            let key = (w[t].min(w[t + 1]), w[t].max(w[t + 1]));
            let p = Point::OnEdge(u, v, (t as f64 + 0.5) / len as f64);
            cr.push(edge.entry(key).or_default().add(p, Origin::Visit((u, v), t)));
        }
        visits.insert((u, v), vis);
        crossings.insert((u, v), cr);
    }
    for t in m.source.triangles() {
        let mut at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut across: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for e in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
            let w = &m.edge_path[&e];
            for (pos, &a) in w.iter().enumerate() {
                at.entry(a).or_default().push(visits[&e][pos]);
            }
            for s in 0..w.len() - 1 {
                across.entry((w[s].min(w[s + 1]), w[s].max(w[s + 1]))).or_default().push(crossings[&e][s]);
            }
        }
        if let Some(&c) = m.cell_center.get(&t) {
            at.entry(c).or_default();
        }
        for (a, members) in at {
            let pre = &mut vertex[a];
            let hub = pre.add(Point::Cell(t), Origin::Cell(t));
            pre.links.extend(members.into_iter().map(|x| (hub, x)));
        }
        for (key, members) in across {
            let pre = edge.get_mut(&key).unwrap();
            let hub = pre.add(Point::Cell(t), Origin::Cell(t));
            pre.links.extend(members.into_iter().map(|x| (hub, x)));
        }
    }
    PreImages { vertex, edge }
}

/// Distances in the source 1-skeleton, extended to pre-image points.
struct Metric {
    d: Vec<Vec<f64>>,
}

impl Metric {
    fn new(k: &Complex2) -> Self {
        let d = k
            .skeleton()
            .all_distances()
            .into_iter()
            .map(|row| row.into_iter().map(|x| if x == UNREACHABLE { f64::INFINITY } else { x as f64 }).collect())
            .collect();
        Metric { d }
    }

    /// Distance from `p` to every source 0-cell.
    fn profile(&self, p: &Point) -> Vec<f64> {
        match *p {
            Point::Vertex(v) => self.d[v].clone(),
            Point::OnEdge(u, v, s) => self.d[u].iter().zip(&self.d[v]).map(|(a, b)| (s + a).min(1.0 - s + b)).collect(),
            Point::Cell(t) => (0..self.d.len()).map(|w| 0.5 + t.iter().map(|&x| self.d[x][w]).fold(f64::INFINITY, f64::min)).collect(),
        }
    }

    fn between(&self, p: &Point, prof: &[f64], q: &Point) -> f64 {
        match (*p, *q) {
            (Point::Cell(a), Point::Cell(b)) if a == b => 0.0,
            (Point::OnEdge(u1, v1, s1), Point::OnEdge(u2, v2, s2)) if (u1, v1) == (u2, v2) => {
                (s1 - s2).abs().min(s2 + prof[u2]).min(1.0 - s2 + prof[v2])
            }
            (_, Point::Vertex(w)) => prof[w],
            (_, Point::OnEdge(u, v, s)) => (s + prof[u]).min(1.0 - s + prof[v]),
            (_, Point::Cell(t)) => 0.5 + t.iter().map(|&x| prof[x]).fold(f64::INFINITY, f64::min),
        }
    }

    fn diameter(&self, pts: &[Point]) -> f64 {
        self.cross(pts, pts)
    }

    fn cross(&self, a: &[Point], b: &[Point]) -> f64 {
        let mut best: f64 = 0.0;
        for p in a {
            let prof = self.profile(p);
            for q in b {
                best = best.max(self.between(p, &prof, q));
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapMetrics {
    pub l_max: usize,
    pub d1: usize,
    pub max_preimage_diameter_0cell: f64,
    pub max_preimage_diameter_1cell: f64,
    /// Constant `c` in `diam f^-1(S) <= c (diam S + 1)` for target sets `S`.
    pub preimage_distortion: f64,
    /// Constant `c` in `diam f(S) <= c (diam S + 1)` for source sets `S`; equals `l_max`.
    pub image_distortion: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    WalkEndpoints((usize, usize)),
    WalkLeavesTarget((usize, usize)),
    NonContractibleBoundary([usize; 3]),
    CenterOffBoundary([usize; 3]),
    Unanchored(usize),
    AmbiguousAnchor(usize),
    DisconnectedVertexPreimage(usize),
    DisconnectedEdgePreimage((usize, usize)),
    PreimageTooWide { cell: usize, diameter: f64, range: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WalkEndpoints(e) => write!(f, "walk of 1-cell {e:?} does not join the endpoint images"),
            Violation::WalkLeavesTarget(e) => write!(f, "walk of 1-cell {e:?} uses a pair that is not a target 1-cell"),
            Violation::NonContractibleBoundary(t) => write!(f, "boundary of 2-cell {t:?} is not contractible in the target"),
            Violation::CenterOffBoundary(t) => write!(f, "centre of 2-cell {t:?} lies off its boundary image"),
            Violation::Unanchored(a) => write!(f, "target 0-cell {a} is neither a vertex image nor a centre image"),
            Violation::AmbiguousAnchor(a) => write!(f, "target 0-cell {a} is the centre image of several 2-cells"),
            Violation::DisconnectedVertexPreimage(a) => write!(f, "pre-image of target 0-cell {a} is disconnected"),
            Violation::DisconnectedEdgePreimage(e) => write!(f, "pre-image of an interior point of target 1-cell {e:?} is disconnected"),
            Violation::PreimageTooWide { cell, diameter, range } => {
                write!(f, "pre-image of target 0-cell {cell} has diameter {diameter} > {range}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodReport {
    pub metrics: MapMetrics,
    pub violations: Vec<Violation>,
}

impl GoodReport {
    pub fn is_good(&self) -> bool {
        self.violations.is_empty()
    }
}

fn walk_violations(m: &LocalizationMap) -> Vec<Violation> {
    let mut out = Vec::new();
    for (&(u, v), w) in &m.edge_path {
        if w[0] != m.vertex_image[u] || w[w.len() - 1] != m.vertex_image[v] {
            out.push(Violation::WalkEndpoints((u, v)));
        }
        if w.windows(2).any(|s| !m.target.has_edge(s[0], s[1])) {
            out.push(Violation::WalkLeavesTarget((u, v)));
        }
    }
    out
}

/// Checks every goodness condition and computes the metric constants.
pub fn verify_good(m: &LocalizationMap) -> GoodReport {
    let mut violations = walk_violations(m);
    let structural = !violations.is_empty();
    for t in m.source.triangles() {
        let b = m.boundary_walk(t);
        if !structural && !is_contractible(&b) {
            violations.push(Violation::NonContractibleBoundary(t));
        }
        if let Some(c) = m.cell_center.get(&t) {
            if !b.contains(c) {
                violations.push(Violation::CenterOffBoundary(t));
            }
        }
    }
    let tn = m.target.vertex_count();
    let mut imaged = vec![false; tn];
    for &a in &m.vertex_image {
        imaged[a] = true;
    }
    let mut centres = vec![0usize; tn];
    for &a in m.cell_center.values() {
        centres[a] += 1;
    }
    for a in 0..tn {
        if !imaged[a] && centres[a] == 0 {
            violations.push(Violation::Unanchored(a));
        } else if !imaged[a] && centres[a] > 1 {
            violations.push(Violation::AmbiguousAnchor(a));
        }
    }
    let l_max = m.l_max();
    let mut metrics = MapMetrics {
        l_max,
        d1: m.target.max_degree(),
        max_preimage_diameter_0cell: 0.0,
        max_preimage_diameter_1cell: 0.0,
        preimage_distortion: 1.0,
        image_distortion: l_max,
    };
    if structural {
        // Pre-images are undefined when walks do not join their endpoint images.
        return GoodReport { metrics, violations };
    }
    let pre = preimages(m);
    let metric = Metric::new(&m.source);
    let mut max0: f64 = 0.0;
    for (a, p) in pre.vertex.iter().enumerate() {
        if p.points.is_empty() {
            continue;
        }
        if p.components().len() > 1 {
            violations.push(Violation::DisconnectedVertexPreimage(a));
        }
        let d = metric.diameter(&p.points);
        if d > m.range as f64 {
            violations.push(Violation::PreimageTooWide { cell: a, diameter: d, range: m.range });
        }
        max0 = max0.max(d);
    }
    let mut max1: f64 = 0.0;
    for (&(a, b), p) in &pre.edge {
        if p.components().len() > 1 {
            violations.push(Violation::DisconnectedEdgePreimage((a, b)));
        }
        let mut closed = p.points.clone();
        closed.extend_from_slice(&pre.vertex[a].points);
        closed.extend_from_slice(&pre.vertex[b].points);
        max1 = max1.max(metric.diameter(&closed));
    }
    metrics.max_preimage_diameter_0cell = max0;
    metrics.max_preimage_diameter_1cell = max1;
    metrics.preimage_distortion = max0.max(max1).max(1.0);
    GoodReport { metrics, violations }
}

/// Outcome of checking both distortion inequalities on every pair of 0-cells.
#[derive(Clone, Debug, PartialEq)]
pub struct DistortionReport {
    pub target_pairs: usize,
    pub source_pairs: usize,
    /// Largest `diam f^-1(S) / (diam S + 1)` over target pairs.
    pub worst_preimage_ratio: f64,
    /// Largest `diam f(S) / (diam S + 1)` over source pairs.
    pub worst_image_ratio: f64,
    pub preimage_ok: bool,
    pub image_ok: bool,
}

/// Checks both inequalities on all 0-cell pairs. The diameter of a union of
/// pre-images is attained on some pair, so pairs are exhaustive for sets of
/// 0-cells.
pub fn check_distortion(m: &LocalizationMap, metrics: &MapMetrics) -> DistortionReport {
    let pre = preimages(m);
    let metric = Metric::new(&m.source);
    let td = m.target.all_distances();
    let tn = m.target.vertex_count();
    let diam: Vec<f64> = pre.vertex.iter().map(|p| metric.diameter(&p.points)).collect();
    let mut worst_pre: f64 = 0.0;
    let mut target_pairs = 0;
    for a in 0..tn {
        for b in a..tn {
            if td[a][b] == UNREACHABLE || pre.vertex[a].points.is_empty() || pre.vertex[b].points.is_empty() {
                continue;
            }
            target_pairs += 1;
            let cross = if a == b { 0.0 } else { metric.cross(&pre.vertex[a].points, &pre.vertex[b].points) };
            let d = diam[a].max(diam[b]).max(cross);
            worst_pre = worst_pre.max(d / (td[a][b] as f64 + 1.0));
        }
    }
    let mut worst_img: f64 = 0.0;
    let n = m.source.vertex_count();
    let mut source_pairs = 0;
    for v in 0..n {
        for w in v..n {
            if metric.d[v][w].is_infinite() {
                continue;
            }
            source_pairs += 1;
            let t = td[m.vertex_image[v]][m.vertex_image[w]] as f64;
            worst_img = worst_img.max(t / (metric.d[v][w] + 1.0));
        }
    }
    DistortionReport {
        target_pairs,
        source_pairs,
        worst_preimage_ratio: worst_pre,
        worst_image_ratio: worst_img,
        preimage_ok: worst_pre <= metrics.preimage_distortion + 1e-12,
        image_ok: worst_img <= metrics.image_distortion as f64 + 1e-12,
    }
}

/// Maps `attach_triangles(g^r)` onto `g`, sending each 1-cell of the power to
/// the unique geodesic of `g` between its endpoints.
pub fn collapse_high_girth_power(g: &Graph, r: usize) -> Result<(Complex2, LocalizationMap)> {
    if r == 0 {
        return Err(Error::Invalid("range must be at least 1".into()));
    }
    if let Some(girth) = g.girth() {
        if girth <= 3 * r {
            return Err(Error::Girth { girth: girth.to_string(), needed: 3 * r });
        }
    }
    let source = attach_triangles(&g.power(r)?);
    let mut edge_path = BTreeMap::new();
    for (a, b) in source.edges() {
        edge_path.insert((a, b), g.shortest_path(a, b).expect("power edges join connected vertices"));
    }
    let n = g.vertex_count();
    let m = LocalizationMap::new(source.clone(), g.clone(), (0..n).collect(), edge_path, BTreeMap::new(), r)?;
    Ok((source, m))
}

/// 2-cells of the power complex in collapse order: decreasing largest
/// endpoint distance in `g`, ties broken lexicographically.
pub fn collapse_order(source: &Complex2, g: &Graph) -> Vec<[usize; 3]> {
    let mut keyed: Vec<(usize, [usize; 3])> = source
        .triangles()
        .map(|t| {
            let d = [g.distances_from(t[0]), g.distances_from(t[1])];
            (d[0][t[1]].max(d[0][t[2]]).max(d[1][t[2]]), t)
        })
        .collect();
    keyed.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    keyed.into_iter().map(|x| x.1).collect()
}

/// Sends each cluster to one target 0-cell; 1-cells inside a cluster map to
/// that 0-cell and the rest to the target 1-cell between their clusters.
pub fn map_from_clustering(k: &Complex2, c: &Clustering, r: usize) -> Result<LocalizationMap> {
    let assign = c.assignment(k.vertex_count())?;
    let target = coarse_grain_complex(k, c)?.skeleton();
    let edge_path = k
        .edges()
        .map(|(a, b)| ((a, b), if assign[a] == assign[b] { vec![assign[a]] } else { vec![assign[a], assign[b]] }))
        .collect();
    LocalizationMap::new(k.clone(), target, assign, edge_path, BTreeMap::new(), r)
}

fn rebuild_target(n: usize, edge_path: &BTreeMap<(usize, usize), Vec<usize>>) -> Graph {
    let mut edges = BTreeSet::new();
    for w in edge_path.values() {
        for s in w.windows(2) {
            edges.insert((s[0].min(s[1]), s[0].max(s[1])));
        }
    }
    let edges: Vec<_> = edges.into_iter().collect();
    Graph::from_edges(n, &edges).expect("walk steps join distinct 0-cells")
}

fn dedup_walk(w: &mut Vec<usize>) {
    w.dedup();
}

/// Drops target 0-cell `a`, renumbering the later ones.
fn remove_target_vertex(m: &mut LocalizationMap, a: usize) {
    let shift = |x: usize| if x > a { x - 1 } else { x };
    for x in m.vertex_image.iter_mut() {
        *x = shift(*x);
    }
    for w in m.edge_path.values_mut() {
        for x in w.iter_mut() {
            *x = shift(*x);
        }
    }
    for x in m.cell_center.values_mut() {
        *x = shift(*x);
    }
    m.target = rebuild_target(m.target.vertex_count() - 1, &m.edge_path);
}

/// Duplicates every target 0-cell whose pre-image has several components.
fn split_disconnected(m: &mut LocalizationMap) -> bool {
    let pre = preimages(m);
    let mut next = m.target.vertex_count();
    let mut changed = false;
    for (a, p) in pre.vertex.iter().enumerate() {
        let comps = p.components();
        for comp in comps.iter().skip(1) {
            for &i in comp {
                match p.origins[i] {
                    Origin::Vertex(v) => m.vertex_image[v] = next,
                    Origin::Visit(e, t) => m.edge_path.get_mut(&e).unwrap()[t] = next,
                    Origin::Cell(t) => {
                        if let Some(c) = m.cell_center.get_mut(&t) {
                            if *c == a {
                                *c = next;
                            }
                        }
                    }
                }
            }
            next += 1;
            changed = true;
        }
    }
    if changed {
        for (&(u, v), w) in m.edge_path.iter_mut() {
            let len = w.len() - 1;
            w[0] = m.vertex_image[u];
            w[len] = m.vertex_image[v];
        }
        m.target = rebuild_target(next, &m.edge_path);
    }
    changed
}

/// Splits disconnected 0-cell pre-images, then removes unanchored target
/// 0-cells of degree at most 2 and anchors the remaining ones in the
/// lexicographically least free 2-cell whose boundary passes through them.
/// The range grows by one if any bad 0-cell is removed.
pub fn normalize_map(m: &LocalizationMap) -> Result<LocalizationMap> {
    let mut m = m.clone();
    let violations = walk_violations(&m);
    if let Some(v) = violations.first() {
        return Err(Error::Invalid(v.to_string()));
    }
    split_disconnected(&mut m);
    let mut removed = false;
    loop {
        let tn = m.target.vertex_count();
        let mut anchored = vec![false; tn];
        for &a in m.vertex_image.iter().chain(m.cell_center.values()) {
            anchored[a] = true;
        }
        let Some(a) = (0..tn).find(|&a| !anchored[a]) else { break };
        let nb = m.target.neighbors(a).to_vec();
        match nb.len() {
            0 => {}
            1 => {
                for w in m.edge_path.values_mut() {
                    for x in w.iter_mut() {
                        if *x == a {
                            *x = nb[0];
                        }
                    }
                    dedup_walk(w);
                }
            }
            2 if !m.target.has_edge(nb[0], nb[1]) => {
                for w in m.edge_path.values_mut() {
                    w.retain(|&x| x != a);
                    dedup_walk(w);
                }
            }
            _ => {
                let free = m
                    .source
                    .triangles()
                    .find(|t| !m.cell_center.contains_key(t) && m.boundary_walk(*t).contains(&a))
                    .ok_or(Error::BranchMigration(a))?;
                m.cell_center.insert(free, a);
                continue;
            }
        }
        remove_target_vertex(&mut m, a);
        removed = true;
    }
    if removed {
        m.range += 1;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_counterexample_graph, EnsembleParams};
    use proptest::prelude::*;

    fn paths(list: &[((usize, usize), &[usize])]) -> BTreeMap<(usize, usize), Vec<usize>> {
        list.iter().map(|(e, w)| (*e, w.to_vec())).collect()
    }

    #[test]
    fn contractibility() {
        assert!(is_contractible(&[0, 1, 0]));
        assert!(is_contractible(&[3]));
        assert!(is_contractible(&[0, 4, 1, 4, 2, 4, 0]));
        assert!(!is_contractible(&[0, 1, 2, 0]));
        assert!(!is_contractible(&[0, 1, 2, 3, 1, 0]));
    }

    #[test]
    fn betti_numbers() {
        assert_eq!(first_betti(&Graph::binary_tree(3)), 0);
        assert_eq!(first_betti(&Graph::cycle(6)), 1);
        let two = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(first_betti(&two), 2);
    }

    #[test]
    fn identity_map_is_good() {
        let g = Graph::cycle(5);
        let k = Complex2::from_graph(&g);
        let m = map_from_clustering(&k, &Clustering::singletons(5), 1).unwrap();
        let rep = verify_good(&m);
        assert!(rep.is_good(), "{:?}", rep.violations);
        assert_eq!(rep.metrics.l_max, 1);
        assert_eq!(rep.metrics.max_preimage_diameter_0cell, 0.0);
        assert_eq!(normalize_map(&m).unwrap(), m);
    }

    #[test]
    fn star_image_of_triangle() {
        let source = attach_triangles(&Graph::complete(3));
        let target = Graph::star(3);
        let edge_path = paths(&[((0, 1), &[1, 0, 2]), ((1, 2), &[2, 0, 3]), ((0, 2), &[1, 0, 3])]);
        let centre = BTreeMap::from([([0, 1, 2], 0)]);
        let m = LocalizationMap::new(source, target, vec![1, 2, 3], edge_path, centre, 1).unwrap();
        let rep = verify_good(&m);
        assert!(rep.is_good(), "{:?}", rep.violations);
        assert_eq!(rep.metrics.d1, 3);
        assert_eq!(rep.metrics.l_max, 2);
        let mut bare = m.clone();
        bare.cell_center.clear();
        assert_eq!(verify_good(&bare).violations, vec![Violation::Unanchored(0)]);
        // Normalization anchors the centre again.
        assert_eq!(normalize_map(&bare).unwrap(), m);
    }

    #[test]
    fn subdivision_flagged_and_merged() {
        for n in 2..5 {
            let source = Complex2::from_graph(&Graph::path(2));
            let walk: Vec<usize> = (0..=n).collect();
            let m = LocalizationMap::new(source, Graph::path(n + 1), vec![0, n], paths(&[((0, 1), &walk)]), BTreeMap::new(), 1)
                .unwrap();
            let rep = verify_good(&m);
            assert_eq!(rep.metrics.l_max, n);
            assert_eq!(rep.violations.iter().filter(|v| matches!(v, Violation::Unanchored(_))).count(), n - 1);
            let fixed = normalize_map(&m).unwrap();
            assert!(verify_good(&fixed).is_good());
            assert_eq!(fixed.target.vertex_count(), 2);
            assert_eq!(fixed.edge_path[&(0, 1)], vec![0, 1]);
            assert_eq!(fixed.range, 2);
        }
    }

    #[test]
    fn disconnected_preimage_is_split() {
        // Two opposite 0-cells of a 6-cycle share an image; the target is two
        // triangles glued at that image.
        let source = Complex2::from_graph(&Graph::cycle(6));
        let img = vec![0, 1, 2, 0, 3, 4];
        let mut edge_path = BTreeMap::new();
        for (a, b) in source.edges() {
            edge_path.insert((a, b), vec![img[a], img[b]]);
        }
        let target = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]).unwrap();
        let m = LocalizationMap::new(source, target, img, edge_path, BTreeMap::new(), 1).unwrap();
        assert!(verify_good(&m).violations.contains(&Violation::DisconnectedVertexPreimage(0)));
        let fixed = normalize_map(&m).unwrap();
        let rep = verify_good(&fixed);
        assert!(rep.is_good(), "{:?}", rep.violations);
        assert_eq!(fixed.target.vertex_count(), 6);
        assert_ne!(fixed.vertex_image[0], fixed.vertex_image[3]);
        assert_eq!(first_betti(&fixed.target), 1);
    }

    #[test]
    fn branch_migration_reported() {
        let source = attach_triangles(&Graph::complete(3));
        let edge_path = paths(&[((0, 1), &[1, 0, 2]), ((1, 2), &[2, 0, 3]), ((0, 2), &[1, 0, 3])]);
        let centre = BTreeMap::from([([0, 1, 2], 1)]);
        let m = LocalizationMap::new(source, Graph::star(3), vec![1, 2, 3], edge_path, centre, 1).unwrap();
        assert_eq!(normalize_map(&m), Err(Error::BranchMigration(0)));
    }

    #[test]
    fn collapse_cycle_power() {
        let g = Graph::cycle(7);
        let (k, m) = collapse_high_girth_power(&g, 2).unwrap();
        assert_eq!(k.triangle_count(), 7);
        for t in k.triangles() {
            let mut used = BTreeSet::new();
            let b = m.boundary_walk(t);
            for s in b.windows(2) {
                used.insert((s[0].min(s[1]), s[0].max(s[1])));
            }
            let used: Vec<_> = used.into_iter().collect();
            assert_eq!(used.len(), 2);
            let (e, f) = (used[0], used[1]);
            assert!(e.0 == f.0 || e.0 == f.1 || e.1 == f.0 || e.1 == f.1);
        }
        let rep = verify_good(&m);
        assert!(rep.is_good(), "{:?}", rep.violations);
        assert_eq!(rep.metrics.l_max, 2);
        assert!(rep.metrics.max_preimage_diameter_0cell <= 4.0);
        let order = collapse_order(&k, &g);
        assert_eq!(order.len(), 7);
        assert_eq!(order[0], [0, 1, 2]);
        assert!(matches!(collapse_high_girth_power(&Graph::cycle(6), 2), Err(Error::Girth { .. })));
    }

    #[test]
    fn collapse_tree_and_ensemble() {
        let (_, m) = collapse_high_girth_power(&Graph::binary_tree(4), 2).unwrap();
        let rep = verify_good(&m);
        assert!(rep.is_good(), "{:?}", rep.violations);
        let s = sample_counterexample_graph(&EnsembleParams { n: 60, d: 4, r: 3, seed: 3 }).unwrap();
        let (_, m) = collapse_high_girth_power(&s.e, 2).unwrap();
        let rep = verify_good(&m);
        assert!(rep.is_good(), "{:?}", rep.violations);
        assert!(rep.metrics.l_max <= 2);
        assert!(rep.metrics.d1 <= 4);
        let d = check_distortion(&m, &rep.metrics);
        assert!(d.preimage_ok && d.image_ok, "{d:?}");
    }

    fn arb_tree() -> impl Strategy<Value = Graph> {
        proptest::collection::vec(0usize..1000, 1..24).prop_map(|raw| {
            let edges: Vec<(usize, usize)> = raw.iter().enumerate().map(|(i, &p)| (p % (i + 1), i + 1)).collect();
            Graph::from_edges(raw.len() + 1, &edges).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn collapse_of_trees_is_good(g in arb_tree(), r in 1usize..4) {
            let (_, m) = collapse_high_girth_power(&g, r).unwrap();
            let rep = verify_good(&m);
            prop_assert!(rep.metrics.l_max <= r);
            prop_assert!(rep.metrics.max_preimage_diameter_0cell <= 2.0 * r as f64);
            prop_assert!(rep.metrics.d1 <= g.max_degree());
            let d = check_distortion(&m, &rep.metrics);
            prop_assert!(d.preimage_ok && d.image_ok);
            let n = normalize_map(&m).unwrap();
            prop_assert_eq!(verify_good(&n).violations.len() <= rep.violations.len(), true);
        }
    }
}
