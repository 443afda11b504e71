//! Ground states on high-girth 1-complexes by replicating balls.
//!
//! One step chooses a vertex `i` on a cycle, takes the sites `Z` whose images
//! lie within `floor(l_max/2)` of `i`, and gives every site of `Z` one copy
//! per 1-cell at `i`. Terms leaving `Z` through the `j`-th 1-cell move to copy
//! `j`, so the cycles through `i` open up. A swap of tensor factors between
//! copies maps ground states back. Once `K_1` is a tree the instance is
//! coarse-grained to two-body form and solved directly.

use crate::algebra::{factor_decompose, generated_closure, term_interaction_algebra, Block, DEFAULT_SEED};
use crate::graph::{bfs_parents, tree_band_clustering, Graph};
use crate::hamiltonian::{CommutingHamiltonian, Term};
use crate::linalg::{eye, kron, Layout, Mat, ONE};
use crate::localize::{first_betti, LocalizationMap};
use crate::synth::circuit::{Circuit, Gate, GateOp, Register};
use crate::synth::two_body::solve_two_body;
use crate::verify::{exact_ground_energy, StateVector};
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Result of replicating the ball around one vertex.
#[derive(Clone, Debug)]
pub struct Split {
    pub graph: Graph,
    /// Vertices of the ball, ascending.
    pub ball: Vec<usize>,
    /// `copies[v][j]` is copy `j` of ball vertex `v`; copy 0 keeps the old id.
    pub copies: BTreeMap<usize, Vec<usize>>,
    /// Branch index of each vertex reached through a neighbour of `i`.
    pub branch: BTreeMap<usize, usize>,
}

fn bfs(g: &Graph, src: usize) -> (Vec<usize>, Vec<Option<usize>>) {
    let n = g.vertex_count();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![None; n];
    dist[src] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(v) = q.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                parent[w] = Some(v);
                q.push_back(w);
            }
        }
    }
    (dist, parent)
}

/// First step from `i` on the BFS path to `v`.
fn first_step(parent: &[Option<usize>], i: usize, v: usize) -> Option<usize> {
    let mut a = v;
    while let Some(p) = parent[a] {
        if p == i {
            return Some(a);
        }
        a = p;
    }
    None
}

/// Replicates the ball of radius `rho` around `i` once per 1-cell at `i`.
pub fn split_vertex(g: &Graph, i: usize, rho: usize) -> Result<Split> {
    let (dist, parent) = bfs(g, i);
    let nbrs: Vec<usize> = g.neighbors(i).to_vec();
    let k = nbrs.len();
    if k == 0 {
        return Err(Error::Invalid(format!("vertex {i} has no 1-cells")));
    }
    let ball: Vec<usize> = (0..g.vertex_count()).filter(|&v| dist[v] <= rho).collect();
    let mut branch = BTreeMap::new();
    for v in 0..g.vertex_count() {
        if let Some(s) = first_step(&parent, i, v) {
            branch.insert(v, nbrs.iter().position(|&x| x == s).unwrap());
        }
    }
    let mut next = g.vertex_count();
    let mut copies = BTreeMap::new();
    for &v in &ball {
        let mut c = vec![v];
        for _ in 1..k {
            c.push(next);
            next += 1;
        }
        copies.insert(v, c);
    }
    let in_ball = |v: usize| dist[v] <= rho;
    let mut edges = Vec::new();
    for (a, b) in g.edges() {
        match (in_ball(a), in_ball(b)) {
            (true, true) => {
                for j in 0..k {
                    edges.push((copies[&a][j], copies[&b][j]));
                }
            }
            (true, false) | (false, true) => {
                let (z, w) = if in_ball(a) { (a, b) } else { (b, a) };
                let j = if z == i { nbrs.iter().position(|&x| x == w).unwrap() } else { branch[&z] };
                edges.push((copies[&z][j], w));
            }
            (false, false) => edges.push((a, b)),
        }
    }
    let graph = Graph::new(next, &edges, usize::MAX)?;
    Ok(Split { graph, ball, copies, branch })
}

/// Smallest vertex of the 2-core, i.e. on some cycle.
fn vertex_on_cycle(g: &Graph) -> Option<usize> {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut q: VecDeque<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    while let Some(v) = q.pop_front() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &w in g.neighbors(v) {
            if alive[w] {
                deg[w] -= 1;
                if deg[w] == 1 {
                    q.push_back(w);
                }
            }
        }
    }
    (0..n).find(|&v| alive[v])
}

fn term_diameter(g: &Graph, image: &[usize], t: &Term) -> usize {
    let mut worst = 0;
    for &a in &t.support {
        let d = g.distances_from(image[a]);
        for &b in &t.support {
            worst = worst.max(d[image[b]]);
        }
    }
    worst
}

#[derive(Clone, Debug)]
pub struct TreeReduceSolution {
    pub circuit: Circuit,
    pub energy: f64,
    pub steps: usize,
    pub final_h: CommutingHamiltonian,
    pub final_target: Graph,
}

/// Permutation exchanging factors `a` and `b` of a tensor product.
fn factor_swap(dims: &[usize], a: usize, b: usize) -> Mat {
    let layout = Layout::new(dims);
    let mut p = Mat::zeros(layout.total, layout.total);
    for idx in 0..layout.total {
        let mut digits: Vec<usize> = (0..dims.len()).map(|k| layout.digit(idx, k)).collect();
        digits.swap(a, b);
        let out: usize = digits.iter().zip(&layout.strides).map(|(d, s)| d * s).sum();
        p[(out, idx)] = ONE;
    }
    p
}

/// Balls of radius `l_max / 2` must be trees for the split to open cycles.
pub fn check_girth(target: &Graph, l_max: usize) -> Result<()> {
    match target.girth() {
        Some(g) if g <= 2 * l_max => Err(Error::Girth { girth: g.to_string(), needed: 2 * l_max }),
        _ => Ok(()),
    }
}

pub fn tree_reduce_solve(h: &CommutingHamiltonian, m: &LocalizationMap) -> Result<TreeReduceSolution> {
    let l_max = m.l_max();
    check_girth(&m.target, l_max)?;
    solve_on_images(h, m.target.clone(), m.vertex_image.clone(), l_max)
}

/// The procedure on an explicit target graph and site images; `l_max`
/// bounds the image diameter of every term.
pub fn solve_on_images(h: &CommutingHamiltonian, target: Graph, image: Vec<usize>, l_max: usize) -> Result<TreeReduceSolution> {
    let rho = l_max / 2;
    let mut h = h.clone();
    let mut target = target;
    let mut image = image;
    let mut registers: Vec<Register> = h.dims().iter().enumerate().map(|(site, &dim)| Register { site, copy: 1, dim }).collect();
    let mut copies = vec![1usize; h.site_count()];
    let mut unitaries: Vec<Vec<Gate>> = Vec::new();
    let mut steps = 0;
    while first_betti(&target) > 0 {
        let i = vertex_on_cycle(&target).expect("a cycle has a 2-core");
        let split = split_vertex(&target, i, rho)?;
        let k = split.copies[&i].len();
        let ball: BTreeSet<usize> = split.ball.iter().copied().collect();
        let z: Vec<usize> = (0..h.site_count()).filter(|&r| ball.contains(&image[r])).collect();
        let dims = h.dims();
        let zdims: Vec<usize> = z.iter().map(|&r| dims[r]).collect();
        let dz: usize = zdims.iter().product();
        let (dist, _) = bfs(&target, i);
        // algebras on Z: one per branch, then the terms inside Z
        let mut gens: Vec<Vec<Mat>> = vec![Vec::new(); k + 1];
        let mut term_branch: Vec<Option<usize>> = vec![None; h.terms.len()];
        for (ti, t) in h.terms.iter().enumerate() {
            let inside: Vec<usize> = t.support.iter().copied().filter(|r| ball.contains(&image[*r])).collect();
            if inside.is_empty() {
                continue;
            }
            let alg = term_interaction_algebra(t, &dims, &z)?;
            if inside.len() == t.support.len() {
                gens[k].extend(alg.generators);
                continue;
            }
            let out = t
                .support
                .iter()
                .filter(|r| !ball.contains(&image[**r]))
                .min_by_key(|r| (dist[image[**r]], **r))
                .unwrap();
            let j = split.branch[&image[*out]];
            term_branch[ti] = Some(j);
            gens[j].extend(alg.generators);
        }
        let algebras = gens.iter().map(|g| generated_closure(dz, g)).collect::<Result<Vec<_>>>()?;
        let decomp = factor_decompose(dz, &algebras, DEFAULT_SEED)?;
        // block holding a ground state of the current Hamiltonian
        let (_, psi) = exact_ground_energy(&h)?;
        let weight = |b: &Block| psi.expectation(&z, &b.projector).re;
        let alpha = (0..decomp.blocks.len()).max_by(|&a, &b| weight(&decomp.blocks[a]).total_cmp(&weight(&decomp.blocks[b]))).unwrap();
        let block = decomp.blocks[alpha].clone();
        // registers of copies 2..k
        let mut zcopies: Vec<Vec<usize>> = vec![z.clone()];
        for _ in 1..k {
            let mut regs = Vec::new();
            for &r in &z {
                let site = registers[r].site;
                copies[site] += 1;
                registers.push(Register { site, copy: copies[site], dim: dims[r] });
                regs.push(registers.len() - 1);
            }
            zcopies.push(regs);
        }
        let mut new_dims = dims.clone();
        for _ in 1..k {
            new_dims.extend(&zdims);
        }
        let mut new_image = image.clone();
        for (j, c) in zcopies.iter().enumerate() {
            for (&r, &orig) in c.iter().zip(&z) {
                new_image.resize(new_image.len().max(r + 1), 0);
                new_image[r] = split.copies[&image[orig]][j];
            }
        }
        let relabel = |t: &Term, j: usize| -> Term {
            let support = t.support.iter().map(|s| z.iter().position(|x| x == s).map_or(*s, |p| zcopies[j][p])).collect();
            Term { support, op: t.op.clone() }
        };
        let pin = eye(dz) - &block.projector;
        let mut terms = Vec::new();
        for (ti, t) in h.terms.iter().enumerate() {
            let touches = t.support.iter().any(|r| ball.contains(&image[*r]));
            if !touches {
                terms.push(t.clone());
            } else if let Some(j) = term_branch[ti] {
                terms.push(relabel(t, j));
            } else {
                for j in 0..k {
                    terms.push(relabel(t, j));
                }
            }
        }
        for c in &zcopies {
            terms.push(Term::dense(c.clone(), pin.clone()));
        }
        // swap branch factor j from copy j into copy 0
        let w = kron(&block.isometry, &block.isometry);
        let bd = block.all_dims();
        let mut d2 = bd.clone();
        d2.extend(&bd);
        let outside = eye(dz * dz) - &w * w.adjoint();
        let mut gates = Vec::new();
        for j in 1..k {
            if bd[j] == 1 {
                continue;
            }
            let s = factor_swap(&d2, j, bd.len() + j);
            let u = &w * s * w.adjoint() + &outside;
            let support: Vec<usize> = zcopies[0].iter().chain(&zcopies[j]).copied().collect();
            gates.push(Gate::dense(support, u));
        }
        unitaries.push(gates);
        h = CommutingHamiltonian::new(&new_dims, terms)?;
        target = split.graph;
        image = new_image;
        steps += 1;
    }
    let (mut circuit, energy) = solve_tree(&h, &target, &image, &registers)?;
    for gates in unitaries.into_iter().rev() {
        for g in gates {
            circuit.push_asap(g);
        }
    }
    Ok(TreeReduceSolution { circuit, energy, steps, final_h: h, final_target: target })
}

/// Coarse-grains a tree instance over depth bands and solves it as two-body.
fn solve_tree(h: &CommutingHamiltonian, target: &Graph, image: &[usize], registers: &[Register]) -> Result<(Circuit, f64)> {
    let width = h.terms.iter().map(|t| term_diameter(target, image, t)).max().unwrap_or(0).max(1) + 1;
    let clustering = tree_band_clustering(&bfs_parents(target), width)?;
    let mut cluster_of = vec![0; target.vertex_count()];
    for (c, vs) in clustering.clusters.iter().enumerate() {
        for &v in vs {
            cluster_of[v] = c;
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); clustering.clusters.len()];
    for (r, &v) in image.iter().enumerate() {
        groups[cluster_of[v]].push(r);
    }
    groups.retain(|g| !g.is_empty());
    let mut group_of = vec![0; image.len()];
    for (gi, g) in groups.iter().enumerate() {
        for &r in g {
            group_of[r] = gi;
        }
    }
    let dims = h.dims();
    let gdims: Vec<usize> = groups.iter().map(|g| g.iter().map(|&r| dims[r]).product()).collect();
    let mut terms = Vec::new();
    for (k, t) in h.terms.iter().enumerate() {
        let gs: BTreeSet<usize> = t.support.iter().map(|&r| group_of[r]).collect();
        if gs.len() > 2 {
            return Err(Error::Unsupported(format!("term {k} spans {} coarse sites", gs.len())));
        }
        let gs: Vec<usize> = gs.into_iter().collect();
        let regs: Vec<usize> = gs.iter().flat_map(|&g| groups[g].iter().copied()).collect();
        let rdims: Vec<usize> = regs.iter().map(|&r| dims[r]).collect();
        terms.push(Term::dense(gs, t.matrix_on(&regs, &rdims)));
    }
    let coarse = CommutingHamiltonian::new(&gdims, terms)?;
    let sol = solve_two_body(&coarse)?;
    let mut circuit = Circuit { registers: registers.to_vec(), initial: vec![0; registers.len()], rounds: Vec::new() };
    for round in sol.circuit.rounds {
        let mut out = Vec::new();
        for g in round {
            let support: Vec<usize> = g.support.iter().flat_map(|&s| groups[s].iter().copied()).collect();
            let GateOp::Dense(u) = g.op else {
                return Err(Error::Invalid("two-body solver emitted a non-dense gate".into()));
            };
            out.push(Gate::dense(support, u));
        }
        circuit.rounds.push(out);
    }
    Ok((circuit, sol.energy))
}

/// State prepared by the circuit on all registers.
pub fn prepared_state(c: &Circuit) -> Result<StateVector> {
    crate::verify::apply_circuit(c)
}
