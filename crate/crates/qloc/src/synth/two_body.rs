//! Ground states of commuting Hamiltonians whose terms act on at most two sites.
//!
//! Every site splits into blocks labelled `alpha`; inside a block the
//! interaction algebra of each neighbour acts on its own tensor factor. Once
//! labels are fixed, the ground state is a product of one state per edge on
//! the pair of factors facing each other, times one state per site on the
//! factor of the single-site terms.

use crate::algebra::{factor_decompose, generated_closure, term_interaction_algebra, BlockDecomposition, DEFAULT_SEED};
use crate::gf2::{self, BitVec, Reducer};
use crate::graph::{edge_color, Graph};
use crate::hamiltonian::{CommutingHamiltonian, TermOp};
use crate::linalg::{self, eigh, eye, kron, kron_all, state_preparation, Layout, Mat, Vector, ONE};
use crate::pauli::{CliffordMap, Pauli};
use crate::synth::circuit::{Circuit, Gate, Register};
use crate::synth::frame::{adapted_frame, stabilizer_prep, AdaptedFrame};
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Label combinations searched exhaustively; larger instances use min-sum
/// messages on a spanning forest followed by local sweeps.
pub const EXHAUSTIVE_LIMIT: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct TwoBodySolution {
    pub circuit: Circuit,
    pub energy: f64,
    pub labels: Vec<usize>,
    /// True when the labels were found by exhaustive search.
    pub exhaustive: bool,
}

/// Lowest eigenpair of a Hermitian matrix.
fn ground(m: &Mat) -> (f64, Vector) {
    let (vals, vecs) = eigh(m);
    (vals[0], vecs.column(0).into_owned())
}

fn basis_vector(d: usize, k: usize) -> Vector {
    let mut v = Vector::zeros(d);
    v[k] = ONE;
    v
}

struct SiteData {
    nbrs: Vec<usize>,
    decomp: BlockDecomposition,
    /// Index of the single-site algebra among the factors, if any.
    own: Option<usize>,
    /// Per block: energy and ground vector of the single-site terms.
    own_ground: Vec<(f64, Option<Vector>)>,
}

struct EdgeData {
    /// Per `(alpha, beta)`: energy and ground vector on the facing factors.
    table: Vec<Vec<(f64, Vector)>>,
}

/// Exact in the exhaustive regime; see [`EXHAUSTIVE_LIMIT`].
pub fn solve_two_body(h: &CommutingHamiltonian) -> Result<TwoBodySolution> {
    let dims = h.dims();
    let n = dims.len();
    let mut edge_terms: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut own_terms: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, t) in h.terms.iter().enumerate() {
        match t.support.len() {
            1 => own_terms[t.support[0]].push(k),
            2 => {
                let (a, b) = (t.support[0].min(t.support[1]), t.support[0].max(t.support[1]));
                edge_terms.entry((a, b)).or_default().push(k);
            }
            m => return Err(Error::Invalid(format!("term {k} acts on {m} sites; the two-body solver needs at most 2"))),
        }
    }
    let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(a, b) in edge_terms.keys() {
        nbrs[a].insert(b);
        nbrs[b].insert(a);
    }
    let mut sites = Vec::with_capacity(n);
    for i in 0..n {
        let nb: Vec<usize> = nbrs[i].iter().copied().collect();
        let mut algs = Vec::new();
        for &j in &nb {
            let mut gens = Vec::new();
            for &k in &edge_terms[&(i.min(j), i.max(j))] {
                gens.extend(term_interaction_algebra(&h.terms[k], &dims, &[i])?.generators);
            }
            algs.push(generated_closure(dims[i], &gens)?);
        }
        let own_op = (!own_terms[i].is_empty()).then(|| {
            own_terms[i].iter().fold(Mat::zeros(dims[i], dims[i]), |acc, &k| acc + h.terms[k].matrix())
        });
        let own = match &own_op {
            Some(op) => {
                algs.push(generated_closure(dims[i], std::slice::from_ref(op))?);
                Some(algs.len() - 1)
            }
            None => None,
        };
        let decomp = factor_decompose(dims[i], &algs, DEFAULT_SEED)?;
        let own_ground = decomp
            .blocks
            .iter()
            .map(|b| match (&own_op, own) {
                (Some(op), Some(f)) => {
                    let (y, _) = b.factor_part(f, op);
                    let (e, v) = ground(&y);
                    (e, Some(v))
                }
                _ => (0.0, None),
            })
            .collect();
        sites.push(SiteData { nbrs: nb, decomp, own, own_ground });
    }
    let mut edges: BTreeMap<(usize, usize), EdgeData> = BTreeMap::new();
    for (&(i, j), ks) in &edge_terms {
        let hm = ks
            .iter()
            .fold(Mat::zeros(dims[i] * dims[j], dims[i] * dims[j]), |acc, &k| acc + h.terms[k].matrix_on(&[i, j], &[dims[i], dims[j]]));
        let (p1, p2) = facing(&sites, i, j);
        let mut table = Vec::new();
        for a in &sites[i].decomp.blocks {
            let mut row = Vec::new();
            for b in &sites[j].decomp.blocks {
                let w = kron(&a.isometry, &b.isometry);
                let x = w.adjoint() * &hm * &w;
                let mut d = a.all_dims();
                let off = d.len();
                d.extend(b.all_dims());
                let keep = [p1, off + p2];
                let rest = x.nrows() / (d[keep[0]] * d[keep[1]]);
                let y = linalg::partial_trace(&x, &d, &keep) / linalg::c(rest as f64);
                row.push(ground(&y));
            }
            table.push(row);
        }
        edges.insert((i, j), EdgeData { table });
    }
    let counts: Vec<usize> = sites.iter().map(|s| s.decomp.blocks.len()).collect();
    let site_cost = |i: usize, a: usize| sites[i].own_ground[a].0;
    let edge_cost = |i: usize, j: usize, a: usize, b: usize| edges[&(i, j)].table[a][b].0;
    let edge_list: Vec<(usize, usize)> = edges.keys().copied().collect();
    let total = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c).filter(|&p| p <= EXHAUSTIVE_LIMIT));
    let exhaustive = total.is_some();
    let labels = if exhaustive {
        exhaustive_labels(&counts, &edge_list, &site_cost, &edge_cost)
    } else {
        greedy_labels(&counts, &edge_list, &site_cost, &edge_cost)
    };
    let energy = labelling_energy(&labels, &edge_list, &site_cost, &edge_cost);
    let circuit = two_body_circuit(&dims, &sites, &edges, &labels)?;
    Ok(TwoBodySolution { circuit, energy, labels, exhaustive })
}

/// Factor positions of edge `(i, j)` inside the blocks of `i` and of `j`.
fn facing(sites: &[SiteData], i: usize, j: usize) -> (usize, usize) {
    let p1 = sites[i].nbrs.iter().position(|&x| x == j).unwrap();
    let p2 = sites[j].nbrs.iter().position(|&x| x == i).unwrap();
    (p1, p2)
}

fn labelling_energy(
    labels: &[usize],
    edges: &[(usize, usize)],
    site_cost: &dyn Fn(usize, usize) -> f64,
    edge_cost: &dyn Fn(usize, usize, usize, usize) -> f64,
) -> f64 {
    let s: f64 = labels.iter().enumerate().map(|(i, &a)| site_cost(i, a)).sum();
    s + edges.iter().map(|&(i, j)| edge_cost(i, j, labels[i], labels[j])).sum::<f64>()
}

fn exhaustive_labels(
    counts: &[usize],
    edges: &[(usize, usize)],
    site_cost: &dyn Fn(usize, usize) -> f64,
    edge_cost: &dyn Fn(usize, usize, usize, usize) -> f64,
) -> Vec<usize> {
    let n = counts.len();
    let mut cur = vec![0; n];
    let mut best = cur.clone();
    let mut best_e = f64::INFINITY;
    loop {
        let e = labelling_energy(&cur, edges, site_cost, edge_cost);
        if e < best_e - 1e-12 {
            best_e = e;
            best = cur.clone();
        }
        // odometer, last site fastest
        let mut k = n;
        loop {
            if k == 0 {
                return best;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < counts[k] {
                break;
            }
            cur[k] = 0;
        }
    }
}

fn greedy_labels(
    counts: &[usize],
    edges: &[(usize, usize)],
    site_cost: &dyn Fn(usize, usize) -> f64,
    edge_cost: &dyn Fn(usize, usize, usize, usize) -> f64,
) -> Vec<usize> {
    let n = counts.len();
    let g = Graph::from_edges(n, edges).expect("edges of the interaction graph");
    let cost = |i: usize, j: usize, a: usize, b: usize| if i < j { edge_cost(i, j, a, b) } else { edge_cost(j, i, b, a) };
    // min-sum on a BFS spanning forest: exact on trees
    let mut order = Vec::with_capacity(n);
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    q.push_back(w);
                }
            }
        }
    }
    let mut table: Vec<Vec<f64>> = (0..n).map(|i| (0..counts[i]).map(|a| site_cost(i, a)).collect()).collect();
    for &v in order.iter().rev() {
        if let Some(p) = parent[v] {
            let msg: Vec<f64> = (0..counts[p])
                .map(|a| (0..counts[v]).map(|b| cost(p, v, a, b) + table[v][b]).fold(f64::INFINITY, f64::min))
                .collect();
            for (a, m) in msg.into_iter().enumerate() {
                table[p][a] += m;
            }
        }
    }
    let mut labels = vec![0; n];
    for &v in &order {
        let score = |a: usize| match parent[v] {
            Some(p) => table[v][a] + cost(p, v, labels[p], a),
            None => table[v][a],
        };
        labels[v] = (0..counts[v]).min_by(|&a, &b| score(a).total_cmp(&score(b))).unwrap();
    }
    // local sweeps account for the edges left out of the forest
    for _ in 0..32 {
        let mut changed = false;
        for v in 0..n {
            let local = |a: usize| site_cost(v, a) + g.neighbors(v).iter().map(|&w| cost(v, w, a, labels[w])).sum::<f64>();
            let best = (0..counts[v]).min_by(|&a, &b| local(a).total_cmp(&local(b))).unwrap();
            if local(best) < local(labels[v]) - 1e-12 {
                labels[v] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    labels
}

fn two_body_circuit(dims: &[usize], sites: &[SiteData], edges: &BTreeMap<(usize, usize), EdgeData>, labels: &[usize]) -> Result<Circuit> {
    let mut c = Circuit::new(dims);
    let mut first = Vec::new();
    for (i, s) in sites.iter().enumerate() {
        let b = &s.decomp.blocks[labels[i]];
        let parts: Vec<Mat> = b
            .all_dims()
            .iter()
            .enumerate()
            .map(|(f, &d)| match (s.own, &s.own_ground[labels[i]].1) {
                (Some(o), Some(v)) if o == f => Mat::from_column_slice(d, 1, v.as_slice()),
                _ => Mat::from_column_slice(d, 1, basis_vector(d, 0).as_slice()),
            })
            .collect();
        let inner = kron_all(&parts);
        let psi: Vector = (&b.isometry * inner).column(0).into_owned();
        if (psi[0] - ONE).norm() > 1e-12 {
            first.push(Gate::dense(vec![i], state_preparation(&psi)));
        }
    }
    c.rounds.push(first);
    let g = Graph::from_edges(dims.len(), &edges.keys().copied().collect::<Vec<_>>())?;
    for class in edge_color(&g) {
        let mut round = Vec::new();
        for (i, j) in class {
            let (p1, p2) = facing(sites, i, j);
            let a = &sites[i].decomp.blocks[labels[i]];
            let b = &sites[j].decomp.blocks[labels[j]];
            let mut d = a.all_dims();
            let off = d.len();
            d.extend(b.all_dims());
            if d[p1] * d[off + p2] == 1 {
                continue;
            }
            let psi = &edges[&(i, j)].table[labels[i]][labels[j]].1;
            let inner = linalg::embed(&state_preparation(psi), &Layout::new(&d), &[p1, off + p2]);
            let w = kron(&a.isometry, &b.isometry);
            let full = dims[i] * dims[j];
            let u = &w * inner * w.adjoint() + (eye(full) - &w * w.adjoint());
            round.push(Gate::dense(vec![i, j], u));
        }
        c.rounds.push(round);
    }
    c.rounds.retain(|r| !r.is_empty());
    Ok(c)
}

/// Stabilizer version over groups of qubit registers: each group acts as one
/// site, every term must touch at most two groups, and the circuit is
/// Clifford. Block labels are the values of the central virtual qubits and
/// come from one GF(2) system; frustration is reported as an error.
pub fn solve_two_body_clifford(h: &CommutingHamiltonian, registers: &[Register], groups: &[Vec<usize>]) -> Result<Circuit> {
    let n = h.site_count();
    if registers.len() != n {
        return Err(Error::Invalid("register list does not match the Hamiltonian".into()));
    }
    let mut group_of = vec![usize::MAX; n];
    let mut local = vec![0; n];
    for (g, members) in groups.iter().enumerate() {
        for (k, &r) in members.iter().enumerate() {
            group_of[r] = g;
            local[r] = k;
        }
    }
    if group_of.contains(&usize::MAX) {
        return Err(Error::Invalid("groups do not cover every register".into()));
    }
    // per term: its Pauli split into signed-once local pieces per group
    let mut pieces: Vec<Vec<(usize, Pauli)>> = Vec::with_capacity(h.terms.len());
    for (k, t) in h.terms.iter().enumerate() {
        let TermOp::Pauli(p) = &t.op else {
            return Err(Error::Invalid(format!("term {k} is not a Pauli term")));
        };
        let gs: BTreeSet<usize> = t.support.iter().map(|&r| group_of[r]).collect();
        if gs.len() > 2 {
            return Err(Error::Invalid(format!("term {k} touches {} groups", gs.len())));
        }
        let mut out = Vec::new();
        for (idx, &g) in gs.iter().enumerate() {
            let pos: Vec<usize> = (0..t.support.len()).filter(|&q| group_of[t.support[q]] == g).collect();
            let qs: Vec<usize> = pos.iter().map(|&q| local[t.support[q]]).collect();
            let mut piece = p.restrict(&pos).embed(groups[g].len(), &qs);
            if idx > 0 {
                piece = piece.unsigned();
            }
            out.push((g, piece));
        }
        pieces.push(out);
    }
    let ng = groups.len();
    let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ng];
    for ps in &pieces {
        if ps.len() == 2 {
            nbrs[ps[0].0].insert(ps[1].0);
            nbrs[ps[1].0].insert(ps[0].0);
        }
    }
    let nbrs: Vec<Vec<usize>> = nbrs.into_iter().map(|s| s.into_iter().collect()).collect();
    let mut frames: Vec<AdaptedFrame> = Vec::with_capacity(ng);
    for g in 0..ng {
        let mut spaces: Vec<Vec<BitVec>> = vec![Vec::new(); nbrs[g].len() + 1];
        for ps in &pieces {
            for (idx, (gg, piece)) in ps.iter().enumerate() {
                if *gg != g {
                    continue;
                }
                let slot = if ps.len() == 1 { nbrs[g].len() } else { nbrs[g].binary_search(&ps[1 - idx].0).unwrap() };
                spaces[slot].push(piece.symplectic());
            }
        }
        frames.push(adapted_frame(groups[g].len(), &spaces)?);
    }
    let inverses: Vec<CliffordMap> = frames.iter().map(|f| f.frame.clifford().inverse()).collect();
    let mut var_base = vec![0; ng + 1];
    for g in 0..ng {
        var_base[g + 1] = var_base[g] + frames[g].center.len();
    }
    let nvars = var_base[ng];
    let mut rows: Vec<BitVec> = Vec::new();
    let mut rhs: Vec<bool> = Vec::new();
    // edge -> (virtual qubits of each side, signed pair stabilizers with their central Z part)
    let mut pair_terms: BTreeMap<(usize, usize), Vec<(Pauli, BitVec)>> = BTreeMap::new();
    for (k, ps) in pieces.iter().enumerate() {
        let mut zpart = BitVec::zeros(nvars);
        let mut sign_neg = false;
        let mut letters: Vec<(usize, Pauli)> = Vec::new();
        for (idx, (g, piece)) in ps.iter().enumerate() {
            let v = inverses[*g].conjugate(piece);
            sign_neg ^= v.sign_negative();
            let fr = &frames[*g];
            let allowed = if ps.len() == 2 {
                let other = ps[1 - idx].0;
                Some(fr.factors[nbrs[*g].binary_search(&other).unwrap()].clone())
            } else {
                None
            };
            let mut a = Pauli::identity(allowed.as_ref().map_or(0, |r| r.len()));
            for q in 0..groups[*g].len() {
                let (x, z) = (v.x.get(q), v.z.get(q));
                if !x && !z {
                    continue;
                }
                if let Some(r) = allowed.as_ref().filter(|r| r.contains(&q)) {
                    a.x.set(q - r.start, x);
                    a.z.set(q - r.start, z);
                } else if fr.center.contains(&q) && !x {
                    zpart.set(var_base[*g] + q - fr.center.start, true);
                } else {
                    return Err(Error::Inconsistent(format!("term {k} leaves its factor in the virtual frame")));
                }
            }
            letters.push((*g, a.unsigned()));
        }
        if ps.len() == 1 {
            rows.push(zpart);
            rhs.push(sign_neg);
            continue;
        }
        let (g0, a0) = &letters[0];
        let (g1, a1) = &letters[1];
        let (lo, hi) = if g0 < g1 { (a0, a1) } else { (a1, a0) };
        let qa = lo.num_qubits() + hi.num_qubits();
        let mut pair = Pauli::identity(qa);
        for q in 0..lo.num_qubits() {
            pair.x.set(q, lo.x.get(q));
            pair.z.set(q, lo.z.get(q));
        }
        for q in 0..hi.num_qubits() {
            pair.x.set(lo.num_qubits() + q, hi.x.get(q));
            pair.z.set(lo.num_qubits() + q, hi.z.get(q));
        }
        let mut pair = pair.unsigned();
        if sign_neg {
            pair = pair.negate();
        }
        pair_terms.entry(((*g0).min(*g1), (*g0).max(*g1))).or_default().push((pair, zpart));
    }
    let mut bases: BTreeMap<(usize, usize), Vec<(Pauli, BitVec)>> = BTreeMap::new();
    for (&e, ts) in &pair_terms {
        let qa = ts[0].0.num_qubits();
        let mut red = Reducer::new(2 * qa, ts.len());
        let mut basis = Vec::new();
        for (k, (p, z)) in ts.iter().enumerate() {
            match red.insert_indexed(&p.symplectic(), k) {
                None => basis.push((p.clone(), z.clone())),
                Some(combo) => {
                    let mut prod = Pauli::identity(qa);
                    let mut zc = BitVec::zeros(nvars);
                    for j in combo.ones() {
                        prod = prod.mul(&ts[j].0);
                        zc.xor_assign(&ts[j].1);
                    }
                    rows.push(zc);
                    rhs.push(prod.phase == 2);
                }
            }
        }
        if basis.len() != qa {
            return Err(Error::Inconsistent(format!("pair stabilizers of edge {e:?} have rank {} on {qa} qubits", basis.len())));
        }
        bases.insert(e, basis);
    }
    let zeta = if rows.is_empty() {
        BitVec::zeros(nvars)
    } else {
        gf2::solve(&rows, &rhs, nvars).ok_or_else(|| Error::Frustrated("no block labels give zero energy".into()))?
    };
    let mut c = Circuit { registers: registers.to_vec(), initial: vec![0; n], rounds: Vec::new() };
    for g in 0..ng {
        for (k, q) in frames[g].center.clone().enumerate() {
            if zeta.get(var_base[g] + k) {
                c.push_asap(Gate::clifford(vec![groups[g][q]], CliffordMap::pauli_gate(&Pauli::parse("X")?)));
            }
        }
    }
    let eg = Graph::from_edges(ng, &bases.keys().copied().collect::<Vec<_>>())?;
    for class in edge_color(&eg) {
        for (a, b) in class {
            let basis = &bases[&(a, b)];
            if basis.is_empty() {
                continue;
            }
            let gens: Vec<Pauli> = basis.iter().map(|(p, z)| if z.dot(&zeta) { p.negate() } else { p.clone() }).collect();
            let prep = stabilizer_prep(&gens)?;
            let fa = &frames[a].factors[nbrs[a].binary_search(&b).unwrap()];
            let fb = &frames[b].factors[nbrs[b].binary_search(&a).unwrap()];
            let support: Vec<usize> = fa.clone().map(|q| groups[a][q]).chain(fb.clone().map(|q| groups[b][q])).collect();
            c.push_asap(Gate::clifford(support, prep));
        }
    }
    for g in 0..ng {
        let w = frames[g].frame.clifford();
        if w != CliffordMap::identity(groups[g].len()) {
            c.push_asap(Gate::clifford(groups[g].clone(), w));
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Term;
    use crate::instances::{planted_two_body, ring_zz};
    use crate::linalg::c;
    use crate::verify::{apply_circuit, energy, exact_ground_energy, tableau_energy};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn regs(n: usize) -> Vec<Register> {
        (0..n).map(|site| Register { site, copy: 1, dim: 2 }).collect()
    }

    #[test]
    fn ising_ring_has_one_round() {
        let h = ring_zz(6);
        let s = solve_two_body(&h).unwrap();
        assert!(s.energy.abs() < 1e-12);
        assert!(s.circuit.depth() <= 3);
        let st = apply_circuit(&s.circuit).unwrap();
        assert!(energy(&st, &h).unwrap().abs() < 1e-10);
    }

    #[test]
    fn single_site_terms_take_one_round() {
        let x = Pauli::parse("X").unwrap();
        let h = CommutingHamiltonian::new(&[2, 2], vec![Term::pauli(vec![0], x.clone()), Term::pauli(vec![1], x.negate())]).unwrap();
        let s = solve_two_body(&h).unwrap();
        assert_eq!(s.circuit.depth(), 1);
        let st = apply_circuit(&s.circuit).unwrap();
        assert!(energy(&st, &h).unwrap().abs() < 1e-10);
    }

    #[test]
    fn three_site_terms_rejected() {
        let h = CommutingHamiltonian::new(&[2, 2, 2], vec![Term::pauli_str(&[0, 1, 2], "+ZZZ").unwrap()]).unwrap();
        assert!(matches!(solve_two_body(&h), Err(Error::Invalid(_))));
    }

    #[test]
    fn frustrated_triangle_energy() {
        // antiferromagnetic triangle: one bond must be violated
        let t = |a, b| Term::pauli_str(&[a, b], "-ZZ").unwrap();
        let h = CommutingHamiltonian::new(&[2, 2, 2], vec![t(0, 1), t(1, 2), t(0, 2)]).unwrap();
        let s = solve_two_body(&h).unwrap();
        let (e0, _) = exact_ground_energy(&h).unwrap();
        assert!((s.energy - e0).abs() < 1e-9 && (e0 - 1.0).abs() < 1e-9);
        let st = apply_circuit(&s.circuit).unwrap();
        assert!((energy(&st, &h).unwrap() - e0).abs() < 1e-9);
    }

    #[test]
    fn planted_instances_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cases = [(Graph::cycle(4), vec![true, false, true, false]), (Graph::path(5), vec![false, true, true, false, false]), (Graph::star(3), vec![false; 4])];
        for (g, f) in cases {
            for _ in 0..3 {
                let h = planted_two_body(&g, &f, &mut rng);
                let s = solve_two_body(&h).unwrap();
                let (e0, _) = exact_ground_energy(&h).unwrap();
                let st = apply_circuit(&s.circuit).unwrap();
                let e = energy(&st, &h).unwrap();
                assert!((e - e0).abs() < 1e-9, "circuit {e} oracle {e0}");
                assert!((s.energy - e0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn greedy_labels_exact_on_trees() {
        // path with random costs: min-sum is exact
        let counts = vec![3, 2, 3, 2];
        let edges = vec![(0, 1), (1, 2), (2, 3)];
        let sc = |i: usize, a: usize| ((i * 7 + a * 3) % 5) as f64;
        let ec = |i: usize, j: usize, a: usize, b: usize| ((i + 2 * j + 3 * a + 5 * b) % 4) as f64;
        let g = greedy_labels(&counts, &edges, &sc, &ec);
        let e = exhaustive_labels(&counts, &edges, &sc, &ec);
        assert_eq!(labelling_energy(&g, &edges, &sc, &ec), labelling_energy(&e, &edges, &sc, &ec));
    }

    #[test]
    fn clifford_pairs_on_a_path() {
        // XX and ZZ on every bond of a path of pairs: Bell pairs between groups
        let mut terms = Vec::new();
        for g in 0..3 {
            let (a, b) = (2 * g + 1, 2 * g + 2);
            terms.push(Term::pauli_str(&[a, b], "+XX").unwrap());
            terms.push(Term::pauli_str(&[a, b], "-ZZ").unwrap());
        }
        terms.push(Term::pauli_str(&[0], "-Z").unwrap());
        let h = CommutingHamiltonian::new(&[2; 8], terms).unwrap();
        let groups: Vec<Vec<usize>> = (0..4).map(|g| vec![2 * g, 2 * g + 1]).collect();
        let circ = solve_two_body_clifford(&h, &regs(8), &groups).unwrap();
        assert!(circ.is_clifford());
        assert_eq!(tableau_energy(&circ, &h).unwrap(), 0.0);
        let st = apply_circuit(&circ).unwrap();
        assert!(energy(&st, &h).unwrap().abs() < 1e-9);
    }

    #[test]
    fn clifford_reports_frustration() {
        let t = |a, b| Term::pauli_str(&[a, b], "-ZZ").unwrap();
        let h = CommutingHamiltonian::new(&[2, 2, 2], vec![t(0, 1), t(1, 2), t(0, 2)]).unwrap();
        let groups = vec![vec![0], vec![1], vec![2]];
        assert!(matches!(solve_two_body_clifford(&h, &regs(3), &groups), Err(Error::Frustrated(_))));
        let _ = c(0.0);
    }
}
