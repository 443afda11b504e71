//! Cutting the target 1-complex open at one edge.
//!
//! Paths between the sites of a term are lifted to the universal cover of
//! `K_1`, which is a tree; a lift of the cut edge splits the lifted sites of
//! a term into a left side (next to `u`) and a right side (next to `v`).
//! For stabilizer Hamiltonians the crossing terms are then copied onto
//! ancilla registers so that the cut edge can be removed.

use crate::algebra::{center, interaction_algebra};
use crate::gf2::{self, BitVec, Reducer};
use crate::graph::Graph;
use crate::hamiltonian::{CommutingHamiltonian, Term, TermOp};
use crate::localize::LocalizationMap;
use crate::pauli::{CliffordMap, Pauli, StabilizerGroup};
use crate::synth::frame::{adapted_frame, controlled_pauli, gram_schmidt, twist, AdaptedFrame};
use crate::synth::circuit::Gate;
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

/// Where every register sits on `K_1` and how the sites of each term are
/// joined there.
#[derive(Clone, Debug)]
pub struct CutGeometry {
    pub target: Graph,
    pub image: Vec<usize>,
    /// Vertex walk from `image[a]` to `image[b]`, keyed by `(a, b)` with `a < b`.
    pub walks: BTreeMap<(usize, usize), Vec<usize>>,
}

fn term_pairs(h: &CommutingHamiltonian) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for t in &h.terms {
        for (i, &a) in t.support.iter().enumerate() {
            for &b in &t.support[i + 1..] {
                out.insert((a.min(b), a.max(b)));
            }
        }
    }
    out
}

impl CutGeometry {
    /// Walks come from the map where the pair is a source edge, else from
    /// shortest paths between the images.
    pub fn from_map(m: &LocalizationMap, h: &CommutingHamiltonian) -> Result<Self> {
        let mut g = Self::from_images(m.target.clone(), m.vertex_image.clone(), h)?;
        for (k, w) in g.walks.iter_mut() {
            if m.edge_path.contains_key(k) {
                *w = m.walk(k.0, k.1);
            }
        }
        Ok(g)
    }

    pub fn from_images(target: Graph, image: Vec<usize>, h: &CommutingHamiltonian) -> Result<Self> {
        if image.len() != h.site_count() || image.iter().any(|&v| v >= target.vertex_count()) {
            return Err(Error::Invalid("site images do not match the target".into()));
        }
        let mut walks = BTreeMap::new();
        for (a, b) in term_pairs(h) {
            let w = target
                .shortest_path(image[a], image[b])
                .ok_or_else(|| Error::Invalid(format!("images of sites {a} and {b} are disconnected")))?;
            walks.insert((a, b), w);
        }
        Ok(CutGeometry { target, image, walks })
    }

    pub fn walk(&self, a: usize, b: usize) -> Vec<usize> {
        if a == b {
            return vec![self.image[a]];
        }
        let w = &self.walks[&(a.min(b), a.max(b))];
        if a < b {
            w.clone()
        } else {
            w.iter().rev().copied().collect()
        }
    }

    /// Longest walk, in edges.
    pub fn l_max(&self) -> usize {
        self.walks.values().map(|w| w.len().saturating_sub(1)).max().unwrap_or(0)
    }
}

/// Removes repeated vertices and immediate backtracks, giving the projection
/// of the lifted path in the cover tree.
pub fn reduce_walk(w: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(w.len());
    for &v in w {
        if out.last() == Some(&v) {
            continue;
        }
        if out.len() >= 2 && out[out.len() - 2] == v {
            out.pop();
            continue;
        }
        out.push(v);
    }
    out
}

/// Tree path between the endpoints of two rooted cover paths.
fn tree_path(from: &[usize], to: &[usize]) -> Vec<usize> {
    let k = from.iter().zip(to).take_while(|(a, b)| a == b).count();
    let mut p: Vec<usize> = from[k - 1..].iter().rev().copied().collect();
    p.extend_from_slice(&to[k..]);
    p
}

fn crosses(w: &[usize], u: usize, v: usize) -> bool {
    w.windows(2).any(|e| (e[0] == u && e[1] == v) || (e[0] == v && e[1] == u))
}

#[derive(Clone, Debug)]
pub struct CutDecomposition {
    /// Left sites lie on the `u` side of the cut edge `(u, v)`.
    pub edge: (usize, usize),
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub h_lr: Vec<usize>,
    pub h_lo: Vec<usize>,
    pub h_ro: Vec<usize>,
    pub other: Vec<usize>,
    /// Walk from each left site to `u` inside the cover tree.
    pub anchor_left: BTreeMap<usize, Vec<usize>>,
    /// Walk from each right site to `v` inside the cover tree.
    pub anchor_right: BTreeMap<usize, Vec<usize>>,
}

fn keep_shorter(map: &mut BTreeMap<usize, Vec<usize>>, site: usize, w: Vec<usize>) {
    match map.get(&site) {
        Some(old) if (old.len(), old) <= (w.len(), &w) => {}
        _ => {
            map.insert(site, w);
        }
    }
}

pub fn cut_decompose(h: &CommutingHamiltonian, geo: &CutGeometry, edge: (usize, usize)) -> Result<CutDecomposition> {
    let (u, v) = edge;
    if !geo.target.has_edge(u, v) {
        return Err(Error::Invalid(format!("({u}, {v}) is not an edge of the target")));
    }
    let mut side: BTreeMap<usize, bool> = BTreeMap::new(); // true = left
    let mut cd = CutDecomposition {
        edge,
        left: Vec::new(),
        right: Vec::new(),
        h_lr: Vec::new(),
        h_lo: Vec::new(),
        h_ro: Vec::new(),
        other: Vec::new(),
        anchor_left: BTreeMap::new(),
        anchor_right: BTreeMap::new(),
    };
    let mut uninvolved = Vec::new();
    for (k, t) in h.terms.iter().enumerate() {
        let root = t.support[0];
        let lifts: Vec<Vec<usize>> = t.support.iter().map(|&s| reduce_walk(&geo.walk(root, s))).collect();
        let mut keys: BTreeSet<Vec<usize>> = BTreeSet::new();
        for w in &lifts {
            for p in 0..w.len().saturating_sub(1) {
                if (w[p] == u && w[p + 1] == v) || (w[p] == v && w[p + 1] == u) {
                    keys.insert(w[..p + 2].to_vec());
                }
            }
        }
        if keys.is_empty() {
            uninvolved.push(k);
            continue;
        }
        if keys.len() > 1 {
            return Err(Error::Unsupported(format!("term {k} meets {} lifts of the cut edge", keys.len())));
        }
        let key = keys.into_iter().next().unwrap();
        let near = key[key.len() - 2];
        let (lift_u, lift_v) = if near == u { (key[..key.len() - 1].to_vec(), key.clone()) } else { (key.clone(), key[..key.len() - 1].to_vec()) };
        for (&s, w) in t.support.iter().zip(&lifts) {
            let far = w.len() >= key.len() && w[..key.len()] == key[..];
            let left = far != (near == u);
            if let Some(&prev) = side.get(&s) {
                if prev != left {
                    return Err(Error::Inconsistent(format!("site {s} is left for one term and right for another")));
                }
            }
            side.insert(s, left);
            if left {
                keep_shorter(&mut cd.anchor_left, s, tree_path(w, &lift_u));
            } else {
                keep_shorter(&mut cd.anchor_right, s, tree_path(w, &lift_v));
            }
        }
        cd.h_lr.push(k);
    }
    for k in uninvolved {
        let sides: BTreeSet<bool> = h.terms[k].support.iter().filter_map(|s| side.get(s).copied()).collect();
        match (sides.contains(&true), sides.contains(&false)) {
            (true, true) => return Err(Error::Inconsistent(format!("term {k} touches both sides without crossing the cut"))),
            (true, false) => cd.h_lo.push(k),
            (false, true) => cd.h_ro.push(k),
            (false, false) => cd.other.push(k),
        }
    }
    cd.left = side.iter().filter(|(_, &l)| l).map(|(&s, _)| s).collect();
    cd.right = side.iter().filter(|(_, &l)| !l).map(|(&s, _)| s).collect();
    Ok(cd)
}

/// `prod_i C_L^i (left) * prod_j C_R^j (right) = sigma` on every zero-energy state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenterConstraint {
    pub left: BitVec,
    pub right: BitVec,
    pub sigma: i8,
}

#[derive(Clone, Debug)]
pub struct StabilizerConstraints {
    /// Frames of the interaction algebras on the left and right sites, in
    /// the local qubit order of `CutDecomposition::left` / `right`.
    pub left_frame: AdaptedFrame,
    pub right_frame: AdaptedFrame,
    pub left_center: Vec<Pauli>,
    pub right_center: Vec<Pauli>,
    pub constraints: Vec<CenterConstraint>,
    /// Eigenvalues of the center generators on one zero-energy state.
    pub tau_left: Vec<i8>,
    pub tau_right: Vec<i8>,
    /// Values of each constraint's left and right products under `tau`.
    pub theta_left: Vec<i8>,
    pub theta_right: Vec<i8>,
    /// Center elements not generated by the centers of individual terms.
    pub ungenerated_left: Vec<Pauli>,
    pub ungenerated_right: Vec<Pauli>,
}

/// Left and right parts of a crossing Pauli term; the sign stays on the left.
fn split_term(p: &Pauli, support: &[usize], left: &[usize], right: &[usize]) -> (Pauli, Pauli) {
    let pos = |set: &[usize]| -> (Vec<usize>, Vec<usize>) {
        let mut from = Vec::new();
        let mut to = Vec::new();
        for (q, s) in support.iter().enumerate() {
            if let Ok(k) = set.binary_search(s) {
                from.push(q);
                to.push(k);
            }
        }
        (from, to)
    };
    let (lf, lt) = pos(left);
    let (rf, rt) = pos(right);
    let pl = p.restrict(&lf).embed(left.len(), &lt);
    let pr = p.restrict(&rf).embed(right.len(), &rt).unsigned();
    (pl, pr)
}

fn sign_of_product(p: &Pauli, q: &Pauli) -> i8 {
    // p = +-q with matching letters
    if (p.phase + 4 - q.phase) % 4 == 0 {
        1
    } else {
        -1
    }
}

fn product(gens: &[Pauli], pick: &BitVec, n: usize) -> Pauli {
    pick.ones().fold(Pauli::identity(n), |acc, i| acc.mul(&gens[i]))
}

/// Terms grouped with the first larger term whose support contains theirs.
fn support_groups(h: &CommutingHamiltonian, terms: &[usize]) -> Vec<Vec<usize>> {
    let mut order = terms.to_vec();
    order.sort_by_key(|&k| std::cmp::Reverse(h.terms[k].support.len()));
    let mut groups: Vec<(BTreeSet<usize>, Vec<usize>)> = Vec::new();
    for k in order {
        let s: BTreeSet<usize> = h.terms[k].support.iter().copied().collect();
        match groups.iter_mut().find(|(g, _)| s.is_subset(g)) {
            Some((_, ks)) => ks.push(k),
            None => groups.push((s, vec![k])),
        }
    }
    groups.into_iter().map(|(_, ks)| ks).collect()
}

fn ungenerated(center: &[Pauli], per_group: &[Vec<BitVec>], width: usize) -> Vec<Pauli> {
    let mut red = Reducer::new(width, 0);
    for part in per_group {
        let (_, radical) = gram_schmidt(part, width);
        for r in radical {
            red.insert(&r, &BitVec::zeros(0));
        }
    }
    center.iter().filter(|c| red.insert(&c.symplectic(), &BitVec::zeros(0)).is_none()).cloned().collect()
}

fn dense_center_check(h: &CommutingHamiltonian, cd: &CutDecomposition) -> Error {
    let sites: Vec<usize> = cd.left.iter().chain(&cd.right).copied().collect();
    let dims: Vec<usize> = sites.iter().map(|&s| h.sites[s].dim).collect();
    let total: usize = dims.iter().product();
    if total > crate::tol::MAX_TERM_DIM {
        return Error::Unsupported("non-stabilizer crossing terms on a large cut".into());
    }
    let op = cd.h_lr.iter().fold(crate::linalg::Mat::zeros(total, total), |acc, &k| acc + h.terms[k].matrix_on(&sites, &dims));
    let keep: Vec<usize> = (0..cd.left.len()).collect();
    match interaction_algebra(&op, &dims, &keep) {
        Ok(a) if center(&a).dimension() > 1 => Error::Counterexample(
            "crossing terms have non-Pauli central elements; no projector choice on the ancillas admits the unitary".into(),
        ),
        Ok(_) => Error::Unsupported("non-stabilizer crossing terms without central elements".into()),
        Err(e) => e,
    }
}

pub fn stabilizer_constraints(h: &CommutingHamiltonian, cd: &CutDecomposition) -> Result<StabilizerConstraints> {
    if cd.h_lr.iter().any(|&k| !matches!(h.terms[k].op, TermOp::Pauli(_))) {
        return Err(dense_center_check(h, cd));
    }
    let (nl, nr) = (cd.left.len(), cd.right.len());
    let mut parts: Vec<(Pauli, Pauli)> = Vec::new();
    for &k in &cd.h_lr {
        let t = &h.terms[k];
        parts.push(split_term(t.stabilizer().unwrap(), &t.support, &cd.left, &cd.right));
    }
    let avec: Vec<BitVec> = parts.iter().map(|(l, _)| l.symplectic()).collect();
    let bvec: Vec<BitVec> = parts.iter().map(|(_, r)| r.symplectic()).collect();
    let left_frame = adapted_frame(nl, std::slice::from_ref(&avec))?;
    let right_frame = adapted_frame(nr, std::slice::from_ref(&bvec))?;
    let left_center = left_frame.center_generators();
    let right_center = right_frame.center_generators();
    // constraints: products of terms whose left part is central
    let m = parts.len();
    let gram: Vec<BitVec> = (0..m)
        .map(|a| BitVec::from_bools(&(0..m).map(|b| avec[a].dot(&twist(&avec[b]))).collect::<Vec<_>>()))
        .collect();
    let express = |gens: &[Pauli], v: &BitVec, width: usize| -> Result<BitVec> {
        let mut red = Reducer::new(width, gens.len());
        for (i, g) in gens.iter().enumerate() {
            red.insert_indexed(&g.symplectic(), i);
        }
        red.express(v).ok_or_else(|| Error::Inconsistent("central product outside the center span".into()))
    };
    let mut constraints = Vec::new();
    for s in gf2::null_space(&gram, m) {
        let mut full = Pauli::identity(nl + nr);
        for k in s.ones() {
            let (l, r) = &parts[k];
            let lr = l.embed(nl + nr, &(0..nl).collect::<Vec<_>>()).mul(&r.embed(nl + nr, &(nl..nl + nr).collect::<Vec<_>>()));
            full = full.mul(&lr);
        }
        let lsel = express(&left_center, &full.restrict(&(0..nl).collect::<Vec<_>>()).symplectic(), 2 * nl)?;
        let rsel = express(&right_center, &full.restrict(&(nl..nl + nr).collect::<Vec<_>>()).symplectic(), 2 * nr)?;
        let q = product(&left_center, &lsel, nl)
            .embed(nl + nr, &(0..nl).collect::<Vec<_>>())
            .mul(&product(&right_center, &rsel, nr).embed(nl + nr, &(nl..nl + nr).collect::<Vec<_>>()));
        if lsel.is_zero() && rsel.is_zero() {
            if sign_of_product(&full, &q) < 0 {
                return Err(Error::Frustrated("crossing terms multiply to -1".into()));
            }
            continue;
        }
        constraints.push(CenterConstraint { left: lsel, right: rsel, sigma: sign_of_product(&full, &q) });
    }
    // witness eigenvalues from the ground space of the whole Hamiltonian
    let n = h.site_count();
    let mut gens = Vec::new();
    for t in &h.terms {
        let p = t.stabilizer().ok_or_else(|| Error::Unsupported("witness needs a stabilizer Hamiltonian".into()))?;
        gens.push(p.embed(n, &t.support));
    }
    let mut group = StabilizerGroup::from_generators(n, &gens)?;
    let mut pin = |c: &Pauli, sites: &[usize]| -> Result<i8> {
        let g = c.embed(n, sites);
        match group.sign_of(&g) {
            Some(pos) => Ok(if pos { 1 } else { -1 }),
            None => {
                group.add(&g)?;
                Ok(1)
            }
        }
    };
    let tau_left = left_center.iter().map(|c| pin(c, &cd.left)).collect::<Result<Vec<_>>>()?;
    let tau_right = right_center.iter().map(|c| pin(c, &cd.right)).collect::<Result<Vec<_>>>()?;
    let theta = |sel: &BitVec, tau: &[i8]| sel.ones().map(|i| tau[i]).product::<i8>();
    let theta_left: Vec<i8> = constraints.iter().map(|c| theta(&c.left, &tau_left)).collect();
    let theta_right: Vec<i8> = constraints.iter().map(|c| theta(&c.right, &tau_right)).collect();
    for (b, c) in constraints.iter().enumerate() {
        if theta_left[b] * theta_right[b] != c.sigma {
            return Err(Error::Inconsistent(format!("witness violates center constraint {b}")));
        }
    }
    let groups = support_groups(h, &cd.h_lr);
    let pos: BTreeMap<usize, usize> = cd.h_lr.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let lgroups: Vec<Vec<BitVec>> = groups.iter().map(|g| g.iter().map(|k| avec[pos[k]].clone()).collect()).collect();
    let rgroups: Vec<Vec<BitVec>> = groups.iter().map(|g| g.iter().map(|k| bvec[pos[k]].clone()).collect()).collect();
    Ok(StabilizerConstraints {
        ungenerated_left: ungenerated(&left_center, &lgroups, 2 * nl),
        ungenerated_right: ungenerated(&right_center, &rgroups, 2 * nr),
        left_frame,
        right_frame,
        left_center,
        right_center,
        constraints,
        tau_left,
        tau_right,
        theta_left,
        theta_right,
    })
}

/// Result of cutting one edge.
#[derive(Clone, Debug)]
pub struct CrossStep {
    pub h: CommutingHamiltonian,
    pub geo: CutGeometry,
    /// Clifford on the left real and left ancilla registers mapping every
    /// zero-energy state of `h` to a zero-energy state of the input.
    pub unitary: Gate,
    /// Ancilla register of each left (resp. right) site, in the site order of the decomposition.
    pub left_ancilla: Vec<usize>,
    pub right_ancilla: Vec<usize>,
    pub constraints: StabilizerConstraints,
}

/// Pauli `E_i` on the factor qubits with `w(E_i, f_k) = u_{k,i}` for the
/// independent factor parts `f_k`.
fn corrections(f: &[BitVec], u: &[BitVec], nf: usize, nc: usize) -> Result<Vec<BitVec>> {
    let mut rows = Vec::new();
    let mut picked = Vec::new();
    let mut red = Reducer::new(2 * nf, 0);
    for (k, fk) in f.iter().enumerate() {
        if red.insert(fk, &BitVec::zeros(0)).is_none() {
            rows.push(twist(fk));
            picked.push(k);
        }
    }
    (0..nc)
        .map(|i| {
            let rhs: Vec<bool> = picked.iter().map(|&k| u[k].get(i)).collect();
            if rows.is_empty() {
                return Ok(BitVec::zeros(2 * nf));
            }
            gf2::solve(&rows, &rhs, 2 * nf).ok_or_else(|| Error::Inconsistent("no factor correction for a center qubit".into()))
        })
        .collect()
}

fn pauli_on(v: &BitVec, n: usize, qubits: &[usize]) -> Pauli {
    Pauli::hermitian_from_symplectic(v).embed(n, qubits)
}

pub fn build_cross_hamiltonian(h: &CommutingHamiltonian, geo: &CutGeometry, cd: &CutDecomposition) -> Result<CrossStep> {
    let sc = stabilizer_constraints(h, cd)?;
    let n = h.site_count();
    let (nl, nr) = (cd.left.len(), cd.right.len());
    let left_ancilla: Vec<usize> = (n..n + nl).collect();
    let right_ancilla: Vec<usize> = (n + nl..n + nl + nr).collect();
    let lmap: BTreeMap<usize, usize> = cd.left.iter().copied().zip(left_ancilla.iter().copied()).collect();
    let rmap: BTreeMap<usize, usize> = cd.right.iter().copied().zip(right_ancilla.iter().copied()).collect();
    let mut terms: Vec<Term> = Vec::new();
    let lr: BTreeSet<usize> = cd.h_lr.iter().copied().collect();
    for (k, t) in h.terms.iter().enumerate() {
        if !lr.contains(&k) {
            terms.push(t.clone());
            continue;
        }
        let to_ra: Vec<usize> = t.support.iter().map(|s| *rmap.get(s).unwrap_or(s)).collect();
        let to_la: Vec<usize> = t.support.iter().map(|s| *lmap.get(s).unwrap_or(s)).collect();
        terms.push(Term { support: to_ra, op: t.op.clone() });
        terms.push(Term { support: to_la, op: t.op.clone() });
    }
    let pin_terms = |centers: &[Pauli], tau: &[i8], regs: &[usize], out: &mut Vec<Term>| {
        for (c, &t) in centers.iter().zip(tau) {
            let supp = c.support();
            let p = c.restrict(&supp);
            let p = if t < 0 { p.negate() } else { p };
            out.push(Term::pauli(supp.iter().map(|&q| regs[q]).collect(), p));
        }
    };
    pin_terms(&sc.left_center, &sc.tau_left, &left_ancilla, &mut terms);
    pin_terms(&sc.right_center, &sc.tau_right, &right_ancilla, &mut terms);
    let mut dims = h.dims();
    dims.extend(std::iter::repeat_n(2, nl + nr));
    let new_h = CommutingHamiltonian::new(&dims, terms)?;
    let unitary = Gate::clifford(cd.left.iter().chain(&left_ancilla).copied().collect(), cut_unitary(h, cd, &sc)?);
    let geo = cut_geometry(geo, cd, &new_h, &lmap, &rmap)?;
    Ok(CrossStep { h: new_h, geo, unitary, left_ancilla, right_ancilla, constraints: sc })
}

/// In the left frame: swap the factor qubits between real and ancilla copies,
/// then correct the factor by `E^(c + t)` where `c` is the real center value
/// and `t` the pinned ancilla center value.
fn cut_unitary(h: &CommutingHamiltonian, cd: &CutDecomposition, sc: &StabilizerConstraints) -> Result<CliffordMap> {
    let nl = cd.left.len();
    let fr = &sc.left_frame;
    let w = fr.frame.clifford();
    let winv = w.inverse();
    let f = fr.factors[0].clone();
    let (nf, nc) = (f.len(), fr.center.len());
    let mut fparts = Vec::new();
    let mut uparts = Vec::new();
    for &k in &cd.h_lr {
        let t = &h.terms[k];
        let (l, _) = split_term(t.stabilizer().unwrap(), &t.support, &cd.left, &cd.right);
        let vv = winv.conjugate(&l);
        let mut fx = BitVec::zeros(2 * nf);
        for (i, q) in f.clone().enumerate() {
            fx.set(i, vv.x.get(q));
            fx.set(nf + i, vv.z.get(q));
        }
        let mut uz = BitVec::zeros(nc);
        for (i, q) in fr.center.clone().enumerate() {
            if vv.x.get(q) {
                return Err(Error::Inconsistent("left part leaves the center in the frame".into()));
            }
            uz.set(i, vv.z.get(q));
        }
        if fr.residual.clone().any(|q| vv.x.get(q) || vv.z.get(q)) {
            return Err(Error::Inconsistent("left part touches the residual qubits".into()));
        }
        fparts.push(fx);
        uparts.push(uz);
    }
    let es = corrections(&fparts, &uparts, nf, nc)?;
    let n2 = 2 * nl;
    let fq: Vec<usize> = f.clone().collect();
    let mut m = CliffordMap::identity(n2);
    for &q in &fq {
        m = CliffordMap::swap().embed(n2, &[q, nl + q]).compose_after(&m);
    }
    let mut fixed = BitVec::zeros(2 * nf);
    for (i, e) in es.iter().enumerate() {
        if sc.tau_left[i] < 0 {
            fixed.xor_assign(e);
        }
    }
    if !fixed.is_zero() {
        m = CliffordMap::pauli_gate(&pauli_on(&fixed, nf, &(0..nf).collect::<Vec<_>>())).embed(n2, &fq).compose_after(&m);
    }
    for (i, e) in es.iter().enumerate() {
        if e.is_zero() {
            continue;
        }
        let ctrl = fr.center.start + i;
        let mut qs = vec![ctrl];
        qs.extend(&fq);
        m = controlled_pauli(&Pauli::hermitian_from_symplectic(e)).embed(n2, &qs).compose_after(&m);
    }
    let ww = w.embed(n2, &(0..nl).collect::<Vec<_>>()).compose_after(&w.embed(n2, &(nl..n2).collect::<Vec<_>>()));
    let wwinv = ww.inverse();
    Ok(ww.compose_after(&m).compose_after(&wwinv))
}

/// Removes the cut edge and hangs the right ancillas on a new leaf next to
/// `u` and the left ancillas on a new leaf next to `v`.
fn cut_geometry(
    geo: &CutGeometry,
    cd: &CutDecomposition,
    h: &CommutingHamiltonian,
    lmap: &BTreeMap<usize, usize>,
    rmap: &BTreeMap<usize, usize>,
) -> Result<CutGeometry> {
    let (u, v) = cd.edge;
    let nv = geo.target.vertex_count();
    let (xl, xr) = (nv, nv + 1);
    let mut edges: Vec<(usize, usize)> = geo.target.edges().into_iter().filter(|&(a, b)| (a.min(b), a.max(b)) != (u.min(v), u.max(v))).collect();
    edges.push((u, xl));
    edges.push((v, xr));
    let target = Graph::from_edges(nv + 2, &edges)?;
    let n_old = geo.image.len();
    let mut image = geo.image.clone();
    image.resize(h.site_count(), 0);
    for &a in lmap.values() {
        image[a] = xr;
    }
    for &a in rmap.values() {
        image[a] = xl;
    }
    let real_of: BTreeMap<usize, usize> = lmap.iter().chain(rmap.iter()).map(|(&r, &a)| (a, r)).collect();
    let mut walks = BTreeMap::new();
    for (a, b) in term_pairs(h) {
        let w = match (a < n_old, b < n_old) {
            (true, true) => {
                let w = reduce_walk(&geo.walk(a, b));
                if crosses(&w, u, v) {
                    return Err(Error::Inconsistent(format!("walk between sites {a} and {b} still crosses the cut")));
                }
                w
            }
            (false, false) => vec![image[a]],
            (true, false) | (false, true) => {
                let (r, anc) = if a < n_old { (a, b) } else { (b, a) };
                let partner = real_of[&anc];
                let w = if rmap.contains_key(&partner) {
                    // real left site with a right ancilla at xl
                    let mut w = cd.anchor_left.get(&r).cloned().ok_or_else(|| Error::Inconsistent(format!("site {r} pairs with a right ancilla but is not left")))?;
                    w.push(xl);
                    w
                } else {
                    let mut w = cd.anchor_right.get(&r).cloned().ok_or_else(|| Error::Inconsistent(format!("site {r} pairs with a left ancilla but is not right")))?;
                    w.reverse();
                    let mut out = vec![xr];
                    out.extend(w);
                    out
                };
                if a < n_old {
                    w
                } else {
                    w.into_iter().rev().collect()
                }
            }
        };
        walks.insert((a, b), w);
    }
    Ok(CutGeometry { target, image, walks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{fig5_lattice, qutrit_counterexample, ring_zz, toric_boundary_example};
    use crate::verify::{exact_ground_energy, tableau::conjugate_local};

    fn ring_geo(n: usize) -> (CommutingHamiltonian, CutGeometry) {
        let h = ring_zz(n);
        let g = CutGeometry::from_images(Graph::cycle(n), (0..n).collect(), &h).unwrap();
        (h, g)
    }

    fn with_geo((h, target, image): (CommutingHamiltonian, Graph, Vec<usize>)) -> (CommutingHamiltonian, CutGeometry) {
        let g = CutGeometry::from_images(target, image, &h).unwrap();
        (h, g)
    }

    #[test]
    fn walk_reduction() {
        assert_eq!(reduce_walk(&[0, 1, 2, 1, 3]), vec![0, 1, 3]);
        assert_eq!(reduce_walk(&[0, 1, 0]), vec![0]);
        assert_eq!(reduce_walk(&[4, 4, 5]), vec![4, 5]);
    }

    #[test]
    fn ring_cut_is_single_crossing() {
        let (h, g) = ring_geo(6);
        let cd = cut_decompose(&h, &g, (3, 4)).unwrap();
        assert_eq!(cd.left, vec![3]);
        assert_eq!(cd.right, vec![4]);
        assert_eq!(cd.h_lr.len(), 1);
        assert_eq!(h.terms[cd.h_lr[0]].support, vec![3, 4]);
    }

    #[test]
    fn bridge_cut_splits_tree() {
        let h = CommutingHamiltonian::new(&[2; 4], (0..3).map(|i| Term::pauli_str(&[i, i + 1], "+ZZ").unwrap()).collect()).unwrap();
        let g = CutGeometry::from_images(Graph::path(4), (0..4).collect(), &h).unwrap();
        let cd = cut_decompose(&h, &g, (1, 2)).unwrap();
        assert_eq!((cd.left.clone(), cd.right.clone()), (vec![1], vec![2]));
        assert_eq!(cd.h_lo.len(), 1);
        assert_eq!(cd.h_ro.len(), 1);
    }

    #[test]
    fn fig5_lattice_cut() {
        let (h, g) = with_geo(fig5_lattice());
        let cd = cut_decompose(&h, &g, (1, 2)).unwrap();
        assert_eq!(cd.left, vec![1, 2, 3]);
        assert_eq!(cd.right, vec![4, 5, 6]);
    }

    #[test]
    fn ising_constraint() {
        let (h, g) = ring_geo(6);
        let cd = cut_decompose(&h, &g, (3, 4)).unwrap();
        let sc = stabilizer_constraints(&h, &cd).unwrap();
        assert_eq!(sc.left_center, vec![Pauli::parse("+Z").unwrap()]);
        assert_eq!(sc.right_center, vec![Pauli::parse("+Z").unwrap()]);
        assert_eq!(sc.constraints.len(), 1);
        assert_eq!(sc.constraints[0].sigma, 1);
        assert!(sc.ungenerated_left.is_empty());
    }

    #[test]
    fn swap_like_terms_have_no_center() {
        // XX and ZZ across the cut: the left algebra is all of one qubit
        let t = vec![Term::pauli_str(&[0, 1], "+XX").unwrap(), Term::pauli_str(&[0, 1], "+ZZ").unwrap()];
        let h = CommutingHamiltonian::new(&[2, 2], t).unwrap();
        let g = CutGeometry::from_images(Graph::path(2), vec![0, 1], &h).unwrap();
        let cd = cut_decompose(&h, &g, (0, 1)).unwrap();
        let sc = stabilizer_constraints(&h, &cd).unwrap();
        assert!(sc.constraints.is_empty() && sc.left_center.is_empty());
        let step = build_cross_hamiltonian(&h, &g, &cd).unwrap();
        assert_eq!(step.h.terms.len(), 4);
    }

    #[test]
    fn boundary_example_has_ungenerated_center() {
        let (h, g) = with_geo(toric_boundary_example());
        let cd = cut_decompose(&h, &g, (0, 1)).unwrap();
        let sc = stabilizer_constraints(&h, &cd).unwrap();
        assert_eq!(sc.ungenerated_left, vec![Pauli::parse("+ZZZ").unwrap()]);
    }

    #[test]
    fn qutrit_toy_is_rejected() {
        let (h, g) = with_geo(qutrit_counterexample());
        let cd = cut_decompose(&h, &g, (0, 1)).unwrap();
        assert!(matches!(build_cross_hamiltonian(&h, &g, &cd), Err(Error::Counterexample(_))));
    }

    /// Every zero-energy state of the cut Hamiltonian maps to one of the
    /// original: check on a basis of the zero-energy space via the tableau.
    fn check_step(h: &CommutingHamiltonian, step: &CrossStep) {
        let n = step.h.site_count();
        let gens: Vec<Pauli> = step.h.terms.iter().map(|t| t.stabilizer().unwrap().embed(n, &t.support)).collect();
        let crate::synth::circuit::GateOp::Clifford(c) = &step.unitary.op else { panic!() };
        let mapped: Vec<Pauli> = gens.iter().map(|g| conjugate_local(c, &step.unitary.support, g)).collect();
        let out = StabilizerGroup::from_generators(n, &mapped).unwrap();
        for t in &h.terms {
            let p = t.stabilizer().unwrap().embed(n, &t.support);
            assert_eq!(out.sign_of(&p), Some(true), "term {:?} not fixed", t.support);
        }
    }

    #[test]
    fn ring_cross_hamiltonian() {
        let (h, g) = ring_geo(6);
        let cd = cut_decompose(&h, &g, (3, 4)).unwrap();
        let step = build_cross_hamiltonian(&h, &g, &cd).unwrap();
        assert_eq!(step.h.site_count(), 8);
        assert_eq!(step.h.terms.len(), 5 + 2 + 2);
        let (e, _) = exact_ground_energy(&step.h).unwrap();
        assert!(e.abs() < 1e-9);
        check_step(&h, &step);
        assert_eq!(crate::localize::first_betti(&step.geo.target), 0);
    }

    #[test]
    fn fig5_cross_hamiltonian_maps_ground_states() {
        let (h, g) = with_geo(fig5_lattice());
        let cd = cut_decompose(&h, &g, (1, 2)).unwrap();
        let step = build_cross_hamiltonian(&h, &g, &cd).unwrap();
        check_step(&h, &step);
    }

    #[test]
    fn boundary_cross_hamiltonian_maps_ground_states() {
        let (h, g) = with_geo(toric_boundary_example());
        let cd = cut_decompose(&h, &g, (0, 1)).unwrap();
        let step = build_cross_hamiltonian(&h, &g, &cd).unwrap();
        check_step(&h, &step);
    }
}
