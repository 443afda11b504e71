//! Locally commuting Hamiltonians in dense or Pauli form.

use crate::linalg::{self, c, eigh, embed, eye, max_abs, Layout, Mat};
use crate::pauli::Pauli;
use crate::synth::circuit::{Circuit, Gate, GateOp};
use crate::{tol, Error, Result};
use rayon::prelude::*;
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Site {
    pub id: usize,
    pub dim: usize,
}

/// Operator of a term. A Pauli term with stabilizer `S` is the projector
/// `(1 - S)/2`, so its zero-energy states satisfy `S psi = psi`.
#[derive(Clone, Debug, PartialEq)]
pub enum TermOp {
    Dense(Mat),
    Pauli(Pauli),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub support: Vec<usize>,
    pub op: TermOp,
}

impl Term {
    pub fn dense(support: Vec<usize>, m: Mat) -> Self {
        Term { support, op: TermOp::Dense(m) }
    }

    /// Projector `(1 - s)/2` for the stabilizer `s` acting on `support` in order.
    pub fn pauli(support: Vec<usize>, s: Pauli) -> Self {
        Term { support, op: TermOp::Pauli(s) }
    }

    /// Parses e.g. `("+ZZ", [3, 4])`.
    pub fn pauli_str(support: &[usize], s: &str) -> Result<Self> {
        let p = Pauli::parse(s)?;
        if p.num_qubits() != support.len() {
            return Err(Error::Invalid(format!("Pauli '{s}' does not match support of size {}", support.len())));
        }
        Ok(Term::pauli(support.to_vec(), p))
    }

    /// Stabilizer of a Pauli term.
    pub fn stabilizer(&self) -> Option<&Pauli> {
        match &self.op {
            TermOp::Pauli(p) => Some(p),
            TermOp::Dense(_) => None,
        }
    }

    /// Matrix on the support, factors in support order.
    pub fn matrix(&self) -> Mat {
        match &self.op {
            TermOp::Dense(m) => m.clone(),
            TermOp::Pauli(p) => {
                let d = 1 << p.num_qubits();
                (eye(d) - p.matrix()).scale(0.5)
            }
        }
    }

    /// Matrix embedded on the ordered site list `sites` with the given dimensions.
    pub fn matrix_on(&self, sites: &[usize], dims: &[usize]) -> Mat {
        let layout = Layout::new(dims);
        let pos: Vec<usize> = self.support.iter().map(|s| sites.iter().position(|t| t == s).unwrap()).collect();
        embed(&self.matrix(), &layout, &pos)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutingHamiltonian {
    pub sites: Vec<Site>,
    pub terms: Vec<Term>,
    pub is_projector_form: bool,
}

impl CommutingHamiltonian {
    /// Validates shapes and Hermiticity; commutation is reported by
    /// [`check_commuting_projectors`].
    pub fn new(dims: &[usize], terms: Vec<Term>) -> Result<Self> {
        let sites: Vec<Site> = dims.iter().enumerate().map(|(id, &dim)| Site { id, dim }).collect();
        for (k, t) in terms.iter().enumerate() {
            if t.support.is_empty() {
                return Err(Error::Invalid(format!("term {k} has empty support")));
            }
            let set: BTreeSet<_> = t.support.iter().collect();
            if set.len() != t.support.len() || t.support.iter().any(|&s| s >= dims.len()) {
                return Err(Error::Invalid(format!("term {k} has a bad support {:?}", t.support)));
            }
            let d: usize = t.support.iter().map(|&s| dims[s]).product();
            match &t.op {
                TermOp::Dense(m) => {
                    if d > tol::MAX_TERM_DIM {
                        return Err(Error::DimensionCap { dim: d, cap: tol::MAX_TERM_DIM });
                    }
                    if m.nrows() != d || m.ncols() != d {
                        return Err(Error::Invalid(format!("term {k} matrix is {}x{}, expected {d}", m.nrows(), m.ncols())));
                    }
                    if linalg::hermitian_residual(m) > tol::HERMITIAN {
                        return Err(Error::Invalid(format!("term {k} is not Hermitian")));
                    }
                }
                TermOp::Pauli(p) => {
                    if p.num_qubits() != t.support.len() || t.support.iter().any(|&s| dims[s] != 2) {
                        return Err(Error::Invalid(format!("Pauli term {k} needs qubit sites matching its support")));
                    }
                    if !p.is_hermitian() {
                        return Err(Error::Invalid(format!("Pauli term {k} is not Hermitian")));
                    }
                }
            }
        }
        let is_projector_form = terms.iter().all(|t| match &t.op {
            TermOp::Pauli(_) => true,
            TermOp::Dense(m) => max_abs(&(m * m - m)) <= tol::COMMUTE,
        });
        Ok(CommutingHamiltonian { sites, terms, is_projector_form })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.dim).collect()
    }

    pub fn site_count(&self) -> usize {
        self.sites.len()
    }

    pub fn total_dim(&self) -> Option<usize> {
        self.sites.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.dim))
    }

    pub fn is_pauli(&self) -> bool {
        self.terms.iter().all(|t| matches!(t.op, TermOp::Pauli(_)))
    }

    /// Largest support size.
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|t| t.support.len()).max().unwrap_or(0)
    }

    /// Hamiltonian with only the given terms.
    pub fn subset(&self, keep: impl Fn(usize, &Term) -> bool) -> CommutingHamiltonian {
        let terms: Vec<Term> = self.terms.iter().enumerate().filter(|(k, t)| keep(*k, t)).map(|(_, t)| t.clone()).collect();
        CommutingHamiltonian { sites: self.sites.clone(), is_projector_form: self.is_projector_form, terms }
    }

    /// Full matrix; only for small systems.
    pub fn matrix(&self) -> Result<Mat> {
        let d = self.total_dim().filter(|&d| d <= tol::MAX_STATE_DIM).ok_or(Error::DimensionCap {
            dim: self.total_dim().unwrap_or(usize::MAX),
            cap: tol::MAX_STATE_DIM,
        })?;
        let dims = self.dims();
        let all: Vec<usize> = (0..dims.len()).collect();
        let mut m = Mat::zeros(d, d);
        for t in &self.terms {
            m += t.matrix_on(&all, &dims);
        }
        Ok(m)
    }
}

/// Residual of `[a, b]` on the joint support of two terms.
pub fn commutator_residual(h: &CommutingHamiltonian, a: &Term, b: &Term) -> f64 {
    if let (TermOp::Pauli(p), TermOp::Pauli(q)) = (&a.op, &b.op) {
        let n = h.sites.len();
        let pe = p.embed(n, &a.support);
        let qe = q.embed(n, &b.support);
        return if pe.commutes(&qe) { 0.0 } else { 0.5 };
    }
    if a.support.iter().all(|s| !b.support.contains(s)) {
        return 0.0;
    }
    let mut union: Vec<usize> = a.support.iter().chain(&b.support).copied().collect::<BTreeSet<_>>().into_iter().collect();
    union.sort_unstable();
    let dims: Vec<usize> = union.iter().map(|&s| h.sites[s].dim).collect();
    let ma = a.matrix_on(&union, &dims);
    let mb = b.matrix_on(&union, &dims);
    max_abs(&linalg::commutator(&ma, &mb))
}

#[derive(Clone, Debug, Default)]
pub struct CommutationReport {
    pub pairs_checked: usize,
    pub max_commutator: f64,
    pub max_idempotency: f64,
    pub non_commuting: Vec<(usize, usize, f64)>,
    pub non_idempotent: Vec<(usize, f64)>,
}

impl CommutationReport {
    pub fn commuting(&self) -> bool {
        self.non_commuting.is_empty()
    }

    pub fn projectors(&self) -> bool {
        self.non_idempotent.is_empty()
    }

    pub fn ok(&self) -> bool {
        self.commuting() && self.projectors()
    }
}

/// Pairwise commutators and idempotency residuals of every term.
pub fn check_commuting_projectors(h: &CommutingHamiltonian) -> CommutationReport {
    let n = h.terms.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| h.terms[a].support.iter().any(|s| h.terms[b].support.contains(s)))
        .collect();
    let res: Vec<(usize, usize, f64)> =
        pairs.par_iter().map(|&(a, b)| (a, b, commutator_residual(h, &h.terms[a], &h.terms[b]))).collect();
    let idem: Vec<(usize, f64)> = h
        .terms
        .par_iter()
        .enumerate()
        .map(|(k, t)| match &t.op {
            TermOp::Pauli(_) => (k, 0.0),
            TermOp::Dense(m) => (k, max_abs(&(m * m - m))),
        })
        .collect();
    CommutationReport {
        pairs_checked: pairs.len(),
        max_commutator: res.iter().map(|r| r.2).fold(0.0, f64::max),
        max_idempotency: idem.iter().map(|r| r.1).fold(0.0, f64::max),
        non_commuting: res.into_iter().filter(|r| r.2 > tol::COMMUTE).collect(),
        non_idempotent: idem.into_iter().filter(|r| r.1 > tol::COMMUTE).collect(),
    }
}

/// Replaces each term by `I - P`, where `P` projects onto the eigenspace of
/// the term with eigenvalue `lambdas[k]`.
pub fn projectorize(h: &CommutingHamiltonian, lambdas: &[f64]) -> Result<CommutingHamiltonian> {
    if lambdas.len() != h.terms.len() {
        return Err(Error::Invalid("one eigenvalue per term required".into()));
    }
    let report = check_commuting_projectors(h);
    if let Some(&(a, b, _)) = report.non_commuting.first() {
        return Err(Error::NonCommuting(a, b));
    }
    let mut terms = Vec::with_capacity(h.terms.len());
    for (k, (t, &lam)) in h.terms.iter().zip(lambdas).enumerate() {
        match &t.op {
            TermOp::Pauli(p) => {
                if lam.abs() <= tol::EIGEN {
                    terms.push(t.clone());
                } else if (lam - 1.0).abs() <= tol::EIGEN {
                    terms.push(Term::pauli(t.support.clone(), p.negate()));
                } else {
                    return Err(Error::NotAnEigenvalue(lam, k));
                }
            }
            TermOp::Dense(m) => {
                let (vals, vecs) = eigh(m);
                let cols: Vec<usize> = (0..vals.len()).filter(|&i| (vals[i] - lam).abs() <= tol::EIGEN).collect();
                if cols.is_empty() {
                    return Err(Error::NotAnEigenvalue(lam, k));
                }
                let p = linalg::projector_from_columns(&vecs, &cols);
                terms.push(Term::dense(t.support.clone(), eye(m.nrows()) - p));
            }
        }
    }
    let mut out = CommutingHamiltonian::new(&h.dims(), terms)?;
    out.is_projector_form = true;
    Ok(out)
}

/// Term eigenvalues of a joint eigenstate inside the ground space, found by
/// projecting an exact ground state onto the dominant eigenspace of each
/// term in turn.
pub fn joint_ground_eigenvalues(h: &CommutingHamiltonian) -> Result<Vec<f64>> {
    let mut psi = crate::verify::exact::exact_ground_energy(h)?.1.amplitudes;
    let dims = h.dims();
    let layout = Layout::new(&dims);
    let mut out = Vec::with_capacity(h.terms.len());
    for t in &h.terms {
        let m = t.matrix();
        let (vals, vecs) = eigh(&m);
        let pos: Vec<usize> = t.support.clone();
        let mut best: Option<(f64, f64, linalg::Vector)> = None;
        for (lam, cols) in linalg::cluster_eigenvalues(&vals, tol::EIGEN) {
            let p = linalg::projector_from_columns(&vecs, &cols);
            let mut v = psi.clone();
            linalg::apply_local(&mut v, &layout, &pos, &p);
            let w = v.norm();
            if best.as_ref().is_none_or(|b| w > b.1 + 1e-12) {
                best = Some((lam, w, v));
            }
        }
        let (lam, w, v) = best.unwrap();
        psi = v / c(w);
        out.push(lam);
    }
    Ok(out)
}

/// Lattice positions of sites for the block baseline: site `k` has
/// coordinates `coords[k]` in a box of side `side` per dimension.
#[derive(Clone, Debug)]
pub struct LatticeSites {
    pub side: Vec<usize>,
    pub coords: Vec<Vec<usize>>,
}

impl LatticeSites {
    /// Row-major hypercubic lattice.
    pub fn hypercube(side: &[usize]) -> Self {
        let n: usize = side.iter().product();
        let coords = (0..n)
            .map(|mut k| {
                let mut c = vec![0; side.len()];
                for d in (0..side.len()).rev() {
                    c[d] = k % side[d];
                    k /= side[d];
                }
                c
            })
            .collect();
        LatticeSites { side: side.to_vec(), coords }
    }

    fn block_of(&self, site: usize, l: usize) -> Vec<usize> {
        self.coords[site].iter().map(|&x| x / l).collect()
    }
}

#[derive(Clone, Debug)]
pub struct HypercubeResult {
    pub kept: CommutingHamiltonian,
    pub dropped: Vec<usize>,
    pub dropped_count: usize,
    pub blocks: Vec<Vec<usize>>,
    pub circuit: Circuit,
}

/// Keeps the terms inside one block of side `l` and emits a depth-1 circuit
/// preparing the ground state of every block. Sides not divisible by `l`
/// leave a smaller last block, which is the same as padding the lattice.
pub fn hypercube_partition(h: &CommutingHamiltonian, lattice: &LatticeSites, l: usize) -> Result<HypercubeResult> {
    if l == 0 || lattice.side.iter().any(|&s| l > s) {
        return Err(Error::Invalid(format!("block side {l} must be in 1..=L")));
    }
    if lattice.coords.len() != h.sites.len() {
        return Err(Error::Invalid("lattice does not match the site count".into()));
    }
    let mut block_ids: std::collections::BTreeMap<Vec<usize>, Vec<usize>> = Default::default();
    for s in 0..h.sites.len() {
        block_ids.entry(lattice.block_of(s, l)).or_default().push(s);
    }
    let blocks: Vec<Vec<usize>> = block_ids.into_values().collect();
    let mut of = vec![0; h.sites.len()];
    for (b, sites) in blocks.iter().enumerate() {
        for &s in sites {
            of[s] = b;
        }
    }
    let inside = |t: &Term| t.support.iter().all(|&s| of[s] == of[t.support[0]]);
    let dropped: Vec<usize> = (0..h.terms.len()).filter(|&k| !inside(&h.terms[k])).collect();
    let kept = h.subset(|_, t| inside(t));
    let mut round = Vec::new();
    for sites in &blocks {
        let dims: Vec<usize> = sites.iter().map(|&s| h.sites[s].dim).collect();
        let d: usize = dims.iter().product();
        if d > tol::MAX_TERM_DIM {
            return Err(Error::DimensionCap { dim: d, cap: tol::MAX_TERM_DIM });
        }
        let local = |s: usize| sites.iter().position(|&t| t == s).unwrap();
        let terms: Vec<Term> = kept
            .terms
            .iter()
            .filter(|t| sites.contains(&t.support[0]))
            .map(|t| Term { support: t.support.iter().map(|&s| local(s)).collect(), op: t.op.clone() })
            .collect();
        let hb = CommutingHamiltonian { sites: dims.iter().enumerate().map(|(id, &dim)| Site { id, dim }).collect(), terms, is_projector_form: kept.is_projector_form };
        let ground = crate::verify::exact::exact_ground_energy(&hb)?.1.amplitudes;
        let u = linalg::state_preparation(&ground);
        round.push(Gate { support: sites.clone(), op: GateOp::Dense(u) });
    }
    let mut circuit = Circuit::new(&h.dims());
    circuit.rounds.push(round);
    Ok(HypercubeResult { dropped_count: dropped.len(), kept, dropped, blocks, circuit })
}
