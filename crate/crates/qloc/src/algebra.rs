//! Finite-dimensional operator algebras on one carrier space: generated
//! closures, interaction algebras, centres, minimal central projections and
//! tensor-factor decompositions by matrix units.

use crate::hamiltonian::Term;
use crate::linalg::{self, c, eigh, embed, eye, hs, max_abs, Layout, Mat, I};
use crate::{tol, Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed for the generic central elements and generic algebra elements.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Relative residual below which a matrix is taken to lie in a span.
const SPAN_TOL: f64 = 1e-9;

/// Unital adjoint-closed algebra of `dim x dim` matrices, stored as a
/// Hilbert-Schmidt orthonormal basis together with a generating set.
#[derive(Clone, Debug)]
pub struct OperatorAlgebra {
    pub dim: usize,
    pub basis: Vec<Mat>,
    pub generators: Vec<Mat>,
    pub closed: bool,
}

/// Orthonormal span under the Hilbert-Schmidt inner product.
#[derive(Clone, Debug, Default)]
struct Span {
    basis: Vec<Mat>,
}

impl Span {
    fn residual(&self, m: &Mat) -> Mat {
        let mut r = m.clone();
        for _ in 0..2 {
            for b in &self.basis {
                let o = hs(b, &r);
                r -= b * o;
            }
        }
        r
    }

    /// Adds the normalised residual of `m` when it is independent.
    fn add(&mut self, m: &Mat) -> Option<Mat> {
        self.add_relative(m, m.norm())
    }

    /// As [`Span::add`], measuring the residual against `scale`.
    fn add_relative(&mut self, m: &Mat, scale: f64) -> Option<Mat> {
        if scale == 0.0 {
            return None;
        }
        let r = self.residual(m);
        let nr = r.norm();
        if nr <= SPAN_TOL * scale {
            return None;
        }
        let b = r / c(nr);
        self.basis.push(b.clone());
        Some(b)
    }
}

impl OperatorAlgebra {
    /// Multiples of the identity.
    pub fn scalars(dim: usize) -> Self {
        let id = eye(dim) / c((dim as f64).sqrt());
        OperatorAlgebra { dim, basis: vec![id.clone()], generators: vec![id], closed: true }
    }

    /// All `dim x dim` matrices.
    pub fn full(dim: usize) -> Self {
        let mut basis = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                let mut m = Mat::zeros(dim, dim);
                m[(a, b)] = linalg::ONE;
                basis.push(m);
            }
        }
        OperatorAlgebra { dim, generators: basis.clone(), basis, closed: true }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Norm of the component of `m` outside the algebra, relative to `|m|`.
    pub fn distance(&self, m: &Mat) -> f64 {
        let span = Span { basis: self.basis.clone() };
        let n = m.norm();
        if n == 0.0 {
            0.0
        } else {
            span.residual(m).norm() / n
        }
    }

    pub fn contains(&self, m: &Mat) -> bool {
        self.distance(m) <= SPAN_TOL.sqrt()
    }

    /// Hermitian basis of the same span.
    pub fn hermitian_basis(&self) -> Vec<Mat> {
        let mut span = Span::default();
        for b in &self.basis {
            let ad = b.adjoint();
            let n = b.norm();
            span.add_relative(&((b + &ad).scale(0.5)), n);
            span.add_relative(&((b - &ad) * (-I * 0.5)), n);
        }
        span.basis.into_iter().map(|h| (&h + h.adjoint()).scale(0.5)).collect()
    }

    pub fn is_abelian(&self) -> bool {
        commutation_residual(&self.generators, &self.generators) <= tol::COMMUTE
    }
}

/// Largest commutator norm between members of `a` and `b`.
pub fn commutation_residual(a: &[Mat], b: &[Mat]) -> f64 {
    let mut best: f64 = 0.0;
    for x in a {
        for y in b {
            best = best.max(max_abs(&linalg::commutator(x, y)));
        }
    }
    best
}

fn check_dim(dim: usize) -> Result<()> {
    if dim > tol::MAX_ALGEBRA_DIM {
        return Err(Error::DimensionCap { dim, cap: tol::MAX_ALGEBRA_DIM });
    }
    Ok(())
}

/// Smallest unital adjoint-closed algebra containing `gens`.
pub fn generated_closure(dim: usize, gens: &[Mat]) -> Result<OperatorAlgebra> {
    check_dim(dim)?;
    if let Some(g) = gens.iter().find(|g| g.nrows() != dim || g.ncols() != dim) {
        return Err(Error::Invalid(format!("generator is {}x{}, expected {dim}", g.nrows(), g.ncols())));
    }
    let mut letters: Vec<Mat> = Vec::new();
    let mut lspan = Span::default();
    for g in gens {
        for m in [g.clone(), g.adjoint()] {
            if lspan.add(&m).is_some() {
                letters.push(m);
            }
        }
    }
    let mut span = Span::default();
    let mut queue = vec![span.add(&eye(dim)).unwrap()];
    for l in &letters {
        if let Some(b) = span.add(l) {
            queue.push(b);
        }
    }
    // the span contains I and is invariant under left multiplication by
    // every letter once the queue drains
    while let Some(b) = queue.pop() {
        for l in &letters {
            if let Some(nb) = span.add(&(l * &b)) {
                queue.push(nb);
            }
        }
    }
    let mut generators = letters;
    if generators.is_empty() {
        generators.push(eye(dim));
    }
    Ok(OperatorAlgebra { dim, basis: span.basis, generators, closed: true })
}

/// Algebra on the factors `keep` of `op` (factor dimensions `dims`) generated by
/// `tr_rest(op Q)` for `Q` ranging over the matrix units of the other factors.
/// The carrier has the `keep` factors in the given order.
pub fn interaction_algebra(op: &Mat, dims: &[usize], keep: &[usize]) -> Result<OperatorAlgebra> {
    let dk: usize = keep.iter().map(|&k| dims[k]).product();
    check_dim(dk)?;
    if keep.is_empty() {
        return Ok(OperatorAlgebra::scalars(1));
    }
    let dr: usize = dims.iter().product::<usize>() / dk;
    let mut gens = Vec::with_capacity(dr * dr);
    for r in 0..dr {
        for s in 0..dr {
            let b = linalg::complement_block(op, dims, keep, r, s);
            if max_abs(&b) > tol::COMMUTE {
                gens.push(b);
            }
        }
    }
    generated_closure(dk, &gens)
}

/// Interaction algebra of a term on the ordered site set `x`; sites of `x`
/// outside the support carry the identity.
pub fn term_interaction_algebra(term: &Term, site_dims: &[usize], x: &[usize]) -> Result<OperatorAlgebra> {
    let x_dims: Vec<usize> = x.iter().map(|&s| site_dims[s]).collect();
    let dx: usize = x_dims.iter().product();
    check_dim(dx)?;
    let inside: Vec<usize> = x.iter().copied().filter(|s| term.support.contains(s)).collect();
    if inside.is_empty() {
        return Ok(OperatorAlgebra::scalars(dx));
    }
    let sup_dims: Vec<usize> = term.support.iter().map(|&s| site_dims[s]).collect();
    let keep: Vec<usize> = inside.iter().map(|s| term.support.iter().position(|t| t == s).unwrap()).collect();
    let local = interaction_algebra(&term.matrix(), &sup_dims, &keep)?;
    if inside.len() == x.len() {
        return Ok(local);
    }
    let layout = Layout::new(&x_dims);
    let pos: Vec<usize> = inside.iter().map(|s| x.iter().position(|t| t == s).unwrap()).collect();
    let gens: Vec<Mat> = local.generators.iter().map(|g| embed(g, &layout, &pos)).collect();
    generated_closure(dx, &gens)
}

/// Centre of a closed algebra, as an algebra.
pub fn center(a: &OperatorAlgebra) -> OperatorAlgebra {
    let herm = a.hermitian_basis();
    let k = herm.len();
    let gens = &a.generators;
    let d2 = a.dim * a.dim;
    let mut m = Mat::zeros(d2 * gens.len(), k);
    for (i, h) in herm.iter().enumerate() {
        for (j, g) in gens.iter().enumerate() {
            let cm = linalg::commutator(h, g);
            for (t, v) in cm.iter().enumerate() {
                m[(j * d2 + t, i)] = *v;
            }
        }
    }
    let ns = linalg::null_space(&m, 1e-12);
    let mut span = Span::default();
    span.add(&eye(a.dim));
    for col in ns.column_iter() {
        let mut z = Mat::zeros(a.dim, a.dim);
        for (i, h) in herm.iter().enumerate() {
            z += h * col[i];
        }
        let ad = z.adjoint();
        let n = z.norm();
        span.add_relative(&((&z + &ad).scale(0.5)), n);
        span.add_relative(&((&z - &ad) * (-I * 0.5)), n);
    }
    let basis: Vec<Mat> = span.basis.into_iter().map(|h| (&h + h.adjoint()).scale(0.5)).collect();
    OperatorAlgebra { dim: a.dim, generators: basis.clone(), basis, closed: true }
}

/// Spectral projectors of a random real combination of `herm`, which all commute.
fn generic_projectors(dim: usize, herm: &[Mat], seed: u64) -> Vec<Mat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = Mat::zeros(dim, dim);
    for h in herm {
        z += h.scale(linalg::gauss(&mut rng));
    }
    let (vals, vecs) = eigh(&z);
    linalg::cluster_eigenvalues(&vals, tol::CLUSTER)
        .into_iter()
        .map(|(_, cols)| linalg::projector_from_columns(&vecs, &cols))
        .collect()
}

/// Minimal central projections, from the spectrum of a generic Hermitian
/// central element.
pub fn center_projectors(a: &OperatorAlgebra, seed: u64) -> Vec<Mat> {
    let z = center(a);
    generic_projectors(a.dim, &z.basis, seed)
}

/// One block `P = V V^dagger` of a decomposition. Inside the block the carrier is
/// `C^{n_1} (x) ... (x) C^{n_m} (x) C^{n_0}`, algebra `j` acting on factor `j`.
#[derive(Clone, Debug)]
pub struct Block {
    pub projector: Mat,
    pub isometry: Mat,
    pub factor_dims: Vec<usize>,
    pub residual_dim: usize,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.isometry.ncols()
    }

    /// All factor dimensions including the residual one last.
    pub fn all_dims(&self) -> Vec<usize> {
        let mut d = self.factor_dims.clone();
        d.push(self.residual_dim);
        d
    }

    /// Operator on factor `j` whose tensor with identities equals
    /// `V^dagger op V`, together with the reconstruction residual.
    pub fn factor_part(&self, j: usize, op: &Mat) -> (Mat, f64) {
        let x = self.isometry.adjoint() * op * &self.isometry;
        let dims = self.all_dims();
        let rest = self.dim() / dims[j];
        let y = linalg::partial_trace(&x, &dims, &[j]) / c(rest as f64);
        let back = embed(&y, &Layout::new(&dims), &[j]);
        let residual = max_abs(&(x - back));
        (y, residual)
    }
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub dim: usize,
    pub blocks: Vec<Block>,
}

impl BlockDecomposition {
    /// Largest reconstruction residual of every basis element of every algebra.
    pub fn reconstruction_residual(&self, algebras: &[OperatorAlgebra]) -> f64 {
        let mut worst: f64 = 0.0;
        for b in &self.blocks {
            for (j, a) in algebras.iter().enumerate() {
                for m in &a.basis {
                    worst = worst.max(b.factor_part(j, m).1);
                }
            }
        }
        worst
    }
}

/// Splits the carrier into blocks on which commuting algebras act on
/// separate tensor factors.
pub fn factor_decompose(dim: usize, algebras: &[OperatorAlgebra], seed: u64) -> Result<BlockDecomposition> {
    check_dim(dim)?;
    for (j, a) in algebras.iter().enumerate() {
        if a.dim != dim {
            return Err(Error::Invalid(format!("algebra {j} has carrier {} instead of {dim}", a.dim)));
        }
    }
    for a in 0..algebras.len() {
        for b in a + 1..algebras.len() {
            if commutation_residual(&algebras[a].generators, &algebras[b].generators) > tol::COMMUTE {
                return Err(Error::NonCommutingAlgebras(a, b));
            }
        }
    }
    // the centre of the joint algebra is generated by the centres of the
    // commuting inputs, so its minimal projections are their common refinement
    let mut central = Vec::new();
    for a in algebras {
        central.extend(center(a).basis);
    }
    let projectors = generic_projectors(dim, &central, seed);
    let mut blocks = Vec::with_capacity(projectors.len());
    for (bi, p) in projectors.into_iter().enumerate() {
        let v = linalg::range_basis(&p, 0.5);
        let restricted: Vec<Vec<Mat>> =
            algebras.iter().map(|a| a.basis.iter().map(|m| v.adjoint() * m * &v).collect()).collect();
        let (factor_dims, residual_dim, q) = factorize(v.ncols(), &restricted, seed.wrapping_add(bi as u64 + 1))?;
        let isometry = &v * q;
        blocks.push(Block { projector: &isometry * isometry.adjoint(), isometry, factor_dims, residual_dim });
    }
    Ok(BlockDecomposition { dim, blocks })
}

/// Unitary `Q` with `Q^dagger a Q = a_1 (x) I` for every `a` of the first algebra
/// (a factor on this space), recursing on the commutant for the others.
fn factorize(r: usize, algs: &[Vec<Mat>], seed: u64) -> Result<(Vec<usize>, usize, Mat)> {
    let Some((first, rest)) = algs.split_first() else {
        return Ok((Vec::new(), r, eye(r)));
    };
    let herm: Vec<Mat> = first.iter().flat_map(|m| [(m + m.adjoint()).scale(0.5), (m - m.adjoint()) * (-I * 0.5)]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = Mat::zeros(r, r);
    for h in &herm {
        z += h.scale(linalg::gauss(&mut rng));
    }
    let (vals, vecs) = eigh(&z);
    let clusters = linalg::cluster_eigenvalues(&vals, tol::CLUSTER);
    let m = clusters[0].1.len();
    if clusters.iter().any(|(_, cols)| cols.len() != m) {
        return Err(Error::Inconsistent("algebra is not a factor on a central block".into()));
    }
    let n = clusters.len();
    let f: Vec<Mat> = clusters.iter().map(|(_, cols)| linalg::select_columns(&vecs, cols)).collect();
    let mut q = Mat::zeros(r, r);
    for k in 0..n {
        let u = if k == 0 {
            eye(m)
        } else {
            let y = first
                .iter()
                .map(|a| f[0].adjoint() * a * &f[k])
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .unwrap();
            let scale = (y.norm_squared() / m as f64).sqrt();
            y / c(scale)
        };
        let g = &f[k] * u.adjoint();
        for t in 0..m {
            q.set_column(k * m + t, &g.column(t));
        }
    }
    let sub: Vec<Vec<Mat>> = rest.iter().map(|alg| alg.iter().map(|b| f[0].adjoint() * b * &f[0]).collect()).collect();
    let (mut dims, n0, qs) = factorize(m, &sub, seed.wrapping_mul(31).wrapping_add(7))?;
    dims.insert(0, n);
    Ok((dims, n0, q * linalg::kron(&eye(n), &qs)))
}
