//! Dense complex linear algebra on mixed-radix tensor products.
//!
//! Tensor factor 0 is the most significant digit of a basis index.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn eye(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn kron_all(ms: &[Mat]) -> Mat {
    ms.iter().fold(eye(1), |acc, m| kron(&acc, m))
}

/// Frobenius norm.
pub fn norm(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute entry.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_residual(m: &Mat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

pub fn unitarity_residual(u: &Mat) -> f64 {
    max_abs(&(u.adjoint() * u - eye(u.nrows())))
}

/// Hilbert-Schmidt inner product tr(a† b).
pub fn hs(a: &Mat, b: &Mat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(m: &Mat) -> (Vec<f64>, Mat) {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = Mat::zeros(m.nrows(), m.ncols());
    for (col, &k) in order.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(k));
    }
    (vals, vecs)
}

/// Groups ascending eigenvalues into clusters closer than `tol`.
/// Returns `(mean value, column indices)` per cluster.
pub fn cluster_eigenvalues(vals: &[f64], tol: f64) -> Vec<(f64, Vec<usize>)> {
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    for (k, &v) in vals.iter().enumerate() {
        match out.last_mut() {
            Some((_, idx)) if (v - vals[*idx.last().unwrap()]).abs() <= tol => idx.push(k),
            _ => out.push((v, vec![k])),
        }
    }
    for (mean, idx) in out.iter_mut() {
        *mean = idx.iter().map(|&k| vals[k]).sum::<f64>() / idx.len() as f64;
    }
    out
}

/// Projector onto the span of the given columns of `vecs`.
pub fn projector_from_columns(vecs: &Mat, cols: &[usize]) -> Mat {
    let mut p = Mat::zeros(vecs.nrows(), vecs.nrows());
    for &k in cols {
        let v = vecs.column(k);
        p += &v * v.adjoint();
    }
    p
}

/// Matrix whose columns are the selected columns of `vecs`.
pub fn select_columns(vecs: &Mat, cols: &[usize]) -> Mat {
    let mut out = Mat::zeros(vecs.nrows(), cols.len());
    for (j, &k) in cols.iter().enumerate() {
        out.set_column(j, &vecs.column(k));
    }
    out
}

/// Orthonormal basis (as columns) of the range of a Hermitian PSD matrix.
pub fn range_basis(p: &Mat, tol: f64) -> Mat {
    let (vals, vecs) = eigh(p);
    let cols: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > tol).collect();
    select_columns(&vecs, &cols)
}

/// Orthonormal basis of the null space of `m` (columns).
pub fn null_space(m: &Mat, tol: f64) -> Mat {
    let g = m.adjoint() * m;
    let (vals, vecs) = eigh(&g);
    let scale = vals.last().copied().unwrap_or(0.0).max(1.0);
    let cols: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] <= tol * scale).collect();
    select_columns(&vecs, &cols)
}

/// Extends orthonormal columns `v` to a unitary, appending columns.
pub fn complete_unitary(v: &Mat) -> Mat {
    let n = v.nrows();
    let mut cols: Vec<Vector> = v.column_iter().map(|c| c.into_owned()).collect();
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut w = Vector::zeros(n);
        w[e] = ONE;
        for _ in 0..2 {
            for u in &cols {
                let o = u.dotc(&w);
                w -= u * o;
            }
        }
        let nw = w.norm();
        if nw > 1e-6 {
            cols.push(w / c(nw));
        }
    }
    Mat::from_columns(&cols)
}

/// Unitary mapping the first basis vector to the unit vector `psi`: a phase
/// times a Householder reflection.
pub fn state_preparation(psi: &Vector) -> Mat {
    let n = psi.len();
    let phase = if psi[0].norm() > 1e-14 { psi[0] / c(psi[0].norm()) } else { ONE };
    let target = psi / phase;
    let mut w = -target;
    w[0] += ONE;
    let nw = w.norm_squared();
    let mut u = eye(n);
    if nw > 1e-28 {
        u -= (&w * w.adjoint()).scale(2.0 / nw);
    }
    u * phase
}

/// Gram-Schmidt on a list of vectors, dropping dependent ones.
pub fn orthonormalize(vs: &[Vector], tol: f64) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let o = u.dotc(&w);
                w -= u * o;
            }
        }
        let nw = w.norm();
        if nw > tol {
            out.push(w / c(nw));
        }
    }
    out
}

/// Haar-random unitary via QR of a complex Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    let g = Mat::from_fn(n, n, |_, _| C64::new(gauss(rng), gauss(rng)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / c(d.norm()) } else { ONE };
        for i in 0..n {
            u[(i, j)] *= ph;
        }
    }
    u
}

pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vector {
    let v = Vector::from_fn(n, |_, _| C64::new(gauss(rng), gauss(rng)));
    let nv = v.norm();
    v / c(nv)
}

pub fn gauss<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Mixed-radix layout of a tensor product.
#[derive(Clone, Debug)]
pub struct Layout {
    pub dims: Vec<usize>,
    pub strides: Vec<usize>,
    pub total: usize,
}

impl Layout {
    pub fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let total = dims.iter().product();
        Layout { dims: dims.to_vec(), strides, total }
    }

    pub fn digit(&self, idx: usize, pos: usize) -> usize {
        (idx / self.strides[pos]) % self.dims[pos]
    }

    /// Offsets of every local basis index over `positions` (first position most significant).
    pub fn offsets(&self, positions: &[usize]) -> Vec<usize> {
        let mut offs = vec![0usize];
        for &p in positions {
            let mut next = Vec::with_capacity(offs.len() * self.dims[p]);
            for &o in &offs {
                for d in 0..self.dims[p] {
                    next.push(o + d * self.strides[p]);
                }
            }
            offs = next;
        }
        offs
    }

    /// Basis indices with digit 0 at every one of `positions`.
    pub fn bases(&self, positions: &[usize]) -> Vec<usize> {
        let rest: Vec<usize> = (0..self.dims.len()).filter(|p| !positions.contains(p)).collect();
        self.offsets(&rest)
    }
}

/// Applies `op` acting on the factors `positions` of a state in `layout`.
pub fn apply_local(state: &mut Vector, layout: &Layout, positions: &[usize], op: &Mat) {
    let offs = layout.offsets(positions);
    debug_assert_eq!(offs.len(), op.nrows());
    let mut buf = Vector::zeros(offs.len());
    for base in layout.bases(positions) {
        for (l, &o) in offs.iter().enumerate() {
            buf[l] = state[base + o];
        }
        let out = op * &buf;
        for (l, &o) in offs.iter().enumerate() {
            state[base + o] = out[l];
        }
    }
}

/// Embeds `op` on `positions` into the full space of `layout`.
pub fn embed(op: &Mat, layout: &Layout, positions: &[usize]) -> Mat {
    let offs = layout.offsets(positions);
    let mut m = Mat::zeros(layout.total, layout.total);
    for base in layout.bases(positions) {
        for (a, &oa) in offs.iter().enumerate() {
            for (b, &ob) in offs.iter().enumerate() {
                let v = op[(a, b)];
                if v != ZERO {
                    m[(base + oa, base + ob)] = v;
                }
            }
        }
    }
    m
}

/// Reorders tensor factors: factor k of the result is factor `order[k]` of `op`.
pub fn permute_factors(op: &Mat, dims: &[usize], order: &[usize]) -> Mat {
    let offs = Layout::new(dims).offsets(order);
    Mat::from_fn(op.nrows(), op.ncols(), |a, b| op[(offs[a], offs[b])])
}

/// Partial trace over the factors not in `keep` (kept factors stay in the given order).
pub fn partial_trace(op: &Mat, dims: &[usize], keep: &[usize]) -> Mat {
    let rest: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let layout = Layout::new(dims);
    let ko = layout.offsets(keep);
    let ro = layout.offsets(&rest);
    Mat::from_fn(ko.len(), ko.len(), |a, b| ro.iter().map(|&r| op[(ko[a] + r, ko[b] + r)]).sum())
}

/// Matrix elements of `op` between complement basis states:
/// `block(r, s)[a, b] = <a, r| op |b, s>` with `keep` factors first.
pub fn complement_block(op: &Mat, dims: &[usize], keep: &[usize], r: usize, s: usize) -> Mat {
    let rest: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let layout = Layout::new(dims);
    let ko = layout.offsets(keep);
    let ro = layout.offsets(&rest);
    Mat::from_fn(ko.len(), ko.len(), |a, b| op[(ko[a] + ro[r], ko[b] + ro[s])])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli_z() -> Mat {
        Mat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
    }
    fn pauli_x() -> Mat {
        Mat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    #[test]
    fn embed_matches_kron() {
        let layout = Layout::new(&[2, 3, 2]);
        let m = embed(&pauli_z(), &layout, &[2]);
        let k = kron_all(&[eye(2), eye(3), pauli_z()]);
        assert!(max_abs(&(m - k)) < 1e-15);
        let zx = kron(&pauli_z(), &pauli_x());
        let m = embed(&zx, &layout, &[2, 0]);
        let k = kron_all(&[pauli_x(), eye(3), pauli_z()]);
        assert!(max_abs(&(m - k)) < 1e-15);
    }

    #[test]
    fn apply_local_matches_embed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let layout = Layout::new(&[2, 3, 2, 2]);
        let op = random_unitary(6, &mut rng);
        let psi = random_state(layout.total, &mut rng);
        let mut a = psi.clone();
        apply_local(&mut a, &layout, &[3, 1], &op);
        let b = embed(&op, &layout, &[3, 1]) * psi;
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = pauli_z();
        let b = Mat::from_diagonal(&Vector::from_vec(vec![c(1.0), c(2.0), c(3.0)]));
        let ab = kron(&a, &b);
        let t = partial_trace(&ab, &[2, 3], &[0]);
        assert!(max_abs(&(t - a.scale(6.0))) < 1e-12);
        let t = partial_trace(&ab, &[2, 3], &[1]);
        assert!(max_abs(&t) < 1e-12);
    }

    #[test]
    fn permute_swaps_kron_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_unitary(2, &mut rng);
        let b = random_unitary(3, &mut rng);
        let p = permute_factors(&kron(&a, &b), &[2, 3], &[1, 0]);
        assert!(max_abs(&(p - kron(&b, &a))) < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(unitarity_residual(&random_unitary(7, &mut rng)) < 1e-12);
    }

    #[test]
    fn eigh_sorted_and_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_unitary(5, &mut rng);
        let d = Mat::from_diagonal(&Vector::from_vec(vec![c(3.0), c(-1.0), c(0.5), c(2.0), c(0.0)]));
        let h = &u * d * u.adjoint();
        let (vals, vecs) = eigh(&h);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let rec = &vecs * Mat::from_diagonal(&Vector::from_iterator(5, vals.iter().map(|&v| c(v)))) * vecs.adjoint();
        assert!(max_abs(&(rec - h)) < 1e-10);
    }

    #[test]
    fn state_preparation_maps_first_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1, 2, 6] {
            let psi = random_state(n, &mut rng);
            let u = state_preparation(&psi);
            assert!(unitarity_residual(&u) < 1e-12);
            assert!((u.column(0) - &psi).norm() < 1e-12);
        }
        let mut e1 = Vector::zeros(3);
        e1[1] = ONE;
        assert!((state_preparation(&e1).column(0) - &e1).norm() < 1e-12);
    }
}
