//! Exact ground energies by dense diagonalization or restarted Lanczos.

use super::state::StateVector;
use crate::hamiltonian::CommutingHamiltonian;
use crate::linalg::{apply_local, c, eigh, Layout, Mat, Vector, ZERO};
use crate::{tol, Error, Result};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Minimal eigenvalue of the summed Hamiltonian and one minimizer.
pub fn exact_ground_energy(h: &CommutingHamiltonian) -> Result<(f64, StateVector)> {
    let dims = h.dims();
    let d = h.total_dim().unwrap_or(usize::MAX);
    if d > tol::MAX_STATE_DIM {
        return Err(Error::DimensionCap { dim: d, cap: tol::MAX_STATE_DIM });
    }
    let (e, v) = if d <= tol::MAX_DENSE_DIM { dense(h)? } else { lanczos(h) };
    Ok((e, StateVector { dims, amplitudes: v }))
}

fn dense(h: &CommutingHamiltonian) -> Result<(f64, Vector)> {
    let m = h.matrix()?;
    let (vals, vecs) = eigh(&m);
    Ok((vals[0], vecs.column(0).into_owned()))
}

/// `H v` without materializing `H`.
pub fn apply_hamiltonian(h: &CommutingHamiltonian, mats: &[Mat], layout: &Layout, v: &Vector) -> Vector {
    let mut out = Vector::zeros(v.len());
    for (t, m) in h.terms.iter().zip(mats) {
        let mut w = v.clone();
        apply_local(&mut w, layout, &t.support, m);
        out += w;
    }
    out
}

fn lanczos(h: &CommutingHamiltonian) -> (f64, Vector) {
    let layout = Layout::new(&h.dims());
    let mats: Vec<Mat> = h.terms.iter().map(|t| t.matrix()).collect();
    let d = layout.total;
    let krylov = 120.min(d);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c);
    let mut v0 = crate::linalg::random_state(d, &mut rng);
    let mut best = (f64::INFINITY, v0.clone());
    for _ in 0..40 {
        let mut basis: Vec<Vector> = vec![v0.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..krylov {
            let mut w = apply_hamiltonian(h, &mats, &layout, &basis[j]);
            let a = basis[j].dotc(&w).re;
            alpha.push(a);
            for _ in 0..2 {
                for u in &basis {
                    let o = u.dotc(&w);
                    w -= u * o;
                }
            }
            let b = w.norm();
            if b < 1e-12 || j + 1 == krylov {
                break;
            }
            beta.push(b);
            basis.push(w / c(b));
        }
        let k = alpha.len();
        let t = DMatrix::<f64>::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let (imin, &theta) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let mut y = Vector::from_element(d, ZERO);
        for (i, u) in basis.iter().enumerate().take(k) {
            y += u * c(eig.eigenvectors[(i, imin)]);
        }
        let ny = y.norm();
        y /= c(ny);
        let hy = apply_hamiltonian(h, &mats, &layout, &y);
        let res = (&hy - &y * c(theta)).norm();
        if theta < best.0 {
            best = (theta, y.clone());
        }
        if res < 1e-10 {
            return (theta, y);
        }
        v0 = y;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Term;
    use crate::instances;

    #[test]
    fn single_projector() {
        let h = CommutingHamiltonian::new(&[2], vec![Term::pauli_str(&[0], "+Z").unwrap()]).unwrap();
        let (e, psi) = exact_ground_energy(&h).unwrap();
        assert!(e.abs() < 1e-12);
        assert!((psi.amplitudes[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ring_and_frustrated() {
        let (e, _) = exact_ground_energy(&instances::ring_zz(6)).unwrap();
        assert!(e.abs() < 1e-9);
        let h = CommutingHamiltonian::new(&[2], vec![Term::pauli_str(&[0], "+Z").unwrap(), Term::pauli_str(&[0], "-Z").unwrap()]).unwrap();
        let (e, _) = exact_ground_energy(&h).unwrap();
        assert!((e - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lanczos_matches_known_floor() {
        // 12 qubits: a ring plus one frustrated pair gives ground energy 1
        let mut h = instances::ring_zz(12);
        h.terms.push(Term::pauli_str(&[0], "+Z").unwrap());
        h.terms.push(Term::pauli_str(&[0], "-Z").unwrap());
        let (e, psi) = exact_ground_energy(&h).unwrap();
        assert!((e - 1.0).abs() < 1e-9, "{e}");
        assert!((crate::verify::energy(&psi, &h).unwrap() - e).abs() < 1e-9);
    }

    #[test]
    fn cap_enforced() {
        let h = instances::ring_zz(15);
        assert!(matches!(exact_ground_energy(&h), Err(Error::DimensionCap { .. })));
    }
}
