//! State vectors over mixed-radix registers.

use crate::hamiltonian::{CommutingHamiltonian, TermOp};
use crate::linalg::{apply_local, Layout, Mat, Vector, C64, ONE, ZERO};
use crate::pauli::{phase_value, Pauli};
use crate::synth::circuit::Circuit;
use crate::{tol, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub dims: Vec<usize>,
    pub amplitudes: Vector,
}

impl StateVector {
    /// Product of computational basis states.
    pub fn product(dims: &[usize], digits: &[usize]) -> Result<Self> {
        let layout = Layout::new(dims);
        if layout.total > tol::MAX_STATE_DIM {
            return Err(Error::DimensionCap { dim: layout.total, cap: tol::MAX_STATE_DIM });
        }
        let idx: usize = digits.iter().zip(&layout.strides).map(|(d, s)| d * s).sum();
        let mut amplitudes = Vector::zeros(layout.total);
        amplitudes[idx] = ONE;
        Ok(StateVector { dims: dims.to_vec(), amplitudes })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn layout(&self) -> Layout {
        Layout::new(&self.dims)
    }

    pub fn apply(&mut self, positions: &[usize], op: &Mat) {
        let layout = self.layout();
        apply_local(&mut self.amplitudes, &layout, positions, op);
    }

    /// `<psi| op |psi>` for `op` on the given registers.
    pub fn expectation(&self, positions: &[usize], op: &Mat) -> C64 {
        let mut w = self.amplitudes.clone();
        apply_local(&mut w, &self.layout(), positions, op);
        self.amplitudes.dotc(&w)
    }

    /// `<psi| P |psi>` for a Pauli on qubit registers, without building a matrix.
    pub fn pauli_expectation(&self, positions: &[usize], p: &Pauli) -> C64 {
        let layout = self.layout();
        let strides: Vec<usize> = positions.iter().map(|&q| layout.strides[q]).collect();
        let xs: Vec<bool> = (0..positions.len()).map(|k| p.x.get(k)).collect();
        let zs: Vec<bool> = (0..positions.len()).map(|k| p.z.get(k)).collect();
        let ph = phase_value(p.phase);
        let mut acc = ZERO;
        for (b, &amp) in self.amplitudes.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            let mut target = b;
            let mut neg = false;
            for k in 0..positions.len() {
                let bit = (b / strides[k]) & 1 == 1;
                if zs[k] && bit {
                    neg = !neg;
                }
                if xs[k] {
                    if bit {
                        target -= strides[k];
                    } else {
                        target += strides[k];
                    }
                }
            }
            let v = if neg { -amp } else { amp };
            acc += self.amplitudes[target].conj() * v;
        }
        acc * ph
    }
}

/// Applies the circuit round by round to its registered product state.
pub fn apply_circuit(c: &Circuit) -> Result<StateVector> {
    c.validate()?;
    let mut s = StateVector::product(&c.dims(), &c.initial)?;
    for round in &c.rounds {
        for g in round {
            s.apply(&g.support, &g.matrix());
        }
    }
    Ok(s)
}

/// `<psi|H|psi>` with `H` acting on the first registers of the state.
pub fn energy(s: &StateVector, h: &CommutingHamiltonian) -> Result<f64> {
    let dims = h.dims();
    if s.dims.len() < dims.len() || s.dims[..dims.len()] != dims[..] {
        return Err(Error::Invalid("state registers do not match the Hamiltonian sites".into()));
    }
    let mut e = 0.0;
    for t in &h.terms {
        e += match &t.op {
            TermOp::Pauli(p) => 0.5 * (1.0 - s.pauli_expectation(&t.support, p).re),
            TermOp::Dense(m) => s.expectation(&t.support, m).re,
        };
    }
    Ok(e)
}

pub fn energy_density(s: &StateVector, h: &CommutingHamiltonian) -> Result<f64> {
    Ok(energy(s, h)? / h.site_count() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Term;
    use crate::linalg::random_state;
    use crate::synth::circuit::Gate;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_and_x() {
        let c = Circuit::new(&[2, 3]);
        let s = apply_circuit(&c).unwrap();
        assert_eq!(s.amplitudes[0], ONE);
        let mut c = Circuit::new(&[2]);
        c.rounds.push(vec![Gate::dense(vec![0], Pauli::parse("X").unwrap().matrix())]);
        let s = apply_circuit(&c).unwrap();
        assert_eq!(s.amplitudes[1], ONE);
    }

    proptest! {
        #[test]
        fn pauli_fast_path_matches_dense(seed in any::<u64>(), n in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut dims = vec![2; n + 1];
            dims[0] = 3;
            let layout = Layout::new(&dims);
            let s = StateVector { dims: dims.clone(), amplitudes: random_state(layout.total, &mut rng) };
            let p = Pauli::random(n, &mut rng);
            let pos: Vec<usize> = (1..=n).rev().collect();
            let a = s.pauli_expectation(&pos, &p);
            let b = s.expectation(&pos, &p.matrix());
            prop_assert!((a - b).norm() < 1e-12);
        }

        #[test]
        fn circuits_preserve_norm(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut c = Circuit::new(&[2, 3, 2, 2]);
            for _ in 0..4 {
                c.push_asap(Gate::dense(vec![1, 3], crate::linalg::random_unitary(6, &mut rng)));
                c.push_asap(Gate::dense(vec![0, 2], crate::linalg::random_unitary(4, &mut rng)));
            }
            let s = apply_circuit(&c).unwrap();
            prop_assert!((s.norm() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn ground_energy_is_variational(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = crate::instances::random_diagonal_commuting(5, 6, &mut rng);
            let (e0, _) = crate::verify::exact_ground_energy(&h).unwrap();
            let s = StateVector { dims: h.dims(), amplitudes: random_state(32, &mut rng) };
            prop_assert!(e0 <= energy(&s, &h).unwrap() + 1e-9);
        }
    }

    #[test]
    fn mismatched_state_rejected() {
        let h = CommutingHamiltonian::new(&[2, 2], vec![Term::pauli_str(&[0, 1], "+ZZ").unwrap()]).unwrap();
        let s = StateVector::product(&[3, 2], &[0, 0]).unwrap();
        assert!(energy(&s, &h).is_err());
    }
}
