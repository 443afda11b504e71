//! Stabilizer tableau simulation of Clifford circuits.

use crate::hamiltonian::{CommutingHamiltonian, TermOp};
use crate::pauli::{CliffordMap, Pauli, StabilizerGroup};
use crate::synth::circuit::{Circuit, GateOp};
use crate::{Error, Result};

/// Stabilizer state given by `n` independent commuting generators.
#[derive(Clone, Debug)]
pub struct Tableau {
    pub gens: Vec<Pauli>,
}

impl Tableau {
    /// Computational basis state with bits `initial`.
    pub fn basis_state(initial: &[usize]) -> Self {
        let n = initial.len();
        let gens = (0..n)
            .map(|q| {
                let z = Pauli::single(n, q, 'Z');
                if initial[q] == 1 {
                    z.negate()
                } else {
                    z
                }
            })
            .collect();
        Tableau { gens }
    }

    pub fn num_qubits(&self) -> usize {
        self.gens.len()
    }

    /// Conjugates every generator by `c` acting on `qubits`.
    pub fn apply(&mut self, c: &CliffordMap, qubits: &[usize]) {
        for g in self.gens.iter_mut() {
            if qubits.iter().all(|&q| !g.x.get(q) && !g.z.get(q)) {
                continue;
            }
            *g = conjugate_local(c, qubits, g);
        }
    }

    pub fn group(&self) -> Result<StabilizerGroup> {
        StabilizerGroup::from_generators(self.num_qubits(), &self.gens)
    }
}

/// `U g U^dagger` for `U` acting on `qubits` only.
pub fn conjugate_local(c: &CliffordMap, qubits: &[usize], g: &Pauli) -> Pauli {
    let k = qubits.len();
    let mut local = Pauli::identity(k);
    let mut rest = g.clone();
    for (j, &q) in qubits.iter().enumerate() {
        local.x.set(j, g.x.get(q));
        local.z.set(j, g.z.get(q));
        rest.x.set(q, false);
        rest.z.set(q, false);
    }
    // g = i^e (X^x_out Z^z_out)(X^x_S Z^z_S) since the two parts act on disjoint qubits
    let img = c.conjugate(&local);
    for (j, &q) in qubits.iter().enumerate() {
        rest.x.set(q, img.x.get(j));
        rest.z.set(q, img.z.get(j));
    }
    rest.phase = (g.phase + img.phase) % 4;
    rest
}

/// Runs a Clifford circuit on its registered basis state.
pub fn run_circuit(c: &Circuit) -> Result<Tableau> {
    if c.registers.iter().any(|r| r.dim != 2) || c.initial.iter().any(|&i| i > 1) {
        return Err(Error::Invalid("tableau simulation needs qubit registers".into()));
    }
    for (ri, round) in c.rounds.iter().enumerate() {
        for (gi, g) in round.iter().enumerate() {
            if !matches!(g.op, GateOp::Clifford(_)) {
                return Err(Error::NotClifford { round: ri, gate: gi });
            }
        }
    }
    c.validate()?;
    let mut t = Tableau::basis_state(&c.initial);
    for g in c.rounds.iter().flatten() {
        if let GateOp::Clifford(m) = &g.op {
            t.apply(m, &g.support);
        }
    }
    Ok(t)
}

/// Energy of a Pauli projector Hamiltonian on the first registers of the
/// circuit output: the sum of `(1 - <S>)/2`, with `<S>` in `{1, 0, -1}`.
pub fn tableau_energy(c: &Circuit, h: &CommutingHamiltonian) -> Result<f64> {
    let t = run_circuit(c)?;
    let group = t.group()?;
    let n = t.num_qubits();
    if h.site_count() > n {
        return Err(Error::Invalid("Hamiltonian has more sites than the circuit".into()));
    }
    let mut e = 0.0;
    for term in &h.terms {
        let TermOp::Pauli(p) = &term.op else {
            return Err(Error::Invalid("tableau energy needs Pauli terms".into()));
        };
        let s = p.embed(n, &term.support);
        e += 0.5 * (1.0 - group.expectation(&s) as f64);
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Term;
    use crate::synth::circuit::Gate;

    #[test]
    fn identity_circuit_on_z_terms() {
        let terms = (0..4).map(|q| Term::pauli_str(&[q], "+Z").unwrap()).collect();
        let h = CommutingHamiltonian::new(&[2; 4], terms).unwrap();
        assert_eq!(tableau_energy(&Circuit::new(&[2; 4]), &h).unwrap(), 0.0);
    }

    #[test]
    fn violations_count_half_or_one() {
        let h = CommutingHamiltonian::new(
            &[2, 2],
            vec![Term::pauli_str(&[0], "-Z").unwrap(), Term::pauli_str(&[1], "+X").unwrap()],
        )
        .unwrap();
        // |00>: -Z fully violated (1), +X undetermined (1/2)
        assert_eq!(tableau_energy(&Circuit::new(&[2, 2]), &h).unwrap(), 1.5);
    }

    #[test]
    fn dense_gate_rejected() {
        let mut c = Circuit::new(&[2]);
        c.rounds.push(vec![Gate::dense(vec![0], crate::linalg::eye(2))]);
        assert!(matches!(run_circuit(&c), Err(Error::NotClifford { .. })));
    }
}
