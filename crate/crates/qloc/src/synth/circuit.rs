//! Layered circuits of local gates over real and ancilla registers.

use crate::linalg::{unitarity_residual, Mat};
use crate::pauli::CliffordMap;
use crate::{tol, Error, Result};

/// Copy `1` of a site is its real register; copies `2..` are ancillas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Register {
    pub site: usize,
    pub copy: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateOp {
    Dense(Mat),
    Clifford(CliffordMap),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    /// Register indices; the first is the most significant tensor factor.
    pub support: Vec<usize>,
    pub op: GateOp,
}

impl Gate {
    pub fn dense(support: Vec<usize>, u: Mat) -> Self {
        Gate { support, op: GateOp::Dense(u) }
    }

    pub fn clifford(support: Vec<usize>, c: CliffordMap) -> Self {
        Gate { support, op: GateOp::Clifford(c) }
    }

    pub fn matrix(&self) -> Mat {
        match &self.op {
            GateOp::Dense(u) => u.clone(),
            GateOp::Clifford(c) => c.matrix(),
        }
    }
}

/// Rounds of gates with pairwise disjoint supports, applied to the product
/// state `|initial[0]> (x) |initial[1]> (x) ...` over `registers`.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub registers: Vec<Register>,
    pub initial: Vec<usize>,
    pub rounds: Vec<Vec<Gate>>,
}

impl Circuit {
    /// Real registers only, all initialised to basis state 0.
    pub fn new(dims: &[usize]) -> Self {
        Circuit {
            registers: dims.iter().enumerate().map(|(site, &dim)| Register { site, copy: 1, dim }).collect(),
            initial: vec![0; dims.len()],
            rounds: Vec::new(),
        }
    }

    /// Adds the next ancilla copy of `site`; returns its register index.
    pub fn add_ancilla(&mut self, site: usize, dim: usize) -> usize {
        let copy = self.registers.iter().filter(|r| r.site == site).map(|r| r.copy).max().unwrap_or(0) + 1;
        self.registers.push(Register { site, copy, dim });
        self.initial.push(0);
        self.registers.len() - 1
    }

    pub fn register_count(&self) -> usize {
        self.registers.len()
    }

    pub fn ancilla_count(&self) -> usize {
        self.registers.iter().filter(|r| r.copy != 1).count()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.registers.iter().map(|r| r.dim).collect()
    }

    pub fn depth(&self) -> usize {
        self.rounds.iter().filter(|r| !r.is_empty()).count()
    }

    pub fn gate_count(&self) -> usize {
        self.rounds.iter().map(Vec::len).sum()
    }

    pub fn is_clifford(&self) -> bool {
        self.rounds.iter().flatten().all(|g| matches!(g.op, GateOp::Clifford(_)))
    }

    /// Checks disjointness per round, gate shapes and unitarity.
    pub fn validate(&self) -> Result<()> {
        if self.initial.len() != self.registers.len() {
            return Err(Error::Invalid("initial state does not match registers".into()));
        }
        for (k, (r, &i)) in self.registers.iter().zip(&self.initial).enumerate() {
            if i >= r.dim {
                return Err(Error::Invalid(format!("initial basis state {i} out of range on register {k}")));
            }
        }
        for (ri, round) in self.rounds.iter().enumerate() {
            let mut used = vec![false; self.registers.len()];
            for (gi, g) in round.iter().enumerate() {
                for &q in &g.support {
                    if q >= used.len() {
                        return Err(Error::Invalid(format!("gate {gi} in round {ri} uses unknown register {q}")));
                    }
                    if used[q] {
                        return Err(Error::OverlappingGates(ri));
                    }
                    used[q] = true;
                }
                let d: usize = g.support.iter().map(|&q| self.registers[q].dim).product();
                match &g.op {
                    GateOp::Dense(u) => {
                        if u.nrows() != d || u.ncols() != d {
                            return Err(Error::Invalid(format!("gate {gi} in round {ri} has wrong size")));
                        }
                        let residual = unitarity_residual(u);
                        if residual > tol::COMMUTE {
                            return Err(Error::NotUnitary { round: ri, gate: gi, residual });
                        }
                    }
                    GateOp::Clifford(c) => {
                        if g.support.iter().any(|&q| self.registers[q].dim != 2) || c.num_qubits() != g.support.len() {
                            return Err(Error::Invalid(format!("Clifford gate {gi} in round {ri} needs qubit registers")));
                        }
                        c.validate()?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Places `g` in the earliest round after every earlier gate sharing a register.
    pub fn push_asap(&mut self, g: Gate) {
        let mut last = 0;
        for (ri, round) in self.rounds.iter().enumerate() {
            if round.iter().any(|h| h.support.iter().any(|q| g.support.contains(q))) {
                last = ri + 1;
            }
        }
        if last == self.rounds.len() {
            self.rounds.push(Vec::new());
        }
        self.rounds[last].push(g);
    }

    /// Appends the rounds of `other`, which must share this register list.
    pub fn append(&mut self, other: Circuit) {
        self.rounds.extend(other.rounds);
    }

    /// Largest distance between the sites of two registers of one gate.
    pub fn support_diameter(&self, dist: impl Fn(usize, usize) -> usize) -> usize {
        let mut best = 0;
        for g in self.rounds.iter().flatten() {
            for &a in &g.support {
                for &b in &g.support {
                    best = best.max(dist(self.registers[a].site, self.registers[b].site));
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eye, ONE, ZERO};

    #[test]
    fn overlap_rejected() {
        let mut c = Circuit::new(&[2, 2]);
        c.rounds.push(vec![Gate::dense(vec![0], eye(2)), Gate::dense(vec![0], eye(2))]);
        assert_eq!(c.validate(), Err(Error::OverlappingGates(0)));
    }

    #[test]
    fn non_unitary_rejected() {
        let mut c = Circuit::new(&[2]);
        c.rounds.push(vec![Gate::dense(vec![0], Mat::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]))]);
        assert!(matches!(c.validate(), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn asap_layers() {
        let mut c = Circuit::new(&[2, 2, 2]);
        c.push_asap(Gate::dense(vec![0, 1], eye(4)));
        c.push_asap(Gate::dense(vec![2], eye(2)));
        c.push_asap(Gate::dense(vec![1, 2], eye(4)));
        assert_eq!(c.depth(), 2);
        assert_eq!(c.rounds[0].len(), 2);
        let a = c.add_ancilla(1, 2);
        assert_eq!(c.registers[a], Register { site: 1, copy: 2, dim: 2 });
    }
}
