//! Pauli operators in symplectic form, Clifford maps and stabilizer groups.
//!
//! A Pauli operator is stored as `i^phase X^x Z^z`, with `X^x = X_0^{x_0} X_1^{x_1} ...`
//! and likewise for `Z`. `Y = i X Z`.

use crate::gf2::{BitVec, Reducer};
use crate::linalg::{Mat, C64, ONE};
use crate::{Error, Result};
use rand::Rng;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pauli {
    pub x: BitVec,
    pub z: BitVec,
    pub phase: u8,
}

impl Pauli {
    pub fn identity(n: usize) -> Self {
        Pauli { x: BitVec::zeros(n), z: BitVec::zeros(n), phase: 0 }
    }

    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn single(n: usize, q: usize, letter: char) -> Self {
        let mut p = Pauli::identity(n);
        p.set_letter(q, letter);
        p
    }

    /// Parses a signed letter string such as `-XIZY` or `+ZZ`.
    pub fn parse(s: &str) -> Result<Self> {
        let (neg, body) = match s.as_bytes().first() {
            Some(b'+') => (false, &s[1..]),
            Some(b'-') => (true, &s[1..]),
            _ => (false, s),
        };
        let n = body.chars().count();
        let mut p = Pauli::identity(n);
        for (q, ch) in body.chars().enumerate() {
            if !"IXYZ".contains(ch) {
                return Err(Error::Invalid(format!("bad Pauli letter '{ch}' in '{s}'")));
            }
            p.set_letter(q, ch);
        }
        if neg {
            p.phase = (p.phase + 2) % 4;
        }
        Ok(p)
    }

    /// Letter string with sign; only valid for Hermitian operators.
    pub fn to_signed_string(&self) -> String {
        let sign = if self.sign_negative() { '-' } else { '+' };
        let mut s = String::new();
        s.push(sign);
        for q in 0..self.num_qubits() {
            s.push(self.letter(q));
        }
        s
    }

    pub fn letter(&self, q: usize) -> char {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    /// Sets the letter at `q` keeping the overall sign of the letter string.
    pub fn set_letter(&mut self, q: usize, ch: char) {
        let was_y = self.x.get(q) && self.z.get(q);
        let (x, z) = match ch {
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            _ => (false, false),
        };
        self.x.set(q, x);
        self.z.set(q, z);
        let is_y = x && z;
        self.phase = (self.phase + 4 + is_y as u8 - was_y as u8) % 4;
    }

    pub fn weight(&self) -> usize {
        self.x.or(&self.z).count_ones()
    }

    pub fn support(&self) -> Vec<usize> {
        self.x.or(&self.z).ones().collect()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    fn ny(&self) -> u8 {
        (self.x.and(&self.z).count_ones() % 4) as u8
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase + 4 - self.ny()) % 2 == 0
    }

    /// True when the letter string carries a minus sign (Hermitian operators only).
    pub fn sign_negative(&self) -> bool {
        (self.phase + 4 - self.ny()) % 4 == 2
    }

    pub fn negate(&self) -> Pauli {
        let mut p = self.clone();
        p.phase = (p.phase + 2) % 4;
        p
    }

    /// Letter string with `+` sign.
    pub fn unsigned(&self) -> Pauli {
        let mut p = self.clone();
        p.phase = p.ny();
        p
    }

    pub fn mul(&self, o: &Pauli) -> Pauli {
        let cross = self.z.dot(&o.x) as u8;
        Pauli { x: self.x.xor(&o.x), z: self.z.xor(&o.z), phase: (self.phase + o.phase + 2 * cross) % 4 }
    }

    pub fn commutes(&self, o: &Pauli) -> bool {
        self.x.dot(&o.z) == self.z.dot(&o.x)
    }

    /// Symplectic vector `x | z`.
    pub fn symplectic(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn from_symplectic(v: &BitVec, phase: u8) -> Pauli {
        let n = v.len() / 2;
        Pauli { x: v.slice(0, n), z: v.slice(n, 2 * n), phase }
    }

    /// Hermitian Pauli with `+` letter sign from a symplectic vector.
    pub fn hermitian_from_symplectic(v: &BitVec) -> Pauli {
        let p = Pauli::from_symplectic(v, 0);
        p.unsigned()
    }

    /// Restriction to a subset of qubits, relabelled in the given order.
    pub fn restrict(&self, qubits: &[usize]) -> Pauli {
        let mut p = Pauli::identity(qubits.len());
        for (k, &q) in qubits.iter().enumerate() {
            p.x.set(k, self.x.get(q));
            p.z.set(k, self.z.get(q));
        }
        // Y count may change; keep the letter sign convention of the parent
        p.phase = (self.phase + 4 - self.ny() + p.ny()) % 4;
        p
    }

    /// Embeds into `n` qubits, local qubit k going to `qubits[k]`.
    pub fn embed(&self, n: usize, qubits: &[usize]) -> Pauli {
        let mut p = Pauli::identity(n);
        for (k, &q) in qubits.iter().enumerate() {
            p.x.set(q, self.x.get(k));
            p.z.set(q, self.z.get(k));
        }
        p.phase = self.phase;
        p
    }

    /// Dense matrix, qubit 0 most significant.
    pub fn matrix(&self) -> Mat {
        let n = self.num_qubits();
        let dim = 1usize << n;
        let (xm, zm) = (self.x_mask(), self.z_mask());
        let ph = phase_value(self.phase);
        let mut m = Mat::zeros(dim, dim);
        for b in 0..dim {
            let sign = if (zm & b).count_ones() % 2 == 1 { -ONE } else { ONE };
            m[(b ^ xm, b)] = ph * sign;
        }
        m
    }

    /// X bits as an integer mask with qubit 0 most significant.
    pub fn x_mask(&self) -> usize {
        mask(&self.x)
    }

    pub fn z_mask(&self) -> usize {
        mask(&self.z)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Pauli {
        let mut p = Pauli::identity(n);
        for q in 0..n {
            p.x.set(q, rng.random());
            p.z.set(q, rng.random());
        }
        p.phase = p.ny();
        if rng.random() {
            p.phase = (p.phase + 2) % 4;
        }
        p
    }
}

fn mask(v: &BitVec) -> usize {
    let n = v.len();
    v.ones().fold(0usize, |m, q| m | 1 << (n - 1 - q))
}

pub fn phase_value(e: u8) -> C64 {
    match e % 4 {
        0 => ONE,
        1 => C64::new(0.0, 1.0),
        2 => -ONE,
        _ => C64::new(0.0, -1.0),
    }
}

impl fmt::Debug for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = (self.phase + 4 - self.ny()) % 4;
        let pre = ["+", "+i", "-", "-i"][rel as usize];
        write!(f, "{pre}")?;
        for q in 0..self.num_qubits() {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

/// A Clifford unitary on `n` qubits given by the images of `X_q` and `Z_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordMap {
    pub x_images: Vec<Pauli>,
    pub z_images: Vec<Pauli>,
}

impl CliffordMap {
    pub fn identity(n: usize) -> Self {
        CliffordMap {
            x_images: (0..n).map(|q| Pauli::single(n, q, 'X')).collect(),
            z_images: (0..n).map(|q| Pauli::single(n, q, 'Z')).collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.x_images.len()
    }

    /// Checks that images are Hermitian and satisfy the Pauli commutation relations.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_qubits();
        if self.z_images.len() != n {
            return Err(Error::Invalid("Clifford image count mismatch".into()));
        }
        let all: Vec<&Pauli> = self.x_images.iter().chain(&self.z_images).collect();
        for p in &all {
            if p.num_qubits() != n || !p.is_hermitian() || p.is_identity_up_to_phase() {
                return Err(Error::Invalid(format!("bad Clifford image {p:?}")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let xx = self.x_images[a].commutes(&self.x_images[b]);
                let zz = self.z_images[a].commutes(&self.z_images[b]);
                let xz = self.x_images[a].commutes(&self.z_images[b]);
                if !xx || !zz || xz != (a != b) {
                    return Err(Error::Invalid("Clifford images violate commutation relations".into()));
                }
            }
        }
        Ok(())
    }

    /// `U P U^dagger`.
    pub fn conjugate(&self, p: &Pauli) -> Pauli {
        let n = self.num_qubits();
        let mut out = Pauli::identity(n);
        out.phase = p.phase;
        for q in p.x.ones() {
            out = out.mul(&self.x_images[q]);
        }
        for q in p.z.ones() {
            out = out.mul(&self.z_images[q]);
        }
        out
    }

    /// `self` applied after `first`.
    pub fn compose_after(&self, first: &CliffordMap) -> CliffordMap {
        CliffordMap {
            x_images: first.x_images.iter().map(|p| self.conjugate(p)).collect(),
            z_images: first.z_images.iter().map(|p| self.conjugate(p)).collect(),
        }
    }

    pub fn inverse(&self) -> CliffordMap {
        // U^dagger X_q U is the Pauli whose image is X_q; solve by linear algebra
        let n = self.num_qubits();
        let mut red = Reducer::new(2 * n, 2 * n);
        let images: Vec<&Pauli> = self.x_images.iter().chain(&self.z_images).collect();
        for (k, p) in images.iter().enumerate() {
            red.insert_indexed(&p.symplectic(), k);
        }
        let pre = |target: &Pauli| -> Pauli {
            let combo = red.express(&target.symplectic()).expect("Clifford images span");
            let mut src = Pauli::identity(n);
            for k in combo.ones() {
                let gen = if k < n { Pauli::single(n, k, 'X') } else { Pauli::single(n, k - n, 'Z') };
                src = src.mul(&gen);
            }
            let img = self.conjugate(&src);
            // img equals target up to a phase; fix the phase of src
            let diff = (target.phase + 4 - img.phase) % 4;
            src.phase = (src.phase + diff) % 4;
            src
        };
        CliffordMap {
            x_images: (0..n).map(|q| pre(&Pauli::single(n, q, 'X'))).collect(),
            z_images: (0..n).map(|q| pre(&Pauli::single(n, q, 'Z'))).collect(),
        }
    }

    /// Dense unitary realizing the map (up to a global phase).
    pub fn matrix(&self) -> Mat {
        let n = self.num_qubits();
        let dim = 1usize << n;
        let mut proj = Mat::identity(dim, dim);
        for z in &self.z_images {
            proj = (&proj + z.matrix() * &proj).scale(0.5);
        }
        let col = (0..dim)
            .max_by(|&a, &b| proj[(a, a)].re.total_cmp(&proj[(b, b)].re))
            .unwrap();
        let mut psi0 = proj.column(col).into_owned();
        let nrm = psi0.norm();
        psi0 /= C64::new(nrm, 0.0);
        let xm: Vec<Mat> = self.x_images.iter().map(|p| p.matrix()).collect();
        let mut u = Mat::zeros(dim, dim);
        for b in 0..dim {
            let mut v = psi0.clone();
            for q in 0..n {
                if (b >> (n - 1 - q)) & 1 == 1 {
                    v = &xm[q] * v;
                }
            }
            u.set_column(b, &v);
        }
        u
    }

    /// Embeds into `n` qubits acting on `qubits`.
    pub fn embed(&self, n: usize, qubits: &[usize]) -> CliffordMap {
        let mut out = CliffordMap::identity(n);
        for (k, &q) in qubits.iter().enumerate() {
            out.x_images[q] = self.x_images[k].embed(n, qubits);
            out.z_images[q] = self.z_images[k].embed(n, qubits);
        }
        out
    }

    pub fn hadamard() -> CliffordMap {
        CliffordMap { x_images: vec![Pauli::parse("Z").unwrap()], z_images: vec![Pauli::parse("X").unwrap()] }
    }

    pub fn phase_s() -> CliffordMap {
        CliffordMap { x_images: vec![Pauli::parse("Y").unwrap()], z_images: vec![Pauli::parse("Z").unwrap()] }
    }

    pub fn pauli_gate(p: &Pauli) -> CliffordMap {
        let n = p.num_qubits();
        let mut m = CliffordMap::identity(n);
        for q in 0..n {
            if !p.commutes(&m.x_images[q]) {
                m.x_images[q] = m.x_images[q].negate();
            }
            if !p.commutes(&m.z_images[q]) {
                m.z_images[q] = m.z_images[q].negate();
            }
        }
        m
    }

    /// CNOT with control 0 and target 1.
    pub fn cnot() -> CliffordMap {
        CliffordMap {
            x_images: vec![Pauli::parse("XX").unwrap(), Pauli::parse("IX").unwrap()],
            z_images: vec![Pauli::parse("ZI").unwrap(), Pauli::parse("ZZ").unwrap()],
        }
    }

    pub fn swap() -> CliffordMap {
        CliffordMap {
            x_images: vec![Pauli::parse("IX").unwrap(), Pauli::parse("XI").unwrap()],
            z_images: vec![Pauli::parse("IZ").unwrap(), Pauli::parse("ZI").unwrap()],
        }
    }

    /// Random Clifford built from a random product of elementary gates.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliffordMap {
        let mut m = CliffordMap::identity(n);
        let steps = 4 * n * n + 8;
        for _ in 0..steps {
            let g = match rng.random_range(0..4) {
                0 => CliffordMap::hadamard().embed(n, &[rng.random_range(0..n)]),
                1 => CliffordMap::phase_s().embed(n, &[rng.random_range(0..n)]),
                2 if n > 1 => {
                    let a = rng.random_range(0..n);
                    let mut b = rng.random_range(0..n - 1);
                    if b >= a {
                        b += 1;
                    }
                    CliffordMap::cnot().embed(n, &[a, b])
                }
                _ => CliffordMap::pauli_gate(&Pauli::random(n, rng)),
            };
            m = g.compose_after(&m);
        }
        m
    }
}

/// A group of commuting Hermitian Pauli operators, reduced for membership tests.
#[derive(Clone, Debug)]
pub struct StabilizerGroup {
    n: usize,
    gens: Vec<Pauli>,
    red: Reducer,
}

impl StabilizerGroup {
    pub fn new(n: usize) -> Self {
        StabilizerGroup { n, gens: Vec::new(), red: Reducer::new(2 * n, 0) }
    }

    /// Builds the group generated by `gens`, skipping dependent generators.
    /// Fails when the generators do not commute or contain `-I`.
    pub fn from_generators(n: usize, gens: &[Pauli]) -> Result<Self> {
        let mut g = StabilizerGroup::new(n);
        for p in gens {
            g.add(p)?;
        }
        Ok(g)
    }

    pub fn generators(&self) -> &[Pauli] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Adds a generator; returns false if it was already in the group.
    pub fn add(&mut self, p: &Pauli) -> Result<bool> {
        if !p.is_hermitian() {
            return Err(Error::Invalid(format!("non-Hermitian stabilizer {p:?}")));
        }
        if let Some(s) = self.sign_of(p) {
            return if s { Ok(false) } else { Err(Error::Frustrated(format!("{p:?} contradicts the group"))) };
        }
        if self.gens.iter().any(|g| !g.commutes(p)) {
            return Err(Error::Invalid(format!("{p:?} anticommutes with the group")));
        }
        self.rebuild_with(p.clone());
        Ok(true)
    }

    fn rebuild_with(&mut self, p: Pauli) {
        self.gens.push(p);
        let k = self.gens.len();
        let mut red = Reducer::new(2 * self.n, k);
        for (i, g) in self.gens.iter().enumerate() {
            red.insert_indexed(&g.symplectic(), i);
        }
        self.red = red;
    }

    /// Product of generators selected by `combo`.
    pub fn product(&self, combo: &BitVec) -> Pauli {
        let mut out = Pauli::identity(self.n);
        for k in combo.ones() {
            out = out.mul(&self.gens[k]);
        }
        out
    }

    /// `Some(true)` if `p` is in the group, `Some(false)` if `-p` is, `None` otherwise.
    pub fn sign_of(&self, p: &Pauli) -> Option<bool> {
        if self.gens.is_empty() {
            return if p.is_identity_up_to_phase() { Some(p.phase % 4 == 0) } else { None };
        }
        let combo = self.red.express(&p.symplectic())?;
        let q = self.product(&combo);
        Some(q.phase == p.phase)
    }

    pub fn commutes_with_all(&self, p: &Pauli) -> bool {
        self.gens.iter().all(|g| g.commutes(p))
    }

    /// Expectation of `p` in any state stabilized by a maximal group: 1, -1 or 0.
    pub fn expectation(&self, p: &Pauli) -> i8 {
        if !self.commutes_with_all(p) {
            return 0;
        }
        match self.sign_of(p) {
            Some(true) => 1,
            Some(false) => -1,
            None => 0,
        }
    }
}

/// Symplectic form of two vectors `x|z`.
pub fn symplectic_product(a: &BitVec, b: &BitVec) -> bool {
    let n = a.len() / 2;
    let (ax, az) = (a.slice(0, n), a.slice(n, 2 * n));
    let (bx, bz) = (b.slice(0, n), b.slice(n, 2 * n));
    ax.dot(&bz) ^ az.dot(&bx)
}
