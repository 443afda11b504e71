//! Symplectic frames: Clifford coordinates adapted to commuting subspaces of
//! the Pauli group.
//!
//! Vectors are symplectic `x | z` bit vectors over `n` qubits. A frame is a
//! list of pairs `(x_k, z_k)` with `w(x_k, z_l) = delta_kl` and all other
//! products zero; its Clifford sends the virtual `X_k, Z_k` to `x_k, z_k`.

use crate::gf2::{self, BitVec, Reducer};
use crate::pauli::{symplectic_product, CliffordMap, Pauli};
use crate::{Error, Result};
use std::ops::Range;

/// `v -> J v`, so that `w(a, b) = a . J b`.
pub(crate) fn twist(v: &BitVec) -> BitVec {
    let n = v.len() / 2;
    v.slice(n, 2 * n).concat(&v.slice(0, n))
}

/// Independent vectors spanning the same space as `vs`.
pub fn independent(vs: &[BitVec], width: usize) -> Vec<BitVec> {
    let mut red = Reducer::new(width, 0);
    let empty = BitVec::zeros(0);
    vs.iter().filter(|v| red.insert(v, &empty).is_none()).cloned().collect()
}

/// Symplectic Gram-Schmidt: hyperbolic pairs spanning a complement of the
/// radical, and a basis of the radical `span(vs) ∩ span(vs)^perp`.
pub fn gram_schmidt(vs: &[BitVec], width: usize) -> (Vec<(BitVec, BitVec)>, Vec<BitVec>) {
    let mut work: Vec<BitVec> = independent(vs, width);
    let mut pairs = Vec::new();
    let mut radical = Vec::new();
    while !work.is_empty() {
        let v = work.remove(0);
        match work.iter().position(|w| symplectic_product(&v, w)) {
            Some(k) => {
                let w = work.remove(k);
                for u in work.iter_mut() {
                    let (a, b) = (symplectic_product(u, &w), symplectic_product(u, &v));
                    if a {
                        u.xor_assign(&v);
                    }
                    if b {
                        u.xor_assign(&w);
                    }
                }
                pairs.push((v, w));
            }
            None => radical.push(v),
        }
    }
    (pairs, radical)
}

/// A full symplectic basis of `n` qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub n: usize,
    pub xs: Vec<BitVec>,
    pub zs: Vec<BitVec>,
}

impl Frame {
    pub fn standard(n: usize) -> Self {
        Frame {
            n,
            xs: (0..n).map(|q| BitVec::unit(2 * n, q)).collect(),
            zs: (0..n).map(|q| BitVec::unit(2 * n, n + q)).collect(),
        }
    }

    /// Clifford sending virtual `X_k, Z_k` to the frame vectors with `+` sign.
    pub fn clifford(&self) -> CliffordMap {
        CliffordMap {
            x_images: self.xs.iter().map(Pauli::hermitian_from_symplectic).collect(),
            z_images: self.zs.iter().map(Pauli::hermitian_from_symplectic).collect(),
        }
    }

    /// Virtual coordinates `x | z` of a physical vector.
    pub fn coordinates(&self, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(2 * self.n);
        for k in 0..self.n {
            out.set(k, symplectic_product(v, &self.zs[k]));
            out.set(self.n + k, symplectic_product(&self.xs[k], v));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        for a in 0..self.n {
            for b in 0..self.n {
                let ok = !symplectic_product(&self.xs[a], &self.xs[b])
                    && !symplectic_product(&self.zs[a], &self.zs[b])
                    && symplectic_product(&self.xs[a], &self.zs[b]) == (a == b);
                if !ok {
                    return Err(Error::Invalid("frame vectors are not a symplectic basis".into()));
                }
            }
        }
        Ok(())
    }
}

/// Partners `y_k` for an isotropic list `zs` with `w(y_k, z_l) = delta_kl`,
/// the `y` mutually orthogonal and orthogonal to every vector in `fixed`.
fn partners(zs: &[BitVec], fixed: &[BitVec], width: usize) -> Result<Vec<BitVec>> {
    let mut rows: Vec<BitVec> = zs.iter().map(twist).collect();
    rows.extend(fixed.iter().map(twist));
    let mut ys: Vec<BitVec> = Vec::with_capacity(zs.len());
    for k in 0..zs.len() {
        let mut rhs = vec![false; rows.len()];
        rhs[k] = true;
        let mut y = gf2::solve(&rows, &rhs, width)
            .ok_or_else(|| Error::Inconsistent("isotropic vectors have no symplectic partners".into()))?;
        for (l, yl) in ys.iter().enumerate() {
            if symplectic_product(&y, yl) {
                y.xor_assign(&zs[l]);
            }
        }
        ys.push(y);
    }
    Ok(ys)
}

/// Completes hyperbolic `pairs` and an isotropic list `iso` orthogonal to
/// them into a frame ordered as: `pairs`, then `(partner_k, iso_k)`, then
/// residual pairs.
pub fn complete_frame(n: usize, pairs: &[(BitVec, BitVec)], iso: &[BitVec]) -> Result<Frame> {
    let width = 2 * n;
    let fixed: Vec<BitVec> = pairs.iter().flat_map(|(x, z)| [x.clone(), z.clone()]).collect();
    let ys = partners(iso, &fixed, width)?;
    let mut xs: Vec<BitVec> = pairs.iter().map(|p| p.0.clone()).collect();
    let mut zs: Vec<BitVec> = pairs.iter().map(|p| p.1.clone()).collect();
    xs.extend(ys);
    zs.extend(iso.iter().cloned());
    let used: Vec<BitVec> = xs.iter().chain(&zs).map(twist).collect();
    let rest = gf2::null_space(&used, width);
    let (extra, radical) = gram_schmidt(&rest, width);
    if !radical.is_empty() {
        return Err(Error::Inconsistent("residual space is degenerate".into()));
    }
    for (x, z) in extra {
        xs.push(x);
        zs.push(z);
    }
    if xs.len() != n {
        return Err(Error::Inconsistent(format!("frame has {} pairs on {n} qubits", xs.len())));
    }
    let f = Frame { n, xs, zs };
    f.validate()?;
    Ok(f)
}

/// Frame adapted to pairwise orthogonal subspaces `A_1, ..., A_m`: the
/// symplectic part of each `A_j` gets its own virtual qubits, the joint
/// radical is carried by virtual `Z`s of the `center` qubits, and the rest
/// is `residual`.
#[derive(Clone, Debug)]
pub struct AdaptedFrame {
    pub frame: Frame,
    pub factors: Vec<Range<usize>>,
    pub center: Range<usize>,
    pub residual: Range<usize>,
}

impl AdaptedFrame {
    /// Physical center generators, Hermitian with `+` sign.
    pub fn center_generators(&self) -> Vec<Pauli> {
        self.center.clone().map(|k| Pauli::hermitian_from_symplectic(&self.frame.zs[k])).collect()
    }
}

pub fn adapted_frame(n: usize, spaces: &[Vec<BitVec>]) -> Result<AdaptedFrame> {
    let width = 2 * n;
    for a in 0..spaces.len() {
        for b in a + 1..spaces.len() {
            if spaces[a].iter().any(|u| spaces[b].iter().any(|v| symplectic_product(u, v))) {
                return Err(Error::NonCommutingAlgebras(a, b));
            }
        }
    }
    let mut pairs = Vec::new();
    let mut factors = Vec::new();
    let mut radicals = Vec::new();
    for s in spaces {
        let (p, r) = gram_schmidt(s, width);
        factors.push(pairs.len()..pairs.len() + p.len());
        pairs.extend(p);
        radicals.extend(r);
    }
    let iso = independent(&radicals, width);
    let frame = complete_frame(n, &pairs, &iso)?;
    let c0 = pairs.len();
    let c1 = c0 + iso.len();
    Ok(AdaptedFrame { frame, factors, center: c0..c1, residual: c1..n })
}

/// Clifford `C` with `C Z_k C^dagger = gens[k]` (signs included), so that
/// `C |0...0>` is the stabilizer state of `gens`.
pub fn stabilizer_prep(gens: &[Pauli]) -> Result<CliffordMap> {
    let n = gens.first().map_or(0, Pauli::num_qubits);
    if gens.len() != n {
        return Err(Error::Invalid(format!("{} generators for {n} qubits", gens.len())));
    }
    let vs: Vec<BitVec> = gens.iter().map(Pauli::symplectic).collect();
    if independent(&vs, 2 * n).len() != n || vs.iter().any(|a| vs.iter().any(|b| symplectic_product(a, b))) {
        return Err(Error::Invalid("stabilizer generators are not independent and commuting".into()));
    }
    let f = complete_frame(n, &[], &vs)?;
    let mut c = f.clifford();
    for (k, g) in gens.iter().enumerate() {
        if !g.is_hermitian() {
            return Err(Error::Invalid(format!("non-Hermitian generator {g:?}")));
        }
        c.z_images[k] = g.clone();
    }
    Ok(c)
}

/// Controlled Pauli: `|0><0| (x) I + |1><1| (x) p`, control first.
pub fn controlled_pauli(p: &Pauli) -> CliffordMap {
    let k = p.num_qubits();
    let n = k + 1;
    let targets: Vec<usize> = (1..n).collect();
    let mut c = CliffordMap::identity(n);
    let pe = p.embed(n, &targets);
    c.x_images[0] = Pauli::single(n, 0, 'X').mul(&pe);
    for q in 1..n {
        for img in [&mut c.x_images[q], &mut c.z_images[q]] {
            if !img.commutes(&pe) {
                *img = Pauli::single(n, 0, 'Z').mul(img);
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::verify::tableau::Tableau;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(s: &str) -> BitVec {
        Pauli::parse(s).unwrap().symplectic()
    }

    #[test]
    fn adapted_to_ising_pair() {
        // shared Z0 is central; the second qubit is a full factor of the second space
        let fr = adapted_frame(2, &[vec![v("ZI")], vec![v("ZI"), v("IX"), v("IZ")]]).unwrap();
        assert_eq!(fr.center.len(), 1);
        assert_eq!(fr.factors[1].len(), 1);
        assert_eq!(fr.center_generators()[0].to_signed_string(), "+ZI");
        let total: usize = fr.factors.iter().map(|r| r.len()).sum::<usize>() + fr.center.len() + fr.residual.len();
        assert_eq!(total, 2);
    }

    #[test]
    fn controlled_x_is_cnot() {
        let c = controlled_pauli(&Pauli::parse("X").unwrap());
        c.validate().unwrap();
        let d = c.matrix();
        let cn = CliffordMap::cnot().matrix();
        // equal up to a global phase
        let ph = (0..4).map(|k| d[(k, 0)]).find(|z| z.norm() > 0.5).unwrap() / cn[(0, 0)];
        assert!(max_abs(&(d - cn * ph)) < 1e-12);
    }

    #[test]
    fn prep_reaches_bell_state() {
        let g = vec![Pauli::parse("-XX").unwrap(), Pauli::parse("+ZZ").unwrap()];
        let c = stabilizer_prep(&g).unwrap();
        let mut t = Tableau::basis_state(&[0, 0]);
        t.apply(&c, &[0, 1]);
        let grp = t.group().unwrap();
        assert_eq!(grp.sign_of(&g[0]), Some(true));
        assert_eq!(grp.sign_of(&g[1]), Some(true));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn frames_are_symplectic(seed in 0u64..10_000, n in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = CliffordMap::random(n, &mut rng);
            // commuting pieces: images of disjoint qubit sets under a random Clifford
            let cut = n / 2;
            let a: Vec<BitVec> = (0..cut).flat_map(|q| [c.x_images[q].symplectic(), c.z_images[q].symplectic()]).collect();
            let b: Vec<BitVec> = (cut..n).map(|q| c.z_images[q].symplectic()).collect();
            let fr = adapted_frame(n, &[a.clone(), b.clone()]).unwrap();
            fr.frame.validate().unwrap();
            prop_assert_eq!(fr.factors[0].len(), cut);
            prop_assert_eq!(fr.center.len(), n - cut);
            // every vector of A_1 lives on its factor qubits only
            for u in &a {
                let co = fr.frame.coordinates(u);
                for k in 0..n {
                    if !fr.factors[0].contains(&k) {
                        prop_assert!(!co.get(k) && !co.get(n + k));
                    }
                }
            }
            let m = fr.frame.clifford();
            m.validate().unwrap();
            let inv = m.inverse();
            for u in &b {
                let p = Pauli::hermitian_from_symplectic(u);
                let vp = inv.conjugate(&p);
                prop_assert!(vp.x.is_zero());
            }
        }
    }
}
