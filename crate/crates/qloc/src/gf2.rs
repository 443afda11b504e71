//! Linear algebra over GF(2).

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (k, &b) in bits.iter().enumerate() {
            if b {
                v.set(k, true);
            }
        }
        v
    }

    pub fn unit(len: usize, k: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(k, true);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, k: usize) -> bool {
        (self.words[k / 64] >> (k % 64)) & 1 == 1
    }

    pub fn set(&mut self, k: usize, b: bool) {
        let m = 1u64 << (k % 64);
        if b {
            self.words[k / 64] |= m;
        } else {
            self.words[k / 64] &= !m;
        }
    }

    pub fn flip(&mut self, k: usize) {
        self.words[k / 64] ^= 1u64 << (k % 64);
    }

    pub fn xor_assign(&mut self, o: &BitVec) {
        debug_assert_eq!(self.len, o.len);
        for (a, b) in self.words.iter_mut().zip(&o.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, o: &BitVec) -> BitVec {
        let mut v = self.clone();
        v.xor_assign(o);
        v
    }

    pub fn and(&self, o: &BitVec) -> BitVec {
        BitVec { len: self.len, words: self.words.iter().zip(&o.words).map(|(a, b)| a & b).collect() }
    }

    pub fn or(&self, o: &BitVec) -> BitVec {
        BitVec { len: self.len, words: self.words.iter().zip(&o.words).map(|(a, b)| a | b).collect() }
    }

    /// Parity of the bitwise product.
    pub fn dot(&self, o: &BitVec) -> bool {
        self.words.iter().zip(&o.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(i * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&k| self.get(k))
    }

    /// Concatenation `self | o`.
    pub fn concat(&self, o: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.len + o.len);
        for k in self.ones() {
            v.set(k, true);
        }
        for k in o.ones() {
            v.set(self.len + k, true);
        }
        v
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        let mut v = BitVec::zeros(end - start);
        for k in start..end {
            if self.get(k) {
                v.set(k - start, true);
            }
        }
        v
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.len {
            write!(f, "{}", if self.get(k) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Incremental row-echelon basis that remembers how each basis vector was
/// combined from the inserted vectors.
#[derive(Clone, Debug)]
pub struct Reducer {
    width: usize,
    tags: usize,
    rows: Vec<(usize, BitVec, BitVec)>,
}

impl Reducer {
    /// `width` is the vector length, `tags` the number of input vectors tracked.
    pub fn new(width: usize, tags: usize) -> Self {
        Reducer { width, tags, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Reduces `v`; returns the residual and the tag combination that was added.
    pub fn reduce(&self, v: &BitVec) -> (BitVec, BitVec) {
        let mut r = v.clone();
        let mut combo = BitVec::zeros(self.tags);
        for (p, row, tag) in &self.rows {
            if r.get(*p) {
                r.xor_assign(row);
                combo.xor_assign(tag);
            }
        }
        (r, combo)
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Inserts `v` tagged by `tag`. Returns `None` when independent, otherwise the
    /// combination of tags that sums to zero.
    pub fn insert(&mut self, v: &BitVec, tag: &BitVec) -> Option<BitVec> {
        let (r, combo) = self.reduce(v);
        let mut full = combo;
        full.xor_assign(tag);
        match r.first_one() {
            None => Some(full),
            Some(p) => {
                for (_, row, t) in self.rows.iter_mut() {
                    if row.get(p) {
                        row.xor_assign(&r);
                        t.xor_assign(&full);
                    }
                }
                self.rows.push((p, r, full));
                None
            }
        }
    }

    /// Inserts the `k`-th tracked vector.
    pub fn insert_indexed(&mut self, v: &BitVec, k: usize) -> Option<BitVec> {
        let tag = BitVec::unit(self.tags, k);
        self.insert(v, &tag)
    }

    /// Tag combination expressing `v`, if it lies in the span.
    pub fn express(&self, v: &BitVec) -> Option<BitVec> {
        let (r, combo) = self.reduce(v);
        r.is_zero().then_some(combo)
    }
}

pub fn rank(rows: &[BitVec]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut red = Reducer::new(rows[0].len(), 0);
    let empty = BitVec::zeros(0);
    for r in rows {
        red.insert(r, &empty);
    }
    red.rank()
}

/// Basis of `{ c : sum_k c_k rows[k] = 0 }`.
pub fn left_kernel(rows: &[BitVec], width: usize) -> Vec<BitVec> {
    let mut red = Reducer::new(width, rows.len());
    rows.iter().enumerate().filter_map(|(k, r)| red.insert_indexed(r, k)).collect()
}

/// Basis of `{ x : rows[k] . x = 0 for all k }`.
pub fn null_space(rows: &[BitVec], width: usize) -> Vec<BitVec> {
    // reduced row echelon form, then free columns
    let mut red = Reducer::new(width, 0);
    let empty = BitVec::zeros(0);
    for r in rows {
        red.insert(r, &empty);
    }
    let pivots: Vec<(usize, BitVec)> = red.rows.iter().map(|(p, r, _)| (*p, r.clone())).collect();
    let is_pivot: Vec<bool> = (0..width).map(|c| pivots.iter().any(|(p, _)| *p == c)).collect();
    let mut out = Vec::new();
    for f in (0..width).filter(|&c| !is_pivot[c]) {
        let mut x = BitVec::unit(width, f);
        for (p, r) in &pivots {
            if r.get(f) {
                x.set(*p, true);
            }
        }
        out.push(x);
    }
    out
}

/// Some `x` with `rows[k] . x = rhs[k]` for every k.
pub fn solve(rows: &[BitVec], rhs: &[bool], width: usize) -> Option<BitVec> {
    let aug: Vec<BitVec> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut v = BitVec::zeros(width + 1);
            for k in r.ones() {
                v.set(k, true);
            }
            v.set(width, b);
            v
        })
        .collect();
    let mut red = Reducer::new(width + 1, 0);
    let empty = BitVec::zeros(0);
    for r in &aug {
        red.insert(r, &empty);
    }
    let mut x = BitVec::zeros(width);
    for (p, r, _) in &red.rows {
        if *p == width {
            return None;
        }
        if r.get(width) {
            x.set(*p, true);
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(bits: &[u8]) -> BitVec {
        BitVec::from_bools(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>())
    }

    #[test]
    fn rank_and_kernel() {
        let rows = vec![bv(&[1, 1, 0]), bv(&[0, 1, 1]), bv(&[1, 0, 1])];
        assert_eq!(rank(&rows), 2);
        let k = left_kernel(&rows, 3);
        assert_eq!(k, vec![bv(&[1, 1, 1])]);
        let ns = null_space(&rows, 3);
        assert_eq!(ns.len(), 1);
        assert!(rows.iter().all(|r| !r.dot(&ns[0])));
    }

    #[test]
    fn solve_inconsistent() {
        let rows = vec![bv(&[1, 1]), bv(&[1, 1])];
        assert!(solve(&rows, &[true, false], 2).is_none());
        let x = solve(&rows, &[true, true], 2).unwrap();
        assert!(rows[0].dot(&x));
    }

    fn arb_rows() -> impl Strategy<Value = (usize, Vec<BitVec>)> {
        (1usize..70).prop_flat_map(|w| {
            (Just(w), prop::collection::vec(prop::collection::vec(any::<bool>(), w), 0..12))
                .prop_map(|(w, rows)| (w, rows.iter().map(|r| BitVec::from_bools(r)).collect()))
        })
    }

    proptest! {
        #[test]
        fn kernel_vectors_annihilate((w, rows) in arb_rows()) {
            for c in left_kernel(&rows, w) {
                let mut s = BitVec::zeros(w);
                for k in c.ones() { s.xor_assign(&rows[k]); }
                prop_assert!(s.is_zero());
            }
            let r = rank(&rows);
            prop_assert_eq!(left_kernel(&rows, w).len(), rows.len() - r);
            let ns = null_space(&rows, w);
            prop_assert_eq!(ns.len(), w - r);
            for x in &ns { for row in &rows { prop_assert!(!row.dot(x)); } }
        }

        #[test]
        fn express_reconstructs((w, rows) in arb_rows(), pick in prop::collection::vec(any::<bool>(), 12)) {
            let mut red = Reducer::new(w, rows.len());
            for (k, r) in rows.iter().enumerate() { red.insert_indexed(r, k); }
            let mut target = BitVec::zeros(w);
            for (k, r) in rows.iter().enumerate() { if pick[k] { target.xor_assign(r); } }
            let c = red.express(&target).unwrap();
            let mut s = BitVec::zeros(w);
            for k in c.ones() { s.xor_assign(&rows[k]); }
            prop_assert_eq!(s, target);
        }
    }
}
