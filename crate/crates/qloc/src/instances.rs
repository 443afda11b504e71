//! Generators for standard Hamiltonian families used by the driver and tests.

use crate::complex::{attach_triangles, Complex2};
use crate::graph::Graph;
use crate::hamiltonian::{CommutingHamiltonian, Term};
use crate::linalg::{c, Mat};
use crate::pauli::Pauli;
use rand::Rng;

/// `(1 - Z_i Z_{i+1})/2` around a ring of `n` qubits.
pub fn ring_zz(n: usize) -> CommutingHamiltonian {
    let terms = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            Term::pauli_str(&[i.min(j), i.max(j)], "+ZZ").unwrap()
        })
        .collect();
    CommutingHamiltonian::new(&vec![2; n], terms).unwrap()
}

/// Edge indices of an `l x l` periodic lattice: horizontal edge `(r, c)` is
/// `r*l + c`, vertical edge `(r, c)` is `l*l + r*l + c`.
pub fn toric_edge(l: usize, r: usize, col: usize, vertical: bool) -> usize {
    (if vertical { l * l } else { 0 }) + (r % l) * l + (col % l)
}

/// Qubits of the star at vertex `(r, c)`.
pub fn toric_star(l: usize, r: usize, col: usize) -> Vec<usize> {
    let mut s = vec![
        toric_edge(l, r, col, false),
        toric_edge(l, r, col + l - 1, false),
        toric_edge(l, r, col, true),
        toric_edge(l, r + l - 1, col, true),
    ];
    s.sort_unstable();
    s
}

/// Qubits of the plaquette with top-left vertex `(r, c)`.
pub fn toric_plaquette(l: usize, r: usize, col: usize) -> Vec<usize> {
    let mut s = vec![
        toric_edge(l, r, col, false),
        toric_edge(l, r + 1, col, false),
        toric_edge(l, r, col, true),
        toric_edge(l, r, col + 1, true),
    ];
    s.sort_unstable();
    s
}

/// Toric code on an `l x l` torus: star projectors `(1 - XXXX)/2` then
/// plaquette projectors `(1 - ZZZZ)/2`.
pub fn toric_code(l: usize) -> CommutingHamiltonian {
    let mut terms = Vec::new();
    for r in 0..l {
        for col in 0..l {
            terms.push(Term::pauli_str(&toric_star(l, r, col), "+XXXX").unwrap());
        }
    }
    for r in 0..l {
        for col in 0..l {
            terms.push(Term::pauli_str(&toric_plaquette(l, r, col), "+ZZZZ").unwrap());
        }
    }
    CommutingHamiltonian::new(&vec![2; 2 * l * l], terms).unwrap()
}

/// Random diagonal (hence commuting) non-projector terms on 1 to 3 qubits.
pub fn random_diagonal_commuting<R: Rng + ?Sized>(n: usize, terms: usize, rng: &mut R) -> CommutingHamiltonian {
    let mut out = Vec::new();
    for _ in 0..terms {
        let k = rng.random_range(1..=3.min(n));
        let mut support: Vec<usize> = Vec::new();
        while support.len() < k {
            let s = rng.random_range(0..n);
            if !support.contains(&s) {
                support.push(s);
            }
        }
        let d = 1 << k;
        let diag: Vec<_> = (0..d).map(|_| c(rng.random_range(0..3) as f64 - 1.0)).collect();
        out.push(Term::dense(support, Mat::from_diagonal(&nalgebra::DVector::from_vec(diag))));
    }
    CommutingHamiltonian::new(&vec![2; n], out).unwrap()
}

/// Random Hermitian Pauli projector terms on `n` qubits (not necessarily commuting).
pub fn random_pauli_terms<R: Rng + ?Sized>(n: usize, terms: usize, rng: &mut R) -> CommutingHamiltonian {
    let t = (0..terms)
        .map(|_| {
            let mut p = Pauli::random(n, rng);
            while p.is_identity_up_to_phase() {
                p = Pauli::random(n, rng);
            }
            let supp = p.support();
            Term::pauli(supp.clone(), p.restrict(&supp))
        })
        .collect::<Vec<_>>();
    CommutingHamiltonian::new(&vec![2; n], t).unwrap()
}

/// Shield example: interior set `X = {0, 1, 2, 3}` where `0, 1, 2` form a
/// column next to the exterior strip `4 - 5 - 6`, `3` sits on the far side,
/// and `7, 8, 9, 10` are pendants on `0`, `2`, `3`, `3`. Every triangle of the
/// graph carries a 2-cell. `X` has five shields.
pub fn five_shield_example() -> (Complex2, Vec<usize>) {
    let edges = [
        (0, 1),
        (1, 2),
        (3, 0),
        (3, 1),
        (3, 2),
        (0, 4),
        (1, 4),
        (1, 5),
        (2, 5),
        (2, 6),
        (4, 5),
        (5, 6),
        (0, 7),
        (2, 8),
        (3, 9),
        (3, 10),
    ];
    let g = Graph::from_edges(11, &edges).unwrap();
    (attach_triangles(&g), vec![0, 1, 2, 3])
}

/// One diagonal projector `(1 - ZZZ)/2` per triangle of [`five_shield_example`] and
/// `(1 - ZZ)/2` on each pendant 1-cell.
pub fn five_shield_example_hamiltonian() -> CommutingHamiltonian {
    let (k, _) = five_shield_example();
    let mut terms: Vec<Term> = k.triangles().map(|t| Term::pauli_str(&t, "+ZZZ").unwrap()).collect();
    for (a, b) in [(0, 7), (2, 8), (3, 9), (3, 10)] {
        terms.push(Term::pauli_str(&[a, b], "+ZZ").unwrap());
    }
    CommutingHamiltonian::new(&[2; 11], terms).unwrap()
}

/// Open `l x l` square grid with one diagonal per square and a 2-cell on
/// every triangle. Vertex `(r, c)` is `r*l + c`.
pub fn triangulated_lattice(l: usize) -> Complex2 {
    let mut edges = Vec::new();
    for r in 0..l {
        for c in 0..l {
            let v = r * l + c;
            if c + 1 < l {
                edges.push((v, v + 1));
            }
            if r + 1 < l {
                edges.push((v, v + l));
            }
            if r + 1 < l && c + 1 < l {
                edges.push((v, v + l + 1));
            }
        }
    }
    attach_triangles(&Graph::from_edges(l * l, &edges).unwrap())
}

/// Planted two-body projector instance on `g`. A factored site is a hidden
/// product of two qubits (dimension 4, degree at most 2) whose k-th factor
/// faces its k-th neighbour; any other site is a qubit whose terms are all
/// diagonal in a hidden basis. Every site is scrambled by a random unitary.
pub fn planted_two_body<R: Rng + ?Sized>(g: &Graph, factored: &[bool], rng: &mut R) -> CommutingHamiltonian {
    use crate::linalg::{eye, kron, random_unitary};
    let n = g.vertex_count();
    let dims: Vec<usize> = (0..n).map(|i| if factored[i] { 4 } else { 2 }).collect();
    let locals: Vec<Mat> = (0..n).map(|i| random_unitary(dims[i], rng)).collect();
    let mut terms = Vec::new();
    for (i, j) in g.edges() {
        assert!(!factored[i] || g.degree(i) <= 2, "factored site {i} has degree above 2");
        assert!(!factored[j] || g.degree(j) <= 2, "factored site {j} has degree above 2");
        // random projector on the facing pair, diagonal on unfactored sites
        let core = match (factored[i], factored[j]) {
            (true, true) => {
                let u = random_unitary(4, rng);
                let keep: Vec<usize> = (0..4).filter(|_| rng.random_bool(0.5)).collect();
                &u * crate::linalg::projector_from_columns(&eye(4), &keep) * u.adjoint()
            }
            (fi, fj) => {
                let mut m = Mat::zeros(4, 4);
                for a in 0..2 {
                    let u = if fi || fj { random_unitary(2, rng) } else { eye(2) };
                    let keep: Vec<usize> = (0..2).filter(|_| rng.random_bool(0.5)).collect();
                    let p = &u * crate::linalg::projector_from_columns(&eye(2), &keep) * u.adjoint();
                    let e = Mat::from_fn(2, 2, |r, s| if r == a && s == a { c(1.0) } else { c(0.0) });
                    // the diagonal side carries the label `a`
                    m += if fi { kron(&p, &e) } else { kron(&e, &p) };
                }
                m
            }
        };
        let pos = |v: usize, other: usize| g.neighbors(v).iter().position(|&w| w == other).unwrap();
        // layout (i factors, j factors) with the core on the facing ones
        let mut fd = Vec::new();
        let mut fi = 0;
        if factored[i] {
            fd.extend([2, 2]);
            fi = pos(i, j);
        } else {
            fd.push(2);
        }
        let off = fd.len();
        let mut fj = off;
        if factored[j] {
            fd.extend([2, 2]);
            fj = off + pos(j, i);
        } else {
            fd.push(2);
        }
        let full = crate::linalg::embed(&core, &crate::linalg::Layout::new(&fd), &[fi, fj]);
        let w = kron(&locals[i], &locals[j]);
        terms.push(Term::dense(vec![i, j], &w * full * w.adjoint()));
    }
    CommutingHamiltonian::new(&dims, terms).unwrap()
}

/// Twelve qubits in four columns of three, `+ZZZZ` on every square between
/// neighbouring columns, mapped column-wise onto a path of four vertices.
/// Returns the Hamiltonian, the path and the site images.
pub fn fig5_lattice() -> (CommutingHamiltonian, Graph, Vec<usize>) {
    let cols = [[0, 7, 8], [1, 2, 3], [4, 5, 6], [9, 10, 11]];
    let mut image = vec![0; 12];
    for (c, col) in cols.iter().enumerate() {
        for &s in col {
            image[s] = c;
        }
    }
    let mut terms = Vec::new();
    for c in 0..3 {
        for r in 0..2 {
            let mut s = vec![cols[c][r], cols[c][r + 1], cols[c + 1][r], cols[c + 1][r + 1]];
            s.sort_unstable();
            terms.push(Term::pauli_str(&s, "+ZZZZ").unwrap());
        }
    }
    (CommutingHamiltonian::new(&[2; 12], terms).unwrap(), Graph::path(4), image)
}

/// Toric-code-like boundary: `Z0 Z1 Z3 Z4`, `X1 X2 X4 X5`, `Z2 Z5`, with sites
/// `0, 1, 2` on the left vertex of a single edge and `3, 4, 5` on the right.
pub fn toric_boundary_example() -> (CommutingHamiltonian, Graph, Vec<usize>) {
    let terms = vec![
        Term::pauli_str(&[0, 1, 3, 4], "+ZZZZ").unwrap(),
        Term::pauli_str(&[1, 2, 4, 5], "+XXXX").unwrap(),
        Term::pauli_str(&[2, 5], "+ZZ").unwrap(),
    ];
    (CommutingHamiltonian::new(&[2; 6], terms).unwrap(), Graph::path(2), vec![0, 0, 0, 1, 1, 1])
}

/// Two qutrits with the single term `sum_j |j><j| (x) |j><j|`, one per vertex
/// of a single edge.
pub fn qutrit_counterexample() -> (CommutingHamiltonian, Graph, Vec<usize>) {
    let m = Mat::from_fn(9, 9, |a, b| if a == b && a / 3 == a % 3 { c(1.0) } else { c(0.0) });
    (CommutingHamiltonian::new(&[3, 3], vec![Term::dense(vec![0, 1], m)]).unwrap(), Graph::path(2), vec![0, 1])
}

/// Toric code on an `l x l` torus punctured by one hole per `s x s` block:
/// at the block centre the star and its four plaquettes are dropped. Also
/// returns the grid of block boundary lines and the image of each qubit,
/// its edge midpoint projected radially from the block centre onto the
/// block boundary and rounded to a lattice vertex.
pub fn punctured_toric(l: usize, s: usize) -> (CommutingHamiltonian, Graph, Vec<usize>) {
    assert!(s >= 2 && s % 2 == 0 && l % s == 0, "block side must be even and divide l");
    let h = s / 2;
    let hole = |r: usize, col: usize| r % s == h && col % s == h;
    let mut terms = Vec::new();
    for r in 0..l {
        for col in 0..l {
            if !hole(r, col) {
                terms.push(Term::pauli_str(&toric_star(l, r, col), "+XXXX").unwrap());
            }
        }
    }
    for r in 0..l {
        for col in 0..l {
            // plaquette with top-left (r, c) touches vertices (r..=r+1, c..=c+1)
            let near_hole = (0..2).any(|dr| (0..2).any(|dc| hole((r + dr) % l, (col + dc) % l)));
            if !near_hole {
                terms.push(Term::pauli_str(&toric_plaquette(l, r, col), "+ZZZZ").unwrap());
            }
        }
    }
    let ham = CommutingHamiltonian::new(&vec![2; 2 * l * l], terms).unwrap();
    // boundary lines: rows and columns divisible by s
    let on_line = |r: usize, col: usize| r % s == 0 || col % s == 0;
    let mut index = vec![usize::MAX; l * l];
    let mut count = 0;
    for r in 0..l {
        for col in 0..l {
            if on_line(r, col) {
                index[r * l + col] = count;
                count += 1;
            }
        }
    }
    let mut edges = Vec::new();
    for r in 0..l {
        for col in 0..l {
            if r % s == 0 {
                edges.push((index[r * l + col], index[r * l + (col + 1) % l]));
            }
            if col % s == 0 {
                edges.push((index[r * l + col], index[((r + 1) % l) * l + col]));
            }
        }
    }
    let grid = Graph::from_edges(count, &edges).unwrap();
    let lf = l as f64;
    let mut image = vec![0; 2 * l * l];
    for vertical in [false, true] {
        for r in 0..l {
            for col in 0..l {
                let (mr, mc) = if vertical { (r as f64 + 0.5, col as f64) } else { (r as f64, col as f64 + 0.5) };
                let cr = (mr / s as f64).floor() * s as f64 + h as f64;
                let cc = (mc / s as f64).floor() * s as f64 + h as f64;
                let (dr, dc) = (mr - cr, mc - cc);
                let t = h as f64 / dr.abs().max(dc.abs());
                let pr = ((cr + t * dr).round() + lf) % lf;
                let pc = ((cc + t * dc).round() + lf) % lf;
                let v = index[pr as usize * l + pc as usize];
                assert!(v != usize::MAX, "projection left the boundary grid");
                image[toric_edge(l, r, col, vertical)] = v;
            }
        }
    }
    (ham, grid, image)
}
