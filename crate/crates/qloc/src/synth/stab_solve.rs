//! Ground states of frustration-free stabilizer Hamiltonians with a
//! 1-localizable interaction complex: cut `K_1` open until it is a tree, then
//! solve the tree instance as a two-body problem over depth bands.

use crate::graph::{bfs_parents, tree_band_clustering, Graph};
use crate::hamiltonian::CommutingHamiltonian;
use crate::localize::{first_betti, LocalizationMap};
use crate::synth::circuit::{Circuit, Gate, Register};
use crate::synth::cut::{build_cross_hamiltonian, cut_decompose, CutGeometry};
use crate::synth::two_body::solve_two_body_clifford;
use crate::{Error, Result};
use std::collections::VecDeque;

#[derive(Clone, Debug)]
pub struct CutRecord {
    pub edge: (usize, usize),
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub betti_before: usize,
    pub betti_after: usize,
    /// Center elements of the crossing algebra on the left that the
    /// individual terms do not generate.
    pub ungenerated: usize,
}

#[derive(Clone, Debug)]
pub struct StabSolution {
    pub circuit: Circuit,
    /// Hamiltonian on all registers after the last cut.
    pub final_h: CommutingHamiltonian,
    pub final_geometry: CutGeometry,
    pub cuts: Vec<CutRecord>,
    pub clusters: Vec<Vec<usize>>,
}

/// Edges on a shortest cycle, lexicographically ordered.
pub fn shortest_cycle_edges(g: &Graph) -> Vec<(usize, usize)> {
    let mut best = usize::MAX;
    let mut out = Vec::new();
    for (a, b) in g.edges() {
        // distance from a to b avoiding the edge itself
        let n = g.vertex_count();
        let mut dist = vec![usize::MAX; n];
        dist[a] = 0;
        let mut q = VecDeque::from([a]);
        while let Some(x) = q.pop_front() {
            for &y in g.neighbors(x) {
                if (x == a && y == b) || dist[y] != usize::MAX {
                    continue;
                }
                dist[y] = dist[x] + 1;
                q.push_back(y);
            }
        }
        if dist[b] == usize::MAX {
            continue;
        }
        let len = dist[b] + 1;
        if len < best {
            best = len;
            out.clear();
        }
        if len == best {
            out.push((a.min(b), a.max(b)));
        }
    }
    out.sort_unstable();
    out
}

pub fn stabilizer_cut_solve(h: &CommutingHamiltonian, m: &LocalizationMap) -> Result<StabSolution> {
    solve_on_geometry(h, CutGeometry::from_map(m, h)?)
}

pub fn solve_on_geometry(h: &CommutingHamiltonian, geo: CutGeometry) -> Result<StabSolution> {
    if !h.is_pauli() {
        return Err(Error::Invalid("the cut solver needs a stabilizer Hamiltonian".into()));
    }
    let n = h.site_count();
    let mut registers: Vec<Register> = (0..n).map(|site| Register { site, copy: 1, dim: 2 }).collect();
    let mut copies = vec![1usize; n];
    let mut h = h.clone();
    let mut geo = geo;
    let mut unitaries: Vec<Gate> = Vec::new();
    let mut cuts = Vec::new();
    loop {
        let betti = first_betti(&geo.target);
        if betti == 0 {
            break;
        }
        let mut last_err = None;
        let mut done = false;
        for edge in shortest_cycle_edges(&geo.target) {
            let step = cut_decompose(&h, &geo, edge).and_then(|cd| build_cross_hamiltonian(&h, &geo, &cd).map(|s| (cd, s)));
            let (cd, step) = match step {
                Ok(x) => x,
                Err(e @ (Error::Unsupported(_) | Error::Inconsistent(_))) => {
                    last_err = Some(e);
                    continue;
                }
                Err(e) => return Err(e),
            };
            for (&r, _) in cd.left.iter().zip(&step.left_ancilla).chain(cd.right.iter().zip(&step.right_ancilla)) {
                let site = registers[r].site;
                copies[site] += 1;
                registers.push(Register { site, copy: copies[site], dim: 2 });
            }
            let after = first_betti(&step.geo.target);
            cuts.push(CutRecord {
                edge,
                left: cd.left.clone(),
                right: cd.right.clone(),
                betti_before: betti,
                betti_after: after,
                ungenerated: step.constraints.ungenerated_left.len(),
            });
            unitaries.push(step.unitary);
            h = step.h;
            geo = step.geo;
            done = true;
            break;
        }
        if !done {
            return Err(last_err.unwrap_or_else(|| Error::Unsupported("no cuttable edge on a cycle".into())));
        }
    }
    let parents = bfs_parents(&geo.target);
    let width = geo.l_max().max(1) + 1;
    let clustering = tree_band_clustering(&parents, width)?;
    let mut cluster_of = vec![0; geo.target.vertex_count()];
    for (c, vs) in clustering.clusters.iter().enumerate() {
        for &v in vs {
            cluster_of[v] = c;
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); clustering.clusters.len()];
    for (r, &v) in geo.image.iter().enumerate() {
        groups[cluster_of[v]].push(r);
    }
    groups.retain(|g| !g.is_empty());
    let mut circuit = solve_two_body_clifford(&h, &registers, &groups)?;
    for u in unitaries.into_iter().rev() {
        circuit.push_asap(u);
    }
    Ok(StabSolution { circuit, final_h: h, final_geometry: geo, cuts, clusters: groups })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Term;
    use crate::instances::{fig5_lattice, ring_zz};
    use crate::verify::{apply_circuit, energy, tableau_energy};

    fn ring(n: usize) -> StabSolution {
        let h = ring_zz(n);
        let geo = CutGeometry::from_images(Graph::cycle(n), (0..n).collect(), &h).unwrap();
        solve_on_geometry(&h, geo).unwrap()
    }

    #[test]
    fn shortest_cycle_edges_of_theta() {
        // square 0-1-2-3 with a pendant triangle 3-4-5
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert_eq!(shortest_cycle_edges(&g), vec![(3, 4), (3, 5), (4, 5)]);
    }

    #[test]
    fn ring_needs_one_cut() {
        let h = ring_zz(8);
        let s = ring(8);
        assert_eq!(s.cuts.len(), 1);
        assert_eq!((s.cuts[0].betti_before, s.cuts[0].betti_after), (1, 0));
        assert_eq!(tableau_energy(&s.circuit, &h).unwrap(), 0.0);
        s.circuit.validate().unwrap();
        let st = apply_circuit(&s.circuit).unwrap();
        assert!(energy(&st, &h).unwrap().abs() < 1e-9);
    }

    #[test]
    fn ring_depth_does_not_grow() {
        let depths: Vec<usize> = [8, 16, 32].iter().map(|&n| ring(n).circuit.depth()).collect();
        assert!(depths.windows(2).all(|w| w[0] == w[1]), "{depths:?}");
    }

    #[test]
    fn tree_needs_no_cut() {
        let h = CommutingHamiltonian::new(&[2; 5], (0..4).map(|i| Term::pauli_str(&[i, i + 1], "+XX").unwrap()).collect()).unwrap();
        let geo = CutGeometry::from_images(Graph::path(5), (0..5).collect(), &h).unwrap();
        let s = solve_on_geometry(&h, geo).unwrap();
        assert!(s.cuts.is_empty());
        assert_eq!(tableau_energy(&s.circuit, &h).unwrap(), 0.0);
    }

    #[test]
    fn fig5_lattice_closed_into_ring() {
        // close the column path into a ring of four columns
        let (h0, _, image) = fig5_lattice();
        let mut terms = h0.terms.clone();
        let cols = [[0, 7, 8], [9, 10, 11]];
        for r in 0..2 {
            let mut s = vec![cols[0][r], cols[0][r + 1], cols[1][r], cols[1][r + 1]];
            s.sort_unstable();
            terms.push(Term::pauli_str(&s, "+ZZZZ").unwrap());
        }
        let h = CommutingHamiltonian::new(&[2; 12], terms).unwrap();
        let geo = CutGeometry::from_images(Graph::cycle(4), image, &h).unwrap();
        let s = solve_on_geometry(&h, geo).unwrap();
        assert_eq!(s.cuts.len(), 1);
        assert_eq!(tableau_energy(&s.circuit, &h).unwrap(), 0.0);
    }

    #[test]
    fn punctured_toric_code() {
        let (h, grid, image) = crate::instances::punctured_toric(8, 4);
        assert_eq!((grid.vertex_count(), grid.edge_count(), first_betti(&grid)), (28, 32, 5));
        let geo = CutGeometry::from_images(grid, image, &h).unwrap();
        let s = solve_on_geometry(&h, geo).unwrap();
        assert_eq!(s.cuts.len(), 5);
        assert_eq!(tableau_energy(&s.circuit, &h).unwrap(), 0.0);
    }
}
