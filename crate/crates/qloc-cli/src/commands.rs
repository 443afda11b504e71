//! One function per subcommand. Each validates the parameters its operation
//! needs, runs it, writes any artifact to `--out` and returns a report.

use crate::report::Report;
use crate::{ExperimentConfig, Family};
use anyhow::{anyhow, bail, Context, Result};
use qloc::complex::{attach_triangles, build_cover, hyperfinite_experiment, shields};
use qloc::graph::{ensemble_trial, search_triangle_free_clustering, EnsembleParams, Graph};
use qloc::hamiltonian::{hypercube_partition, CommutingHamiltonian, LatticeSites};
use qloc::instances;
use qloc::io;
use qloc::localize::{check_distortion, collapse_high_girth_power, first_betti, verify_good};
use qloc::synth::circuit::Circuit;
use qloc::synth::cut::CutGeometry;
use qloc::synth::stab_solve::solve_on_geometry;
use qloc::synth::tree_reduce::{check_girth, solve_on_images};
use qloc::synth::two_body::solve_two_body;
use qloc::verify::{apply_circuit, energy, exact_ground_energy, tableau_energy};
use qloc::{complex::interaction_complex, tol};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fs;
use std::path::{Path, PathBuf};

/// Restart budget of the triangle-free clustering search.
pub const SEARCH_BUDGET: usize = 200;

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn parsed<T>(p: &Path, f: impl Fn(&str) -> qloc::Result<T>) -> Result<T> {
    f(&read(p)?).map_err(|e| anyhow!(e).context(format!("in {}", p.display())))
}

fn write(p: &Path, s: &str) -> Result<()> {
    fs::write(p, s).with_context(|| format!("writing {}", p.display()))
}

fn input(cfg: &ExperimentConfig, k: usize, what: &str) -> Result<PathBuf> {
    cfg.inputs.get(k).cloned().ok_or_else(|| anyhow!("missing input {}: {what}", k + 1))
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| anyhow!("--{flag} is required"))
}

fn ids(p: &Path) -> Result<Vec<usize>> {
    read(p)?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| anyhow!("{}: '{t}' is not a vertex id", p.display())))
        .collect()
}

fn emit(cfg: &ExperimentConfig, rep: &mut Report, text: &str) -> Result<()> {
    if let Some(out) = &cfg.out {
        write(out, text)?;
        rep.set("out", out.display());
    }
    Ok(())
}

/// Target 1-complex and site images: given as files, or the 1-skeleton of
/// the interaction complex with every site mapped to itself.
fn geometry(cfg: &ExperimentConfig, h: &CommutingHamiltonian) -> Result<(Graph, Vec<usize>)> {
    match (cfg.inputs.get(1), cfg.inputs.get(2)) {
        (Some(g), Some(i)) => Ok((parsed(g, io::parse_graph)?, ids(i)?)),
        (None, None) => Ok((interaction_complex(h).skeleton(), (0..h.site_count()).collect())),
        _ => bail!("give both a target graph and an image file, or neither"),
    }
}

fn state_energy(c: &Circuit, h: &CommutingHamiltonian) -> Result<Option<f64>> {
    let dim: usize = c.dims().iter().product();
    if dim > tol::MAX_STATE_DIM {
        return Ok(None);
    }
    Ok(Some(energy(&apply_circuit(c)?, h)?))
}

fn circuit_stats(rep: &mut Report, c: &Circuit) {
    rep.set("registers", c.register_count());
    rep.set("ancillas", c.ancilla_count());
    rep.set("depth", c.depth());
    rep.set("gates", c.gate_count());
    rep.set("clifford", c.is_clifford());
}

pub fn girth(cfg: &ExperimentConfig, rep: &mut Report) -> Result<()> {
    let g = parsed(&input(cfg, 0, "graph file")?, io::parse_graph)?;
    rep.set("vertices", g.vertex_count());
    rep.set("edges", g.edge_count());
    rep.set("girth", g.girth().map_or("inf".to_string(), |v| v.to_string()));
    Ok(())
}

pub fn ensemble(cfg: &ExperimentConfig, rep: &mut Report) -> Result<()> {
    let (n, d, r) = (need(cfg.n, "n")?, need(cfg.d, "d")?, need(cfg.r, "r")?);
    let trials = cfg.trials.unwrap_or(20);
    let max_c = cfg.max_c.unwrap_or(4);
    let rows = (0..trials as u64)
        .into_par_iter()
        .map(|t| ensemble_trial(&EnsembleParams { n, d, r, seed: cfg.seed + t }, max_c, SEARCH_BUDGET))
        .collect::<qloc::Result<Vec<_>>>()?;
    rep.columns(&["seed", "kept", "loop_removed", "triangles", "residual", "residual/n", "found"]);
    for t in &rows {
        rep.row(vec![
            t.params.seed.to_string(),
            t.kept_vertices.to_string(),
            format!("{:.4}", t.removed_loop_fraction),
            t.power_triangles.to_string(),
            t.search.residual_triangles.to_string(),
            format!("{:.4}", t.search.residual_triangles as f64 / n as f64),
            t.search.success.to_string(),
        ]);
    }
    let failed = rows.iter().filter(|t| !t.search.success && t.search.residual_triangles as f64 >= 0.01 * n as f64).count();
    let worst_loop = rows.iter().map(|t| t.removed_loop_fraction).fold(0.0, f64::max);
    rep.set("n", n);
    rep.set("d", d);
    rep.set("r", r);
    rep.set("maxC", max_c);
    rep.set("budget", SEARCH_BUDGET);
    rep.set("trials", trials);
    rep.set("failed_with_residual_ge_0.01n", failed);
    rep.set("failure_fraction", failed as f64 / trials.max(1) as f64);
    rep.set("max_loop_removed_fraction", worst_loop);
    Ok(())
}

pub fn cluster_search(cfg: &ExperimentConfig, rep: &mut Report) -> Result<()> {
    let g = parsed(&input(cfg, 0, "graph file")?, io::parse_graph)?;
    let max_c = need(cfg.max_c, "maxC")?;
    let s = search_triangle_free_clustering(&g, max_c, SEARCH_BUDGET, cfg.seed)?;
    rep.set("maxC", max_c);
    rep.set("budget", SEARCH_BUDGET);
    rep.set("clusters", s.clustering.clusters.len());
    rep.set("residual_triangles", s.residual_triangles);
    rep.set("restarts_used", s.restarts_used);
    rep.set("found", s.success);
    emit(cfg, rep, &io::write_clustering(&s.clustering))
}

pub fn localize(cfg: &ExperimentConfig, rep: &mut Report) -> Result<()> {
    let g = parsed(&input(cfg, 0, "graph file")?, io::parse_graph)?;
    let range = need(cfg.range, "R")?;
    let (source, m) = collapse_high_girth_power(&g, range)?;
    let good = verify_good(&m);
    let dist = check_distortion(&m, &good.metrics);
    rep.set("R", range);
    rep.set("source_cells", source.cell_count());
    rep.set("good", good.is_good());
    for v in &good.violations {
        rep.row(vec![v.to_string()]);
    }
    if !good.violations.is_empty() {
        rep.columns(&["violation"]);
    }
    rep.set("l_max", good.metrics.l_max);
    rep.set("d1", good.metrics.d1);
    rep.set("preimage_diameter_0cell", good.metrics.max_preimage_diameter_0cell);
    rep.set("preimage_diameter_1cell", good.metrics.max_preimage_diameter_1cell);
    rep.set("distortion_holds", dist.preimage_ok && dist.image_ok);
    if let Some(out) = &cfg.out {
        let complex = out.with_extension("complex");
        write(&complex, &io::write_complex(&source))?;
        write(&out.with_extension("graph"), &io::write_graph(&m.target))?;
        rep.set("complex", complex.display());
    }
    emit(cfg, rep, &io::write_map(&m))
}

pub fn two_body_solve(cfg: &ExperimentConfig, rep: &mut Report) -> Result<()> {
    let h = parsed(&input(cfg, 0, "Hamiltonian file")?, io::parse_hamiltonian)?;
    let sol = solve_two_body(&h)?;
    circuit_stats(rep, &sol.circuit);
    rep.set("label_search", if sol.exhaustive { "exhaustive" } else { "tree" });
    rep.set("predicted_energy", sol.energy);
    if let Some(e) = state_energy(&sol.circuit, &h)? {
        rep.set("energy", e);
    }
    emit(cfg, rep, &io::write_circuit(&sol.circuit))
}

pub fn stab_solve(cfg: &ExperimentConfig, rep: &mut Report) -> Result<()> {
    let h = parsed(&input(cfg, 0, "Hamiltonian file")?, io::parse_hamiltonian)?;
    let (target, image) = geometry(cfg, &h)?;
    rep.set("betti", first_betti(&target));
    let geo = CutGeometry::from_images(target, image, &h)?;
    rep.set("l_max", geo.l_max());
    let sol = solve_on_geometry(&h, geo)?;
    rep.columns(&["cut", "left", "right", "betti_after", "ungenerated_center"]);
    for c in &sol.cuts {
        rep.row(vec![format!("{:?}", c.edge), c.left.len().to_string(), c.right.len().to_string(), c.betti_after.to_string(), c.ungenerated.to_string()]);
    }
    circuit_stats(rep, &sol.circuit);
    rep.set("cuts", sol.cuts.len());
    rep.set("energy", tableau_energy(&sol.circuit, &h)?);
    emit(cfg, rep, &io::write_circuit(&sol.circuit))
}

pub fn tree_reduce_solve(cfg: &ExperimentConfig, rep: &mut Report) -> Result<()> {
    let h = parsed(&input(cfg, 0, "Hamiltonian file")?, io::parse_hamiltonian)?;
    let (target, image) = geometry(cfg, &h)?;
    let l_max = CutGeometry::from_images(target.clone(), image.clone(), &h)?.l_max();
    check_girth(&target, l_max)?;
    rep.set("l_max", l_max);
    rep.set("betti", first_betti(&target));
    let sol = solve_on_images(&h, target, image, l_max)?;
    circuit_stats(rep, &sol.circuit);
    rep.set("steps", sol.steps);
    rep.set("predicted_energy", sol.energy);
    if let Some(e) = state_energy(&sol.circuit, &h)? {
        rep.set("energy", e);
    }
    emit(cfg, rep, &io::write_circuit(&sol.circuit))
}

pub fn hypercube(cfg: &ExperimentConfig, rep: &mut Report) -> Result<()> {
    let h = parsed(&input(cfg, 0, "Hamiltonian file")?, io::parse_hamiltonian)?;
    let l = need(cfg.l, "l")?;
    let dim = cfg.d.unwrap_or(1);
    let n = h.site_count();
    let side = (n as f64).powf(1.0 / dim as f64).round() as usize;
    if side.pow(dim as u32) != n {
        bail!("{n} sites do not form a {dim}-dimensional hypercube");
    }
    let res = hypercube_partition(&h, &LatticeSites::hypercube(&vec![side; dim]), l)?;
    rep.set("l", l);
    rep.set("lattice_dim", dim);
    rep.set("side", side);
    rep.set("blocks", res.blocks.len());
    rep.set("dropped", res.dropped_count);
    circuit_stats(rep, &res.circuit);
    if let Some(e) = state_energy(&res.circuit, &h)? {
        rep.set("energy", e);
        rep.set("energy_density", e / n as f64);
    }
    emit(cfg, rep, &io::write_circuit(&res.circuit))
}

pub fn hyperfinite(cfg: &ExperimentConfig, rep: &mut Report) -> Result<()> {
    let side = need(cfg.n, "n")?;
    let eps = need(cfg.epsilon, "epsilon")?;
    let range = need(cfg.range, "R")?;
    let trials = cfg.trials.unwrap_or(4);
    let family = move |_seed: u64| instances::triangulated_lattice(side);
    let r = hyperfinite_experiment(&family, eps, range, trials, cfg.seed)?;
    rep.set("family", format!("triangulated_lattice({side})"));
    rep.set("epsilon", eps);
    rep.set("R", range);
    rep.set("trials", trials);
    rep.set("successes", r.successes);
    rep.set("success_rate", r.success_rate());
    rep.set("max_removed_fraction", r.removed_fractions.iter().copied().fold(0.0, f64::max));
    Ok(())
}

pub fn shield(cfg: &ExperimentConfig, rep: &mut Report) -> Result<()> {
    let k = parsed(&input(cfg, 0, "complex file")?, io::parse_complex)?;
    let x = ids(&input(cfg, 1, "set file")?)?;
    let sh = shields(&k, &x);
    rep.columns(&["shield", "pairs", "interior", "exterior"]);
    for (s, shield) in sh.iter().enumerate() {
        let pairs: Vec<String> = shield.pairs.iter().map(|(i, j)| format!("{i}-{j}")).collect();
        rep.row(vec![s.to_string(), pairs.join(","), format!("{:?}", shield.interior()), format!("{:?}", shield.exterior())]);
    }
    rep.set("shields", sh.len());
    Ok(())
}

pub fn cover(cfg: &ExperimentConfig, rep: &mut Report) -> Result<()> {
    let k = parsed(&input(cfg, 0, "complex file")?, io::parse_complex)?;
    let sets = parsed(&input(cfg, 1, "set list file")?, io::parse_clustering)?.clusters;
    let depth = need(cfg.depth, "depth")?;
    let c = build_cover(&k, &sets, depth)?;
    rep.set("depth", depth);
    rep.set("nodes", c.nodes.len());
    rep.set("cells", c.complex.cell_count());
    rep.set("path_clusters", c.path_clustering().clusters.len());
    emit(cfg, rep, &io::write_complex(&c.complex))
}

pub fn verify(cfg: &ExperimentConfig, rep: &mut Report) -> Result<()> {
    let h = parsed(&input(cfg, 0, "Hamiltonian file")?, io::parse_hamiltonian)?;
    let c = parsed(&input(cfg, 1, "circuit file")?, io::parse_circuit)?;
    c.validate()?;
    circuit_stats(rep, &c);
    if c.is_clifford() && h.is_pauli() {
        rep.set("tableau_energy", tableau_energy(&c, &h)?);
    }
    if let Some(e) = state_energy(&c, &h)? {
        rep.set("state_energy", e);
    }
    if h.total_dim().is_some_and(|d| d <= tol::MAX_STATE_DIM) {
        rep.set("ground_energy", exact_ground_energy(&h)?.0);
    }
    Ok(())
}

/// Parses, serializes and parses again; true when both parses agree.
pub fn roundtrip_file(p: &Path) -> Result<bool> {
    let text = read(p)?;
    let kind = p.extension().and_then(|e| e.to_str()).unwrap_or("");
    let first = text.split_whitespace().next().unwrap_or("");
    macro_rules! check {
        ($parse:path, $write:path) => {{
            let a = $parse(&text).map_err(|e| anyhow!(e).context(format!("in {}", p.display())))?;
            Ok($parse(&$write(&a))? == a)
        }};
    }
    match (kind, first) {
        ("ham", _) | (_, "SITES") => check!(io::parse_hamiltonian, io::write_hamiltonian),
        ("circ", _) | (_, "REGISTERS") => check!(io::parse_circuit, io::write_circuit),
        ("complex", _) | (_, "0CELLS") => check!(io::parse_complex, io::write_complex),
        ("clusters", _) => {
            let a = io::parse_clustering(&text)?;
            Ok(io::parse_clustering(&io::write_clustering(&a))?.clusters == a.clusters)
        }
        ("graph", _) | _ => check!(io::parse_graph, io::write_graph),
    }
}

pub fn roundtrip(cfg: &ExperimentConfig, rep: &mut Report) -> Result<bool> {
    let p = input(cfg, 0, "file")?;
    let ok = roundtrip_file(&p)?;
    rep.set("path", p.display());
    rep.set("roundtrip", ok);
    Ok(ok)
}

pub fn generate(family: Family, cfg: &ExperimentConfig, rep: &mut Report) -> Result<()> {
    if cfg.out.is_none() {
        bail!("--out is required");
    }
    let text = match family {
        Family::RingZz => io::write_hamiltonian(&instances::ring_zz(need(cfg.n, "n")?)),
        Family::Toric => io::write_hamiltonian(&instances::toric_code(need(cfg.l, "l")?)),
        Family::PuncturedToric => {
            let (h, grid, image) = instances::punctured_toric(need(cfg.n, "n")?, need(cfg.l, "l")?);
            if let Some(out) = &cfg.out {
                write(&out.with_extension("graph"), &io::write_graph(&grid))?;
                let img: Vec<String> = image.iter().map(usize::to_string).collect();
                write(&out.with_extension("images"), &(img.join(" ") + "\n"))?;
            }
            io::write_hamiltonian(&h)
        }
        Family::Planted => {
            let n = need(cfg.n, "n")?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let factored: Vec<bool> = (0..n).map(|i| i % 2 == 1).collect();
            io::write_hamiltonian(&instances::planted_two_body(&Graph::path(n), &factored, &mut rng))
        }
        Family::Cycle => io::write_graph(&Graph::cycle(need(cfg.n, "n")?)),
        Family::PowerComplex => {
            let g = Graph::cycle(need(cfg.n, "n")?).power(need(cfg.r, "r")?)?;
            io::write_complex(&attach_triangles(&g))
        }
    };
    rep.set("family", format!("{family:?}"));
    emit(cfg, rep, &text)
}
