//! Line-oriented text formats for graphs, clusterings, complexes, maps,
//! Hamiltonians and circuits.
//!
//! Floats are written in shortest round-trip form, so parsing a serialized
//! structure reproduces it bit for bit. Blank lines and lines starting with
//! `#` are ignored. Errors carry 1-based line and column numbers.

use crate::complex::Complex2;
use crate::graph::{Clustering, Graph};
use crate::hamiltonian::{CommutingHamiltonian, Term, TermOp};
use crate::linalg::{Mat, C64};
use crate::localize::LocalizationMap;
use crate::pauli::{CliffordMap, Pauli};
use crate::synth::circuit::{Circuit, Gate, GateOp, Register};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write;
use std::str::FromStr;

#[derive(Clone, Debug)]
struct Tok {
    col: usize,
    text: String,
}

#[derive(Clone, Debug)]
struct Line {
    no: usize,
    toks: Vec<Tok>,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Splits into non-empty lines of tokens; characters in `seps` separate
/// tokens like whitespace.
fn tokenize(text: &str, seps: &str) -> Vec<Line> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim_start().starts_with('#') {
            continue;
        }
        let mut toks = Vec::new();
        let mut cur: Option<Tok> = None;
        for (k, ch) in raw.chars().enumerate() {
            if ch.is_whitespace() || seps.contains(ch) {
                if let Some(t) = cur.take() {
                    toks.push(t);
                }
            } else {
                cur.get_or_insert_with(|| Tok { col: k + 1, text: String::new() }).text.push(ch);
            }
        }
        toks.extend(cur);
        if !toks.is_empty() {
            out.push(Line { no: i + 1, toks });
        }
    }
    out
}

struct Cursor {
    lines: Vec<Line>,
    pos: usize,
    last_line: usize,
}

impl Cursor {
    fn new(text: &str, seps: &str) -> Self {
        let last_line = text.lines().count().max(1);
        Cursor { lines: tokenize(text, seps), pos: 0, last_line }
    }

    fn peek(&self) -> Option<&Line> {
        self.lines.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<Line> {
        let l = self.lines.get(self.pos).cloned().ok_or_else(|| err(self.last_line + 1, 1, format!("unexpected end of file, expected {what}")))?;
        self.pos += 1;
        Ok(l)
    }

    fn done(&self) -> bool {
        self.pos >= self.lines.len()
    }
}

fn num<T: FromStr>(line: usize, t: &Tok) -> Result<T> {
    t.text.parse().map_err(|_| err(line, t.col, format!("cannot parse '{}' as a number", t.text)))
}

fn nums<T: FromStr>(l: &Line, from: usize) -> Result<Vec<T>> {
    l.toks[from..].iter().map(|t| num(l.no, t)).collect()
}

fn keyword(l: &Line, kw: &str) -> Result<()> {
    if l.toks[0].text == kw {
        Ok(())
    } else {
        Err(err(l.no, l.toks[0].col, format!("expected '{kw}', found '{}'", l.toks[0].text)))
    }
}

fn arity(l: &Line, n: usize) -> Result<()> {
    if l.toks.len() == n {
        Ok(())
    } else {
        let col = l.toks.get(n).or(l.toks.last()).map_or(1, |t| t.col);
        Err(err(l.no, col, format!("expected {n} fields, found {}", l.toks.len())))
    }
}

fn lift<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => err(line, 1, other.to_string()),
    })
}

/// Parses a signed Pauli string starting at `col`, locating bad letters.
fn pauli_at(line: usize, col: usize, text: &str) -> Result<Pauli> {
    for (k, ch) in text.chars().enumerate() {
        let ok = "IXYZ".contains(ch) || (k == 0 && (ch == '+' || ch == '-'));
        if !ok {
            return Err(err(line, col + k, format!("bad Pauli letter '{ch}'")));
        }
    }
    Pauli::parse(text).map_err(|e| err(line, col, e.to_string()))
}

// graphs and clusterings

pub fn write_graph(g: &Graph) -> String {
    let mut s = format!("{} {}\n", g.vertex_count(), g.degree_bound());
    for (a, b) in g.edges() {
        writeln!(s, "{a} {b}").unwrap();
    }
    s
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut cur = Cursor::new(text, "");
    let head = cur.next("header 'N d'")?;
    arity(&head, 2)?;
    let n: usize = num(head.no, &head.toks[0])?;
    let d: usize = num(head.no, &head.toks[1])?;
    let mut edges = Vec::new();
    while !cur.done() {
        let l = cur.next("edge")?;
        arity(&l, 2)?;
        let (a, b): (usize, usize) = (num(l.no, &l.toks[0])?, num(l.no, &l.toks[1])?);
        for (v, t) in [(a, &l.toks[0]), (b, &l.toks[1])] {
            if v >= n {
                return Err(err(l.no, t.col, format!("vertex {v} out of range 0..{n}")));
            }
        }
        if a == b {
            return Err(err(l.no, l.toks[1].col, "self-loop"));
        }
        edges.push((a, b));
    }
    lift(head.no, Graph::new(n, &edges, d))
}

pub fn write_clustering(c: &Clustering) -> String {
    let mut s = String::new();
    for cl in &c.clusters {
        let ids: Vec<String> = cl.iter().map(usize::to_string).collect();
        writeln!(s, "{}", ids.join(" ")).unwrap();
    }
    s
}

pub fn parse_clustering(text: &str) -> Result<Clustering> {
    let clusters = tokenize(text, "").iter().map(|l| nums(l, 0)).collect::<Result<Vec<Vec<usize>>>>()?;
    Ok(Clustering::new(clusters))
}

// complexes and maps

pub fn write_complex(k: &Complex2) -> String {
    let mut s = String::from("0CELLS\n");
    let ids: Vec<String> = (0..k.vertex_count()).map(|v| v.to_string()).collect();
    if !ids.is_empty() {
        writeln!(s, "{}", ids.join(" ")).unwrap();
    }
    s.push_str("1CELLS\n");
    for (a, b) in k.edges() {
        writeln!(s, "{a} {b}").unwrap();
    }
    s.push_str("2CELLS\n");
    for [a, b, c] in k.triangles() {
        writeln!(s, "{a} {b} {c}").unwrap();
    }
    s
}

pub fn parse_complex(text: &str) -> Result<Complex2> {
    let mut cur = Cursor::new(text, "");
    let head = cur.next("0CELLS")?;
    keyword(&head, "0CELLS")?;
    let mut ids: Vec<usize> = Vec::new();
    let mut edges = Vec::new();
    let mut tris = Vec::new();
    let mut section = 0;
    while !cur.done() {
        let l = cur.next("cells")?;
        match l.toks[0].text.as_str() {
            "1CELLS" if section == 0 => section = 1,
            "2CELLS" if section == 1 => section = 2,
            "0CELLS" | "1CELLS" | "2CELLS" => return Err(err(l.no, l.toks[0].col, "sections out of order")),
            _ => match section {
                0 => ids.extend(nums::<usize>(&l, 0)?),
                1 => {
                    arity(&l, 2)?;
                    let v = nums::<usize>(&l, 0)?;
                    edges.push((v[0], v[1]));
                }
                _ => {
                    arity(&l, 3)?;
                    let v = nums::<usize>(&l, 0)?;
                    tris.push([v[0], v[1], v[2]]);
                }
            },
        }
    }
    let n = ids.len();
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    if sorted.iter().enumerate().any(|(k, &v)| k != v) {
        return Err(err(head.no, 1, format!("0-cells must be exactly 0..{n}")));
    }
    lift(head.no, Complex2::new(n, &edges, &tris))
}

/// Map lines for a known source complex and target graph.
pub fn write_map(m: &LocalizationMap) -> String {
    let mut s = format!("RANGE {}\n", m.range);
    for (i, a) in m.vertex_image.iter().enumerate() {
        writeln!(s, "VIMG {i}→{a}").unwrap();
    }
    for ((i, j), w) in &m.edge_path {
        let w: Vec<String> = w.iter().map(usize::to_string).collect();
        writeln!(s, "EPATH ({i},{j}): {}", w.join(" ")).unwrap();
    }
    for (t, a) in &m.cell_center {
        writeln!(s, "CENTER ({},{},{})→{a}", t[0], t[1], t[2]).unwrap();
    }
    s
}

pub fn parse_map(text: &str, source: &Complex2, target: &Graph) -> Result<LocalizationMap> {
    let text = text.replace("->", "→");
    let mut cur = Cursor::new(&text, "→(),:");
    let mut range = 0;
    let mut vimg: BTreeMap<usize, usize> = BTreeMap::new();
    let mut paths = BTreeMap::new();
    let mut centers = BTreeMap::new();
    let first = cur.peek().map_or(1, |l| l.no);
    while !cur.done() {
        let l = cur.next("map line")?;
        match l.toks[0].text.as_str() {
            "RANGE" => {
                arity(&l, 2)?;
                range = num(l.no, &l.toks[1])?;
            }
            "VIMG" => {
                arity(&l, 3)?;
                vimg.insert(num(l.no, &l.toks[1])?, num(l.no, &l.toks[2])?);
            }
            "EPATH" => {
                if l.toks.len() < 4 {
                    return Err(err(l.no, l.toks[0].col, "EPATH needs a pair and a walk"));
                }
                let (i, j): (usize, usize) = (num(l.no, &l.toks[1])?, num(l.no, &l.toks[2])?);
                paths.insert((i.min(j), i.max(j)), nums(&l, 3)?);
            }
            "CENTER" => {
                arity(&l, 5)?;
                let v = nums::<usize>(&l, 1)?;
                let mut t = [v[0], v[1], v[2]];
                t.sort_unstable();
                centers.insert(t, v[3]);
            }
            other => return Err(err(l.no, l.toks[0].col, format!("unknown map line '{other}'"))),
        }
    }
    let n = source.vertex_count();
    if vimg.len() != n || vimg.keys().enumerate().any(|(k, &v)| k != v) {
        return Err(err(first, 1, format!("VIMG must list each of the {n} source 0-cells once")));
    }
    let image = vimg.into_values().collect();
    lift(first, LocalizationMap::new(source.clone(), target.clone(), image, paths, centers, range))
}

// Hamiltonians

fn write_matrix(s: &mut String, m: &Mat) {
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|k| format!("{:?} {:?}", m[(r, k)].re, m[(r, k)].im)).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
}

fn parse_matrix(cur: &mut Cursor, dim: usize) -> Result<Mat> {
    let mut m = Mat::zeros(dim, dim);
    for r in 0..dim {
        let l = cur.next("matrix row")?;
        arity(&l, 2 * dim)?;
        let v = nums::<f64>(&l, 0)?;
        for k in 0..dim {
            m[(r, k)] = C64::new(v[2 * k], v[2 * k + 1]);
        }
    }
    Ok(m)
}

pub fn write_hamiltonian(h: &CommutingHamiltonian) -> String {
    let dims: Vec<String> = h.dims().iter().map(usize::to_string).collect();
    let mut s = format!("SITES {}\n", dims.join(" "));
    for t in &h.terms {
        let sup: Vec<String> = t.support.iter().map(usize::to_string).collect();
        writeln!(s, "TERM {}", sup.join(" ")).unwrap();
        match &t.op {
            TermOp::Pauli(p) => {
                let ps = p.to_signed_string();
                writeln!(s, "PAULI {},{}", &ps[..1], &ps[1..]).unwrap();
            }
            TermOp::Dense(m) => {
                s.push_str("DENSE\n");
                write_matrix(&mut s, m);
            }
        }
    }
    s
}

pub fn parse_hamiltonian(text: &str) -> Result<CommutingHamiltonian> {
    let mut cur = Cursor::new(text, "");
    let head = cur.next("SITES header")?;
    keyword(&head, "SITES")?;
    let dims: Vec<usize> = nums(&head, 1)?;
    let mut terms = Vec::new();
    while !cur.done() {
        let l = cur.next("TERM")?;
        keyword(&l, "TERM")?;
        let support: Vec<usize> = nums(&l, 1)?;
        for (t, &s) in l.toks[1..].iter().zip(&support) {
            if s >= dims.len() {
                return Err(err(l.no, t.col, format!("site {s} out of range 0..{}", dims.len())));
            }
        }
        let op = cur.next("PAULI or DENSE")?;
        match op.toks[0].text.as_str() {
            "PAULI" => {
                arity(&op, 2)?;
                let tok = &op.toks[1];
                let (sign, letters) = tok.text.split_once(',').ok_or_else(|| err(op.no, tok.col, "expected '±,<letters>'"))?;
                if sign != "+" && sign != "-" {
                    return Err(err(op.no, tok.col, format!("bad sign '{sign}'")));
                }
                let p = pauli_at(op.no, tok.col + 1, &format!("{sign}{letters}"))?;
                if p.num_qubits() != support.len() || support.iter().any(|&s| dims[s] != 2) {
                    return Err(err(op.no, tok.col, "Pauli term must act on its qubit support letter by letter"));
                }
                terms.push(Term::pauli(support, p));
            }
            "DENSE" => {
                let dim = support.iter().map(|&s| dims[s]).product();
                terms.push(Term::dense(support, parse_matrix(&mut cur, dim)?));
            }
            other => return Err(err(op.no, op.toks[0].col, format!("expected PAULI or DENSE, found '{other}'"))),
        }
    }
    lift(head.no, CommutingHamiltonian::new(&dims, terms))
}

// circuits

pub fn write_circuit(circ: &Circuit) -> String {
    let mut s = format!("REGISTERS {}\n", circ.registers.len());
    for (r, init) in circ.registers.iter().zip(&circ.initial) {
        writeln!(s, "REG {} {} {} {}", r.site, r.copy, r.dim, init).unwrap();
    }
    for (k, round) in circ.rounds.iter().enumerate() {
        writeln!(s, "ROUND {k}").unwrap();
        for g in round {
            let sup: Vec<String> = g.support.iter().map(usize::to_string).collect();
            writeln!(s, "GATE {}", sup.join(" ")).unwrap();
            match &g.op {
                GateOp::Clifford(cm) => {
                    s.push_str("CLIFFORD\n");
                    for p in cm.x_images.iter().chain(&cm.z_images) {
                        writeln!(s, "{}", p.to_signed_string()).unwrap();
                    }
                }
                GateOp::Dense(u) => {
                    s.push_str("DENSE\n");
                    write_matrix(&mut s, u);
                }
            }
        }
    }
    s
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut cur = Cursor::new(text, "");
    let head = cur.next("REGISTERS header")?;
    keyword(&head, "REGISTERS")?;
    arity(&head, 2)?;
    let n: usize = num(head.no, &head.toks[1])?;
    let mut registers = Vec::with_capacity(n);
    let mut initial = Vec::with_capacity(n);
    for _ in 0..n {
        let l = cur.next("REG")?;
        keyword(&l, "REG")?;
        arity(&l, 5)?;
        let v = nums::<usize>(&l, 1)?;
        if v[3] >= v[2] {
            return Err(err(l.no, l.toks[4].col, "initial state exceeds register dimension"));
        }
        registers.push(Register { site: v[0], copy: v[1], dim: v[2] });
        initial.push(v[3]);
    }
    let mut rounds: Vec<Vec<Gate>> = Vec::new();
    while !cur.done() {
        let l = cur.next("ROUND or GATE")?;
        match l.toks[0].text.as_str() {
            "ROUND" => {
                arity(&l, 2)?;
                let k: usize = num(l.no, &l.toks[1])?;
                if k != rounds.len() {
                    return Err(err(l.no, l.toks[1].col, format!("expected round {}", rounds.len())));
                }
                rounds.push(Vec::new());
            }
            "GATE" => {
                let support: Vec<usize> = nums(&l, 1)?;
                for (t, &r) in l.toks[1..].iter().zip(&support) {
                    if r >= n {
                        return Err(err(l.no, t.col, format!("register {r} out of range 0..{n}")));
                    }
                }
                let round = rounds.last_mut().ok_or_else(|| err(l.no, l.toks[0].col, "GATE before the first ROUND"))?;
                let op = cur.next("CLIFFORD or DENSE")?;
                match op.toks[0].text.as_str() {
                    "CLIFFORD" => {
                        let q = support.len();
                        let mut imgs = Vec::with_capacity(2 * q);
                        for _ in 0..2 * q {
                            let row = cur.next("tableau row")?;
                            arity(&row, 1)?;
                            let p = pauli_at(row.no, row.toks[0].col, &row.toks[0].text)?;
                            if p.num_qubits() != q {
                                return Err(err(row.no, row.toks[0].col, format!("tableau row has {} letters, gate has {q} qubits", p.num_qubits())));
                            }
                            imgs.push(p);
                        }
                        let z_images = imgs.split_off(q);
                        let cm = CliffordMap { x_images: imgs, z_images };
                        lift(op.no, cm.validate())?;
                        round.push(Gate::clifford(support, cm));
                    }
                    "DENSE" => {
                        let dim = support.iter().map(|&r| registers[r].dim).product();
                        round.push(Gate::dense(support, parse_matrix(&mut cur, dim)?));
                    }
                    other => return Err(err(op.no, op.toks[0].col, format!("expected CLIFFORD or DENSE, found '{other}'"))),
                }
            }
            other => return Err(err(l.no, l.toks[0].col, format!("expected ROUND or GATE, found '{other}'"))),
        }
    }
    Ok(Circuit { registers, initial, rounds })
}
