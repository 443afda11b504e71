//! Plain-text reports: an optional aligned table followed by a
//! machine-readable `key=value` block.

use qloc::tol;
use std::fmt::{self, Display};

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub values: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        let mut r = Report::default();
        r.set("command", command);
        r.set("seed", seed);
        r
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.values.push((key.to_string(), value.to_string()));
    }

    pub fn columns(&mut self, names: &[&str]) {
        self.header = names.iter().map(|s| s.to_string()).collect();
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    /// Echoes every tolerance in force.
    pub fn tolerances(&mut self) {
        self.set("tol.hermitian", tol::HERMITIAN);
        self.set("tol.commute", tol::COMMUTE);
        self.set("tol.eigen", tol::EIGEN);
        self.set("tol.cluster", tol::CLUSTER);
        self.set("tol.max_term_dim", tol::MAX_TERM_DIM);
        self.set("tol.max_algebra_dim", tol::MAX_ALGEBRA_DIM);
        self.set("tol.max_state_dim", tol::MAX_STATE_DIM);
        self.set("tol.max_dense_dim", tol::MAX_DENSE_DIM);
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.header.is_empty() {
            let mut width: Vec<usize> = self.header.iter().map(String::len).collect();
            for r in &self.rows {
                for (k, c) in r.iter().enumerate() {
                    width[k] = width[k].max(c.len());
                }
            }
            let line = |cells: &[String]| cells.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ");
            writeln!(f, "{}", line(&self.header))?;
            for r in &self.rows {
                writeln!(f, "{}", line(r))?;
            }
            writeln!(f)?;
        }
        for (k, v) in &self.values {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_then_values() {
        let mut r = Report::new("girth", 7);
        r.columns(&["seed", "residual"]);
        r.row(vec!["0".into(), "412".into()]);
        r.set("girth", 5);
        let s = r.to_string();
        assert!(s.starts_with("seed  residual\n   0       412\n\n"));
        assert!(s.ends_with("command=girth\nseed=7\ngirth=5\n"));
    }
}
