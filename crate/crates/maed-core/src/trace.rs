//! Run traces and solve results shared by both search engines.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::model::{DecisionVector, EvaluationReport};

/// One convergence-trace row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    /// Incumbent penalized fitness (monotone non-increasing).
    pub best_fitness: f64,
    /// Lowest fuel cost attained by any accepted incumbent so far.
    pub best_cost: f64,
    /// Tie flows of the current incumbent (MW), instance order.
    pub tie_flows: Vec<f64>,
}

/// Per-iteration convergence record: row 0 is the initial population state,
/// followed by one row per iteration actually run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
}

impl RunTrace {
    pub fn push(&mut self, row: TraceRow) {
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Writes the trace as CSV with header `iter,best_fitness,best_cost,tie_1..tie_K`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n_ties = self.rows.first().map_or(0, |r| r.tie_flows.len());
        let mut header = String::from("iter,best_fitness,best_cost");
        for k in 1..=n_ties {
            header.push_str(&format!(",tie_{k}"));
        }
        writeln!(w, "{header}")?;
        for row in &self.rows {
            write!(w, "{},{:.6},{:.6}", row.iter, row.best_fitness, row.best_cost)?;
            for t in &row.tie_flows {
                write!(w, ",{t:.6}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to vec");
        String::from_utf8(buf).expect("csv is utf8")
    }
}

/// Final outcome of one solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    /// Best decision vector found, in problem coordinates (post clamp/repair).
    pub best_vector: DecisionVector,
    /// Full evaluation of `best_vector`.
    pub best_report: EvaluationReport,
    /// Penalized fitness of the incumbent at acceptance.
    pub best_fitness: f64,
    pub trace: RunTrace,
}
