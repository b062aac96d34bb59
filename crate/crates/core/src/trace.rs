//! Per-iteration convergence records and stopping rules.

use std::fmt::Write as _;

/// Stop once the fixed-point residual is at most `tol`, or after
/// `max_iters` iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule { tol: 1e-10, max_iters: 1_000_000 }
    }
}

impl StoppingRule {
    pub fn new(tol: f64, max_iters: usize) -> Self {
        StoppingRule { tol, max_iters }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub fp_residual: f64,
    pub consensus_gap_x: f64,
    pub consensus_gap_y: Option<f64>,
    pub distance_to_reference: Option<f64>,
    pub messages_cum: u64,
}

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    BudgetExhausted,
    /// Iterates became non-finite.
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    rows: Vec<TraceRow>,
    every: usize,
    pub termination: Termination,
    pub iterations: usize,
}

pub const TRACE_HEADER: &str = "iteration,fp_residual,consensus_gap_x,consensus_gap_y,distance_to_reference,messages_cum";

impl ConvergenceTrace {
    /// Empty trace keeping every `every`-th iteration (plus the last one).
    pub fn new(every: usize) -> Self {
        ConvergenceTrace {
            rows: Vec::new(),
            every: every.max(1),
            termination: Termination::BudgetExhausted,
            iterations: 0,
        }
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// Offers a row; it is kept when its iteration is a multiple of the
    /// sampling interval. Use [`ConvergenceTrace::finish`] for the last row.
    pub fn offer(&mut self, row: TraceRow) {
        if row.iteration % self.every == 0 {
            self.push(row);
        }
    }

    pub fn finish(&mut self, last: Option<TraceRow>, termination: Termination, iterations: usize) {
        if let Some(row) = last {
            if self.rows.last().map_or(true, |r| r.iteration < row.iteration) {
                self.push(row);
            }
        }
        self.termination = termination;
        self.iterations = iterations;
    }

    fn push(&mut self, row: TraceRow) {
        if let Some(prev) = self.rows.last() {
            assert!(row.iteration > prev.iteration, "trace iterations must increase");
        }
        debug_assert!(row.fp_residual >= 0.0 || row.fp_residual.is_nan());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_HEADER);
        out.push('\n');
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.iteration,
                r.fp_residual,
                r.consensus_gap_x,
                opt(r.consensus_gap_y),
                opt(r.distance_to_reference),
                r.messages_cum
            );
        }
        out
    }
}
