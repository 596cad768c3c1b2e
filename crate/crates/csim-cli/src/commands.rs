//! The three commands behind the CLI: single solves, benchmark sweeps, and
//! the known-values regression check.

use std::time::Duration;

use rayon::prelude::*;
use thiserror::Error;

use csim_core::canonical::{canonical_assignments, CanonicalError};
use csim_core::format::{parse_partial, render_grid};
use csim_core::formula::{matrix_to_formula, verify_identity, SosFormula};
use csim_core::model::{make_matrix, Grid, Shape, TraceEvent};
use csim_core::search::{
    complete_matrix, compute_default_signature, Budget, MinimumSignature, SearchResult,
    SearchStats, Strategy,
};

use crate::table::KnownValuesTable;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Model(#[from] csim_core::model::ModelError),
    #[error("{0}")]
    Format(#[from] csim_core::format::FormatError),
    #[error("{0}")]
    Signature(#[from] csim_core::search::SignatureError),
    #[error("signature line {line}: expected `color count`, found `{text}`")]
    BadSignatureLine { line: usize, text: String },
    #[error("signature color {color} is outside 1..={max}")]
    SignatureColorOutOfRange { color: usize, max: usize },
    #[error("the known-values table has no entry for ({r},{s})")]
    UnknownPair { r: usize, s: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyChoice {
    V1,
    V2,
}

impl StrategyChoice {
    pub fn label(self) -> &'static str {
        match self {
            StrategyChoice::V1 => "v1",
            StrategyChoice::V2 => "v2",
        }
    }

    fn build(self, shape: Shape, signature: Option<&MinimumSignature>) -> Result<Strategy, CommandError> {
        Ok(match self {
            StrategyChoice::V1 => Strategy::V1,
            StrategyChoice::V2 => {
                let signature = match signature {
                    Some(signature) => signature.clone(),
                    None => compute_default_signature(shape)?,
                };
                Strategy::V2(signature)
            }
        })
    }
}

/// Parses a signature file: one `color count` pair per line, `#` comments;
/// unlisted colors get a bound of zero.
pub fn parse_signature(text: &str, shape: Shape) -> Result<MinimumSignature, CommandError> {
    let mut bounds = vec![0u64; shape.colors];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let malformed = || CommandError::BadSignatureLine { line, text: content.to_string() };
        if fields.len() != 2 {
            return Err(malformed());
        }
        let color: usize = fields[0].parse().map_err(|_| malformed())?;
        let count: u64 = fields[1].parse().map_err(|_| malformed())?;
        if color == 0 || color > shape.colors {
            return Err(CommandError::SignatureColorOutOfRange { color, max: shape.colors });
        }
        bounds[color - 1] = count;
    }
    Ok(MinimumSignature::new(bounds, shape)?)
}

#[derive(Debug)]
pub struct SolveOptions {
    pub rows: usize,
    pub cols: usize,
    pub colors: usize,
    /// Partial input in the matrix text format; canonical start when absent.
    pub input: Option<String>,
    pub strategy: StrategyChoice,
    pub signature: Option<MinimumSignature>,
    pub budget: Budget,
    pub trace: bool,
}

#[derive(Debug)]
pub enum SolveVerdict {
    Found { grid: Grid, formula: SosFormula },
    Nonexistent { reason: String },
    BudgetExhausted,
}

impl SolveVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            SolveVerdict::Found { .. } => "found",
            SolveVerdict::Nonexistent { .. } => "nonexistent",
            SolveVerdict::BudgetExhausted => "budget-exhausted",
        }
    }
}

#[derive(Debug)]
pub struct SolveReport {
    pub shape: Shape,
    pub verdict: SolveVerdict,
    pub stats: SearchStats,
    pub trace: Vec<TraceEvent>,
}

/// Runs one solve: builds the starting state (canonical or from a partial
/// input), propagates, searches, and verifies any found matrix down to the
/// sums-of-squares identity.
pub fn solve(options: &SolveOptions) -> Result<SolveReport, CommandError> {
    let shape = Shape::new(options.rows, options.cols, options.colors)?;
    let strategy = options.strategy.build(shape, options.signature.as_ref())?;

    let mut trace = Vec::new();
    let start = match &options.input {
        Some(text) => {
            let mut state = parse_partial(text, shape)?;
            if options.trace {
                state.enable_trace();
            }
            if state.propagate() {
                Some(state)
            } else {
                None
            }
        }
        None => match canonical_assignments(shape.rows, shape.cols, shape.colors) {
            Ok(assignments) => {
                let mut state = make_matrix(shape.rows, shape.cols, shape.colors)?;
                if options.trace {
                    state.enable_trace();
                }
                let mut alive = true;
                for (coord, v) in assignments {
                    if !state.assign(coord, v) {
                        alive = false;
                        break;
                    }
                }
                (alive && state.propagate()).then_some(state)
            }
            Err(err @ (CanonicalError::RowTooWide { .. }
            | CanonicalError::PigeonholeExceeded { .. })) => {
                return Ok(SolveReport {
                    shape,
                    verdict: SolveVerdict::Nonexistent { reason: err.to_string() },
                    stats: SearchStats::default(),
                    trace,
                });
            }
            Err(CanonicalError::Model(err)) => return Err(CommandError::Model(err)),
            Err(other) => unreachable!("canonical_assignments cannot fail with {other}"),
        },
    };

    let mut start = match start {
        Some(state) => state,
        None => {
            return Ok(SolveReport {
                shape,
                verdict: SolveVerdict::Nonexistent {
                    reason: "the starting constraints contradict each other".to_string(),
                },
                stats: SearchStats::default(),
                trace,
            });
        }
    };
    if options.trace {
        trace = start.take_trace();
    }

    let outcome = complete_matrix(start, &strategy, &options.budget);
    let verdict = match outcome.result {
        SearchResult::Found(state) => {
            let grid = state.to_grid().expect("found states are complete");
            let formula =
                matrix_to_formula(&grid, shape.colors).expect("found matrices are CSIMs");
            assert!(verify_identity(&formula), "found matrix fails the identity");
            SolveVerdict::Found { grid, formula }
        }
        SearchResult::Nonexistent => SolveVerdict::Nonexistent {
            reason: "no matrix extends the starting constraints".to_string(),
        },
        SearchResult::BudgetExhausted => SolveVerdict::BudgetExhausted,
    };
    Ok(SolveReport { shape, verdict, stats: outcome.stats, trace })
}

/// Shorthand used by `bench` and `table-check`: solve from the canonical
/// start with no trace.
fn probe(
    rows: usize,
    cols: usize,
    colors: usize,
    strategy: StrategyChoice,
    budget: Budget,
) -> Result<SolveReport, CommandError> {
    solve(&SolveOptions {
        rows,
        cols,
        colors,
        input: None,
        strategy,
        signature: None,
        budget,
        trace: false,
    })
}

#[derive(Debug)]
pub struct BenchOptions {
    pub types: Vec<(usize, usize, usize)>,
    pub strategies: Vec<StrategyChoice>,
    pub repeats: usize,
    pub budget: Budget,
}

#[derive(Debug)]
pub struct BenchCell {
    pub shape: (usize, usize, usize),
    pub strategy: StrategyChoice,
    pub verdict: &'static str,
    pub mean_wall: Duration,
    pub nodes: u64,
    /// What the known-values table says about this type, when it says
    /// anything: `found` or `nonexistent`.
    pub expected: Option<&'static str>,
    pub matches: Option<bool>,
}

/// Runs each (type, strategy) pair `repeats` times from the canonical start
/// and checks the verdicts against the known-values table.
pub fn bench(options: &BenchOptions, table: &KnownValuesTable) -> Result<Vec<BenchCell>, CommandError> {
    let mut cells = Vec::new();
    for &(r, s, n) in &options.types {
        for &strategy in &options.strategies {
            let mut total_wall = Duration::ZERO;
            let mut last = None;
            for _ in 0..options.repeats.max(1) {
                let report = probe(r, s, n, strategy, options.budget)?;
                total_wall += report.stats.wall;
                last = Some(report);
            }
            let report = last.expect("at least one repeat");
            let verdict = match report.verdict {
                SolveVerdict::Found { .. } => "found",
                SolveVerdict::Nonexistent { .. } => "nonexistent",
                SolveVerdict::BudgetExhausted => "budget-exhausted",
            };
            let expected = table
                .expected_existence(r, s, n)
                .map(|exists| if exists { "found" } else { "nonexistent" });
            let matches = match (expected, verdict) {
                (Some(_), "budget-exhausted") => None,
                (Some(e), v) => Some(e == v),
                (None, _) => None,
            };
            cells.push(BenchCell {
                shape: (r, s, n),
                strategy,
                verdict,
                mean_wall: total_wall / options.repeats.max(1) as u32,
                nodes: report.stats.nodes,
                expected,
                matches,
            });
        }
    }
    Ok(cells)
}

#[derive(Debug)]
pub struct TableCheckOptions {
    pub max_r: usize,
    pub max_s: usize,
    /// Per-probe budget.
    pub budget: Budget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeOutcome {
    Pass,
    Fail { expected: &'static str, got: String },
    /// Budget ran out, or the type exceeds the solver's size limits.
    Inconclusive { why: String },
}

impl ProbeOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            ProbeOutcome::Pass => "pass",
            ProbeOutcome::Fail { .. } => "fail",
            ProbeOutcome::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Debug)]
pub struct CellReport {
    pub r: usize,
    pub s: usize,
    pub n: usize,
    pub exact: bool,
    /// Existence probe at `n`.
    pub existence: ProbeOutcome,
    /// Nonexistence probe at `n - 1`; only run for exact entries.
    pub nonexistence: Option<ProbeOutcome>,
}

/// For every pair within the bounds, verifies existence at the tabulated
/// `n` and (for exact entries) nonexistence at `n - 1`. Cells run in
/// parallel; the report is ordered by `(r, s)`.
pub fn table_check(
    options: &TableCheckOptions,
    table: &KnownValuesTable,
) -> Result<Vec<CellReport>, CommandError> {
    let mut pairs = Vec::new();
    for r in 1..=options.max_r {
        for s in r..=options.max_s.max(r) {
            if r <= options.max_r && s <= options.max_s {
                let entry = table.get(r, s).ok_or(CommandError::UnknownPair { r, s })?;
                pairs.push((r, s, entry));
            }
        }
    }

    let mut cells: Vec<CellReport> = pairs
        .into_par_iter()
        .map(|(r, s, entry)| {
            let mut existence =
                expect_verdict(r, s, entry.n, StrategyChoice::V1, options.budget, true);
            if entry.exact && matches!(existence, ProbeOutcome::Inconclusive { .. }) {
                // At an exact minimal n every matrix uses all n colors, so
                // the signature-led strategy is still complete there and
                // sometimes reaches a matrix the plain order does not.
                existence =
                    expect_verdict(r, s, entry.n, StrategyChoice::V2, options.budget, true);
            }
            let nonexistence = entry.exact.then(|| {
                if entry.n - 1 < r.max(s) {
                    // Rows or columns could not hold distinct colors; no
                    // search needed.
                    ProbeOutcome::Pass
                } else {
                    expect_verdict(r, s, entry.n - 1, StrategyChoice::V1, options.budget, false)
                }
            });
            CellReport { r, s, n: entry.n, exact: entry.exact, existence, nonexistence }
        })
        .collect();
    cells.sort_by_key(|cell| (cell.r, cell.s));
    Ok(cells)
}

fn expect_verdict(
    r: usize,
    s: usize,
    n: usize,
    strategy: StrategyChoice,
    budget: Budget,
    expect_found: bool,
) -> ProbeOutcome {
    let expected = if expect_found { "found" } else { "nonexistent" };
    match probe(r, s, n, strategy, budget) {
        Ok(report) => match (&report.verdict, expect_found) {
            (SolveVerdict::Found { .. }, true) => ProbeOutcome::Pass,
            (SolveVerdict::Nonexistent { .. }, false) => ProbeOutcome::Pass,
            (SolveVerdict::BudgetExhausted, _) => ProbeOutcome::Inconclusive {
                why: "budget exhausted".to_string(),
            },
            (other, _) => ProbeOutcome::Fail { expected, got: other.label().to_string() },
        },
        Err(err) => ProbeOutcome::Inconclusive { why: err.to_string() },
    }
}

/// Renders a found matrix with its formula, or the verdict keyword.
pub fn render_solve_text(report: &SolveReport) -> String {
    match &report.verdict {
        SolveVerdict::Found { grid, formula } => {
            format!("{}\n{}", render_grid(grid), formula.render_text())
        }
        SolveVerdict::Nonexistent { .. } => "NONEXISTENT\n".to_string(),
        SolveVerdict::BudgetExhausted => "BUDGET EXHAUSTED\n".to_string(),
    }
}

/// The structured-record form of a solve report. Wall time is the only
/// field that varies between identical runs.
pub fn render_solve_record(report: &SolveReport) -> serde_json::Value {
    let mut record = serde_json::json!({
        "type": [report.shape.rows, report.shape.cols, report.shape.colors],
        "verdict": report.verdict.label(),
        "stats": {
            "nodes": report.stats.nodes,
            "propagations": report.stats.propagations,
            "eliminations": report.stats.eliminations,
            "wall_ms": report.stats.wall.as_secs_f64() * 1e3,
        },
    });
    if let SolveVerdict::Found { grid, formula } = &report.verdict {
        let matrix: Vec<Vec<i64>> = (1..=grid.rows())
            .map(|row| (1..=grid.cols()).map(|col| grid.get(row, col).to_int()).collect())
            .collect();
        let terms: Vec<serde_json::Value> = (1..=formula.colors())
            .map(|k| {
                let monomials: Vec<[i64; 3]> = formula
                    .terms(k)
                    .iter()
                    .map(|m| {
                        [if m.negative { -1 } else { 1 }, m.x_index as i64, m.y_index as i64]
                    })
                    .collect();
                serde_json::json!({ "z": k, "monomials": monomials })
            })
            .collect();
        record["matrix"] = serde_json::json!(matrix);
        record["formula"] = serde_json::json!(terms);
    }
    record
}

pub fn render_bench_text(cells: &[BenchCell]) -> String {
    let mut out = String::new();
    for cell in cells {
        let (r, s, n) = cell.shape;
        let matches = match cell.matches {
            Some(true) => "yes",
            Some(false) => "NO",
            None => "-",
        };
        out.push_str(&format!(
            "({r},{s},{n}) {}: verdict={} mean_ms={:.3} nodes={} expected={} match={}\n",
            cell.strategy.label(),
            cell.verdict,
            cell.mean_wall.as_secs_f64() * 1e3,
            cell.nodes,
            cell.expected.unwrap_or("-"),
            matches,
        ));
    }
    out
}

pub fn render_bench_record(cells: &[BenchCell]) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = cells
        .iter()
        .map(|cell| {
            serde_json::json!({
                "type": [cell.shape.0, cell.shape.1, cell.shape.2],
                "strategy": cell.strategy.label(),
                "verdict": cell.verdict,
                "mean_ms": cell.mean_wall.as_secs_f64() * 1e3,
                "nodes": cell.nodes,
                "expected": cell.expected,
                "match": cell.matches,
            })
        })
        .collect();
    serde_json::Value::Array(rows)
}

pub fn render_table_check_text(cells: &[CellReport]) -> String {
    let mut out = String::new();
    let mut pass = 0usize;
    let mut fail = 0usize;
    let mut inconclusive = 0usize;
    for cell in cells {
        let mut tally = |outcome: &ProbeOutcome| match outcome {
            ProbeOutcome::Pass => pass += 1,
            ProbeOutcome::Fail { .. } => fail += 1,
            ProbeOutcome::Inconclusive { .. } => inconclusive += 1,
        };
        tally(&cell.existence);
        let flag = if cell.exact { "" } else { "*" };
        out.push_str(&format!(
            "({},{}) n={}{}: exists@{}={}",
            cell.r,
            cell.s,
            cell.n,
            flag,
            cell.n,
            cell.existence.label()
        ));
        if let Some(nonexistence) = &cell.nonexistence {
            tally(nonexistence);
            out.push_str(&format!(
                " nonexistent@{}={}",
                cell.n - 1,
                nonexistence.label()
            ));
        }
        out.push('\n');
    }
    out.push_str(&format!(
        "probes: {pass} pass, {fail} fail, {inconclusive} inconclusive\n"
    ));
    out
}

pub fn render_table_check_record(cells: &[CellReport]) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = cells
        .iter()
        .map(|cell| {
            serde_json::json!({
                "r": cell.r,
                "s": cell.s,
                "n": cell.n,
                "exact": cell.exact,
                "existence": cell.existence.label(),
                "nonexistence": cell.nonexistence.as_ref().map(|p| p.label()),
            })
        })
        .collect();
    serde_json::Value::Array(rows)
}
