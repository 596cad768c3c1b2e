//! Branch-propagate-backtrack search over candidate states.
//!
//! The solver picks a test value for some undecided cell, assigns it in a
//! snapshot, propagates, and recurses. A contradicted branch eliminates the
//! test value from the originating state and continues there, so the search
//! exhausts every signed filling compatible with the input state.
//!
//! Two test-value selection strategies are provided: [`Strategy::V1`] takes
//! the undecided cell with the fewest candidates (ties broken row-major,
//! values in canonical order), and [`Strategy::V2`] first works toward a
//! [`MinimumSignature`] — per-color lower bounds on occurrence counts —
//! before falling back to the first strategy.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::model::{Color, Coord, MatrixState, Shape, SignedValue, TraceCause};
use crate::verify::{is_csim, verify, verify_complete};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("signature lists {found} colors but the type has {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("signature demands {demanded} occurrences but the matrix has {cells} cells")]
    TooDemanding { demanded: u64, cells: u64 },
}

/// Per-color lower bounds on how often each color must occur.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimumSignature {
    bounds: Vec<u64>,
}

impl MinimumSignature {
    /// `bounds[c - 1]` is the minimum occurrence count for color `c`. The
    /// total demand must fit into the matrix.
    pub fn new(bounds: Vec<u64>, shape: Shape) -> Result<Self, SignatureError> {
        if bounds.len() != shape.colors {
            return Err(SignatureError::WrongLength {
                expected: shape.colors,
                found: bounds.len(),
            });
        }
        let demanded: u64 = bounds.iter().sum();
        let cells = shape.cell_count() as u64;
        if demanded > cells {
            return Err(SignatureError::TooDemanding { demanded, cells });
        }
        Ok(MinimumSignature { bounds })
    }

    pub fn bound(&self, color: Color) -> u64 {
        self.bounds.get(color.get() - 1).copied().unwrap_or(0)
    }
}

/// The benchmark-default signature: the most frequent color must occur at
/// least `ceil(r*s / n)` times and every other color at least once.
pub fn compute_default_signature(shape: Shape) -> Result<MinimumSignature, SignatureError> {
    let mut bounds = vec![1u64; shape.colors];
    bounds[0] = (shape.cell_count() as u64).div_ceil(shape.colors as u64);
    MinimumSignature::new(bounds, shape)
}

#[derive(Clone, Debug)]
pub enum Strategy {
    /// Fewest-candidates cell first.
    V1,
    /// Satisfy the signature's unmet color bounds first, then fall back to V1.
    V2(MinimumSignature),
}

/// What a selection strategy proposes for the next branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestChoice {
    Pick(Coord, SignedValue),
    /// Every cell is assigned.
    AllAssigned,
    /// A signature bound can no longer be met anywhere.
    Infeasible,
}

/// Chooses the undecided cell with the fewest candidates (row-major on
/// ties) and its first candidate in canonical order.
pub fn select_test_v1(state: &MatrixState) -> Option<(Coord, SignedValue)> {
    let mut best: Option<(Coord, u32)> = None;
    for c in state.shape().coords() {
        let cell = state.candidates(c);
        let len = cell.len();
        if len <= 1 {
            continue;
        }
        if best.is_none_or(|(_, best_len)| len < best_len) {
            best = Some((c, len));
        }
    }
    best.map(|(c, _)| (c, state.candidates(c).first().expect("undecided cell is nonempty")))
}

/// Signature-first selection: walks the colors in ascending order and, for
/// the first color short of its bound, proposes the first cell (row-major)
/// where that color is still open. With every bound met it defers to
/// [`select_test_v1`].
pub fn select_test_v2(state: &MatrixState, signature: &MinimumSignature) -> TestChoice {
    let shape = state.shape();
    for color_value in 1..=shape.colors {
        let color = Color::new(color_value).expect("color within shape");
        let bound = signature.bound(color);
        if bound == 0 {
            continue;
        }
        let assigned = shape
            .coords()
            .filter(|&c| state.assigned_value(c).is_some_and(|v| v.color() == color))
            .count() as u64;
        if assigned >= bound {
            continue;
        }
        let candidate = shape.coords().find_map(|c| {
            let cell = state.candidates(c);
            if cell.assigned().is_some() {
                return None;
            }
            let plus = SignedValue::plus(color);
            if cell.contains(plus) {
                return Some((c, plus));
            }
            let minus = SignedValue::minus(color);
            if cell.contains(minus) {
                return Some((c, minus));
            }
            None
        });
        return match candidate {
            Some((c, v)) => TestChoice::Pick(c, v),
            None => TestChoice::Infeasible,
        };
    }
    match select_test_v1(state) {
        Some((c, v)) => TestChoice::Pick(c, v),
        None => TestChoice::AllAssigned,
    }
}

impl Strategy {
    fn choose(&self, state: &MatrixState) -> TestChoice {
        match self {
            Strategy::V1 => match select_test_v1(state) {
                Some((c, v)) => TestChoice::Pick(c, v),
                None => TestChoice::AllAssigned,
            },
            Strategy::V2(signature) => select_test_v2(state, signature),
        }
    }
}

/// Node and wall-clock limits for one search.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_wall: Option<Duration>,
}

impl Budget {
    pub const UNLIMITED: Budget = Budget { max_nodes: None, max_wall: None };

    pub fn nodes(max_nodes: u64) -> Budget {
        Budget { max_nodes: Some(max_nodes), max_wall: None }
    }

    pub fn wall(max_wall: Duration) -> Budget {
        Budget { max_nodes: None, max_wall: Some(max_wall) }
    }

    fn exhausted(&self, nodes: u64, started: Instant) -> bool {
        if self.max_nodes.is_some_and(|cap| nodes >= cap) {
            return true;
        }
        self.max_wall.is_some_and(|cap| started.elapsed() >= cap)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub propagations: u64,
    pub eliminations: u64,
    pub wall: Duration,
}

#[derive(Debug)]
pub enum SearchResult {
    /// A completed state; guaranteed to pass [`is_csim`].
    Found(Box<MatrixState>),
    /// No completion exists within the searched space.
    Nonexistent,
    /// The budget ran out before a verdict.
    BudgetExhausted,
}

impl SearchResult {
    pub fn found(&self) -> Option<&MatrixState> {
        match self {
            SearchResult::Found(state) => Some(state),
            _ => None,
        }
    }

    pub fn is_nonexistent(&self) -> bool {
        matches!(self, SearchResult::Nonexistent)
    }
}

#[derive(Debug)]
pub struct SearchOutcome {
    pub result: SearchResult,
    pub stats: SearchStats,
}

/// Completes `state` into a consistently signed intercalate matrix or shows
/// that none extends it (within strategy V2's signature restriction, which
/// additionally narrows the space).
///
/// The caller propagates initial assignments first: the queues must be
/// drained. Every found matrix is re-checked against [`is_csim`] before it
/// is returned.
pub fn complete_matrix(state: MatrixState, strategy: &Strategy, budget: &Budget) -> SearchOutcome {
    debug_assert!(state.queues_empty(), "propagate the input before searching");
    let started = Instant::now();
    let elim_base = state.counters.eliminations();
    let prop_base = state.counters.propagations();
    let counters = std::sync::Arc::clone(&state.counters);

    let mut nodes = 0u64;
    let result = run(state, strategy, budget, started, &mut nodes);

    if let SearchResult::Found(found) = &result {
        let grid = found.to_grid().expect("found state is complete");
        assert!(
            is_csim(&grid, found.shape().colors),
            "search produced a non-CSIM matrix; propagation is unsound"
        );
    }
    SearchOutcome {
        result,
        stats: SearchStats {
            nodes,
            propagations: counters.propagations() - prop_base,
            eliminations: counters.eliminations() - elim_base,
            wall: started.elapsed(),
        },
    }
}

fn run(
    mut matrix: MatrixState,
    strategy: &Strategy,
    budget: &Budget,
    started: Instant,
    nodes: &mut u64,
) -> SearchResult {
    loop {
        *nodes += 1;
        if budget.exhausted(*nodes, started) {
            return SearchResult::BudgetExhausted;
        }
        if !verify(&matrix) {
            return SearchResult::Nonexistent;
        }
        if verify_complete(&matrix) {
            return SearchResult::Found(Box::new(matrix));
        }
        let (coord, test_value) = match strategy.choose(&matrix) {
            TestChoice::Pick(c, v) => (c, v),
            TestChoice::Infeasible => return SearchResult::Nonexistent,
            TestChoice::AllAssigned => {
                unreachable!("an incomplete state always offers a test value")
            }
        };

        let mut copy = matrix.snapshot();
        copy.set_trace_cause(TraceCause::TestValue);
        let assigned = copy.assign(coord, test_value);
        debug_assert!(assigned, "test values come from the candidate set");
        if copy.propagate() {
            match run(copy, strategy, budget, started, nodes) {
                SearchResult::Nonexistent => {}
                verdict => return verdict,
            }
        }
        matrix.set_trace_cause(TraceCause::Backtrack);
        if !matrix.eliminate(coord, test_value) {
            return SearchResult::Nonexistent;
        }
    }
}
