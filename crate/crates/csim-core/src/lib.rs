//! Constraint-propagation search for consistently signed intercalate
//! matrices (CSIMs) and the integer sums-of-squares formulas they encode.
//!
//! Given a type `(r, s, n)`, the engine either produces an `r × s` matrix
//! over the signed colors `±1, ..., ±n` whose rows and columns carry
//! distinct colors and whose 2×2 submatrices obey the consistent-signing
//! law, or it proves that no such matrix extends the supplied starting
//! constraints. A completed matrix converts directly into an identity
//!
//! ```text
//! (x_1^2 + ... + x_r^2)(y_1^2 + ... + y_s^2) = z_1^2 + ... + z_n^2
//! ```
//!
//! with each `z_k` bilinear over the integers, and the crate verifies that
//! identity symbolically with exact arithmetic.
//!
//! The pieces:
//!
//! * [`model`] — the solver state: candidate sets, geometry caches, queues.
//! * Propagation methods on [`MatrixState`]: assignment, elimination,
//!   row/column spreading, the square signing rules, and the fixpoint loop.
//! * [`verify`] — contradiction checks and the ground-truth CSIM predicate.
//! * [`search`] — branch-propagate-backtrack completion with two test-value
//!   strategies and node/wall budgets.
//! * [`canonical`] — the symmetry group and canonical starting states.
//! * [`formula`] — conversion to sums-of-squares formulas and exact
//!   verification of the identity.
//! * [`oracle`] — a brute-force enumerator for tiny types, used to
//!   cross-check everything else (rayon-parallel by default, sequential
//!   without the `parallel` feature).
//!
//! ```
//! use csim_core::{canonical, formula, search};
//!
//! let start = canonical::canonical_input(3, 5, 7).unwrap().ready().unwrap();
//! let outcome = search::complete_matrix(start, &search::Strategy::V1, &search::Budget::UNLIMITED);
//! let grid = outcome.result.found().unwrap().to_grid().unwrap();
//! let sos = formula::matrix_to_formula(&grid, 7).unwrap();
//! assert!(formula::verify_identity(&sos));
//! ```

pub mod canonical;
pub mod format;
pub mod formula;
pub mod model;
pub mod oracle;
pub mod search;
pub mod verify;

mod propagate;

pub use model::{
    make_matrix, CandidateSet, Color, ColorSet, Coord, Grid, MatrixState, ModelError, Shape,
    SignedValue, SquareRef, TraceCause, TraceEvent, TraceOp,
};
pub use search::{complete_matrix, Budget, SearchOutcome, SearchResult, SearchStats, Strategy};
