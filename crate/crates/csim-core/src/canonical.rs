//! The symmetry group on signed matrices and canonical starting states.
//!
//! Six kinds of operation map CSIMs to CSIMs: permuting rows, columns, or
//! colors, and flipping all signs in chosen rows, columns, or colors.
//! Because every CSIM can be moved into a *canonical form* — first row
//! `1, 2, ..., s` and a `1` at `(i, i)` for `i <= ceil(r*s/n)` — the search
//! only ever needs to start from [`canonical_input`], which shrinks the
//! space by the size of the group orbit.

use thiserror::Error;

use crate::model::{Color, Coord, Grid, MatrixState, SignedValue};
use crate::verify::is_csim;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CanonicalError {
    #[error("{0}")]
    Model(#[from] crate::model::ModelError),
    #[error("a row needs {cols} distinct colors but only {colors} exist; no intercalate matrix of this type")]
    RowTooWide { cols: usize, colors: usize },
    #[error("some color must occur {occurrences} times, exceeding the {cap} possible; no intercalate matrix of this type")]
    PigeonholeExceeded { occurrences: usize, cap: usize },
    #[error("permutation is not a bijection on 1..={size}")]
    BadPermutation { size: usize },
    #[error("index {index} is outside 1..={size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("the grid is not a consistently signed intercalate matrix")]
    NotCsim,
}

/// One generator of the symmetry group.
///
/// Permutations map positions: entry `i` of the result is taken from
/// position `perm[i-1]` of the input. Flips list the one-based rows,
/// columns, or colors whose signs change.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    PermuteRows(Vec<usize>),
    PermuteColumns(Vec<usize>),
    PermuteColors(Vec<usize>),
    FlipRows(Vec<usize>),
    FlipColumns(Vec<usize>),
    FlipColors(Vec<usize>),
}

fn check_permutation(perm: &[usize], size: usize) -> Result<(), CanonicalError> {
    if perm.len() != size {
        return Err(CanonicalError::BadPermutation { size });
    }
    let mut seen = vec![false; size];
    for &p in perm {
        if p == 0 || p > size || seen[p - 1] {
            return Err(CanonicalError::BadPermutation { size });
        }
        seen[p - 1] = true;
    }
    Ok(())
}

fn check_indices(indices: &[usize], size: usize) -> Result<(), CanonicalError> {
    for &i in indices {
        if i == 0 || i > size {
            return Err(CanonicalError::IndexOutOfRange { index: i, size });
        }
    }
    Ok(())
}

/// Applies one group generator to a complete grid with colors in `1..=n`.
/// CSIMs map to CSIMs.
pub fn apply_action(grid: &Grid, action: &Action, n: usize) -> Result<Grid, CanonicalError> {
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut out = grid.clone();
    match action {
        Action::PermuteRows(perm) => {
            check_permutation(perm, rows)?;
            for row in 1..=rows {
                for col in 1..=cols {
                    out.set(row, col, grid.get(perm[row - 1], col));
                }
            }
        }
        Action::PermuteColumns(perm) => {
            check_permutation(perm, cols)?;
            for row in 1..=rows {
                for col in 1..=cols {
                    out.set(row, col, grid.get(row, perm[col - 1]));
                }
            }
        }
        Action::PermuteColors(perm) => {
            check_permutation(perm, n)?;
            // Invert: an entry of color c is relabeled to the position that
            // draws from c, so color permutations compose like the others.
            let mut target = vec![0usize; n];
            for (i, &p) in perm.iter().enumerate() {
                target[p - 1] = i + 1;
            }
            for row in 1..=rows {
                for col in 1..=cols {
                    let v = grid.get(row, col);
                    let color = Color::new(target[v.color().get() - 1])
                        .expect("permutation stays in range");
                    out.set(row, col, SignedValue::new(color, v.is_negative()));
                }
            }
        }
        Action::FlipRows(indices) => {
            check_indices(indices, rows)?;
            for &row in indices {
                for col in 1..=cols {
                    out.set(row, col, out.get(row, col).negated());
                }
            }
        }
        Action::FlipColumns(indices) => {
            check_indices(indices, cols)?;
            for &col in indices {
                for row in 1..=rows {
                    out.set(row, col, out.get(row, col).negated());
                }
            }
        }
        Action::FlipColors(indices) => {
            check_indices(indices, n)?;
            for row in 1..=rows {
                for col in 1..=cols {
                    let v = out.get(row, col);
                    if indices.contains(&v.color().get()) {
                        out.set(row, col, v.negated());
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Rows and columns swap roles; CSIM existence is transpose-symmetric.
pub fn transpose_grid(grid: &Grid) -> Grid {
    let mut cells = Vec::with_capacity(grid.rows() * grid.cols());
    for col in 1..=grid.cols() {
        for row in 1..=grid.rows() {
            cells.push(grid.get(row, col));
        }
    }
    Grid::new(grid.cols(), grid.rows(), cells)
}

/// The canonical starting state, or proof that none is needed.
#[derive(Debug)]
pub enum CanonicalStart {
    /// Propagated to a fixpoint and ready to search.
    Ready(MatrixState),
    /// The canonical assignments already contradict: no CSIM of this type
    /// exists at all.
    Contradiction,
}

impl CanonicalStart {
    pub fn ready(self) -> Option<MatrixState> {
        match self {
            CanonicalStart::Ready(state) => Some(state),
            CanonicalStart::Contradiction => None,
        }
    }
}

/// How many leading diagonal cells the canonical form pins to `+1`.
pub fn diagonal_ones(rows: usize, cols: usize, colors: usize) -> usize {
    (rows * cols).div_ceil(colors)
}

/// The canonical starting assignments for a type: `+1, ..., +s` across the
/// first row and `+1` at `(i, i)` for `i <= ceil(r*s/n)`.
///
/// Types whose first row cannot hold `s` distinct colors, or whose forced
/// most-frequent color cannot fit `ceil(r*s/n)` occurrences, are rejected —
/// both conditions already rule out any intercalate matrix of the type.
pub fn canonical_assignments(
    rows: usize,
    cols: usize,
    colors: usize,
) -> Result<Vec<(Coord, SignedValue)>, CanonicalError> {
    crate::model::Shape::new(rows, cols, colors)?;
    if cols > colors {
        return Err(CanonicalError::RowTooWide { cols, colors });
    }
    let ones = diagonal_ones(rows, cols, colors);
    if ones > rows.min(cols) {
        return Err(CanonicalError::PigeonholeExceeded {
            occurrences: ones,
            cap: rows.min(cols),
        });
    }
    let mut assignments = Vec::with_capacity(cols + ones.saturating_sub(1));
    for col in 1..=cols {
        let v = SignedValue::plus(Color::new(col).expect("cols <= colors <= MAX_COLORS"));
        assignments.push((Coord::new(1, col), v));
    }
    let one = SignedValue::plus(Color::new(1).unwrap());
    for i in 2..=ones {
        assignments.push((Coord::new(i, i), one));
    }
    Ok(assignments)
}

/// Builds the canonical starting state for type `(rows, cols, colors)`:
/// the [`canonical_assignments`] applied and propagated to a fixpoint.
pub fn canonical_input(
    rows: usize,
    cols: usize,
    colors: usize,
) -> Result<CanonicalStart, CanonicalError> {
    let assignments = canonical_assignments(rows, cols, colors)?;
    let mut state = crate::model::make_matrix(rows, cols, colors)?;
    for (coord, v) in assignments {
        if !state.assign(coord, v) {
            return Ok(CanonicalStart::Contradiction);
        }
    }
    if !state.propagate() {
        return Ok(CanonicalStart::Contradiction);
    }
    Ok(CanonicalStart::Ready(state))
}

/// Rewrites a complete CSIM into canonical form by composing group
/// operations: relabel the most frequent color to 1 (smallest label on
/// ties), walk its occurrences onto the leading diagonal with row/column
/// swaps, fix the diagonal signs with row flips, then relabel and sign-fix
/// the first row to `1, 2, ..., s`.
pub fn canonicalize(grid: &Grid, n: usize) -> Result<Grid, CanonicalError> {
    if !is_csim(grid, n) {
        return Err(CanonicalError::NotCsim);
    }
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut work = grid.clone();

    let mut frequency = vec![0usize; n];
    for (_, v) in work.entries() {
        frequency[v.color().get() - 1] += 1;
    }
    let most_frequent = frequency
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.cmp(b).then(ib.cmp(ia)))
        .map(|(i, _)| i + 1)
        .expect("n >= 1");
    if most_frequent != 1 {
        work = apply_action(&work, &swap_colors(1, most_frequent, n), n)?;
    }

    let ones = diagonal_ones(rows, cols, n);
    for i in 1..=ones {
        let occurrence = work
            .entries()
            .find(|(c, v)| v.color().get() == 1 && c.row() >= i && c.col() >= i)
            .map(|(c, _)| c)
            .expect("the most frequent color has at least ceil(r*s/n) occurrences");
        if occurrence.row() != i {
            work = apply_action(&work, &swap_positions_rows(i, occurrence.row(), rows), n)?;
        }
        if occurrence.col() != i {
            work = apply_action(&work, &swap_positions_cols(i, occurrence.col(), cols), n)?;
        }
    }
    let flips: Vec<usize> =
        (1..=ones).filter(|&i| work.get(i, i).is_negative()).collect();
    if !flips.is_empty() {
        work = apply_action(&work, &Action::FlipRows(flips), n)?;
    }

    for col in 2..=cols {
        let current = work.get(1, col);
        if current.color().get() != col {
            work = apply_action(&work, &swap_colors(col, current.color().get(), n), n)?;
        }
        if work.get(1, col).is_negative() {
            work = apply_action(&work, &Action::FlipColors(vec![col]), n)?;
        }
    }

    debug_assert!(is_csim(&work, n));
    Ok(work)
}

/// Does the grid satisfy both canonical-form conditions?
pub fn is_canonical_form(grid: &Grid, n: usize) -> bool {
    let plus_one = SignedValue::plus(Color::new(1).unwrap());
    (1..=grid.cols()).all(|col| grid.get(1, col) == SignedValue::plus(Color::new(col).unwrap()))
        && (1..=diagonal_ones(grid.rows(), grid.cols(), n).min(grid.rows()).min(grid.cols()))
            .all(|i| grid.get(i, i) == plus_one)
}

fn swap_colors(a: usize, b: usize, n: usize) -> Action {
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.swap(a - 1, b - 1);
    Action::PermuteColors(perm)
}

fn swap_positions_rows(a: usize, b: usize, rows: usize) -> Action {
    let mut perm: Vec<usize> = (1..=rows).collect();
    perm.swap(a - 1, b - 1);
    Action::PermuteRows(perm)
}

fn swap_positions_cols(a: usize, b: usize, cols: usize) -> Action {
    let mut perm: Vec<usize> = (1..=cols).collect();
    perm.swap(a - 1, b - 1);
    Action::PermuteColumns(perm)
}
