//! Independent brute-force enumeration of CSIMs for tiny types.
//!
//! The enumerator fills cells row-major, pruning prefixes that already break
//! a row, column, or completed-square condition — all necessary conditions
//! of [`is_csim`], so no valid grid is ever skipped. It exists to check the
//! propagation engine and the search against ground truth and is never a
//! production path: a budget guard rejects types whose raw space exceeds
//! roughly 2^36 fillings.
//!
//! With the `parallel` feature (default) the work is split over the legal
//! fillings of the first row and processed with rayon; the sequential
//! fallback walks the same tree in one thread. Both produce grids in the
//! same lexicographic order (cells row-major, values ordered `+1, -1, +2,
//! -2, ...`).

use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::model::{Grid, Shape, SignedValue};
use crate::verify::is_csim;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0}")]
    Model(#[from] crate::model::ModelError),
    #[error("search space of ~2^{bits} fillings exceeds the oracle budget of 2^{cap}")]
    BudgetExceeded { bits: u32, cap: u32 },
}

const BUDGET_BITS: u32 = 36;

fn check_budget(shape: Shape) -> Result<(), OracleError> {
    let bits = (shape.cell_count() as f64) * ((2 * shape.colors) as f64).log2();
    let bits = bits.ceil() as u32;
    if bits > BUDGET_BITS {
        return Err(OracleError::BudgetExceeded { bits, cap: BUDGET_BITS });
    }
    Ok(())
}

/// All CSIMs of the type in lexicographic order, truncated at `limit`.
pub fn enumerate_csims(
    rows: usize,
    cols: usize,
    colors: usize,
    limit: Option<usize>,
) -> Result<Vec<Grid>, OracleError> {
    #[cfg(feature = "parallel")]
    {
        enumerate_csims_par(rows, cols, colors, limit)
    }
    #[cfg(not(feature = "parallel"))]
    {
        enumerate_csims_seq(rows, cols, colors, limit)
    }
}

/// Does any CSIM of the type exist? Early-exits on the first hit.
pub fn exists_csim(rows: usize, cols: usize, colors: usize) -> Result<bool, OracleError> {
    #[cfg(feature = "parallel")]
    {
        exists_csim_par(rows, cols, colors)
    }
    #[cfg(not(feature = "parallel"))]
    {
        exists_csim_seq(rows, cols, colors)
    }
}

/// Single-threaded enumeration; always available.
pub fn enumerate_csims_seq(
    rows: usize,
    cols: usize,
    colors: usize,
    limit: Option<usize>,
) -> Result<Vec<Grid>, OracleError> {
    let shape = Shape::new(rows, cols, colors)?;
    check_budget(shape)?;
    let mut found = Vec::new();
    let cap = limit.unwrap_or(usize::MAX);
    if cap == 0 {
        return Ok(found);
    }
    let mut cells = Vec::with_capacity(shape.cell_count());
    walk(shape, &mut cells, &mut |grid| {
        found.push(grid.clone());
        found.len() < cap
    });
    Ok(found)
}

pub fn exists_csim_seq(rows: usize, cols: usize, colors: usize) -> Result<bool, OracleError> {
    Ok(!enumerate_csims_seq(rows, cols, colors, Some(1))?.is_empty())
}

#[cfg(feature = "parallel")]
fn enumerate_csims_par(
    rows: usize,
    cols: usize,
    colors: usize,
    limit: Option<usize>,
) -> Result<Vec<Grid>, OracleError> {
    let shape = Shape::new(rows, cols, colors)?;
    check_budget(shape)?;
    if shape.rows == 1 {
        return enumerate_csims_seq(rows, cols, colors, limit);
    }
    let prefixes = first_row_prefixes(shape);
    let found: Vec<Grid> = prefixes
        .into_par_iter()
        .flat_map_iter(|prefix| {
            let mut cells = prefix;
            let mut grids = Vec::new();
            walk(shape, &mut cells, &mut |grid| {
                grids.push(grid.clone());
                true
            });
            grids
        })
        .collect();
    let mut found = found;
    if let Some(cap) = limit {
        found.truncate(cap);
    }
    Ok(found)
}

#[cfg(feature = "parallel")]
fn exists_csim_par(rows: usize, cols: usize, colors: usize) -> Result<bool, OracleError> {
    let shape = Shape::new(rows, cols, colors)?;
    check_budget(shape)?;
    if shape.rows == 1 {
        return exists_csim_seq(rows, cols, colors);
    }
    let prefixes = first_row_prefixes(shape);
    Ok(prefixes.into_par_iter().any(|prefix| {
        let mut cells = prefix;
        let mut hit = false;
        walk(shape, &mut cells, &mut |_| {
            hit = true;
            false
        });
        hit
    }))
}

/// Every legal filling of the first row, in lexicographic order.
#[cfg(feature = "parallel")]
fn first_row_prefixes(shape: Shape) -> Vec<Vec<SignedValue>> {
    let row_shape = Shape::new(1, shape.cols, shape.colors).expect("valid sub-shape");
    let mut prefixes = Vec::new();
    let mut cells = Vec::with_capacity(shape.cols);
    walk(row_shape, &mut cells, &mut |grid| {
        prefixes.push(grid.entries().map(|(_, v)| v).collect());
        true
    });
    prefixes
}

/// Depth-first fill in row-major order. `emit` returns `false` to stop.
/// `cells` may arrive pre-seeded with a legal prefix.
fn walk(shape: Shape, cells: &mut Vec<SignedValue>, emit: &mut impl FnMut(&Grid) -> bool) -> bool {
    if cells.len() == shape.cell_count() {
        let grid = Grid::new(shape.rows, shape.cols, cells.clone());
        debug_assert!(is_csim(&grid, shape.colors));
        return emit(&grid);
    }
    for color in 1..=shape.colors as i64 {
        for value in [color, -color] {
            let v = SignedValue::from_int(value).expect("colors within range");
            if prefix_ok(shape, cells, v) {
                cells.push(v);
                let keep_going = walk(shape, cells, emit);
                cells.pop();
                if !keep_going {
                    return false;
                }
            }
        }
    }
    true
}

/// May `v` extend the row-major prefix `cells`? Checks exactly the CSIM
/// conditions that the new cell completes: row and column color
/// distinctness plus the signing law on every square whose last corner the
/// new cell is.
fn prefix_ok(shape: Shape, cells: &[SignedValue], v: SignedValue) -> bool {
    let idx = cells.len();
    let row = idx / shape.cols;
    let col = idx % shape.cols;

    for c in 0..col {
        if cells[row * shape.cols + c].color() == v.color() {
            return false;
        }
    }
    for r in 0..row {
        if cells[r * shape.cols + col].color() == v.color() {
            return false;
        }
    }
    for r in 0..row {
        for c in 0..col {
            let a = cells[r * shape.cols + c];
            let b = cells[r * shape.cols + col];
            let c_entry = cells[row * shape.cols + c];
            let ok = (a == v && b == c_entry.negated())
                || (a == v.negated() && b == c_entry)
                || (a.color() != v.color() && b.color() != c_entry.color());
            if !ok {
                return false;
            }
        }
    }
    true
}
