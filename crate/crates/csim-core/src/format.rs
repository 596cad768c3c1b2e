//! The plain-text matrix format shared by the CLI, the tests, and partial
//! inputs.
//!
//! One line per row with whitespace-separated cells:
//!
//! * assigned cells as signed integers, e.g. `-3`,
//! * color-known cells (sign still open) as `±3`,
//! * unknown cells as `*`.
//!
//! The same format is emitted and parsed, so any printed state can be fed
//! back in as a partial input.

use thiserror::Error;

use crate::model::{Color, Coord, Grid, MatrixState, Shape, SignedValue};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("expected {expected} rows, found {found}")]
    WrongRowCount { expected: usize, found: usize },
    #[error("row {row}: expected {expected} cells, found {found}")]
    WrongRowLength { row: usize, expected: usize, found: usize },
    #[error("row {row}: cannot read cell `{token}`")]
    BadToken { row: usize, token: String },
    #[error("row {row}: color {color} is outside 1..={max}")]
    ColorOutOfRange { row: usize, color: usize, max: usize },
    #[error("the text holds no rows")]
    Empty,
    #[error("{0}")]
    Model(#[from] crate::model::ModelError),
}

/// Renders a partial state: one row per line, cells separated by single
/// spaces.
pub fn render_state(state: &MatrixState) -> String {
    let shape = state.shape();
    let mut out = String::new();
    for row in 1..=shape.rows {
        for col in 1..=shape.cols {
            if col > 1 {
                out.push(' ');
            }
            let cell = state.candidates(Coord::new(row, col));
            if let Some(v) = cell.assigned() {
                out.push_str(&v.to_int().to_string());
            } else if let Some(color) = cell.known_color() {
                out.push('±');
                out.push_str(&color.get().to_string());
            } else {
                out.push('*');
            }
        }
        out.push('\n');
    }
    out
}

/// Renders a complete grid in the same format (all cells assigned).
pub fn render_grid(grid: &Grid) -> String {
    let mut out = String::new();
    for row in 1..=grid.rows() {
        for col in 1..=grid.cols() {
            if col > 1 {
                out.push(' ');
            }
            out.push_str(&grid.get(row, col).to_int().to_string());
        }
        out.push('\n');
    }
    out
}

/// Parses a partial input against the given shape.
///
/// Assigned cells are applied through the normal assignment path and
/// color-known cells through eliminations, so the returned state carries the
/// matching propagation queues. The caller decides when to propagate.
pub fn parse_partial(text: &str, shape: Shape) -> Result<MatrixState, FormatError> {
    let mut state = crate::model::make_matrix(shape.rows, shape.cols, shape.colors)?;
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.len() != shape.rows {
        return Err(FormatError::WrongRowCount { expected: shape.rows, found: lines.len() });
    }
    for (row_idx, line) in lines.iter().enumerate() {
        let row = row_idx + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != shape.cols {
            return Err(FormatError::WrongRowLength {
                row,
                expected: shape.cols,
                found: tokens.len(),
            });
        }
        for (col_idx, token) in tokens.iter().enumerate() {
            let coord = Coord::new(row, col_idx + 1);
            match parse_token(token, row, shape.colors)? {
                Cell::Unknown => {}
                Cell::Assigned(v) => {
                    // A fresh cell always accepts any in-range value.
                    let ok = state.assign(coord, v);
                    debug_assert!(ok);
                }
                Cell::ColorKnown(color) => {
                    for v in state.candidates(coord).iter() {
                        if v.color() != color {
                            let ok = state.eliminate(coord, v);
                            debug_assert!(ok);
                        }
                    }
                }
            }
        }
    }
    Ok(state)
}

/// Parses a complete grid: every cell must be a signed integer. The shape is
/// inferred from the text.
pub fn parse_grid(text: &str) -> Result<Grid, FormatError> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.is_empty() {
        return Err(FormatError::Empty);
    }
    let cols = lines[0].split_whitespace().count();
    let mut cells = Vec::with_capacity(lines.len() * cols);
    for (row_idx, line) in lines.iter().enumerate() {
        let row = row_idx + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != cols {
            return Err(FormatError::WrongRowLength { row, expected: cols, found: tokens.len() });
        }
        for token in tokens {
            let value: i64 = token
                .parse()
                .map_err(|_| FormatError::BadToken { row, token: token.to_string() })?;
            let v = SignedValue::from_int(value)
                .ok_or_else(|| FormatError::BadToken { row, token: token.to_string() })?;
            cells.push(v);
        }
    }
    Ok(Grid::new(lines.len(), cols, cells))
}

enum Cell {
    Unknown,
    Assigned(SignedValue),
    ColorKnown(Color),
}

fn parse_token(token: &str, row: usize, max_color: usize) -> Result<Cell, FormatError> {
    if token == "*" {
        return Ok(Cell::Unknown);
    }
    if let Some(rest) = token.strip_prefix('±') {
        let color: usize = rest
            .parse()
            .map_err(|_| FormatError::BadToken { row, token: token.to_string() })?;
        if color == 0 || color > max_color {
            return Err(FormatError::ColorOutOfRange { row, color, max: max_color });
        }
        return Ok(Cell::ColorKnown(Color::new(color).unwrap()));
    }
    let value: i64 =
        token.parse().map_err(|_| FormatError::BadToken { row, token: token.to_string() })?;
    let v = SignedValue::from_int(value)
        .filter(|v| v.color().get() <= max_color)
        .ok_or(FormatError::ColorOutOfRange {
            row,
            color: value.unsigned_abs() as usize,
            max: max_color,
        })?;
    Ok(Cell::Assigned(v))
}
