//! Sums-of-squares formulas and their exact verification.
//!
//! A CSIM of type `(r, s, n)` encodes an identity
//!
//! ```text
//! (x_1^2 + ... + x_r^2)(y_1^2 + ... + y_s^2) = z_1^2 + ... + z_n^2
//! ```
//!
//! where each `z_k` is bilinear in the `x`s and `y`s over the integers: a
//! cell `(i, j)` holding `±k` contributes `±x_i*y_j` to `z_k`. The identity
//! is checked symbolically with exact integer coefficients, never floats.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::Grid;
use crate::verify::is_csim;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("the grid is not a consistently signed intercalate matrix")]
    NotCsim,
}

/// One `±x_i*y_j` term.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Monomial {
    pub negative: bool,
    pub x_index: usize,
    pub y_index: usize,
}

/// A bilinear sums-of-squares formula of type `[r, s, n]`.
///
/// `terms(k)` lists the monomials of `z_k` in row-major cell order; every
/// matrix cell contributes to exactly one `z_k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SosFormula {
    rows: usize,
    cols: usize,
    colors: usize,
    terms: Vec<Vec<Monomial>>,
}

impl SosFormula {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    /// The monomials of `z_k`, `k` one-based.
    pub fn terms(&self, k: usize) -> &[Monomial] {
        &self.terms[k - 1]
    }

    /// `z1 = x1*y1 - x2*y2 ...`, one line per nonempty `z_k`; empty ones
    /// render as `0`.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (idx, monomials) in self.terms.iter().enumerate() {
            let _ = write!(out, "z{} =", idx + 1);
            if monomials.is_empty() {
                out.push_str(" 0");
            }
            for (pos, m) in monomials.iter().enumerate() {
                let sign = if m.negative {
                    " - "
                } else if pos == 0 {
                    " "
                } else {
                    " + "
                };
                let _ = write!(out, "{sign}x{}*y{}", m.x_index, m.y_index);
            }
            out.push('\n');
        }
        out
    }
}

/// Reads the formula off a complete CSIM.
pub fn matrix_to_formula(grid: &Grid, n: usize) -> Result<SosFormula, FormulaError> {
    if !is_csim(grid, n) {
        return Err(FormulaError::NotCsim);
    }
    Ok(formula_from_grid_unchecked(grid, n))
}

/// The same construction without the CSIM precondition; the result then
/// satisfies the identity only if the grid was a CSIM.
pub fn formula_from_grid_unchecked(grid: &Grid, n: usize) -> SosFormula {
    let mut terms = vec![Vec::new(); n];
    for (c, v) in grid.entries() {
        terms[v.color().get() - 1].push(Monomial {
            negative: v.is_negative(),
            x_index: c.row(),
            y_index: c.col(),
        });
    }
    SosFormula { rows: grid.rows(), cols: grid.cols(), colors: n, terms }
}

/// Expands `sum z_k^2` into the monomial basis `x_a*x_b*y_c*y_d` with exact
/// integer coefficients and compares against the left side, which has
/// coefficient 1 on each `x_i^2*y_j^2` and 0 elsewhere.
pub fn verify_identity(formula: &SosFormula) -> bool {
    // Key: (a, b, c, d) with a <= b, c <= d, standing for x_a*x_b*y_c*y_d.
    let mut expansion: HashMap<(usize, usize, usize, usize), i64> = HashMap::new();
    for monomials in &formula.terms {
        for (i, m1) in monomials.iter().enumerate() {
            for (j, m2) in monomials.iter().enumerate().skip(i) {
                let weight = if i == j { 1 } else { 2 };
                let sign = if m1.negative == m2.negative { 1 } else { -1 };
                let key = (
                    m1.x_index.min(m2.x_index),
                    m1.x_index.max(m2.x_index),
                    m1.y_index.min(m2.y_index),
                    m1.y_index.max(m2.y_index),
                );
                *expansion.entry(key).or_insert(0) += sign * weight;
            }
        }
    }
    expansion.retain(|_, coefficient| *coefficient != 0);

    if expansion.len() != formula.rows * formula.cols {
        return false;
    }
    for i in 1..=formula.rows {
        for j in 1..=formula.cols {
            if expansion.get(&(i, i, j, j)) != Some(&1) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_grid;
    use crate::model::SignedValue;

    const KNOWN_357: &str = "1 2 3 4 5\n2 -1 4 -3 6\n3 -4 -1 2 7\n";
    const KNOWN_444: &str = "1 2 3 4\n2 -1 4 -3\n3 -4 -1 2\n4 3 -2 -1\n";

    fn monomial(sign: i64, x: usize, y: usize) -> Monomial {
        Monomial { negative: sign < 0, x_index: x, y_index: y }
    }

    #[test]
    fn known_357_formula_matches_term_by_term() {
        let grid = parse_grid(KNOWN_357).unwrap();
        let formula = matrix_to_formula(&grid, 7).unwrap();
        assert_eq!(
            formula.terms(1),
            &[monomial(1, 1, 1), monomial(-1, 2, 2), monomial(-1, 3, 3)]
        );
        assert_eq!(
            formula.terms(2),
            &[monomial(1, 1, 2), monomial(1, 2, 1), monomial(1, 3, 4)]
        );
        assert_eq!(
            formula.terms(3),
            &[monomial(1, 1, 3), monomial(-1, 2, 4), monomial(1, 3, 1)]
        );
        assert_eq!(
            formula.terms(4),
            &[monomial(1, 1, 4), monomial(1, 2, 3), monomial(-1, 3, 2)]
        );
        assert_eq!(formula.terms(5), &[monomial(1, 1, 5)]);
        assert_eq!(formula.terms(6), &[monomial(1, 2, 5)]);
        assert_eq!(formula.terms(7), &[monomial(1, 3, 5)]);
        assert!(verify_identity(&formula));
    }

    #[test]
    fn known_357_text_rendering() {
        let grid = parse_grid(KNOWN_357).unwrap();
        let formula = matrix_to_formula(&grid, 7).unwrap();
        let text = formula.render_text();
        assert!(text.starts_with("z1 = x1*y1 - x2*y2 - x3*y3\n"));
        assert!(text.contains("z2 = x1*y2 + x2*y1 + x3*y4\n"));
        assert!(text.ends_with("z7 = x3*y5\n"));
    }

    #[test]
    fn one_by_one_formula() {
        let grid = Grid::from_ints(&[&[1]]).unwrap();
        let formula = matrix_to_formula(&grid, 1).unwrap();
        assert_eq!(formula.terms(1), &[monomial(1, 1, 1)]);
        assert!(verify_identity(&formula));
    }

    #[test]
    fn known_444_formula_has_four_monomials_per_term() {
        let grid = parse_grid(KNOWN_444).unwrap();
        let formula = matrix_to_formula(&grid, 4).unwrap();
        for k in 1..=4 {
            assert_eq!(formula.terms(k).len(), 4);
        }
        assert!(verify_identity(&formula));
    }

    #[test]
    fn sign_flip_breaks_the_identity() {
        let grid = parse_grid(KNOWN_357).unwrap();
        let mut formula = formula_from_grid_unchecked(&grid, 7);
        // Flip x2*y2 inside z1: the 2*x1*x2*y1*y2 cross term stops canceling.
        formula.terms[0][1].negative = false;
        assert!(!verify_identity(&formula));
    }

    #[test]
    fn non_csim_grids_are_rejected() {
        let grid = Grid::from_ints(&[&[1, 1]]).unwrap();
        assert_eq!(matrix_to_formula(&grid, 2), Err(FormulaError::NotCsim));
    }

    /// Both directions of the equivalence at desk scale: a grid passes
    /// `is_csim` exactly when its formula satisfies the identity. Exhausts
    /// every signed filling for shapes up to 2x2 over up to 3 colors.
    #[test]
    fn identity_holds_exactly_for_csims() {
        for rows in 1..=2usize {
            for cols in 1..=2usize {
                for n in 1..=3usize {
                    let values: Vec<SignedValue> = (1..=n as i64)
                        .flat_map(|c| [c, -c])
                        .map(|v| SignedValue::from_int(v).unwrap())
                        .collect();
                    let cells = rows * cols;
                    let mut stack = vec![0usize; cells];
                    'fill: loop {
                        let grid = Grid::new(
                            rows,
                            cols,
                            stack.iter().map(|&i| values[i]).collect(),
                        );
                        let formula = formula_from_grid_unchecked(&grid, n);
                        assert_eq!(
                            is_csim(&grid, n),
                            verify_identity(&formula),
                            "{grid:?}"
                        );
                        for slot in stack.iter_mut() {
                            *slot += 1;
                            if *slot < values.len() {
                                continue 'fill;
                            }
                            *slot = 0;
                        }
                        break;
                    }
                }
            }
        }
    }
}
