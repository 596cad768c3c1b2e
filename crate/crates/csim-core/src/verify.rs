//! Consistency predicates: the partial-state check used at every search
//! node, the completion check, and the ground-truth CSIM predicate on
//! complete grids.
//!
//! [`is_csim`] is defined directly from the matrix conditions with no solver
//! machinery at all; it is the final arbiter for every matrix the search
//! produces and the reference the brute-force oracle is built on.

use crate::model::{ColorSet, Coord, Grid, MatrixState, SignedValue};

/// Checks the assigned entries of a partial state for contradictions,
/// ignoring unassigned cells.
///
/// Two assigned entries of equal color in a row or column fail, as does any
/// fully assigned 2×2 square that breaks the consistent-signing law.
pub fn verify(state: &MatrixState) -> bool {
    let shape = state.shape();

    for row in 1..=shape.rows {
        let mut seen = ColorSet::EMPTY;
        for col in 1..=shape.cols {
            if let Some(v) = state.assigned_value(Coord::new(row, col)) {
                if seen.contains(v.color()) {
                    return false;
                }
                seen.insert(v.color());
            }
        }
    }
    for col in 1..=shape.cols {
        let mut seen = ColorSet::EMPTY;
        for row in 1..=shape.rows {
            if let Some(v) = state.assigned_value(Coord::new(row, col)) {
                if seen.contains(v.color()) {
                    return false;
                }
                seen.insert(v.color());
            }
        }
    }

    for top in 1..shape.rows {
        for bottom in top + 1..=shape.rows {
            for left in 1..shape.cols {
                for right in left + 1..=shape.cols {
                    let corner = state.assigned_value(Coord::new(top, left));
                    let row_mate = state.assigned_value(Coord::new(top, right));
                    let col_mate = state.assigned_value(Coord::new(bottom, left));
                    let opposite = state.assigned_value(Coord::new(bottom, right));
                    if let (Some(a), Some(b), Some(c), Some(d)) =
                        (corner, row_mate, col_mate, opposite)
                    {
                        if !square_is_consistent(a, b, c, d) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// True iff every cell of the state is assigned.
pub fn verify_complete(state: &MatrixState) -> bool {
    state.shape().coords().all(|c| state.candidates(c).len() == 1)
}

/// The ground-truth predicate: is `grid` a consistently signed intercalate
/// matrix over the colors `1..=n`?
///
/// Checks, from the definition alone: colors within range, distinct colors
/// along rows and columns, the rectangle biconditional (a repeated color on
/// one diagonal of a 2×2 submatrix forces the other diagonal to repeat), and
/// an odd number of minus signs on every submatrix with repeated colors.
pub fn is_csim(grid: &Grid, n: usize) -> bool {
    if grid.entries().any(|(_, v)| v.color().get() > n) {
        return false;
    }

    for row in 1..=grid.rows() {
        let mut seen = ColorSet::EMPTY;
        for col in 1..=grid.cols() {
            let color = grid.get(row, col).color();
            if seen.contains(color) {
                return false;
            }
            seen.insert(color);
        }
    }
    for col in 1..=grid.cols() {
        let mut seen = ColorSet::EMPTY;
        for row in 1..=grid.rows() {
            let color = grid.get(row, col).color();
            if seen.contains(color) {
                return false;
            }
            seen.insert(color);
        }
    }

    for top in 1..grid.rows() {
        for bottom in top + 1..=grid.rows() {
            for left in 1..grid.cols() {
                for right in left + 1..=grid.cols() {
                    let a = grid.get(top, left);
                    let b = grid.get(top, right);
                    let c = grid.get(bottom, left);
                    let d = grid.get(bottom, right);
                    if a.color() == d.color() {
                        if b.color() != c.color() {
                            return false;
                        }
                        let minus_signs = [a, b, c, d].iter().filter(|v| v.is_negative()).count();
                        if minus_signs % 2 == 0 {
                            return false;
                        }
                    } else if b.color() == c.color() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// The three admissible sign patterns for a fully assigned square, with `a`
/// and `d` on one diagonal and `b` and `c` on the other.
fn square_is_consistent(a: SignedValue, b: SignedValue, c: SignedValue, d: SignedValue) -> bool {
    (a == d && b == c.negated())
        || (a == d.negated() && b == c)
        || (a.color() != d.color() && b.color() != c.color())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_grid;
    use crate::model::{make_matrix, Coord, SignedValue};

    fn sv(v: i64) -> SignedValue {
        SignedValue::from_int(v).unwrap()
    }

    /// A known consistently signed intercalate matrix of type (3,5,7).
    const KNOWN_357: &str = "\
1 2 3 4 5
2 -1 4 -3 6
3 -4 -1 2 7
";

    /// The completed 4×4 matrix from the propagation walkthrough.
    const KNOWN_444: &str = "\
1 2 3 4
2 -1 4 -3
3 -4 -1 2
4 3 -2 -1
";

    #[test]
    fn known_357_matrix_is_a_csim() {
        let grid = parse_grid(KNOWN_357).unwrap();
        assert!(is_csim(&grid, 7));
    }

    #[test]
    fn known_444_matrix_is_a_csim() {
        let grid = parse_grid(KNOWN_444).unwrap();
        assert!(is_csim(&grid, 4));
    }

    #[test]
    fn single_row_is_a_csim() {
        let grid = Grid::from_ints(&[&[1, 2, 3, 4, 5]]).unwrap();
        assert!(is_csim(&grid, 5));
    }

    #[test]
    fn sign_flip_breaks_the_known_357_matrix() {
        let mut grid = parse_grid(KNOWN_357).unwrap();
        grid.set(2, 2, sv(1));
        // The (1,1)x(1,2),(2,1),(2,2) square now has an even minus count.
        assert!(!is_csim(&grid, 7));
    }

    #[test]
    fn all_plus_repeat_square_fails() {
        let grid = Grid::from_ints(&[&[1, 2], &[2, 1]]).unwrap();
        assert!(!is_csim(&grid, 2));
    }

    #[test]
    fn rectangle_condition_is_required() {
        // Diagonal repeats color 1 but the anti-diagonal does not repeat.
        let grid = Grid::from_ints(&[&[1, 2], &[3, -1]]).unwrap();
        assert!(!is_csim(&grid, 3));
    }

    #[test]
    fn out_of_range_color_is_rejected() {
        let grid = Grid::from_ints(&[&[1, 5]]).unwrap();
        assert!(!is_csim(&grid, 4));
    }

    #[test]
    fn verify_passes_fully_assigned_known_matrices() {
        for (text, shape) in [(KNOWN_357, (3, 5, 7)), (KNOWN_444, (4, 4, 4))] {
            let grid = parse_grid(text).unwrap();
            let mut state = make_matrix(shape.0, shape.1, shape.2).unwrap();
            for (c, v) in grid.entries() {
                assert!(state.assign(c, v));
            }
            assert!(verify(&state));
            assert!(verify_complete(&state));
        }
    }

    #[test]
    fn verify_rejects_even_minus_square() {
        let mut state = make_matrix(2, 2, 2).unwrap();
        for (c, v) in [(1, 1, 1), (1, 2, 2), (2, 1, 2), (2, 2, 1)]
            .map(|(r, c, v)| (Coord::new(r, c), sv(v)))
        {
            assert!(state.assign(c, v));
        }
        assert!(!verify(&state));
    }

    #[test]
    fn verify_ignores_unassigned_cells() {
        let mut state = make_matrix(2, 2, 2).unwrap();
        assert!(state.assign(Coord::new(1, 1), sv(1)));
        assert!(verify(&state));
        assert!(!verify_complete(&state));
    }

    #[test]
    fn fresh_matrix_is_not_complete() {
        let state = make_matrix(2, 2, 2).unwrap();
        assert!(!verify_complete(&state));
    }

    #[test]
    fn color_known_cell_is_not_assigned() {
        let mut state = make_matrix(1, 1, 4).unwrap();
        for v in [1i64, -1, 2, -2, 3, -3] {
            assert!(state.eliminate(Coord::new(1, 1), sv(v)));
        }
        assert!(!verify_complete(&state));
    }

    /// For fully assigned states the node-level check and the ground truth
    /// predicate agree: exhaust every complete 2x2 filling over ±{1,2,3}.
    #[test]
    fn verify_agrees_with_is_csim_when_complete() {
        let values: Vec<SignedValue> = (1..=3)
            .flat_map(|c| [sv(c), sv(-c)])
            .collect();
        for &a in &values {
            for &b in &values {
                for &c in &values {
                    for &d in &values {
                        let grid = Grid::new(2, 2, vec![a, b, c, d]);
                        let mut state = make_matrix(2, 2, 3).unwrap();
                        for (coord, v) in grid.entries() {
                            assert!(state.assign(coord, v));
                        }
                        assert_eq!(verify(&state), is_csim(&grid, 3), "{grid:?}");
                    }
                }
            }
        }
    }
}
