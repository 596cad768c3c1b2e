//! Constraint propagation: assignment, elimination, row/column spreading,
//! and the 2×2-square signing rules, with a FIFO fixpoint loop.
//!
//! Every operation returns `true` on success and `false` on contradiction.
//! A `false` leaves the state partially mutated; the search only ever
//! propagates on disposable snapshots, so a failed state is simply dropped.
//!
//! The square rules come from the consistent-signing law. For a square with
//! corners labeled `at` (holding value `v`), `opposite` (diagonal from `at`),
//! `row_mate`, and `col_mate`, exactly one of three situations must hold in
//! any completed matrix:
//!
//! * `opposite == v` and the mates carry the same color with opposite signs,
//! * `opposite == -v` and the mates carry the same value,
//! * `opposite` and `v` differ in color, and so do the two mates.

use crate::model::{
    CandidateSet, Color, ColorSet, Coord, MatrixState, SignedValue, SquareRef, TraceCause, TraceOp,
};

impl MatrixState {
    /// Assigns `v` at `c` if possible.
    ///
    /// Returns `true` with no change if the cell already holds exactly `v`,
    /// `false` with no change if `v` is not among the cell's candidates, and
    /// otherwise narrows the cell to `{v}` and queues the assignment for
    /// propagation.
    pub fn assign(&mut self, c: Coord, v: SignedValue) -> bool {
        self.check_target(c, v);
        let cell = self.candidates(c);
        if cell.assigned() == Some(v) {
            return true;
        }
        if !cell.contains(v) {
            return false;
        }
        *self.cell_mut(c) = CandidateSet::from_values([v]);
        self.value_queue.push_back((c, v));
        self.record_trace(TraceOp::Assign, c, v);
        true
    }

    /// Removes `v` from the candidates at `c` if possible.
    ///
    /// Returns `false` when the cell is already assigned exactly `v` (the
    /// elimination would empty it). Removing the second-to-last value queues
    /// the induced assignment; reducing a cell to two values of one color
    /// queues the color discovery.
    pub fn eliminate(&mut self, c: Coord, v: SignedValue) -> bool {
        self.check_target(c, v);
        let cell = self.candidates(c);
        if let Some(known) = cell.assigned() {
            return known != v;
        }
        if !cell.contains(v) {
            return true;
        }
        let mut reduced = cell;
        reduced.remove(v);
        *self.cell_mut(c) = reduced;
        self.counters.bump_eliminations();
        self.record_trace(TraceOp::Eliminate, c, v);
        if let Some(last) = reduced.assigned() {
            self.value_queue.push_back((c, last));
            self.record_trace(TraceOp::Assign, c, last);
            return true;
        }
        if let Some(color) = reduced.known_color() {
            self.color_queue.push_back((c, color));
        }
        true
    }

    /// Removes both signs of `color` from every peer of `c`.
    pub fn propagate_rows_and_columns(&mut self, c: Coord, color: Color) -> bool {
        self.set_trace_cause(TraceCause::RowColumn);
        let geometry = self.geometry();
        let idx = self.shape().index(c);
        for &peer in &geometry.peers[idx] {
            if !self.eliminate(peer, SignedValue::plus(color)) {
                return false;
            }
            if !self.eliminate(peer, SignedValue::minus(color)) {
                return false;
            }
        }
        true
    }

    /// Applies the signing law to one square, given that `at` holds `v`.
    pub fn propagate_square(&mut self, at: Coord, v: SignedValue, square: SquareRef) -> bool {
        self.set_trace_cause(TraceCause::Square);
        let mates = square.mates(at);
        let opposite = self.candidates(mates.opposite);

        if opposite.assigned() == Some(v) {
            return self.require_same_color_opposite_signs(mates.row_mate, mates.col_mate);
        }
        if opposite.assigned() == Some(v.negated()) {
            return self.require_same_value(mates.row_mate, mates.col_mate);
        }
        if opposite.known_color() == Some(v.color())
            && !self.require_same_color(mates.row_mate, mates.col_mate)
        {
            return false;
        }
        if !opposite.colors().contains(v.color())
            && !self.require_different_colors(mates.row_mate, mates.col_mate)
        {
            return false;
        }

        let row_mate = self.candidates(mates.row_mate);
        let col_mate = self.candidates(mates.col_mate);
        if let (Some(a), Some(b)) = (row_mate.assigned(), col_mate.assigned()) {
            if a == b {
                return self.assign(mates.opposite, v.negated());
            }
            if a == b.negated() {
                return self.assign(mates.opposite, v);
            }
        }
        match (row_mate.known_color(), col_mate.known_color()) {
            (Some(a), Some(b)) if a == b => {
                let mut only_v = ColorSet::EMPTY;
                only_v.insert(v.color());
                return self.restrict_to_colors(mates.opposite, only_v);
            }
            _ => {}
        }
        if row_mate.colors().intersection(col_mate.colors()).is_empty() {
            return self.eliminate(mates.opposite, v) && self.eliminate(mates.opposite, v.negated());
        }

        // Mixed knowledge: rule out mate pairings the opposite corner can no
        // longer support.
        let opposite = self.candidates(mates.opposite);
        if !opposite.contains(v) {
            // The mates cannot carry the same color with opposite signs.
            if let Some(a) = row_mate.assigned() {
                if !self.eliminate(mates.col_mate, a.negated()) {
                    return false;
                }
            }
            if let Some(b) = col_mate.assigned() {
                if !self.eliminate(mates.row_mate, b.negated()) {
                    return false;
                }
            }
        }
        if !opposite.contains(v.negated()) {
            // The mates cannot carry the same value.
            if let Some(a) = row_mate.assigned() {
                if !self.eliminate(mates.col_mate, a) {
                    return false;
                }
            }
            if let Some(b) = col_mate.assigned() {
                if !self.eliminate(mates.row_mate, b) {
                    return false;
                }
            }
        }
        true
    }

    /// Applies [`MatrixState::propagate_square`] over every square through `at`.
    pub fn propagate_squares(&mut self, at: Coord, v: SignedValue) -> bool {
        let geometry = self.geometry();
        let idx = self.shape().index(at);
        for &square in &geometry.squares[idx] {
            if !self.propagate_square(at, v, square) {
                return false;
            }
        }
        true
    }

    /// Spreads color-only knowledge (`at` is `±color`) through every square
    /// containing `at`.
    pub fn propagate_squares_color(&mut self, at: Coord, color: Color) -> bool {
        self.set_trace_cause(TraceCause::SquareColor);
        let geometry = self.geometry();
        let idx = self.shape().index(at);
        for &square in &geometry.squares[idx] {
            let mates = square.mates(at);
            let opposite = self.candidates(mates.opposite);
            if opposite.known_color() == Some(color) {
                if !self.require_same_color(mates.row_mate, mates.col_mate) {
                    return false;
                }
                continue;
            }
            if !opposite.colors().contains(color) {
                if !self.require_different_colors(mates.row_mate, mates.col_mate) {
                    return false;
                }
                continue;
            }
            let row_mate = self.candidates(mates.row_mate);
            let col_mate = self.candidates(mates.col_mate);
            match (row_mate.known_color(), col_mate.known_color()) {
                (Some(a), Some(b)) if a == b => {
                    let mut only = ColorSet::EMPTY;
                    only.insert(color);
                    if !self.restrict_to_colors(mates.opposite, only) {
                        return false;
                    }
                }
                _ => {}
            }
            if row_mate.colors().intersection(col_mate.colors()).is_empty() {
                if !self.eliminate(mates.opposite, SignedValue::plus(color)) {
                    return false;
                }
                if !self.eliminate(mates.opposite, SignedValue::minus(color)) {
                    return false;
                }
            }
        }
        true
    }

    /// Runs all queued propagation to a fixpoint.
    ///
    /// Pending assignments are drained first; after each one, any pending
    /// color discoveries are drained before the next assignment. On `true`
    /// the state is a propagation fixpoint with both queues empty; on
    /// `false` a contradiction was found and the state is dead.
    pub fn propagate(&mut self) -> bool {
        loop {
            if let Some((c, v)) = self.pop_value_event() {
                if !self.propagate_rows_and_columns(c, v.color()) {
                    return false;
                }
                if !self.propagate_squares(c, v) {
                    return false;
                }
                while let Some((c, color)) = self.pop_color_event() {
                    if !self.propagate_rows_and_columns(c, color) {
                        return false;
                    }
                    if !self.propagate_squares_color(c, color) {
                        return false;
                    }
                }
            } else if let Some((c, color)) = self.pop_color_event() {
                if !self.propagate_rows_and_columns(c, color) {
                    return false;
                }
                if !self.propagate_squares_color(c, color) {
                    return false;
                }
            } else {
                return true;
            }
        }
    }

    /// Pops the next pending assignment; part of the stepping interface used
    /// by trace tooling and tests.
    pub fn pop_value_event(&mut self) -> Option<(Coord, SignedValue)> {
        let item = self.value_queue.pop_front();
        if item.is_some() {
            self.counters.bump_propagations();
        }
        item
    }

    /// Pops the next pending color discovery.
    pub fn pop_color_event(&mut self) -> Option<(Coord, Color)> {
        let item = self.color_queue.pop_front();
        if item.is_some() {
            self.counters.bump_propagations();
        }
        item
    }

    /// Restricts both cells to the colors they can share.
    fn require_same_color(&mut self, a: Coord, b: Coord) -> bool {
        let shared = self.candidates(a).colors().intersection(self.candidates(b).colors());
        self.restrict_to_colors(a, shared) && self.restrict_to_colors(b, shared)
    }

    /// The cells must hold the same signed value.
    fn require_same_value(&mut self, a: Coord, b: Coord) -> bool {
        if !self.require_same_color(a, b) {
            return false;
        }
        if let Some(v) = self.candidates(a).assigned() {
            if !self.eliminate(b, v.negated()) {
                return false;
            }
        }
        if let Some(v) = self.candidates(b).assigned() {
            if !self.eliminate(a, v.negated()) {
                return false;
            }
        }
        true
    }

    /// The cells must hold the same color with opposite signs.
    fn require_same_color_opposite_signs(&mut self, a: Coord, b: Coord) -> bool {
        if !self.require_same_color(a, b) {
            return false;
        }
        if let Some(v) = self.candidates(a).assigned() {
            if !self.eliminate(b, v) {
                return false;
            }
        }
        if let Some(v) = self.candidates(b).assigned() {
            if !self.eliminate(a, v) {
                return false;
            }
        }
        true
    }

    /// The cells must end up with different colors; enforceable only once one
    /// side's color is pinned down.
    fn require_different_colors(&mut self, a: Coord, b: Coord) -> bool {
        if let Some(color) = self.candidates(a).known_color() {
            if !self.eliminate(b, SignedValue::plus(color)) {
                return false;
            }
            if !self.eliminate(b, SignedValue::minus(color)) {
                return false;
            }
        }
        if let Some(color) = self.candidates(b).known_color() {
            if !self.eliminate(a, SignedValue::plus(color)) {
                return false;
            }
            if !self.eliminate(a, SignedValue::minus(color)) {
                return false;
            }
        }
        true
    }

    /// Eliminates every candidate at `c` whose color falls outside `allowed`.
    fn restrict_to_colors(&mut self, c: Coord, allowed: ColorSet) -> bool {
        for v in self.candidates(c).iter() {
            if !allowed.contains(v.color()) && !self.eliminate(c, v) {
                return false;
            }
        }
        true
    }

    fn check_target(&self, c: Coord, v: SignedValue) {
        assert!(self.shape().contains(c), "{c} is outside the {:?} grid", self.shape());
        assert!(
            v.color().get() <= self.shape().colors,
            "color {} exceeds the {} colors of this matrix",
            v.color(),
            self.shape().colors
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_matrix;

    fn sv(v: i64) -> SignedValue {
        SignedValue::from_int(v).unwrap()
    }

    fn color(c: usize) -> Color {
        Color::new(c).unwrap()
    }

    fn at(row: usize, col: usize) -> Coord {
        Coord::new(row, col)
    }

    /// 4×4 state with the first row assigned 1..4 and propagated.
    fn walkthrough_input() -> MatrixState {
        let mut state = make_matrix(4, 4, 4).unwrap();
        for col in 1..=4 {
            assert!(state.assign(at(1, col), sv(col as i64)));
        }
        assert!(state.propagate());
        state
    }

    #[test]
    fn assign_on_walkthrough_input() {
        let mut state = walkthrough_input();
        assert!(state.assign(at(2, 1), sv(2)));
        assert_eq!(state.candidates(at(2, 1)).assigned(), Some(sv(2)));
    }

    #[test]
    fn assign_is_idempotent() {
        let mut state = make_matrix(2, 2, 2).unwrap();
        assert!(state.assign(at(1, 1), sv(1)));
        let queued: Vec<_> = state.pending_values().cloned().collect();
        assert!(state.assign(at(1, 1), sv(1)));
        let queued_after: Vec<_> = state.pending_values().cloned().collect();
        assert_eq!(queued, queued_after);
    }

    #[test]
    fn assign_fails_after_both_signs_eliminated() {
        let mut state = make_matrix(2, 2, 3).unwrap();
        assert!(state.eliminate(at(1, 1), sv(1)));
        assert!(state.eliminate(at(1, 1), sv(-1)));
        assert!(!state.assign(at(1, 1), sv(1)));
    }

    #[test]
    fn eliminate_absent_value_is_a_noop() {
        let mut state = make_matrix(1, 1, 4).unwrap();
        // Shrink to {+4, -4, +1}.
        for v in [-1i64, 2, -2, 3, -3] {
            assert!(state.eliminate(at(1, 1), sv(v)));
        }
        let before = state.candidates(at(1, 1));
        assert!(state.eliminate(at(1, 1), sv(-1)));
        assert_eq!(state.candidates(at(1, 1)), before);
    }

    #[test]
    fn eliminate_to_color_pair_queues_color() {
        let mut state = make_matrix(1, 1, 4).unwrap();
        // Shrink to {+4, -4, +2}, then eliminate +2.
        for v in [1i64, -1, -2, 3, -3] {
            assert!(state.eliminate(at(1, 1), sv(v)));
        }
        assert!(state.pending_colors().next().is_none());
        assert!(state.eliminate(at(1, 1), sv(2)));
        let colors: Vec<_> = state.pending_colors().cloned().collect();
        assert_eq!(colors, vec![(at(1, 1), color(4))]);
    }

    #[test]
    fn eliminate_assigned_value_is_a_contradiction() {
        let mut state = make_matrix(1, 1, 2).unwrap();
        assert!(state.assign(at(1, 1), sv(2)));
        assert!(!state.eliminate(at(1, 1), sv(2)));
        assert!(state.eliminate(at(1, 1), sv(-2)));
    }

    #[test]
    fn rows_and_columns_spread_from_assignment() {
        let mut state = walkthrough_input();
        assert!(state.assign(at(2, 1), sv(2)));
        let (c, v) = state.pop_value_event().unwrap();
        assert_eq!((c, v), (at(2, 1), sv(2)));
        assert!(state.propagate_rows_and_columns(c, v.color()));
        for peer in [at(2, 2), at(2, 3), at(2, 4), at(3, 1), at(4, 1)] {
            assert!(!state.candidates(peer).colors().contains(color(2)), "{peer}");
        }
    }

    #[test]
    fn color_knowledge_spreads_along_column() {
        let mut state = make_matrix(3, 3, 4).unwrap();
        // Make (1,1) color-known as ±4 by hand.
        for v in [1i64, -1, 2, -2, 3, -3] {
            assert!(state.eliminate(at(1, 1), sv(v)));
        }
        let (c, col4) = state.pop_color_event().unwrap();
        assert_eq!((c, col4), (at(1, 1), color(4)));
        assert!(state.propagate_rows_and_columns(c, col4));
        for peer in [at(2, 1), at(3, 1), at(1, 2), at(1, 3)] {
            assert!(!state.candidates(peer).colors().contains(color(4)));
        }
    }

    #[test]
    fn square_forces_opposite_of_equal_mates() {
        // Upper-left square with (1,1)=+1, (1,2)=+2, (2,1)=+2 forces (2,2)=-1.
        let mut state = make_matrix(2, 2, 4).unwrap();
        assert!(state.assign(at(1, 1), sv(1)));
        assert!(state.assign(at(1, 2), sv(2)));
        assert!(state.assign(at(2, 1), sv(2)));
        let square = SquareRef::new((1, 2), (1, 2));
        assert!(state.propagate_square(at(2, 1), sv(2), square));
        assert_eq!(state.candidates(at(2, 2)).assigned(), Some(sv(-1)));
    }

    #[test]
    fn square_with_negated_opposite_forces_equal_mates() {
        let mut state = make_matrix(2, 2, 4).unwrap();
        assert!(state.assign(at(1, 1), sv(1)));
        assert!(state.assign(at(2, 2), sv(-1)));
        assert!(state.assign(at(1, 2), sv(3)));
        let square = SquareRef::new((1, 2), (1, 2));
        assert!(state.propagate_square(at(1, 1), sv(1), square));
        assert_eq!(state.candidates(at(2, 1)).assigned(), Some(sv(3)));
    }

    #[test]
    fn square_with_different_colored_mates_clears_opposite() {
        let mut state = make_matrix(2, 2, 4).unwrap();
        assert!(state.assign(at(1, 1), sv(1)));
        assert!(state.assign(at(1, 2), sv(3)));
        assert!(state.assign(at(2, 1), sv(4)));
        let square = SquareRef::new((1, 2), (1, 2));
        assert!(state.propagate_square(at(1, 1), sv(1), square));
        assert!(!state.candidates(at(2, 2)).colors().contains(color(1)));
    }

    #[test]
    fn squares_with_unknown_mates_change_nothing() {
        let mut state = make_matrix(3, 3, 4).unwrap();
        assert!(state.assign(at(1, 1), sv(1)));
        let before = state.snapshot();
        assert!(state.propagate_squares(at(1, 1), sv(1)));
        assert_eq!(state, before);
    }

    #[test]
    fn squares_short_circuit_on_failure() {
        let mut state = make_matrix(2, 3, 2).unwrap();
        assert!(state.assign(at(1, 1), sv(1)));
        assert!(state.assign(at(1, 2), sv(2)));
        assert!(state.assign(at(2, 1), sv(2)));
        assert!(state.assign(at(2, 2), sv(1)));
        // The (1,2)x(1,2) square needs (2,2) = -1, but it is pinned to +1.
        assert!(!state.propagate_squares(at(2, 1), sv(2)));
    }

    #[test]
    fn color_square_rule_separates_colors() {
        // opposite known to differ in color; assigned row mate forces the
        // column mate to drop that color.
        let mut state = make_matrix(2, 2, 4).unwrap();
        for v in [1i64, -1, 2, -2, 3, -3] {
            assert!(state.eliminate(at(1, 1), sv(v))); // (1,1) = ±4
        }
        for v in [4i64, -4] {
            assert!(state.eliminate(at(2, 2), sv(v))); // opposite can't be 4
        }
        assert!(state.assign(at(1, 2), sv(2)));
        assert!(state.propagate_squares_color(at(1, 1), color(4)));
        assert!(!state.candidates(at(2, 1)).colors().contains(color(2)));
    }

    #[test]
    fn propagate_on_empty_queues_is_a_noop() {
        let mut state = make_matrix(3, 3, 3).unwrap();
        let before = state.snapshot();
        assert!(state.propagate());
        assert_eq!(state, before);
    }

    #[test]
    fn propagation_is_monotone() {
        let mut state = walkthrough_input();
        assert!(state.assign(at(2, 1), sv(2)));
        let before = state.snapshot();
        assert!(state.propagate());
        for c in state.shape().coords() {
            let old = before.candidates(c);
            let new = state.candidates(c);
            for v in new.iter() {
                assert!(old.contains(v), "candidate {v:?} appeared at {c}");
            }
        }
    }
}
