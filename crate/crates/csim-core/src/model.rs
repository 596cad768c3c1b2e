//! Solver state: candidate grids, geometry caches, and propagation queues.
//!
//! A consistently signed intercalate matrix (CSIM) of type `(r, s, n)` is an
//! `r × s` matrix over the signed colors `±1, ..., ±n` in which colors are
//! distinct along every row and every column, a repeated color across a 2×2
//! submatrix forces the anti-diagonal of that submatrix to repeat as well,
//! and every such submatrix carries an odd number of minus signs.
//!
//! [`MatrixState`] is the solver's working representation of a partially
//! known matrix: every cell holds a [`CandidateSet`] of signed values it can
//! still take, and the state carries the bookkeeping the propagation engine
//! needs — row/column peers, the 2×2 squares through each cell, and FIFO
//! queues of pending assignments and color discoveries.

use std::collections::VecDeque;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

/// Largest supported color count; candidate sets are fixed 128-bit words,
/// two bits per color.
pub const MAX_COLORS: usize = 64;

/// Largest supported row or column count.
pub const MAX_SIDE: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },
    #[error("color count must be positive")]
    NoColors,
    #[error("color count {n} exceeds the supported maximum {MAX_COLORS}")]
    TooManyColors { n: usize },
    #[error("side length {side} exceeds the supported maximum {MAX_SIDE}")]
    SideTooLarge { side: usize },
}

/// An unsigned entry value in `1..=n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Color(u8);

impl Color {
    /// Returns `None` unless `value` lies in `1..=MAX_COLORS`.
    pub fn new(value: usize) -> Option<Color> {
        (1..=MAX_COLORS).contains(&value).then_some(Color(value as u8))
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Bit position of this color's `+` candidate; `+1` for the `-` one.
    fn pair_bit(self) -> u32 {
        (self.0 as u32 - 1) * 2
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A signed color: the atom stored in matrix cells.
///
/// The derived ordering is ascending by color with `+` before `-`, which is
/// the canonical candidate order used everywhere ties must break
/// deterministically.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedValue {
    color: Color,
    negative: bool,
}

impl SignedValue {
    pub fn new(color: Color, negative: bool) -> Self {
        SignedValue { color, negative }
    }

    pub fn plus(color: Color) -> Self {
        SignedValue { color, negative: false }
    }

    pub fn minus(color: Color) -> Self {
        SignedValue { color, negative: true }
    }

    pub fn color(self) -> Color {
        self.color
    }

    pub fn is_negative(self) -> bool {
        self.negative
    }

    /// Negation is an involution: `v.negated().negated() == v`.
    pub fn negated(self) -> Self {
        SignedValue { color: self.color, negative: !self.negative }
    }

    /// Parses a nonzero integer, e.g. `-3` is minus color 3.
    pub fn from_int(value: i64) -> Option<Self> {
        let color = Color::new(value.unsigned_abs() as usize)?;
        Some(SignedValue { color, negative: value < 0 })
    }

    pub fn to_int(self) -> i64 {
        let magnitude = self.color.get() as i64;
        if self.negative { -magnitude } else { magnitude }
    }

    fn bit(self) -> u32 {
        self.color.pair_bit() + self.negative as u32
    }

    fn from_bit(bit: u32) -> Self {
        SignedValue {
            color: Color((bit / 2) as u8 + 1),
            negative: bit % 2 == 1,
        }
    }
}

impl fmt::Display for SignedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_int())
    }
}

impl fmt::Debug for SignedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.to_int())
    }
}

/// One-based (row, column) position in the matrix.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coord {
    row: u16,
    col: u16,
}

impl Coord {
    /// Rows and columns are one-based.
    pub fn new(row: usize, col: usize) -> Self {
        assert!(row >= 1 && col >= 1, "coordinates are one-based");
        Coord { row: row as u16, col: col as u16 }
    }

    pub fn row(self) -> usize {
        self.row as usize
    }

    pub fn col(self) -> usize {
        self.col as usize
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

impl fmt::Debug for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

const EVEN_BITS: u128 = {
    let mut mask = 0u128;
    let mut i = 0;
    while i < 128 {
        mask |= 1u128 << i;
        i += 2;
    }
    mask
};

/// A set of colors, stored in the even bit positions of one word.
#[derive(Clone, Copy, PartialEq, Eq, Default)]
pub struct ColorSet(u128);

impl ColorSet {
    pub const EMPTY: ColorSet = ColorSet(0);

    pub fn contains(self, color: Color) -> bool {
        self.0 & (1u128 << color.pair_bit()) != 0
    }

    pub fn insert(&mut self, color: Color) {
        self.0 |= 1u128 << color.pair_bit();
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersection(self, other: ColorSet) -> ColorSet {
        ColorSet(self.0 & other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = Color> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let bit = bits.trailing_zeros();
            bits &= bits - 1;
            Some(Color((bit / 2) as u8 + 1))
        })
    }
}

impl fmt::Debug for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|c| c.get())).finish()
    }
}

/// The set of signed values still possible at one cell.
///
/// A cell is *assigned* once exactly one value remains, and *color-known*
/// once all remaining values share a color. The propagation rules never let
/// a set become empty: removing the last value is reported as a
/// contradiction instead of being performed.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CandidateSet(u128);

impl CandidateSet {
    /// All of `±1, ..., ±n`.
    pub fn full(n: usize) -> Self {
        debug_assert!((1..=MAX_COLORS).contains(&n));
        if n == MAX_COLORS {
            CandidateSet(u128::MAX)
        } else {
            CandidateSet((1u128 << (2 * n)) - 1)
        }
    }

    pub fn from_values(values: impl IntoIterator<Item = SignedValue>) -> Self {
        let mut bits = 0u128;
        for v in values {
            bits |= 1u128 << v.bit();
        }
        CandidateSet(bits)
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, v: SignedValue) -> bool {
        self.0 & (1u128 << v.bit()) != 0
    }

    pub(crate) fn remove(&mut self, v: SignedValue) {
        self.0 &= !(1u128 << v.bit());
    }

    /// The single remaining value, if the cell is assigned.
    pub fn assigned(self) -> Option<SignedValue> {
        (self.len() == 1).then(|| SignedValue::from_bit(self.0.trailing_zeros()))
    }

    /// The shared color, if every remaining value has the same one.
    pub fn known_color(self) -> Option<Color> {
        let colors = self.colors();
        (colors.count() == 1 && !self.is_empty())
            .then(|| Color((colors.0.trailing_zeros() / 2) as u8 + 1))
    }

    pub fn colors(self) -> ColorSet {
        ColorSet((self.0 | (self.0 >> 1)) & EVEN_BITS)
    }

    /// Smallest value in canonical order (ascending color, `+` before `-`).
    pub fn first(self) -> Option<SignedValue> {
        (!self.is_empty()).then(|| SignedValue::from_bit(self.0.trailing_zeros()))
    }

    /// Ascending canonical order.
    pub fn iter(self) -> impl Iterator<Item = SignedValue> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let bit = bits.trailing_zeros();
            bits &= bits - 1;
            Some(SignedValue::from_bit(bit))
        })
    }
}

impl fmt::Debug for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// The four corners of a 2×2 submatrix: two rows crossed with two columns.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SquareRef {
    top: u16,
    bottom: u16,
    left: u16,
    right: u16,
}

/// The three corners of a square other than a chosen one, labeled by their
/// position relative to it.
#[derive(Clone, Copy, Debug)]
pub struct SquareMates {
    pub opposite: Coord,
    pub row_mate: Coord,
    pub col_mate: Coord,
}

impl SquareRef {
    pub fn new(rows: (usize, usize), cols: (usize, usize)) -> Self {
        assert!(rows.0 != rows.1 && cols.0 != cols.1, "square rows and columns must be distinct");
        let (top, bottom) = (rows.0.min(rows.1), rows.0.max(rows.1));
        let (left, right) = (cols.0.min(cols.1), cols.0.max(cols.1));
        SquareRef {
            top: top as u16,
            bottom: bottom as u16,
            left: left as u16,
            right: right as u16,
        }
    }

    pub fn rows(self) -> (usize, usize) {
        (self.top as usize, self.bottom as usize)
    }

    pub fn cols(self) -> (usize, usize) {
        (self.left as usize, self.right as usize)
    }

    pub fn corners(self) -> [Coord; 4] {
        [
            Coord::new(self.top as usize, self.left as usize),
            Coord::new(self.top as usize, self.right as usize),
            Coord::new(self.bottom as usize, self.left as usize),
            Coord::new(self.bottom as usize, self.right as usize),
        ]
    }

    pub fn contains(self, c: Coord) -> bool {
        (c.row() == self.top as usize || c.row() == self.bottom as usize)
            && (c.col() == self.left as usize || c.col() == self.right as usize)
    }

    /// Labels the other three corners relative to `at`, which must be a corner.
    pub fn mates(self, at: Coord) -> SquareMates {
        assert!(self.contains(at), "{at} is not a corner of {self:?}");
        let other_row = if at.row() == self.top as usize { self.bottom } else { self.top };
        let other_col = if at.col() == self.left as usize { self.right } else { self.left };
        SquareMates {
            opposite: Coord::new(other_row as usize, other_col as usize),
            row_mate: Coord::new(at.row(), other_col as usize),
            col_mate: Coord::new(other_row as usize, at.col()),
        }
    }
}

/// Type parameters `(r, s, n)`: rows, columns, and color count.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Shape {
    pub rows: usize,
    pub cols: usize,
    pub colors: usize,
}

impl Shape {
    pub fn new(rows: usize, cols: usize, colors: usize) -> Result<Shape, ModelError> {
        if rows == 0 || cols == 0 {
            return Err(ModelError::EmptyShape { rows, cols });
        }
        if colors == 0 {
            return Err(ModelError::NoColors);
        }
        if colors > MAX_COLORS {
            return Err(ModelError::TooManyColors { n: colors });
        }
        let side = rows.max(cols);
        if side > MAX_SIDE {
            return Err(ModelError::SideTooLarge { side });
        }
        Ok(Shape { rows, cols, colors })
    }

    pub fn cell_count(self) -> usize {
        self.rows * self.cols
    }

    pub fn contains(self, c: Coord) -> bool {
        c.row() <= self.rows && c.col() <= self.cols
    }

    pub(crate) fn index(self, c: Coord) -> usize {
        debug_assert!(self.contains(c));
        (c.row() - 1) * self.cols + (c.col() - 1)
    }

    /// Row-major iteration over all coordinates.
    pub fn coords(self) -> impl Iterator<Item = Coord> {
        let (rows, cols) = (self.rows, self.cols);
        (1..=rows).flat_map(move |r| (1..=cols).map(move |c| Coord::new(r, c)))
    }
}

#[derive(Debug)]
pub(crate) struct Geometry {
    pub(crate) peers: Vec<Vec<Coord>>,
    pub(crate) squares: Vec<Vec<SquareRef>>,
}

fn build_geometry(shape: Shape) -> Geometry {
    let mut peers = Vec::with_capacity(shape.cell_count());
    let mut squares = Vec::with_capacity(shape.cell_count());
    for at in shape.coords() {
        let mut cell_peers = Vec::with_capacity(shape.rows + shape.cols - 2);
        for col in 1..=shape.cols {
            if col != at.col() {
                cell_peers.push(Coord::new(at.row(), col));
            }
        }
        for row in 1..=shape.rows {
            if row != at.row() {
                cell_peers.push(Coord::new(row, at.col()));
            }
        }
        let mut cell_squares = Vec::with_capacity((shape.rows - 1) * (shape.cols - 1));
        for row in 1..=shape.rows {
            if row == at.row() {
                continue;
            }
            for col in 1..=shape.cols {
                if col == at.col() {
                    continue;
                }
                cell_squares.push(SquareRef::new((at.row(), row), (at.col(), col)));
            }
        }
        peers.push(cell_peers);
        squares.push(cell_squares);
    }
    Geometry { peers, squares }
}

#[derive(Debug, Default)]
pub(crate) struct Counters {
    pub eliminations: AtomicU64,
    pub propagations: AtomicU64,
}

impl Counters {
    pub fn bump_eliminations(&self) {
        self.eliminations.fetch_add(1, Ordering::Relaxed);
    }

    pub fn bump_propagations(&self) {
        self.propagations.fetch_add(1, Ordering::Relaxed);
    }

    pub fn eliminations(&self) -> u64 {
        self.eliminations.load(Ordering::Relaxed)
    }

    pub fn propagations(&self) -> u64 {
        self.propagations.load(Ordering::Relaxed)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TraceOp {
    Assign,
    Eliminate,
}

/// What triggered an assignment or elimination, for trace output.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum TraceCause {
    #[default]
    Input,
    TestValue,
    Backtrack,
    RowColumn,
    Square,
    SquareColor,
}

impl TraceCause {
    fn label(self) -> &'static str {
        match self {
            TraceCause::Input => "input",
            TraceCause::TestValue => "test-value",
            TraceCause::Backtrack => "backtrack",
            TraceCause::RowColumn => "row-col",
            TraceCause::Square => "square",
            TraceCause::SquareColor => "square-color",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TraceEvent {
    pub op: TraceOp,
    pub coord: Coord,
    pub value: SignedValue,
    pub cause: TraceCause,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.op {
            TraceOp::Assign => "assign",
            TraceOp::Eliminate => "eliminate",
        };
        write!(f, "{op} {} {:+} [{}]", self.coord, self.value.to_int(), self.cause.label())
    }
}

#[derive(Clone, Debug, Default)]
struct TraceLog {
    cause: TraceCause,
    events: Vec<TraceEvent>,
}

/// The full solver state for one partially known matrix.
///
/// Snapshots ([`MatrixState::snapshot`]) are observably independent: the
/// candidate grid and both queues are copied, so mutating one state never
/// affects another. The geometry caches are immutable and shared.
#[derive(Clone)]
pub struct MatrixState {
    shape: Shape,
    cells: Vec<CandidateSet>,
    geometry: Arc<Geometry>,
    pub(crate) value_queue: VecDeque<(Coord, SignedValue)>,
    pub(crate) color_queue: VecDeque<(Coord, Color)>,
    pub(crate) counters: Arc<Counters>,
    trace: Option<Box<TraceLog>>,
}

/// Builds the initial state for type `(rows, cols, colors)`: every cell can
/// take any of `±1, ..., ±n`, both propagation queues are empty, and the
/// geometry caches (peers and squares per cell) are precomputed.
pub fn make_matrix(rows: usize, cols: usize, colors: usize) -> Result<MatrixState, ModelError> {
    let shape = Shape::new(rows, cols, colors)?;
    Ok(MatrixState {
        shape,
        cells: vec![CandidateSet::full(colors); shape.cell_count()],
        geometry: Arc::new(build_geometry(shape)),
        value_queue: VecDeque::new(),
        color_queue: VecDeque::new(),
        counters: Arc::new(Counters::default()),
        trace: None,
    })
}

impl MatrixState {
    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// An independent deep copy; mutations of either state never affect the
    /// other.
    pub fn snapshot(&self) -> MatrixState {
        self.clone()
    }

    pub fn candidates(&self, c: Coord) -> CandidateSet {
        self.cells[self.shape.index(c)]
    }

    pub fn assigned_value(&self, c: Coord) -> Option<SignedValue> {
        self.candidates(c).assigned()
    }

    /// All other coordinates in the same row or column.
    pub fn peers(&self, c: Coord) -> &[Coord] {
        &self.geometry.peers[self.shape.index(c)]
    }

    /// All 2×2 squares containing `c`; there are `(r-1)(s-1)` of them.
    pub fn squares_through(&self, c: Coord) -> &[SquareRef] {
        &self.geometry.squares[self.shape.index(c)]
    }

    /// A handle on the shared geometry tables, for iteration while the cell
    /// grid is being mutated.
    pub(crate) fn geometry(&self) -> Arc<Geometry> {
        Arc::clone(&self.geometry)
    }

    pub fn pending_values(&self) -> impl Iterator<Item = &(Coord, SignedValue)> {
        self.value_queue.iter()
    }

    pub fn pending_colors(&self) -> impl Iterator<Item = &(Coord, Color)> {
        self.color_queue.iter()
    }

    pub fn queues_empty(&self) -> bool {
        self.value_queue.is_empty() && self.color_queue.is_empty()
    }

    pub(crate) fn cell_mut(&mut self, c: Coord) -> &mut CandidateSet {
        let idx = self.shape.index(c);
        &mut self.cells[idx]
    }

    /// The completed grid, if every cell is assigned.
    pub fn to_grid(&self) -> Option<Grid> {
        let cells: Option<Vec<SignedValue>> =
            self.cells.iter().map(|cell| cell.assigned()).collect();
        Some(Grid::new(self.shape.rows, self.shape.cols, cells?))
    }

    /// Starts recording one trace event per assignment and elimination.
    pub fn enable_trace(&mut self) {
        if self.trace.is_none() {
            self.trace = Some(Box::default());
        }
    }

    pub fn take_trace(&mut self) -> Vec<TraceEvent> {
        self.trace.as_mut().map(|log| std::mem::take(&mut log.events)).unwrap_or_default()
    }

    pub(crate) fn set_trace_cause(&mut self, cause: TraceCause) {
        if let Some(log) = self.trace.as_mut() {
            log.cause = cause;
        }
    }

    pub(crate) fn record_trace(&mut self, op: TraceOp, coord: Coord, value: SignedValue) {
        if let Some(log) = self.trace.as_mut() {
            let cause = log.cause;
            log.events.push(TraceEvent { op, coord, value, cause });
        }
    }
}

impl fmt::Debug for MatrixState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "MatrixState ({}x{} over {} colors)",
            self.shape.rows, self.shape.cols, self.shape.colors
        )?;
        f.write_str(&crate::format::render_state(self))
    }
}

/// Semantic equality: shape, candidate sets, and queue contents in order.
impl PartialEq for MatrixState {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape
            && self.cells == other.cells
            && self.value_queue == other.value_queue
            && self.color_queue == other.color_queue
    }
}

impl Eq for MatrixState {}

/// A fully assigned signed matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<SignedValue>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, cells: Vec<SignedValue>) -> Grid {
        assert_eq!(cells.len(), rows * cols, "cell count must match the shape");
        Grid { rows, cols, cells }
    }

    /// Builds a grid from rows of nonzero integers; `None` on a zero entry
    /// or ragged rows.
    pub fn from_ints(rows: &[&[i64]]) -> Option<Grid> {
        let height = rows.len();
        let width = rows.first()?.len();
        let mut cells = Vec::with_capacity(height * width);
        for row in rows {
            if row.len() != width {
                return None;
            }
            for &v in *row {
                cells.push(SignedValue::from_int(v)?);
            }
        }
        Some(Grid::new(height, width, cells))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> SignedValue {
        assert!(row >= 1 && row <= self.rows && col >= 1 && col <= self.cols);
        self.cells[(row - 1) * self.cols + (col - 1)]
    }

    pub fn set(&mut self, row: usize, col: usize, v: SignedValue) {
        assert!(row >= 1 && row <= self.rows && col >= 1 && col <= self.cols);
        self.cells[(row - 1) * self.cols + (col - 1)] = v;
    }

    pub fn max_color(&self) -> usize {
        self.cells.iter().map(|v| v.color().get()).max().unwrap_or(0)
    }

    /// Row-major iteration.
    pub fn entries(&self) -> impl Iterator<Item = (Coord, SignedValue)> + '_ {
        self.cells.iter().enumerate().map(move |(i, &v)| {
            (Coord::new(i / self.cols + 1, i % self.cols + 1), v)
        })
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f)?;
        for row in 1..=self.rows {
            let line: Vec<String> =
                (1..=self.cols).map(|col| self.get(row, col).to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}
