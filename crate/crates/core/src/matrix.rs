//! Communication matrices for the (monotone) Karchmer-Wigderson game, with
//! cells stored as index bit sets and row-major 1-based cell serials.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::bool_fn::{BitVector, BooleanFunction};
use crate::error::{Error, Result};

/// Maximum number of cells for a full-restriction matrix.
pub const FULL_CELL_CAP: usize = 10_000_000;

/// A set of variable indices `1..=n`, stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(u32);

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet(0)
    }

    pub fn single(i: u32) -> Self {
        IndexSet(1 << (i - 1))
    }

    pub fn insert(&mut self, i: u32) {
        self.0 |= 1 << (i - 1);
    }

    pub fn contains(&self, i: u32) -> bool {
        self.0 >> (i - 1) & 1 == 1
    }

    pub fn len(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_singleton(&self) -> bool {
        self.0 != 0 && self.0 & (self.0 - 1) == 0
    }

    /// The sole index of a singleton cell.
    pub fn sole(&self) -> Option<u32> {
        self.is_singleton().then(|| self.0.trailing_zeros() + 1)
    }

    pub fn intersection(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0 & other.0)
    }

    /// Indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        (1..=32).filter(move |&i| self.contains(i))
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in self.iter() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    General,
    Monotone,
}

/// Row/column selection for [`build_matrix`].
#[derive(Debug, Clone)]
pub enum Restriction {
    /// All one-points against all zero-points.
    Full,
    /// Minterms against maxterms (monotone functions only).
    Terms,
    /// Caller-provided rows and columns; every cell must be nonempty.
    Explicit { rows: Vec<BitVector>, cols: Vec<BitVector> },
}

/// 1-based row-major cell address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellRef(pub usize);

impl CellRef {
    pub fn from_row_col(row: usize, col: usize, ncols: usize) -> Self {
        CellRef(row * ncols + col + 1)
    }

    /// 0-based (row, col), given the matrix width.
    pub fn row_col(&self, ncols: usize) -> (usize, usize) {
        ((self.0 - 1) / ncols, (self.0 - 1) % ncols)
    }
}

/// A communication matrix: rows are one-side assignments, columns zero-side,
/// each cell the set of valid answers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommMatrix {
    mode: Mode,
    n: u32,
    rows: Vec<BitVector>,
    cols: Vec<BitVector>,
    cells: Vec<IndexSet>,
    provenance: String,
}

impl CommMatrix {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn ncells(&self) -> usize {
        self.cells.len()
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn cols(&self) -> &[BitVector] {
        &self.cols
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn cell(&self, row: usize, col: usize) -> IndexSet {
        self.cells[row * self.cols.len() + col]
    }

    pub fn cell_at(&self, cell: CellRef) -> IndexSet {
        self.cells[cell.0 - 1]
    }

    pub fn serial(&self, row: usize, col: usize) -> CellRef {
        CellRef::from_row_col(row, col, self.cols.len())
    }

    /// Indices that occur in at least one cell, ascending.
    pub fn colors_present(&self) -> Vec<u32> {
        (1..=self.n).filter(|&i| self.cells.iter().any(|c| c.contains(i))).collect()
    }

    /// All singleton cells with their sole index, in row-major order.
    pub fn singleton_cells(&self) -> Vec<(CellRef, u32)> {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.sole().map(|idx| (CellRef(i + 1), idx)))
            .collect()
    }

    /// Construct from explicit parts, validating that no cell is empty.
    pub fn from_parts(
        mode: Mode,
        n: u32,
        rows: Vec<BitVector>,
        cols: Vec<BitVector>,
        provenance: String,
    ) -> Result<Self> {
        let mut cells = Vec::with_capacity(rows.len() * cols.len());
        for (ri, x) in rows.iter().enumerate() {
            for (ci, y) in cols.iter().enumerate() {
                let cell = cell_indices(mode, n, x, y);
                if cell.is_empty() {
                    return Err(Error::EmptyCell { row: ri, col: ci });
                }
                cells.push(cell);
            }
        }
        Ok(CommMatrix { mode, n, rows, cols, cells, provenance })
    }

    /// Restrict to the given 0-based row/col selections, keeping their order.
    pub fn restrict(&self, rows: &[usize], cols: &[usize], provenance: String) -> Result<Self> {
        let sel_rows: Vec<BitVector> = rows.iter().map(|&r| self.rows[r]).collect();
        let sel_cols: Vec<BitVector> = cols.iter().map(|&c| self.cols[c]).collect();
        CommMatrix::from_parts(self.mode, self.n, sel_rows, sel_cols, provenance)
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            mode: self.mode,
            n: self.n,
            provenance: Some(self.provenance.clone()),
            rows: self.rows.iter().map(|r| r.to_string()).collect(),
            cols: self.cols.iter().map(|c| c.to_string()).collect(),
            cells: (0..self.nrows())
                .map(|r| (0..self.ncols()).map(|c| self.cell(r, c).to_vec()).collect())
                .collect(),
        }
    }

    pub fn from_json(j: &MatrixJson) -> Result<Self> {
        let rows = j.rows.iter().map(|s| BitVector::parse(s)).collect::<Result<Vec<_>>>()?;
        let cols = j.cols.iter().map(|s| BitVector::parse(s)).collect::<Result<Vec<_>>>()?;
        let m = CommMatrix::from_parts(
            j.mode,
            j.n,
            rows,
            cols,
            j.provenance.clone().unwrap_or_default(),
        )?;
        // imported cells must agree with the recomputed ones
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let got = j
                    .cells
                    .get(r)
                    .and_then(|row| row.get(c))
                    .ok_or_else(|| Error::Parse("cells array shape mismatch".into()))?;
                if *got != m.cell(r, c).to_vec() {
                    return Err(Error::Parse(format!(
                        "cell ({r},{c}) disagrees with mode-derived indices"
                    )));
                }
            }
        }
        Ok(m)
    }

    /// CSV dump mirroring the figure layout: header of column bitstrings,
    /// then one row per minterm with cells as comma-joined indices.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("row");
        for c in &self.cols {
            out.push_str(&format!(",{c}"));
        }
        out.push('\n');
        for (ri, r) in self.rows.iter().enumerate() {
            out.push_str(&r.to_string());
            for ci in 0..self.cols.len() {
                out.push_str(&format!(",\"{}\"", self.cell(ri, ci)));
            }
            out.push('\n');
        }
        out
    }
}

/// JSON form of a matrix; bitstrings print variable 1 leftmost.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub mode: Mode,
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub cells: Vec<Vec<Vec<u32>>>,
}

fn cell_indices(mode: Mode, n: u32, x: &BitVector, y: &BitVector) -> IndexSet {
    let mut set = IndexSet::empty();
    for i in 1..=n {
        let keep = match mode {
            Mode::General => x.get(i) != y.get(i),
            Mode::Monotone => x.get(i) && !y.get(i),
        };
        if keep {
            set.insert(i);
        }
    }
    set
}

/// Build the communication matrix of `f` under the given mode and restriction.
/// Rows and columns are sorted by encoding unless explicitly provided.
pub fn build_matrix(f: &BooleanFunction, mode: Mode, restriction: Restriction) -> Result<CommMatrix> {
    let n = f.n();
    let (rows, cols, label) = match restriction {
        Restriction::Full => {
            let mut rows = Vec::new();
            let mut cols = Vec::new();
            for a in 0..(1u32 << n) {
                if f.evaluate_bits(a) {
                    rows.push(BitVector::new(n, a));
                } else {
                    cols.push(BitVector::new(n, a));
                }
            }
            if rows.len().saturating_mul(cols.len()) > FULL_CELL_CAP {
                return Err(Error::SizeCap(format!(
                    "full matrix would have {} cells",
                    rows.len() * cols.len()
                )));
            }
            (rows, cols, "full")
        }
        Restriction::Terms => {
            let mins = f.minterms()?;
            let maxs = f.maxterms()?;
            (mins.terms, maxs.terms, "terms")
        }
        Restriction::Explicit { rows, cols } => {
            for v in rows.iter().chain(cols.iter()) {
                if v.n() != n {
                    return Err(Error::ArityMismatch { expected: n, got: v.n() });
                }
            }
            (rows, cols, "explicit")
        }
    };
    CommMatrix::from_parts(mode, n, rows, cols, format!("{label} n={n}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bool_fn::maj;

    fn fig1() -> CommMatrix {
        build_matrix(&maj(3).unwrap(), Mode::General, Restriction::Terms).unwrap()
    }

    #[test]
    fn maj3_general_terms_matches_figure() {
        let m = fig1();
        assert_eq!(m.nrows(), 3);
        assert_eq!(m.ncols(), 3);
        let rows: Vec<String> = m.rows().iter().map(|r| r.to_string()).collect();
        let cols: Vec<String> = m.cols().iter().map(|c| c.to_string()).collect();
        assert_eq!(rows, ["110", "101", "011"]);
        assert_eq!(cols, ["100", "010", "001"]);
        let expect = [
            ["2", "1", "1,2,3"],
            ["3", "1,2,3", "1"],
            ["1,2,3", "3", "2"],
        ];
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(m.cell(r, c).to_string(), expect[r][c]);
            }
        }
    }

    #[test]
    fn maj3_monotone_cells() {
        let m = build_matrix(&maj(3).unwrap(), Mode::Monotone, Restriction::Terms).unwrap();
        assert_eq!(m.cell(0, 2).to_string(), "1,2"); // (110, 001)
        assert_eq!(m.cell(0, 0).to_string(), "2");
    }

    #[test]
    fn fig1_singletons() {
        let m = fig1();
        let singles = m.singleton_cells();
        let serials: Vec<usize> = singles.iter().map(|(c, _)| c.0).collect();
        assert_eq!(serials, [1, 2, 4, 6, 8, 9]);
    }

    #[test]
    fn maj5_singleton_census() {
        let m = build_matrix(&maj(5).unwrap(), Mode::General, Restriction::Terms).unwrap();
        assert_eq!(m.nrows(), 10);
        assert_eq!(m.ncols(), 10);
        // (l+1) * m singleton cells at l = 2
        assert_eq!(m.singleton_cells().len(), 30);
    }

    #[test]
    fn maj_three_index_cell_census() {
        // cells with exactly 3 indices number l^2 (l+1) m / 2
        for l in [2u32, 3] {
            let m = build_matrix(&maj(2 * l + 1).unwrap(), Mode::General, Restriction::Terms)
                .unwrap();
            let count = (0..m.nrows())
                .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
                .filter(|&(r, c)| m.cell(r, c).len() == 3)
                .count();
            let mm = m.nrows();
            assert_eq!(count, (l * l * (l + 1)) as usize * mm / 2);
        }
    }

    #[test]
    fn explicit_empty_cell_rejected() {
        // x == y would yield an empty general-mode cell
        let x = BitVector::parse("110").unwrap();
        let err = build_matrix(
            &maj(3).unwrap(),
            Mode::General,
            Restriction::Explicit { rows: vec![x], cols: vec![x] },
        );
        assert!(matches!(err, Err(Error::EmptyCell { .. })));
    }

    #[test]
    fn serial_round_trip() {
        let m = fig1();
        for r in 0..3 {
            for c in 0..3 {
                let s = m.serial(r, c);
                assert_eq!(s.row_col(m.ncols()), (r, c));
            }
        }
        assert_eq!(m.serial(0, 0), CellRef(1));
        assert_eq!(m.serial(2, 2), CellRef(9));
    }

    #[test]
    fn json_round_trip() {
        let m = fig1();
        let js = serde_json::to_string(&m.to_json()).unwrap();
        let back = CommMatrix::from_json(&serde_json::from_str(&js).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn csv_mirrors_figure() {
        let m = fig1();
        let csv = m.to_csv();
        let first_data_line = csv.lines().nth(1).unwrap();
        assert_eq!(first_data_line, "110,\"2\",\"1\",\"1,2,3\"");
    }
}
