//! Monochromatic combinatorial rectangles over a communication matrix.
//!
//! Row and column sets are 64-bit masks, which covers every matrix this crate
//! searches (the largest is 35x35). Rectangles are always stored in product
//! form, so the closure property (containing two cells implies containing
//! both mixed corners) holds by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{CellRef, CommMatrix};

pub const MAX_RECT_DIM: usize = 64;

/// A combinatorial rectangle with a color index: row set x col set, all of
/// whose cells must contain the color for it to be monochromatic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rect {
    pub rows: u64,
    pub cols: u64,
    pub color: u32,
}

impl Rect {
    pub fn new(rows: u64, cols: u64, color: u32) -> Self {
        debug_assert!(rows != 0 && cols != 0, "rectangle sides must be nonempty");
        Rect { rows, cols, color }
    }

    pub fn single(row: usize, col: usize, color: u32) -> Self {
        Rect { rows: 1 << row, cols: 1 << col, color }
    }

    pub fn row_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |i| self.rows >> i & 1 == 1)
    }

    pub fn col_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..64).filter(move |i| self.cols >> i & 1 == 1)
    }

    pub fn contains_cell(&self, row: usize, col: usize) -> bool {
        self.rows >> row & 1 == 1 && self.cols >> col & 1 == 1
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.rows & !self.rows == 0 && other.cols & !self.cols == 0
    }

    pub fn area(&self) -> u32 {
        self.rows.count_ones() * self.cols.count_ones()
    }

    /// Cells in row-major order.
    pub fn cells<'a>(&'a self, m: &'a CommMatrix) -> impl Iterator<Item = CellRef> + 'a {
        let ncols = m.ncols();
        self.row_indices()
            .flat_map(move |r| self.col_indices().map(move |c| CellRef::from_row_col(r, c, ncols)))
    }

    pub fn to_json(&self) -> RectJson {
        RectJson {
            color: self.color,
            rows: self.row_indices().map(|r| r + 1).collect(),
            cols: self.col_indices().map(|c| c + 1).collect(),
        }
    }
}

/// JSON form with 1-based row/col numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RectJson {
    pub color: u32,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl RectJson {
    pub fn to_rect(&self) -> Result<Rect> {
        let mut rows = 0u64;
        let mut cols = 0u64;
        for &r in &self.rows {
            if r == 0 || r > MAX_RECT_DIM {
                return Err(Error::OutOfRange("rect row", r.to_string()));
            }
            rows |= 1 << (r - 1);
        }
        for &c in &self.cols {
            if c == 0 || c > MAX_RECT_DIM {
                return Err(Error::OutOfRange("rect col", c.to_string()));
            }
            cols |= 1 << (c - 1);
        }
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidSpec("rectangle sides must be nonempty".into()));
        }
        Ok(Rect { rows, cols, color: self.color })
    }
}

fn check_dims(m: &CommMatrix) -> Result<()> {
    if m.nrows() > MAX_RECT_DIM || m.ncols() > MAX_RECT_DIM {
        return Err(Error::SizeCap(format!(
            "rectangle operations support up to {MAX_RECT_DIM} rows/cols, matrix is {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Does every covered cell contain the rectangle's color?
pub fn is_monochromatic(m: &CommMatrix, rect: &Rect) -> bool {
    rect.row_indices()
        .all(|r| rect.col_indices().all(|c| m.cell(r, c).contains(rect.color)))
}

/// Smallest rectangle spanning the given cells, together with a color making
/// it monochromatic, if any. The span is rows(cells) x cols(cells); a color
/// works iff it lies in every spanned cell.
pub fn rect_closure_check(m: &CommMatrix, cells: &[CellRef]) -> Option<Rect> {
    if cells.is_empty() || m.nrows() > MAX_RECT_DIM || m.ncols() > MAX_RECT_DIM {
        return None;
    }
    let mut rows = 0u64;
    let mut cols = 0u64;
    for cell in cells {
        let (r, c) = cell.row_col(m.ncols());
        rows |= 1 << r;
        cols |= 1 << c;
    }
    let mut common = None;
    for r in 0..m.nrows() {
        if rows >> r & 1 == 0 {
            continue;
        }
        for c in 0..m.ncols() {
            if cols >> c & 1 == 0 {
                continue;
            }
            let cell = m.cell(r, c);
            common = Some(match common {
                None => cell,
                Some(acc) => cell.intersection(&acc),
            });
        }
    }
    let color = common?.iter().next()?;
    Some(Rect { rows, cols, color })
}

/// Do two rectangles share at least one cell?
pub fn rects_intersect(a: &Rect, b: &Rect) -> bool {
    a.rows & b.rows != 0 && a.cols & b.cols != 0
}

/// Per-color admissibility: `admissible[r]` is the mask of columns whose cell
/// at row `r` contains the color.
#[derive(Debug, Clone)]
pub struct ColorRegion {
    pub color: u32,
    pub rows: Vec<usize>,
    pub admissible: Vec<u64>,
}

impl ColorRegion {
    pub fn build(m: &CommMatrix, color: u32) -> Self {
        let mut rows = Vec::new();
        let mut admissible = Vec::new();
        for r in 0..m.nrows() {
            let mut mask = 0u64;
            for c in 0..m.ncols() {
                if m.cell(r, c).contains(color) {
                    mask |= 1 << c;
                }
            }
            if mask != 0 {
                rows.push(r);
                admissible.push(mask);
            }
        }
        ColorRegion { color, rows, admissible }
    }

    /// Split region rows into connected components of the bipartite
    /// admissibility graph; rectangles never span two components.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let k = self.rows.len();
        let mut seen = vec![false; k];
        let mut out = Vec::new();
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            let mut cols = self.admissible[start];
            seen[start] = true;
            loop {
                let mut grew = false;
                for i in 0..k {
                    if !seen[i] && self.admissible[i] & cols != 0 {
                        seen[i] = true;
                        cols |= self.admissible[i];
                        comp.push(i);
                        grew = true;
                    }
                }
                if !grew {
                    break;
                }
            }
            out.push(comp);
        }
        out
    }
}

/// Every monochromatic rectangle of the matrix, each exactly once, ordered by
/// (color, rows, cols). Fails when the count would exceed `cap`.
pub fn enumerate_all_mono_rects(m: &CommMatrix, cap: usize) -> Result<Vec<Rect>> {
    check_dims(m)?;
    let mut out: Vec<Rect> = Vec::new();
    for color in 1..=m.n() {
        let region = ColorRegion::build(m, color);
        let k = region.rows.len();
        if k == 0 {
            continue;
        }
        // DFS over row subsets, pruning when the admissible column set dies
        let mut stack: Vec<(usize, u64, u64)> = vec![(0, 0, u64::MAX)];
        while let Some((i, rows, cols)) = stack.pop() {
            if i == k {
                if rows != 0 {
                    // all nonempty subsets of the admissible columns
                    let mut sub = cols;
                    while sub != 0 {
                        out.push(Rect { rows, cols: sub, color });
                        if out.len() > cap {
                            return Err(Error::SizeCap(format!(
                                "monochromatic rectangle count exceeds cap {cap}"
                            )));
                        }
                        sub = (sub - 1) & cols;
                    }
                }
                continue;
            }
            // exclude row i (pushed first so include-order comes out first)
            stack.push((i + 1, rows, cols));
            let with = cols & region.admissible[i];
            if with != 0 {
                stack.push((i + 1, rows | 1 << region.rows[i], with));
            }
        }
    }
    out.sort_unstable_by_key(|r| (r.color, r.rows, r.cols));
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bool_fn::maj;
    use crate::matrix::{build_matrix, Mode, Restriction};

    fn fig1() -> CommMatrix {
        build_matrix(&maj(3).unwrap(), Mode::General, Restriction::Terms).unwrap()
    }

    #[test]
    fn known_monochromatic_rects() {
        let m = fig1();
        // rows {110,101} x cols {010,001} all contain index 1
        let r = Rect::new(0b011, 0b110, 1);
        assert!(is_monochromatic(&m, &r));
        // rows {110,101} x col {100} has cells {2} and {3}: no common index
        for color in 1..=3 {
            assert!(!is_monochromatic(&m, &Rect::new(0b011, 0b001, color)));
        }
        // single cells are monochromatic in their own indices
        assert!(is_monochromatic(&m, &Rect::single(0, 0, 2)));
        assert!(!is_monochromatic(&m, &Rect::single(0, 0, 1)));
    }

    #[test]
    fn closure_spans_and_colors() {
        let m = fig1();
        // cells (110,010) and (101,001) span a color-1 rectangle
        let got = rect_closure_check(&m, &[CellRef(2), CellRef(6)]).unwrap();
        assert_eq!(got, Rect::new(0b011, 0b110, 1));
        // the two {2}-singletons (110,100) and (011,001) span a color-2
        // rectangle: both mixed corners hold {1,2,3}
        let diag = rect_closure_check(&m, &[CellRef(1), CellRef(9)]).unwrap();
        assert_eq!(diag.color, 2);
        assert!(is_monochromatic(&m, &diag));
        // (110,100)={2} against (101,010)={1,2,3}: corner (101,100) is {3},
        // so no color survives the span
        assert!(rect_closure_check(&m, &[CellRef(1), CellRef(5)]).is_none());
        // one cell spans itself
        let single = rect_closure_check(&m, &[CellRef(1)]).unwrap();
        assert_eq!(single, Rect::single(0, 0, 2));
    }

    #[test]
    fn intersection_rules() {
        let a = Rect::new(0b0011, 0b110000, 1);
        assert!(rects_intersect(&a, &a));
        let disjoint_rows = Rect::new(0b1100, 0b110000, 1);
        assert!(!rects_intersect(&a, &disjoint_rows));
        let b = Rect::new(0b0110, 0b011000, 1);
        assert!(rects_intersect(&a, &b)); // share row 1, col 5
    }

    #[test]
    fn enumeration_on_figure_matrix() {
        let m = fig1();
        let rects = enumerate_all_mono_rects(&m, 1_000_000).unwrap();
        // contains every singleton-cell rect and the three 2x2 rects
        for (cell, idx) in m.singleton_cells() {
            let (r, c) = cell.row_col(3);
            assert!(rects.contains(&Rect::single(r, c, idx)));
        }
        assert!(rects.contains(&Rect::new(0b011, 0b110, 1)));
        assert!(rects.contains(&Rect::new(0b101, 0b101, 2)));
        assert!(rects.contains(&Rect::new(0b110, 0b011, 3)));
        // nine cells, three of them with all three indices
        let singles = rects.iter().filter(|r| r.area() == 1).count();
        assert_eq!(singles, 6 + 3 * 3);
        // no duplicates
        let mut sorted = rects.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), rects.len());
        // singleton exclusivity: no rect contains singleton cells of two indices
        for rect in &rects {
            for (cell, idx) in m.singleton_cells() {
                let (r, c) = cell.row_col(3);
                if rect.contains_cell(r, c) {
                    assert_eq!(idx, rect.color);
                }
            }
        }
    }

    #[test]
    fn enumeration_trivial_matrices() {
        // 1x1 matrix with a 2-index cell yields exactly two rects
        let m = build_matrix(
            &maj(3).unwrap(),
            Mode::Monotone,
            Restriction::Explicit {
                rows: vec![crate::bool_fn::BitVector::parse("110").unwrap()],
                cols: vec![crate::bool_fn::BitVector::parse("001").unwrap()],
            },
        )
        .unwrap();
        assert_eq!(m.cell(0, 0).to_string(), "1,2");
        let rects = enumerate_all_mono_rects(&m, 100).unwrap();
        assert_eq!(rects.len(), 2);
    }

    #[test]
    fn enumeration_cap() {
        let m = fig1();
        assert!(matches!(enumerate_all_mono_rects(&m, 3), Err(Error::SizeCap(_))));
    }

    #[test]
    fn pairwise_disjoint_cells_only_unit_rects() {
        // monotone matrix of x1 & x2: minterm 11, maxterms 10 and 01
        let f = crate::bool_fn::BooleanFunction::from_fn(2, |a| a & 0b11 == 0b11);
        let m = build_matrix(&f, Mode::Monotone, Restriction::Terms).unwrap();
        let rects = enumerate_all_mono_rects(&m, 100).unwrap();
        assert!(rects.iter().all(|r| r.area() == 1));
        assert_eq!(rects.len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let r = Rect::new(0b1010, 0b1, 7);
        let js = serde_json::to_string(&r.to_json()).unwrap();
        let back: RectJson = serde_json::from_str(&js).unwrap();
        assert_eq!(back.to_rect().unwrap(), r);
    }
}
