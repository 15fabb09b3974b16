//! Structured term-restricted submatrices for the recursive majority
//! families, with their recursive block layout recorded so certificate
//! builders can address singleton cells, base blocks, and witness diagonals.
//!
//! Row and column orders are frozen to the recursive layout so that 1-based
//! row-major cell serials are stable across runs.

use crate::bool_fn::{brec_eval, urec_maj, BitVector};
use crate::error::{Error, Result};
use crate::matrix::{CommMatrix, Mode};
#[cfg(test)]
use crate::matrix::{build_matrix, Restriction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Maj,
    Urec,
    Brec,
}

/// Which rows/cols were selected and how the recursive blocks sit inside.
#[derive(Debug, Clone)]
pub struct SubmatrixSpec {
    pub family: Family,
    pub parameter: u32,
    pub layout: Layout,
}

#[derive(Debug, Clone)]
pub enum Layout {
    Urec {
        /// Rows/cols reached without any 11 / 00 terminal (0-based).
        all_s1_rows: Vec<usize>,
        all_s1_cols: Vec<usize>,
        /// Base 3x3 majority blocks at matching branch paths.
        s1_blocks: Vec<Block3>,
        /// Vertical/horizontal designated cells per level `l = 2..=h`.
        xy_levels: Vec<XyLevel>,
    },
    Brec {
        /// Height-2 blocks (row indices x col indices, both in base order).
        s2_blocks: Vec<Block9>,
    },
}

#[derive(Debug, Clone)]
pub struct Block3 {
    pub rows: [usize; 3],
    pub cols: [usize; 3],
}

#[derive(Debug, Clone)]
pub struct Block9 {
    pub rows: [usize; 9],
    pub cols: [usize; 9],
}

/// Designated cells ((row, col), 0-based) carrying the per-level weights of
/// the unbalanced-family certificate.
#[derive(Debug, Clone)]
pub struct XyLevel {
    pub level: u32,
    /// cells whose index-set contains `2l`, in (10, 00) position
    pub x_lo: Vec<(usize, usize)>,
    /// cells whose index-set contains `2l+1`, in (01, 00) position
    pub x_hi: Vec<(usize, usize)>,
    /// cells whose index-set contains `2l`, in (11, 01) position
    pub y_lo: Vec<(usize, usize)>,
    /// cells whose index-set contains `2l+1`, in (11, 10) position
    pub y_hi: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    B01,
    B10,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowTerm {
    Pair11(u32),
    Base(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColTerm {
    Zeros00(u32),
    Base(usize),
}

// base patterns over variables 1..3, printed variable 1 leftmost
const ROW_PAT: [(&str, u32); 3] = [("110", 0b011), ("101", 0b101), ("011", 0b110)];
const COL_PAT: [(&str, u32); 3] = [("100", 0b001), ("010", 0b010), ("001", 0b100)];

#[derive(Debug, Clone)]
struct UrecRow {
    bits: u32,
    branches: Vec<Branch>,
    term: RowTerm,
}

#[derive(Debug, Clone)]
struct UrecCol {
    bits: u32,
    branches: Vec<Branch>,
    term: ColTerm,
}

fn urec_rows(h: u32) -> Vec<UrecRow> {
    if h == 1 {
        return ROW_PAT
            .iter()
            .enumerate()
            .map(|(i, &(_, bits))| UrecRow { bits, branches: Vec::new(), term: RowTerm::Base(i) })
            .collect();
    }
    let hi = 1u32 << (2 * h); // variable 2h+1
    let lo = 1u32 << (2 * h - 1); // variable 2h
    let mut out = vec![UrecRow { bits: lo | hi, branches: Vec::new(), term: RowTerm::Pair11(h) }];
    for (branch, extra) in [(Branch::B01, hi), (Branch::B10, lo)] {
        for sub in urec_rows(h - 1) {
            let mut branches = vec![branch];
            branches.extend(sub.branches);
            out.push(UrecRow { bits: sub.bits | extra, branches, term: sub.term });
        }
    }
    out
}

fn urec_cols(h: u32) -> Vec<UrecCol> {
    if h == 1 {
        return COL_PAT
            .iter()
            .enumerate()
            .map(|(i, &(_, bits))| UrecCol { bits, branches: Vec::new(), term: ColTerm::Base(i) })
            .collect();
    }
    let hi = 1u32 << (2 * h);
    let lo = 1u32 << (2 * h - 1);
    let ones_below = (1u32 << (2 * h - 1)) - 1; // variables 1..2h-1 all set
    let mut out =
        vec![UrecCol { bits: ones_below, branches: Vec::new(), term: ColTerm::Zeros00(h) }];
    for (branch, extra) in [(Branch::B10, lo), (Branch::B01, hi)] {
        for sub in urec_cols(h - 1) {
            let mut branches = vec![branch];
            branches.extend(sub.branches);
            out.push(UrecCol { bits: sub.bits | extra, branches, term: sub.term });
        }
    }
    out
}

/// All branch strings of the given length, in lexicographic order with
/// `B01 < B10`.
fn branch_strings(len: usize) -> Vec<Vec<Branch>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for head in [Branch::B01, Branch::B10] {
        for tail in branch_strings(len - 1) {
            let mut v = vec![head];
            v.extend(tail);
            out.push(v);
        }
    }
    out
}

/// The recursive term-restricted submatrix of the unbalanced family, in
/// general mode, with `2^{h+1} - 1` rows and columns.
pub fn urec_submatrix(h: u32) -> Result<(CommMatrix, SubmatrixSpec)> {
    if !(1..=5).contains(&h) {
        return Err(Error::OutOfRange("unbalanced submatrix height", h.to_string()));
    }
    let n = 2 * h + 1;
    let rows = urec_rows(h);
    let cols = urec_cols(h);
    debug_assert_eq!(rows.len(), (1 << (h + 1)) - 1);

    let row_vecs: Vec<BitVector> = rows.iter().map(|r| BitVector::new(n, r.bits)).collect();
    let col_vecs: Vec<BitVector> = cols.iter().map(|c| BitVector::new(n, c.bits)).collect();

    // selected rows must be minterms, cols maxterms
    let f = urec_maj(h)?;
    let minterms = f.minterms()?.terms;
    let maxterms = f.maxterms()?.terms;
    for v in &row_vecs {
        if !minterms.contains(v) {
            return Err(Error::InvalidSpec(format!("generated row {v} is not a minterm")));
        }
    }
    for v in &col_vecs {
        if !maxterms.contains(v) {
            return Err(Error::InvalidSpec(format!("generated col {v} is not a maxterm")));
        }
    }

    let matrix = CommMatrix::from_parts(
        Mode::General,
        n,
        row_vecs,
        col_vecs,
        format!("urec h={h} recursive submatrix"),
    )?;

    let all_s1_rows: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| matches!(r.term, RowTerm::Base(_)))
        .map(|(i, _)| i)
        .collect();
    let all_s1_cols: Vec<usize> = cols
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c.term, ColTerm::Base(_)))
        .map(|(i, _)| i)
        .collect();

    // base blocks: matching branch paths on both sides
    let mut s1_blocks = Vec::new();
    for path in branch_strings((h - 1) as usize) {
        let mut block = Block3 { rows: [0; 3], cols: [0; 3] };
        for base in 0..3 {
            block.rows[base] = rows
                .iter()
                .position(|r| r.branches == path && r.term == RowTerm::Base(base))
                .expect("base row present");
            block.cols[base] = cols
                .iter()
                .position(|c| c.branches == path && c.term == ColTerm::Base(base))
                .expect("base col present");
        }
        s1_blocks.push(block);
    }

    // per-level designated cells: rows (cols) must continue inside the
    // all-base region below level l, which pins their count to 3 * 2^{h-2}
    let mut xy_levels = Vec::new();
    for level in 2..=h {
        let depth = (h - level) as usize;
        let mut xy = XyLevel {
            level,
            x_lo: Vec::new(),
            x_hi: Vec::new(),
            y_lo: Vec::new(),
            y_hi: Vec::new(),
        };
        for path in branch_strings(depth) {
            let col00 = cols
                .iter()
                .position(|c| c.branches == path && c.term == ColTerm::Zeros00(level))
                .expect("zeros col present");
            let row11 = rows
                .iter()
                .position(|r| r.branches == path && r.term == RowTerm::Pair11(level))
                .expect("pair row present");
            for (ri, r) in rows.iter().enumerate() {
                if !matches!(r.term, RowTerm::Base(_)) || r.branches.len() < depth + 1 {
                    continue;
                }
                if r.branches[..depth] != path[..] {
                    continue;
                }
                match r.branches[depth] {
                    Branch::B10 => xy.x_lo.push((ri, col00)),
                    Branch::B01 => xy.x_hi.push((ri, col00)),
                }
            }
            for (ci, c) in cols.iter().enumerate() {
                if !matches!(c.term, ColTerm::Base(_)) || c.branches.len() < depth + 1 {
                    continue;
                }
                if c.branches[..depth] != path[..] {
                    continue;
                }
                match c.branches[depth] {
                    Branch::B01 => xy.y_lo.push((row11, ci)),
                    Branch::B10 => xy.y_hi.push((row11, ci)),
                }
            }
        }
        xy_levels.push(xy);
    }

    let spec = SubmatrixSpec {
        family: Family::Urec,
        parameter: h,
        layout: Layout::Urec { all_s1_rows, all_s1_cols, s1_blocks, xy_levels },
    };
    Ok((matrix, spec))
}

// balanced-family pattern tuples are digits 0..3: rows 0=110 1=101 2=011,
// cols 0=100 1=010 2=001

fn brec_minterm_bits(h: u32, tuple: &[usize]) -> u32 {
    if h == 1 {
        return ROW_PAT[tuple[0]].1;
    }
    let block = 3u32.pow(h - 1);
    let pat = ROW_PAT[tuple[0]].1; // which of the 3 blocks are active
    let sub = brec_minterm_bits(h - 1, &tuple[1..]);
    let mut bits = 0;
    for j in 0..3 {
        if pat >> j & 1 == 1 {
            bits |= sub << (j as u32 * block);
        }
    }
    bits
}

fn brec_maxterm_bits(h: u32, tuple: &[usize]) -> u32 {
    if h == 1 {
        return COL_PAT[tuple[0]].1;
    }
    let block = 3u32.pow(h - 1);
    let ones = (1u32 << block) - 1;
    let pat = COL_PAT[tuple[0]].1; // the active block is forced to all ones
    let sub = brec_maxterm_bits(h - 1, &tuple[1..]);
    let mut bits = 0;
    for j in 0..3 {
        let part = if pat >> j & 1 == 1 { ones } else { sub };
        bits |= part << (j as u32 * block);
    }
    bits
}

fn tuples(h: u32) -> Vec<Vec<usize>> {
    if h == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for d in 0..3 {
        for tail in tuples(h - 1) {
            let mut v = vec![d];
            v.extend(tail);
            out.push(v);
        }
    }
    out
}

/// The same-structure monotone submatrix of the balanced family: `3^h`
/// minterms by `3^h` maxterms, each level's 3-bit pattern constant across
/// blocks, ordered with the top level most significant.
pub fn brec_submatrix(h: u32) -> Result<(CommMatrix, SubmatrixSpec)> {
    if !(1..=3).contains(&h) {
        return Err(Error::OutOfRange("balanced submatrix height", h.to_string()));
    }
    let n = 3u32.pow(h);
    let row_tuples = tuples(h);
    let row_vecs: Vec<BitVector> =
        row_tuples.iter().map(|t| BitVector::new(n, brec_minterm_bits(h, t))).collect();
    let col_vecs: Vec<BitVector> =
        row_tuples.iter().map(|t| BitVector::new(n, brec_maxterm_bits(h, t))).collect();

    // minimality checks work through the evaluator, so height 3 needs no table
    for v in &row_vecs {
        let bits = v.encoding();
        if !brec_eval(h, bits) {
            return Err(Error::InvalidSpec(format!("generated row {v} is not a one-point")));
        }
        for i in 0..n {
            if bits >> i & 1 == 1 && brec_eval(h, bits & !(1 << i)) {
                return Err(Error::InvalidSpec(format!("generated row {v} is not minimal")));
            }
        }
    }
    for v in &col_vecs {
        let bits = v.encoding();
        if brec_eval(h, bits) {
            return Err(Error::InvalidSpec(format!("generated col {v} is not a zero-point")));
        }
        for i in 0..n {
            if bits >> i & 1 == 0 && !brec_eval(h, bits | (1 << i)) {
                return Err(Error::InvalidSpec(format!("generated col {v} is not maximal")));
            }
        }
    }

    let matrix = CommMatrix::from_parts(
        Mode::Monotone,
        n,
        row_vecs,
        col_vecs,
        format!("brec h={h} same-structure submatrix"),
    )?;

    // height-2 blocks: prefixes where every level's column pattern is covered
    // by the row pattern (those positions continue the recursion)
    let mut s2_blocks = Vec::new();
    if h >= 2 {
        let prefixes = tuples(h - 2);
        for rp in &prefixes {
            for cp in &prefixes {
                let covered = rp.iter().zip(cp.iter()).all(|(&r, &c)| {
                    let rpat = ROW_PAT[r].1;
                    let cpat = COL_PAT[c].1;
                    cpat & rpat == cpat
                });
                if !covered {
                    continue;
                }
                let mut block = Block9 { rows: [0; 9], cols: [0; 9] };
                for (k, suffix) in tuples(2).iter().enumerate() {
                    let mut rt = rp.clone();
                    rt.extend(suffix.iter());
                    let mut ct = cp.clone();
                    ct.extend(suffix.iter());
                    block.rows[k] = row_tuples.iter().position(|t| *t == rt).unwrap();
                    block.cols[k] = row_tuples.iter().position(|t| *t == ct).unwrap();
                }
                s2_blocks.push(block);
            }
        }
    }

    let spec =
        SubmatrixSpec { family: Family::Brec, parameter: h, layout: Layout::Brec { s2_blocks } };
    Ok((matrix, spec))
}

/// The 9x9 height-2 submatrix with its frozen row/col order; cell serials
/// 1..81 are row-major.
pub fn brec2_submatrix() -> (CommMatrix, SubmatrixSpec) {
    brec_submatrix(2).expect("height 2 in range")
}
