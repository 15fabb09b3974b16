//! Exact minimum disjoint monochromatic rectangle cover over an explicit
//! rectangle list, by iterative-deepening exact-cover search.
//!
//! The list must contain every monochromatic rectangle (including non-maximal
//! ones): optimal disjoint covers routinely use non-maximal pieces.

use crate::error::{Error, Result};
use crate::matrix::CommMatrix;
use crate::rect::{is_monochromatic, rects_intersect, Rect};

pub const MAX_COVER_CELLS: usize = 220;

#[derive(Debug, Clone)]
pub struct CoverResult {
    pub count: usize,
    pub witness: Vec<Rect>,
}

/// Minimum number of pairwise-disjoint rectangles from `rects` covering every
/// cell exactly once. Branches on the uncovered cell with fewest admissible
/// rectangles; deepens the budget one rectangle at a time.
pub fn min_disjoint_cover(
    m: &CommMatrix,
    rects: &[Rect],
    node_budget: usize,
) -> Result<CoverResult> {
    let ncells = m.nrows() * m.ncols();
    if ncells > MAX_COVER_CELLS {
        return Err(Error::SizeCap(format!("{ncells} cells exceeds {MAX_COVER_CELLS}")));
    }
    // cell bitmask per rect, cells indexed row-major
    let ncols = m.ncols();
    let cell_bit = |r: usize, c: usize| -> u32 { (r * ncols + c) as u32 };
    let masks: Vec<Vec<u64>> = rects
        .iter()
        .map(|rect| {
            let mut mask = vec![0u64; ncells.div_ceil(64)];
            for r in rect.row_indices() {
                for c in rect.col_indices() {
                    let b = cell_bit(r, c);
                    mask[(b / 64) as usize] |= 1 << (b % 64);
                }
            }
            mask
        })
        .collect();

    let full: Vec<u64> = {
        let mut v = vec![u64::MAX; ncells.div_ceil(64)];
        let spare = ncells % 64;
        if spare != 0 {
            *v.last_mut().unwrap() = (1u64 << spare) - 1;
        }
        v
    };

    // per cell: rects containing it
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); ncells];
    for (ri, mask) in masks.iter().enumerate() {
        for cell in 0..ncells {
            if mask[cell / 64] >> (cell % 64) & 1 == 1 {
                containing[cell].push(ri);
            }
        }
    }
    if containing.iter().any(|v| v.is_empty()) {
        return Err(Error::InvalidSpec("some cell is covered by no rectangle".into()));
    }

    let max_area = rects.iter().map(|r| r.area() as usize).max().unwrap_or(1);

    struct Ctx<'a> {
        masks: &'a [Vec<u64>],
        containing: &'a [Vec<usize>],
        max_area: usize,
        nodes: usize,
        budget: usize,
    }

    fn uncovered_count(cov: &[u64], full: &[u64]) -> usize {
        cov.iter().zip(full).map(|(a, b)| (!a & b).count_ones() as usize).sum()
    }

    fn first_best_cell(cov: &[u64], full: &[u64], ctx: &Ctx) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for w in 0..full.len() {
            let mut open = !cov[w] & full[w];
            while open != 0 {
                let cell = w * 64 + open.trailing_zeros() as usize;
                open &= open - 1;
                // admissible = containing rects disjoint from covered cells
                let adm = ctx.containing[cell]
                    .iter()
                    .filter(|&&ri| {
                        ctx.masks[ri].iter().zip(cov.iter()).all(|(m, c)| m & c == 0)
                    })
                    .count();
                if best.map_or(true, |(_, b)| adm < b) {
                    best = Some((cell, adm));
                }
            }
        }
        best.map(|(cell, _)| cell)
    }

    fn dfs(
        cov: &mut Vec<u64>,
        full: &[u64],
        chosen: &mut Vec<usize>,
        depth_left: usize,
        ctx: &mut Ctx,
    ) -> Result<bool> {
        ctx.nodes += 1;
        if ctx.nodes > ctx.budget {
            return Err(Error::BudgetExceeded(format!(
                "cover search passed {} nodes",
                ctx.budget
            )));
        }
        let open = uncovered_count(cov, full);
        if open == 0 {
            return Ok(true);
        }
        if depth_left == 0 || open.div_ceil(ctx.max_area) > depth_left {
            return Ok(false);
        }
        let Some(cell) = first_best_cell(cov, full, ctx) else { return Ok(false) };
        let candidates: Vec<usize> = ctx.containing[cell]
            .iter()
            .copied()
            .filter(|&ri| ctx.masks[ri].iter().zip(cov.iter()).all(|(m, c)| m & c == 0))
            .collect();
        for ri in candidates {
            for (w, m) in ctx.masks[ri].iter().enumerate() {
                cov[w] |= m;
            }
            chosen.push(ri);
            if dfs(cov, full, chosen, depth_left - 1, ctx)? {
                return Ok(true);
            }
            chosen.pop();
            for (w, m) in ctx.masks[ri].iter().enumerate() {
                cov[w] &= !m;
            }
        }
        Ok(false)
    }

    let mut ctx = Ctx { masks: &masks, containing: &containing, max_area, nodes: 0, budget: node_budget };
    let lower = ncells.div_ceil(max_area);
    for depth in lower..=ncells {
        let mut cov = vec![0u64; full.len()];
        let mut chosen = Vec::new();
        if dfs(&mut cov, &full, &mut chosen, depth, &mut ctx)? {
            let witness: Vec<Rect> = chosen.iter().map(|&ri| rects[ri]).collect();
            verify_cover(m, &witness)?;
            return Ok(CoverResult { count: witness.len(), witness });
        }
    }
    Err(Error::InvalidSpec("no exact cover exists over the given rectangles".into()))
}

/// Check that a claimed cover is disjoint, exact, and monochromatic.
pub fn verify_cover(m: &CommMatrix, cover: &[Rect]) -> Result<()> {
    for rect in cover {
        if !is_monochromatic(m, rect) {
            return Err(Error::InvalidSpec(format!("rectangle {rect:?} is not monochromatic")));
        }
    }
    for (i, a) in cover.iter().enumerate() {
        for b in cover.iter().skip(i + 1) {
            if rects_intersect(a, b) {
                return Err(Error::InvalidSpec(format!("rectangles {a:?} and {b:?} overlap")));
            }
        }
    }
    let covered: usize = cover.iter().map(|r| r.area() as usize).sum();
    if covered != m.nrows() * m.ncols() {
        return Err(Error::InvalidSpec(format!(
            "cover has {covered} cells, matrix has {}",
            m.nrows() * m.ncols()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bool_fn::{maj, BooleanFunction};
    use crate::matrix::{build_matrix, Mode, Restriction};
    use crate::rect::enumerate_all_mono_rects;

    #[test]
    fn figure_matrix_cover_is_five() {
        let m = build_matrix(&maj(3).unwrap(), Mode::General, Restriction::Terms).unwrap();
        let rects = enumerate_all_mono_rects(&m, 10_000).unwrap();
        let result = min_disjoint_cover(&m, &rects, 1_000_000).unwrap();
        assert_eq!(result.count, 5);
    }

    #[test]
    fn single_cell_matrix() {
        let f = BooleanFunction::from_fn(1, |a| a == 1);
        let m = build_matrix(&f, Mode::General, Restriction::Full).unwrap();
        assert_eq!(m.nrows(), 1);
        let rects = enumerate_all_mono_rects(&m, 100).unwrap();
        let result = min_disjoint_cover(&m, &rects, 1000).unwrap();
        assert_eq!(result.count, 1);
    }

    #[test]
    fn and2_cover_is_two() {
        let f = BooleanFunction::from_fn(2, |a| a & 0b11 == 0b11);
        let m = build_matrix(&f, Mode::Monotone, Restriction::Terms).unwrap();
        let rects = enumerate_all_mono_rects(&m, 100).unwrap();
        let result = min_disjoint_cover(&m, &rects, 1000).unwrap();
        assert_eq!(result.count, 2);
    }

    #[test]
    fn budget_is_respected() {
        let m = build_matrix(&maj(3).unwrap(), Mode::General, Restriction::Terms).unwrap();
        let rects = enumerate_all_mono_rects(&m, 10_000).unwrap();
        assert!(matches!(
            min_disjoint_cover(&m, &rects, 3),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
