//! Exact separation oracle: maximize a cell-weight linear form plus
//! nonpositive group penalties over all monochromatic rectangles of one
//! color, by branch and bound over (row set, column set).
//!
//! Rectangle variables are never materialized globally; this search is the
//! only way the exponential family is ever touched. Weights are scaled to a
//! common denominator up front so the hot loops run on integers (i128 when
//! the scaled values fit, arbitrary precision otherwise).

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::{CellRef, CommMatrix};
use crate::rat::Rat;
use crate::rect::{ColorRegion, Rect};

/// One penalty group: a rectangle is a member iff it contains both cells of
/// at least one generator pair; members pay `z <= 0` once.
#[derive(Debug, Clone)]
pub struct PenaltyGroup {
    pub pairs: Vec<(CellRef, CellRef)>,
    pub z: Rat,
}

/// Cell weights (dense, row-major) plus penalty groups.
#[derive(Debug, Clone)]
pub struct RectLinearForm {
    pub weights: Vec<Rat>,
    pub groups: Vec<PenaltyGroup>,
}

impl RectLinearForm {
    pub fn zeros(m: &CommMatrix) -> Self {
        RectLinearForm { weights: vec![Rat::zero(); m.nrows() * m.ncols()], groups: Vec::new() }
    }

    pub fn weight(&self, cell: CellRef) -> &Rat {
        &self.weights[cell.0 - 1]
    }

    pub fn set_weight(&mut self, cell: CellRef, w: Rat) {
        self.weights[cell.0 - 1] = w;
    }

    /// Exact value of one rectangle under this form.
    pub fn value_of(&self, m: &CommMatrix, rect: &Rect) -> Rat {
        let mut v = Rat::zero();
        for cell in rect.cells(m) {
            v += self.weight(cell);
        }
        let ncols = m.ncols();
        for g in &self.groups {
            let member = g.pairs.iter().any(|(a, b)| {
                let (ra, ca) = a.row_col(ncols);
                let (rb, cb) = b.row_col(ncols);
                rect.contains_cell(ra, ca) && rect.contains_cell(rb, cb)
            });
            if member {
                v += &g.z;
            }
        }
        v
    }
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub rect: Rect,
    pub value: Rat,
    /// Least upper bound established by the search; equals `value` when the
    /// search ran to completion.
    pub upper: Rat,
    pub exact: bool,
    pub nodes: usize,
    /// When violation collection was requested: distinct rectangles whose
    /// value exceeds the cutoff, best-effort, capped.
    pub violators: Vec<Rect>,
}

pub const DEFAULT_ORACLE_BUDGET: usize = 50_000_000;

/// Max violated rectangles harvested per oracle call during constraint
/// generation.
pub const COLLECT_CAP: usize = 6;

/// Collected violators are capped in area: huge rectangles make weak, dense
/// cuts that bloat the LP basis (the per-color maximizer is always returned
/// regardless, which keeps constraint generation convergent).
pub const COLLECT_AREA_CAP: u32 = 16;

trait Num: Clone + Ord {
    fn zero() -> Self;
    fn add_in(&mut self, other: &Self);
    fn sub_in(&mut self, other: &Self);
    fn is_pos(&self) -> bool;
    fn mul_area(&self, k: u32) -> Self;
}

impl Num for i128 {
    fn zero() -> Self {
        0
    }
    fn add_in(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_in(&mut self, other: &Self) {
        *self -= other;
    }
    fn is_pos(&self) -> bool {
        *self > 0
    }
    fn mul_area(&self, k: u32) -> Self {
        self.saturating_mul(k as i128)
    }
}

impl Num for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn add_in(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_in(&mut self, other: &Self) {
        *self -= other;
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn mul_area(&self, k: u32) -> Self {
        self * k
    }
}

struct Search<'a, T: Num> {
    ncols: usize,
    /// component rows (matrix row ids), ordered by descending max positive weight
    rows: Vec<usize>,
    adm: Vec<u64>,
    /// w[i][c]: scaled weight of (rows[i], c)
    w: Vec<Vec<T>>,
    /// positive part of w
    wpos: Vec<Vec<T>>,
    /// live generator pairs for this color: (row_i_a, col_a, row_i_b, col_b, group)
    pairs: &'a [(usize, usize, usize, usize, usize)],
    z: &'a [T],
    forced: Vec<T>,
    pos_undecided: Vec<T>,
    row_mask: u64,
    col_mask: u64,
    best: T,
    best_rect: Rect,
    color: u32,
    nodes: usize,
    budget: usize,
    /// max unexplored bound when the budget ran out
    abort_ub: Option<T>,
    /// collect rectangles strictly above this value (scaled), capped
    cutoff: Option<T>,
    collected: Vec<(T, Rect)>,
}

impl<T: Num> Search<'_, T> {
    fn upper_bound(&self) -> T {
        let mut total = T::zero();
        for c in 0..self.ncols {
            if self.col_mask >> c & 1 == 0 {
                continue;
            }
            let mut v = self.forced[c].clone();
            v.add_in(&self.pos_undecided[c]);
            if v.is_pos() {
                total.add_in(&v);
            }
        }
        total
    }

    /// Subtrees are cut when they can neither beat the incumbent nor contain
    /// a collectible violation.
    fn prune_floor(&self) -> T {
        match &self.cutoff {
            Some(c) if *c < self.best => c.clone(),
            _ => self.best.clone(),
        }
    }

    /// Constraint quality is violation per covered cell; huge rectangles
    /// barely above the limit make terrible cuts.
    fn efficacy_less(cutoff: &T, a: &(T, Rect), b: &(T, Rect)) -> bool {
        let mut va = a.0.clone();
        va.sub_in(cutoff);
        let mut vb = b.0.clone();
        vb.sub_in(cutoff);
        va.mul_area(b.1.area()) < vb.mul_area(a.1.area())
    }

    fn collect(&mut self, v: &T, rect: Rect) {
        let Some(cutoff) = &self.cutoff else { return };
        if v <= cutoff || rect.area() > COLLECT_AREA_CAP {
            return;
        }
        let entry = (v.clone(), rect);
        if self.collected.len() < COLLECT_CAP {
            self.collected.push(entry);
            return;
        }
        let cutoff = cutoff.clone();
        if let Some(pos) = self
            .collected
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                if Self::efficacy_less(&cutoff, a, b) {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            })
            .map(|(i, _)| i)
        {
            if Self::efficacy_less(&cutoff, &self.collected[pos], &entry) {
                self.collected[pos] = entry;
            }
        }
    }

    fn run(&mut self, i: usize) {
        self.nodes += 1;
        if self.nodes > self.budget {
            let ub = self.upper_bound();
            if self.abort_ub.as_ref().map_or(true, |a| ub > *a) {
                self.abort_ub = Some(ub);
            }
            return;
        }
        let ub = self.upper_bound();
        if ub <= self.prune_floor() {
            return;
        }
        if i == self.rows.len() {
            if self.row_mask != 0 {
                self.column_phase();
            }
            return;
        }

        // row i leaves the undecided pool in both branches
        for c in 0..self.ncols {
            self.pos_undecided[c].sub_in(&self.wpos[i][c]);
        }

        let with = self.col_mask & self.adm[i];
        if with != 0 {
            for c in 0..self.ncols {
                self.forced[c].add_in(&self.w[i][c]);
            }
            let saved_cols = self.col_mask;
            self.col_mask = with;
            self.row_mask |= 1 << self.rows[i];
            self.run(i + 1);
            self.row_mask &= !(1u64 << self.rows[i]);
            self.col_mask = saved_cols;
            for c in 0..self.ncols {
                self.forced[c].sub_in(&self.w[i][c]);
            }
        }

        self.run(i + 1);

        for c in 0..self.ncols {
            self.pos_undecided[c].add_in(&self.wpos[i][c]);
        }
    }

    /// Rows fixed; choose columns exactly. Positive columns outside every
    /// live pair always help; conflicted positive columns are branched.
    fn column_phase(&mut self) {
        // live pairs: both rows chosen and both columns still admissible
        let mut live: Vec<(usize, usize, usize)> = Vec::new(); // (col_a, col_b, group)
        for &(ra, ca, rb, cb, g) in self.pairs {
            if self.row_mask >> ra & 1 == 1
                && self.row_mask >> rb & 1 == 1
                && self.col_mask >> ca & 1 == 1
                && self.col_mask >> cb & 1 == 1
            {
                live.push((ca, cb, g));
            }
        }
        let mut conflicted = 0u64;
        for &(ca, cb, _) in &live {
            conflicted |= 1 << ca;
            conflicted |= 1 << cb;
        }

        let mut base = T::zero();
        let mut base_cols = 0u64;
        let mut branch_cols: Vec<usize> = Vec::new();
        for c in 0..self.ncols {
            if self.col_mask >> c & 1 == 0 || !self.forced[c].is_pos() {
                continue;
            }
            if conflicted >> c & 1 == 1 {
                branch_cols.push(c);
            } else {
                base.add_in(&self.forced[c]);
                base_cols |= 1 << c;
            }
        }

        // a single column is always a valid completion, and dominates every
        // all-nonpositive choice; it also covers the case where penalties
        // poison every positive column
        let mut best_single: Option<(usize, T)> = None;
        for c in 0..self.ncols {
            if self.col_mask >> c & 1 == 0 {
                continue;
            }
            // a single column can still trigger same-column pairs
            let mut v = self.forced[c].clone();
            let mut seen = vec![false; self.z.len()];
            for &(ca, cb, g) in &live {
                if ca == c && cb == c && !seen[g] {
                    seen[g] = true;
                    v.add_in(&self.z[g]);
                }
            }
            if best_single.as_ref().map_or(true, |(_, bv)| v > *bv) {
                best_single = Some((c, v));
            }
        }
        if let Some((c, v)) = best_single {
            let rect = Rect::new(self.row_mask, 1 << c, self.color);
            self.collect(&v, rect);
            if v > self.best {
                self.best = v;
                self.best_rect = rect;
            }
        }
        if base_cols == 0 && branch_cols.is_empty() {
            return;
        }

        // depth-first over conflicted positive columns
        struct ColDfs<'s, T: Num> {
            forced: &'s [T],
            live: &'s [(usize, usize, usize)],
            z: &'s [T],
            branch: &'s [usize],
        }
        let mut triggered = vec![false; self.z.len()];
        // groups already triggered inside the base set (same-column pairs)
        let mut value = base.clone();
        for &(ca, cb, g) in &live {
            if base_cols >> ca & 1 == 1 && base_cols >> cb & 1 == 1 && !triggered[g] {
                triggered[g] = true;
                value.add_in(&self.z[g]);
            }
        }

        fn dfs<T: Num>(
            ctx: &ColDfs<T>,
            i: usize,
            chosen: u64,
            value: T,
            rem: T,
            triggered: &mut Vec<bool>,
            best: &mut T,
            best_cols: &mut u64,
        ) {
            // optimistic completion: add every remaining positive column
            let mut opt = value.clone();
            opt.add_in(&rem);
            if opt <= *best {
                return;
            }
            if i == ctx.branch.len() {
                if value > *best {
                    *best = value;
                    *best_cols = chosen;
                }
                return;
            }
            let c = ctx.branch[i];
            let mut rem_next = rem.clone();
            rem_next.sub_in(&ctx.forced[c]);

            // include column c
            let mut v_inc = value.clone();
            v_inc.add_in(&ctx.forced[c]);
            let with = chosen | 1 << c;
            let mut flipped: Vec<usize> = Vec::new();
            for &(ca, cb, g) in ctx.live {
                if !triggered[g] && with >> ca & 1 == 1 && with >> cb & 1 == 1 {
                    triggered[g] = true;
                    flipped.push(g);
                    v_inc.add_in(&ctx.z[g]);
                }
            }
            dfs(ctx, i + 1, with, v_inc, rem_next.clone(), triggered, best, best_cols);
            for g in flipped {
                triggered[g] = false;
            }

            // exclude column c
            dfs(ctx, i + 1, chosen, value, rem_next, triggered, best, best_cols);
        }

        let mut rem = T::zero();
        for &c in &branch_cols {
            rem.add_in(&self.forced[c]);
        }
        let ctx = ColDfs { forced: &self.forced, live: &live, z: self.z, branch: &branch_cols };
        let floor = self.prune_floor();
        let mut local_best = floor.clone();
        let mut local_cols = 0u64;
        dfs(&ctx, 0, base_cols, value, rem, &mut triggered, &mut local_best, &mut local_cols);

        if local_best > floor && local_cols != 0 {
            let rect = Rect::new(self.row_mask, local_cols, self.color);
            self.collect(&local_best, rect);
            if local_best > self.best {
                self.best = local_best;
                self.best_rect = rect;
            }
        }
    }
}

fn scaled_weights(m: &CommMatrix, form: &RectLinearForm) -> (BigInt, Vec<BigInt>, Vec<BigInt>) {
    let mut lcm = BigInt::from(1);
    for w in &form.weights {
        lcm = num_integer::lcm(lcm, w.denom().clone());
    }
    for g in &form.groups {
        lcm = num_integer::lcm(lcm, g.z.denom().clone());
    }
    let scale = |r: &Rat| -> BigInt { r.numer() * (&lcm / r.denom()) };
    let weights = form.weights.iter().map(&scale).collect();
    let zs = form.groups.iter().map(|g| scale(&g.z)).collect();
    let _ = m;
    (lcm, weights, zs)
}

/// Exact maximum of the form over all monochromatic rectangles of `color`.
pub fn max_linear_form(
    m: &CommMatrix,
    form: &RectLinearForm,
    color: u32,
    budget: usize,
) -> Result<OracleOutcome> {
    max_linear_form_impl(m, form, color, budget, None)
}

/// Like [`max_linear_form`], additionally harvesting up to [`COLLECT_CAP`]
/// distinct rectangles with value strictly above `cutoff` (used by
/// constraint generation to add many cuts per round).
pub fn max_linear_form_collect(
    m: &CommMatrix,
    form: &RectLinearForm,
    color: u32,
    budget: usize,
    cutoff: &Rat,
) -> Result<OracleOutcome> {
    max_linear_form_impl(m, form, color, budget, Some(cutoff.clone()))
}

fn max_linear_form_impl(
    m: &CommMatrix,
    form: &RectLinearForm,
    color: u32,
    budget: usize,
    cutoff: Option<Rat>,
) -> Result<OracleOutcome> {
    if m.nrows() > 64 || m.ncols() > 64 {
        return Err(Error::SizeCap(format!(
            "oracle supports up to 64x64 matrices, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if form.weights.len() != m.nrows() * m.ncols() {
        return Err(Error::InvalidSpec("weight vector length mismatch".into()));
    }
    for g in &form.groups {
        if g.z.is_positive() {
            return Err(Error::InvalidSpec("group multiplier must be nonpositive".into()));
        }
        for (a, b) in &g.pairs {
            if a.0 == 0 || a.0 > form.weights.len() || b.0 == 0 || b.0 > form.weights.len() {
                return Err(Error::InvalidSpec(format!("pair serial out of range: {a:?},{b:?}")));
            }
        }
    }

    let (lcm, weights, zs) = scaled_weights(m, form);
    let scaled_cutoff = cutoff.map(|c| {
        // cutoff * lcm, rounded down so "value > cutoff" survives scaling
        (c.numer() * &lcm) / c.denom()
    });
    let limit = BigInt::from(1u8) << 96;
    let fits = weights
        .iter()
        .chain(zs.iter())
        .chain(scaled_cutoff.iter())
        .all(|v| v.abs() < limit);
    if fits {
        let w128: Vec<i128> = weights.iter().map(|v| v.to_i128().unwrap()).collect();
        let z128: Vec<i128> = zs.iter().map(|v| v.to_i128().unwrap()).collect();
        let cut = scaled_cutoff.map(|c| c.to_i128().unwrap());
        run_search::<i128>(m, form, color, budget, &w128, &z128, &lcm, cut)
    } else {
        run_search::<BigInt>(m, form, color, budget, &weights, &zs, &lcm, scaled_cutoff)
    }
}

#[allow(clippy::too_many_arguments)]
fn run_search<T: Num>(
    m: &CommMatrix,
    form: &RectLinearForm,
    color: u32,
    budget: usize,
    weights: &[T],
    zs: &[T],
    lcm: &BigInt,
    cutoff: Option<T>,
) -> Result<OracleOutcome>
where
    BigInt: From<T>,
{
    let ncols = m.ncols();
    let region = ColorRegion::build(m, color);
    if region.rows.is_empty() {
        return Err(Error::InvalidSpec(format!("color {color} appears in no cell")));
    }

    // pairs relevant for this color: both cells contain it
    let color_pairs: Vec<(usize, usize, usize, usize, usize)> = form
        .groups
        .iter()
        .enumerate()
        .flat_map(|(g, grp)| {
            grp.pairs.iter().filter_map(move |(a, b)| {
                let (ra, ca) = a.row_col(ncols);
                let (rb, cb) = b.row_col(ncols);
                Some((ra, ca, rb, cb, g))
            })
        })
        .filter(|&(ra, ca, rb, cb, _)| {
            m.cell(ra, ca).contains(color) && m.cell(rb, cb).contains(color)
        })
        .collect();

    // seed: best single cell (never in any group)
    let mut best: Option<(T, Rect)> = None;
    for (i, &r) in region.rows.iter().enumerate() {
        for c in 0..ncols {
            if region.admissible[i] >> c & 1 == 0 {
                continue;
            }
            let v = weights[r * ncols + c].clone();
            if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
                best = Some((v, Rect::single(r, c, color)));
            }
        }
    }
    let (mut best_val, mut best_rect) = best.expect("region is nonempty");
    let mut total_nodes = 0usize;
    let mut abort_ub: Option<T> = None;
    let mut collected_all: Vec<(T, Rect)> = Vec::new();

    for comp in region.components() {
        // rows with at least one strictly positive admissible cell can matter
        let mut rows: Vec<usize> = Vec::new();
        for &i in &comp {
            let r = region.rows[i];
            let has_pos =
                (0..ncols).any(|c| region.admissible[i] >> c & 1 == 1 && weights[r * ncols + c].is_pos());
            if has_pos {
                rows.push(i);
            }
        }
        if rows.is_empty() {
            continue;
        }
        // descending max positive weight, ties by row id
        rows.sort_by(|&a, &b| {
            let key = |i: usize| {
                let r = region.rows[i];
                (0..ncols)
                    .filter(|&c| region.admissible[i] >> c & 1 == 1)
                    .map(|c| weights[r * ncols + c].clone())
                    .max()
                    .unwrap()
            };
            key(b).cmp(&key(a)).then(region.rows[a].cmp(&region.rows[b]))
        });

        let comp_cols: u64 = comp.iter().map(|&i| region.admissible[i]).fold(0, |a, b| a | b);
        let w: Vec<Vec<T>> = rows
            .iter()
            .map(|&i| {
                let r = region.rows[i];
                (0..ncols).map(|c| weights[r * ncols + c].clone()).collect()
            })
            .collect();
        let wpos: Vec<Vec<T>> = rows
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let r = region.rows[i];
                (0..ncols)
                    .map(|c| {
                        let v = weights[r * ncols + c].clone();
                        if region.admissible[i] >> c & 1 == 1 && v.is_pos() {
                            v
                        } else {
                            let _ = k;
                            T::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        let mut pos_undecided = vec![T::zero(); ncols];
        for row in &wpos {
            for (c, v) in row.iter().enumerate() {
                pos_undecided[c].add_in(v);
            }
        }
        // pairs with both rows inside this component
        let comp_row_mask: u64 = rows.iter().map(|&i| 1u64 << region.rows[i]).fold(0, |a, b| a | b);
        let pairs: Vec<(usize, usize, usize, usize, usize)> = color_pairs
            .iter()
            .copied()
            .filter(|&(ra, _, rb, _, _)| comp_row_mask >> ra & 1 == 1 && comp_row_mask >> rb & 1 == 1)
            .collect();

        let mut search = Search {
            ncols,
            adm: rows.iter().map(|&i| region.admissible[i]).collect(),
            rows: rows.iter().map(|&i| region.rows[i]).collect(),
            w,
            wpos,
            pairs: &pairs,
            z: zs,
            forced: vec![T::zero(); ncols],
            pos_undecided,
            row_mask: 0,
            col_mask: comp_cols,
            best: best_val.clone(),
            best_rect,
            color,
            nodes: 0,
            budget: budget.saturating_sub(total_nodes),
            abort_ub: None,
            cutoff: cutoff.clone(),
            collected: Vec::new(),
        };
        search.run(0);
        total_nodes += search.nodes;
        best_val = search.best;
        best_rect = search.best_rect;
        collected_all.extend(search.collected);
        if let Some(ub) = search.abort_ub {
            if abort_ub.as_ref().map_or(true, |a| ub > *a) {
                abort_ub = Some(ub);
            }
        }
    }

    let to_rat = |v: T| -> Rat { Rat::from_big(BigInt::from(v), lcm.clone()) };
    let value = to_rat(best_val.clone());
    let (upper, exact) = match abort_ub {
        Some(ub) => {
            let ub = if ub > best_val { ub } else { best_val.clone() };
            (to_rat(ub), false)
        }
        None => (value.clone(), true),
    };
    // most effective cuts first (violation per cell), deterministic tie order
    if let Some(cut) = &cutoff {
        collected_all.sort_by(|a, b| {
            let mut va = a.0.clone();
            va.sub_in(cut);
            let mut vb = b.0.clone();
            vb.sub_in(cut);
            vb.mul_area(a.1.area())
                .cmp(&va.mul_area(b.1.area()))
                .then_with(|| (a.1.rows, a.1.cols).cmp(&(b.1.rows, b.1.cols)))
        });
    }
    collected_all.truncate(COLLECT_CAP);
    let violators = collected_all.into_iter().map(|(_, r)| r).collect();
    Ok(OracleOutcome { rect: best_rect, value, upper, exact, nodes: total_nodes, violators })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bool_fn::maj;
    use crate::matrix::{build_matrix, Mode, Restriction};
    use crate::rect::{enumerate_all_mono_rects, Rect};

    fn fig1() -> CommMatrix {
        build_matrix(&maj(3).unwrap(), Mode::General, Restriction::Terms).unwrap()
    }

    fn singleton_unit_form(m: &CommMatrix) -> RectLinearForm {
        let mut form = RectLinearForm::zeros(m);
        for (cell, _) in m.singleton_cells() {
            form.set_weight(cell, Rat::one());
        }
        form
    }

    #[test]
    fn unit_singleton_weights_give_two() {
        let m = fig1();
        let form = singleton_unit_form(&m);
        let out = max_linear_form(&m, &form, 1, 1_000_000).unwrap();
        assert!(out.exact);
        assert_eq!(out.value, Rat::from(2));
        assert_eq!(out.rect, Rect::new(0b011, 0b110, 1));
    }

    #[test]
    fn clique_penalty_caps_at_one() {
        let m = fig1();
        let mut form = singleton_unit_form(&m);
        // the three same-index singleton pairs form one clique with z = -1
        form.groups.push(PenaltyGroup {
            pairs: vec![
                (CellRef(2), CellRef(6)),
                (CellRef(1), CellRef(9)),
                (CellRef(4), CellRef(8)),
            ],
            z: -Rat::one(),
        });
        for color in 1..=3 {
            let out = max_linear_form(&m, &form, color, 1_000_000).unwrap();
            assert_eq!(out.value, Rat::one(), "color {color}");
        }
    }

    #[test]
    fn all_zero_form_maxes_at_zero() {
        let m = fig1();
        let form = RectLinearForm::zeros(&m);
        let out = max_linear_form(&m, &form, 2, 1_000_000).unwrap();
        assert_eq!(out.value, Rat::zero());
    }

    #[test]
    fn all_negative_form_picks_least_negative_cell() {
        let m = fig1();
        let mut form = RectLinearForm::zeros(&m);
        for i in 0..9 {
            form.weights[i] = Rat::new(-(i as i64 + 1), 7);
        }
        let out = max_linear_form(&m, &form, 1, 1_000_000).unwrap();
        // cheapest admissible cell for color 1 is serial 2 at -2/7
        assert_eq!(out.value, Rat::new(-2, 7));
        assert_eq!(out.rect.area(), 1);
    }

    /// Brute-force cross-check over every enumerated rectangle.
    fn exhaustive_max(m: &CommMatrix, form: &RectLinearForm, color: u32) -> Rat {
        let rects = enumerate_all_mono_rects(m, 1_000_000).unwrap();
        rects
            .iter()
            .filter(|r| r.color == color)
            .map(|r| form.value_of(m, r))
            .max()
            .unwrap()
    }

    #[test]
    fn oracle_matches_enumeration_on_random_forms() {
        use rand::{Rng, SeedableRng};
        let m = fig1();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..60 {
            let mut form = RectLinearForm::zeros(&m);
            for w in form.weights.iter_mut() {
                *w = Rat::new(rng.gen_range(-6..=6), rng.gen_range(1..=4));
            }
            if trial % 2 == 1 {
                form.groups.push(PenaltyGroup {
                    pairs: vec![(CellRef(2), CellRef(6)), (CellRef(1), CellRef(9))],
                    z: Rat::new(-rng.gen_range(0..=5), 2),
                });
            }
            for color in 1..=3 {
                let out = max_linear_form(&m, &form, color, 10_000_000).unwrap();
                assert!(out.exact);
                let want = exhaustive_max(&m, &form, color);
                assert_eq!(out.value, want, "trial {trial} color {color}");
                assert_eq!(form.value_of(&m, &out.rect), out.value);
            }
        }
    }

    #[test]
    fn budget_exhaustion_reports_interval() {
        let m = fig1();
        let form = singleton_unit_form(&m);
        let out = max_linear_form(&m, &form, 1, 2).unwrap();
        assert!(!out.exact);
        assert!(out.upper >= out.value);
    }
}
