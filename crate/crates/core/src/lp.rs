//! Exact two-phase simplex over rationals with Bland's anti-cycling rule.
//!
//! No floating point anywhere in the decision path: bound values like 9/2 or
//! 1504/81 must come out exactly. Optimal results are certified before being
//! returned: primal feasibility, dual feasibility, and equal objectives are
//! all re-checked from the original problem data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rat::Rat;

pub const MAX_NONZEROS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarBound {
    /// x >= 0
    #[serde(rename = "ge0")]
    NonNeg,
    /// x <= 0
    #[serde(rename = "le0")]
    NonPos,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rel {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Min,
    Max,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rat)>,
    pub rel: Rel,
    pub rhs: Rat,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub var_bounds: Vec<VarBound>,
    pub constraints: Vec<Constraint>,
    pub direction: Direction,
    pub objective: Vec<(usize, Rat)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Per-variable values; empty unless optimal.
    pub primal: Vec<Rat>,
    /// Per-constraint multipliers; empty unless optimal.
    pub dual: Vec<Rat>,
    pub objective: Rat,
}

impl LinearProgram {
    pub fn nonzeros(&self) -> usize {
        self.constraints.iter().map(|c| c.coeffs.len()).sum::<usize>() + self.objective.len()
    }

    pub fn objective_value(&self, x: &[Rat]) -> Rat {
        let mut v = Rat::zero();
        for (j, c) in &self.objective {
            v += &(c * &x[*j]);
        }
        v
    }

    pub fn dual_objective(&self, y: &[Rat]) -> Rat {
        let mut v = Rat::zero();
        for (i, con) in self.constraints.iter().enumerate() {
            v += &(&con.rhs * &y[i]);
        }
        v
    }

    pub fn is_primal_feasible(&self, x: &[Rat]) -> bool {
        if x.len() != self.var_bounds.len() {
            return false;
        }
        for (j, b) in self.var_bounds.iter().enumerate() {
            match b {
                VarBound::NonNeg if x[j].is_negative() => return false,
                VarBound::NonPos if x[j].is_positive() => return false,
                _ => {}
            }
        }
        for con in &self.constraints {
            let mut lhs = Rat::zero();
            for (j, c) in &con.coeffs {
                lhs += &(c * &x[*j]);
            }
            let ok = match con.rel {
                Rel::Le => lhs <= con.rhs,
                Rel::Eq => lhs == con.rhs,
                Rel::Ge => lhs >= con.rhs,
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// Sign-correct dual feasibility for this problem's direction.
    pub fn is_dual_feasible(&self, y: &[Rat]) -> bool {
        if y.len() != self.constraints.len() {
            return false;
        }
        // multiplier signs per relation
        for (i, con) in self.constraints.iter().enumerate() {
            let ok = match (self.direction, con.rel) {
                (_, Rel::Eq) => true,
                (Direction::Min, Rel::Le) => !y[i].is_positive(),
                (Direction::Min, Rel::Ge) => !y[i].is_negative(),
                (Direction::Max, Rel::Le) => !y[i].is_negative(),
                (Direction::Max, Rel::Ge) => !y[i].is_positive(),
            };
            if !ok {
                return false;
            }
        }
        // reduced costs per variable bound
        let mut reduced: Vec<Rat> = vec![Rat::zero(); self.var_bounds.len()];
        for (j, c) in &self.objective {
            reduced[*j] += c;
        }
        for (i, con) in self.constraints.iter().enumerate() {
            for (j, a) in &con.coeffs {
                reduced[*j] -= &(a * &y[i]);
            }
        }
        for (j, b) in self.var_bounds.iter().enumerate() {
            let ok = match (self.direction, b) {
                (_, VarBound::Free) => reduced[j].is_zero(),
                (Direction::Min, VarBound::NonNeg) => !reduced[j].is_negative(),
                (Direction::Min, VarBound::NonPos) => !reduced[j].is_positive(),
                (Direction::Max, VarBound::NonNeg) => !reduced[j].is_positive(),
                (Direction::Max, VarBound::NonPos) => !reduced[j].is_negative(),
            };
            if !ok {
                return false;
            }
        }
        true
    }

    pub fn to_json(&self) -> LpJson {
        LpJson {
            vars: self.var_bounds.clone(),
            constraints: self
                .constraints
                .iter()
                .map(|c| ConstraintJson {
                    coeffs: c.coeffs.iter().map(|(j, v)| (*j, v.clone())).collect(),
                    rel: c.rel,
                    rhs: c.rhs.clone(),
                })
                .collect(),
            objective: ObjectiveJson {
                dir: self.direction,
                coeffs: self.objective.iter().map(|(j, v)| (*j, v.clone())).collect(),
            },
        }
    }

    pub fn from_json(j: &LpJson) -> Result<Self> {
        let nvars = j.vars.len();
        let check = |coeffs: &[(usize, Rat)]| -> Result<()> {
            for (idx, _) in coeffs {
                if *idx >= nvars {
                    return Err(Error::Parse(format!("variable index {idx} out of range")));
                }
            }
            Ok(())
        };
        for c in &j.constraints {
            check(&c.coeffs)?;
        }
        check(&j.objective.coeffs)?;
        Ok(LinearProgram {
            var_bounds: j.vars.clone(),
            constraints: j
                .constraints
                .iter()
                .map(|c| Constraint { coeffs: c.coeffs.clone(), rel: c.rel, rhs: c.rhs.clone() })
                .collect(),
            direction: j.objective.dir,
            objective: j.objective.coeffs.clone(),
        })
    }
}

/// Plain JSON form: `{vars, constraints, objective}` with `"p/q"` rationals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpJson {
    pub vars: Vec<VarBound>,
    pub constraints: Vec<ConstraintJson>,
    pub objective: ObjectiveJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintJson {
    pub coeffs: Vec<(usize, Rat)>,
    pub rel: Rel,
    pub rhs: Rat,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectiveJson {
    pub dir: Direction,
    pub coeffs: Vec<(usize, Rat)>,
}

/// Tableau scalar: exact rational arithmetic where every operation may
/// report overflow. The fast path is an i128-backed rational; the fallback
/// is the arbitrary-precision [`Rat`], whose operations never fail.
trait Scalar: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rat(r: &Rat) -> Option<Self>;
    fn to_rat(&self) -> Rat;
    fn is_zero(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn try_add(&self, o: &Self) -> Option<Self>;
    fn try_sub(&self, o: &Self) -> Option<Self>;
    fn try_mul(&self, o: &Self) -> Option<Self>;
    fn try_div(&self, o: &Self) -> Option<Self>;
    fn try_cmp(&self, o: &Self) -> Option<std::cmp::Ordering>;
}

/// Reduced fraction over i128 with positive denominator; every arithmetic
/// step is overflow-checked.
#[derive(Clone, Copy, Debug)]
struct R128 {
    n: i128,
    d: i128,
}

fn gcd128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl R128 {
    fn make(n: i128, d: i128) -> Option<Self> {
        if d == 0 {
            return None;
        }
        let g = gcd128(n, d);
        let (mut n, mut d) = if g == 0 { (0, 1) } else { (n / g, d / g) };
        if d < 0 {
            n = n.checked_neg()?;
            d = d.checked_neg()?;
        }
        Some(R128 { n, d })
    }
}

impl Scalar for R128 {
    fn zero() -> Self {
        R128 { n: 0, d: 1 }
    }
    fn one() -> Self {
        R128 { n: 1, d: 1 }
    }
    fn from_rat(r: &Rat) -> Option<Self> {
        use num_traits::ToPrimitive;
        let n = r.numer().to_i128()?;
        let d = r.denom().to_i128()?;
        R128::make(n, d)
    }
    fn to_rat(&self) -> Rat {
        Rat::from_big(num_bigint::BigInt::from(self.n), num_bigint::BigInt::from(self.d))
    }
    fn is_zero(&self) -> bool {
        self.n == 0
    }
    fn is_neg(&self) -> bool {
        self.n < 0
    }
    fn is_pos(&self) -> bool {
        self.n > 0
    }
    fn try_add(&self, o: &Self) -> Option<Self> {
        // cross-reduce first to keep intermediates small
        let g = gcd128(self.d, o.d);
        let (da, db) = (self.d / g, o.d / g);
        let left = self.n.checked_mul(db)?;
        let right = o.n.checked_mul(da)?;
        let num = left.checked_add(right)?;
        let den = self.d.checked_mul(db)?;
        R128::make(num, den)
    }
    fn try_sub(&self, o: &Self) -> Option<Self> {
        let neg = R128 { n: o.n.checked_neg()?, d: o.d };
        self.try_add(&neg)
    }
    fn try_mul(&self, o: &Self) -> Option<Self> {
        let g1 = gcd128(self.n, o.d);
        let g2 = gcd128(o.n, self.d);
        let n = (self.n / g1).checked_mul(o.n / g2)?;
        let d = (self.d / g2).checked_mul(o.d / g1)?;
        R128::make(n, d)
    }
    fn try_div(&self, o: &Self) -> Option<Self> {
        if o.n == 0 {
            return None;
        }
        self.try_mul(&R128 { n: o.d, d: o.n })
    }
    fn try_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        let left = self.n.checked_mul(o.d)?;
        let right = o.n.checked_mul(self.d)?;
        Some(left.cmp(&right))
    }
}

impl Scalar for Rat {
    fn zero() -> Self {
        Rat::zero()
    }
    fn one() -> Self {
        Rat::one()
    }
    fn from_rat(r: &Rat) -> Option<Self> {
        Some(r.clone())
    }
    fn to_rat(&self) -> Rat {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn try_add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn try_sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn try_mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn try_div(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn try_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

/// Persistent column-generation LP for the fractional rectangle cover:
///
/// ```text
///   min  sum_r (1 - area_r) x_r      (+ ncells, added by the caller)
///   s.t. sum_{r contains c} x_r <= 1    per cell c
///        sum_{r member of g} x_r <= alpha_g   per group g
///        x >= 0
/// ```
///
/// Columns (rectangles) only ever get appended, so the tableau persists
/// across separation rounds and each re-optimization continues from the
/// previous basis. Slack columns sit first and therefore always hold the
/// current basis inverse, which is what makes appending a column cheap.
/// Runs on i128 rationals; on overflow the whole state is rebuilt in
/// arbitrary precision from the column log and never downgrades.
pub(crate) struct CoverLp {
    ncells: usize,
    alphas: Vec<Rat>,
    log: Vec<(Vec<usize>, Vec<usize>)>,
    core: CoverCore,
}

pub(crate) struct CoverDuals {
    /// Objective of the restricted cover LP (without the `ncells` constant).
    pub objective: Rat,
    /// Multiplier per cell row (<= 0); the dual weight is `1 + y_c`.
    pub cell_duals: Vec<Rat>,
    /// Multiplier per group row (<= 0).
    pub group_duals: Vec<Rat>,
}

enum CoverCore {
    Fast(CoverTab<R128>),
    Wide(CoverTab<Rat>),
}

struct CoverTab<T> {
    /// coefficient rows over [slacks | rect columns]
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    cost: Vec<T>,
    /// negative of the current objective
    cost_rhs: T,
    basis: Vec<usize>,
    nrows: usize,
}

impl<T: Scalar> CoverTab<T> {
    fn new(ncells: usize, alphas: &[Rat]) -> Option<Self> {
        let nrows = ncells + alphas.len();
        let mut rows = Vec::with_capacity(nrows);
        let mut rhs = Vec::with_capacity(nrows);
        for i in 0..nrows {
            let mut row = vec![T::zero(); nrows];
            row[i] = T::one();
            rows.push(row);
            if i < ncells {
                rhs.push(T::one());
            } else {
                rhs.push(T::from_rat(&alphas[i - ncells])?);
            }
        }
        Some(CoverTab {
            rows,
            rhs,
            cost: vec![T::zero(); nrows],
            cost_rhs: T::zero(),
            basis: (0..nrows).collect(),
            nrows,
        })
    }

    /// Append one rectangle column: rows it covers, groups it belongs to.
    /// The tableau representation is `B^{-1} a`, assembled from the slack
    /// block, and the reduced cost uses the current duals.
    fn add_column(&mut self, touched_rows: &[usize], cost: i64) -> Option<()> {
        let mut rc = T::from_rat(&Rat::from(cost))?;
        for i in 0..self.nrows {
            let mut v = T::zero();
            for &k in touched_rows {
                v = v.try_add(&self.rows[i][k])?;
            }
            self.rows[i].push(v);
        }
        for &k in touched_rows {
            // pi_k = -cost[slack_k]
            rc = rc.try_add(&self.cost[k])?;
        }
        self.cost.push(rc);
        Some(())
    }

    fn width(&self) -> usize {
        self.cost.len()
    }

    fn pivot(&mut self, r: usize, c: usize) -> Option<()> {
        let width = self.width();
        let piv = self.rows[r][c].clone();
        for j in 0..width {
            if !self.rows[r][j].is_zero() {
                self.rows[r][j] = self.rows[r][j].try_div(&piv)?;
            }
        }
        self.rhs[r] = self.rhs[r].try_div(&piv)?;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.nrows {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..width {
                if !pivot_row[j].is_zero() {
                    self.rows[i][j] = self.rows[i][j].try_sub(&pivot_row[j].try_mul(&factor)?)?;
                }
            }
            if !pivot_rhs.is_zero() {
                self.rhs[i] = self.rhs[i].try_sub(&pivot_rhs.try_mul(&factor)?)?;
            }
        }
        let factor = self.cost[c].clone();
        if !factor.is_zero() {
            for j in 0..width {
                if !pivot_row[j].is_zero() {
                    self.cost[j] = self.cost[j].try_sub(&pivot_row[j].try_mul(&factor)?)?;
                }
            }
            if !pivot_rhs.is_zero() {
                self.cost_rhs = self.cost_rhs.try_sub(&pivot_rhs.try_mul(&factor)?)?;
            }
        }
        self.basis[r] = c;
        Some(())
    }

    /// Primal simplex from the current (feasible) basis: Dantzig pricing
    /// plus the lexicographic ratio test. The LP is always bounded, so this
    /// ends at optimality.
    fn reoptimize(&mut self) -> Option<()> {
        loop {
            let width = self.width();
            let mut entering: Option<usize> = None;
            for j in 0..width {
                if !self.cost[j].is_neg() {
                    continue;
                }
                match entering {
                    None => entering = Some(j),
                    Some(cur) => {
                        if self.cost[j].try_cmp(&self.cost[cur])? == std::cmp::Ordering::Less {
                            entering = Some(j);
                        }
                    }
                }
            }
            let Some(c) = entering else { return Some(()) };
            let mut tied: Vec<usize> = Vec::new();
            let mut best_ratio: Option<T> = None;
            for i in 0..self.nrows {
                if !self.rows[i][c].is_pos() {
                    continue;
                }
                let ratio = self.rhs[i].try_div(&self.rows[i][c])?;
                match &best_ratio {
                    None => {
                        best_ratio = Some(ratio);
                        tied.push(i);
                    }
                    Some(best) => match ratio.try_cmp(best)? {
                        std::cmp::Ordering::Less => {
                            best_ratio = Some(ratio);
                            tied.clear();
                            tied.push(i);
                        }
                        std::cmp::Ordering::Equal => tied.push(i),
                        std::cmp::Ordering::Greater => {}
                    },
                }
            }
            debug_assert!(best_ratio.is_some(), "cover LP cannot be unbounded");
            let mut j = 0;
            while tied.len() > 1 && j < width {
                let mut best_val: Option<T> = None;
                let mut keep: Vec<usize> = Vec::new();
                for &i in &tied {
                    let v = self.rows[i][j].try_div(&self.rows[i][c])?;
                    match &best_val {
                        None => {
                            best_val = Some(v);
                            keep.push(i);
                        }
                        Some(best) => match v.try_cmp(best)? {
                            std::cmp::Ordering::Less => {
                                best_val = Some(v);
                                keep.clear();
                                keep.push(i);
                            }
                            std::cmp::Ordering::Equal => keep.push(i),
                            std::cmp::Ordering::Greater => {}
                        },
                    }
                }
                tied = keep;
                j += 1;
            }
            self.pivot(tied[0], c)?;
        }
    }

    fn duals(&self, ncells: usize) -> CoverDuals {
        let cell_duals: Vec<Rat> = (0..ncells).map(|k| -self.cost[k].to_rat()).collect();
        let group_duals: Vec<Rat> =
            (ncells..self.nrows).map(|k| -self.cost[k].to_rat()).collect();
        CoverDuals { objective: -self.cost_rhs.to_rat(), cell_duals, group_duals }
    }

    /// Reinstate a recorded basis by direct pivots (Gaussian order: any row
    /// still holding a non-target variable with a nonzero entry works; one
    /// exists because the target basis is nonsingular). Intermediate states
    /// may be primal-infeasible; the final one is the recorded feasible
    /// basis, so reoptimization can continue from it.
    fn crash_basis(&mut self, target: &[usize]) -> Option<()> {
        let want: std::collections::HashSet<usize> = target.iter().copied().collect();
        for &b in target {
            if self.basis.contains(&b) {
                continue;
            }
            let row = (0..self.nrows)
                .find(|&i| !want.contains(&self.basis[i]) && !self.rows[i][b].is_zero());
            let Some(i) = row else { return None };
            self.pivot(i, b)?;
        }
        Some(())
    }
}

impl CoverLp {
    pub fn new(ncells: usize, alphas: Vec<Rat>) -> Self {
        let core = CoverCore::Fast(CoverTab::<R128>::new(ncells, &alphas).expect("unit data"));
        CoverLp { ncells, alphas, log: Vec::new(), core }
    }

    /// Append a rectangle column; `cells` are 0-based cell indices, `groups`
    /// 0-based group indices. The objective coefficient is `1 - |cells|`.
    pub fn add_column(&mut self, cells: Vec<usize>, groups: Vec<usize>) {
        let cost = 1 - cells.len() as i64;
        let touched: Vec<usize> =
            cells.iter().copied().chain(groups.iter().map(|g| self.ncells + g)).collect();
        let ok = match &mut self.core {
            CoverCore::Fast(tab) => tab.add_column(&touched, cost).is_some(),
            CoverCore::Wide(tab) => {
                tab.add_column(&touched, cost).expect("arbitrary precision cannot overflow");
                true
            }
        };
        self.log.push((cells, groups));
        if !ok {
            self.promote();
        }
    }

    /// Rebuild in arbitrary precision from the column log, then jump back to
    /// the basis the fast tableau had reached so hardly any pivots repeat.
    fn promote(&mut self) {
        let old_basis = match &self.core {
            CoverCore::Fast(tab) => Some(tab.basis.clone()),
            CoverCore::Wide(_) => None,
        };
        let mut tab = CoverTab::<Rat>::new(self.ncells, &self.alphas).expect("unit data");
        for (cells, groups) in &self.log {
            let cost = 1 - cells.len() as i64;
            let touched: Vec<usize> =
                cells.iter().copied().chain(groups.iter().map(|g| self.ncells + g)).collect();
            tab.add_column(&touched, cost).expect("arbitrary precision cannot overflow");
        }
        if let Some(basis) = old_basis {
            tab.crash_basis(&basis).expect("recorded basis is nonsingular");
        }
        self.core = CoverCore::Wide(tab);
    }

    /// Re-optimize from the current basis and return exact duals.
    pub fn reoptimize(&mut self) -> CoverDuals {
        let ok = match &mut self.core {
            CoverCore::Fast(tab) => tab.reoptimize().is_some(),
            CoverCore::Wide(tab) => {
                tab.reoptimize().expect("arbitrary precision cannot overflow");
                true
            }
        };
        if !ok {
            if std::env::var("RECTBOUND_TRACE").is_ok() {
                eprintln!("cover lp: i128 overflow, rebuilding in big rationals");
            }
            self.promote();
            if let CoverCore::Wide(tab) = &mut self.core {
                tab.reoptimize().expect("arbitrary precision cannot overflow");
            }
        }
        match &self.core {
            CoverCore::Fast(tab) => tab.duals(self.ncells),
            CoverCore::Wide(tab) => tab.duals(self.ncells),
        }
    }
}

// standard-form working problem: min c.y, A y = b, y >= 0, b >= 0
struct Standard<T> {
    /// tableau rows; last entry of each row is the rhs
    rows: Vec<Vec<T>>,
    /// reduced-cost row for the active phase; last entry is -objective
    cost: Vec<T>,
    basis: Vec<usize>,
    ncols: usize,
}

impl<T: Scalar> Standard<T> {
    fn pivot(&mut self, r: usize, c: usize) -> Option<()> {
        let piv = self.rows[r][c].clone();
        debug_assert!(!piv.is_zero());
        for j in 0..=self.ncols {
            if !self.rows[r][j].is_zero() {
                self.rows[r][j] = self.rows[r][j].try_div(&piv)?;
            }
        }
        let pivot_row = self.rows[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c].clone();
            if factor.is_zero() {
                continue;
            }
            for (j, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    let delta = pv.try_mul(&factor)?;
                    self.rows[i][j] = self.rows[i][j].try_sub(&delta)?;
                }
            }
        }
        let factor = self.cost[c].clone();
        if !factor.is_zero() {
            for (j, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    let delta = pv.try_mul(&factor)?;
                    self.cost[j] = self.cost[j].try_sub(&delta)?;
                }
            }
        }
        self.basis[r] = c;
        Some(())
    }

    /// Dantzig pricing (most negative reduced cost) with the lexicographic
    /// ratio test, which rules out cycling from any basis whose rows are
    /// lexicographically distinct (true here: every row starts with its own
    /// slack or artificial unit column). `None` means arithmetic overflow
    /// (retry with a wider scalar).
    fn run(&mut self, barred: impl Fn(usize) -> bool) -> Option<LpStatus> {
        let mut pivots = 0usize;
        loop {
            let mut entering: Option<usize> = None;
            for j in 0..self.ncols {
                if barred(j) || !self.cost[j].is_neg() {
                    continue;
                }
                match entering {
                    None => entering = Some(j),
                    Some(cur) => {
                        if self.cost[j].try_cmp(&self.cost[cur])? == std::cmp::Ordering::Less {
                            entering = Some(j);
                        }
                    }
                }
            }
            let Some(c) = entering else { return Some(LpStatus::Optimal) };

            // minimum-ratio candidates first
            let mut tied: Vec<usize> = Vec::new();
            let mut best_ratio: Option<T> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][c].is_pos() {
                    continue;
                }
                let ratio = self.rows[i][self.ncols].try_div(&self.rows[i][c])?;
                match &best_ratio {
                    None => {
                        best_ratio = Some(ratio);
                        tied.push(i);
                    }
                    Some(best) => match ratio.try_cmp(best)? {
                        std::cmp::Ordering::Less => {
                            best_ratio = Some(ratio);
                            tied.clear();
                            tied.push(i);
                        }
                        std::cmp::Ordering::Equal => tied.push(i),
                        std::cmp::Ordering::Greater => {}
                    },
                }
            }
            if best_ratio.is_none() {
                return Some(LpStatus::Unbounded);
            }
            // lexicographic tie-break: smallest scaled row wins
            let mut j = 0;
            while tied.len() > 1 && j < self.ncols {
                let mut best_val: Option<T> = None;
                let mut keep: Vec<usize> = Vec::new();
                for &i in &tied {
                    let v = self.rows[i][j].try_div(&self.rows[i][c])?;
                    match &best_val {
                        None => {
                            best_val = Some(v);
                            keep.push(i);
                        }
                        Some(best) => match v.try_cmp(best)? {
                            std::cmp::Ordering::Less => {
                                best_val = Some(v);
                                keep.clear();
                                keep.push(i);
                            }
                            std::cmp::Ordering::Equal => keep.push(i),
                            std::cmp::Ordering::Greater => {}
                        },
                    }
                }
                tied = keep;
                j += 1;
            }
            let r = tied[0];
            self.pivot(r, c)?;
            pivots += 1;
            if pivots % 5000 == 0 && std::env::var("RECTBOUND_TRACE").is_ok() {
                eprintln!("simplex: {pivots} pivots on {}x{}", self.rows.len(), self.ncols);
            }
        }
    }
}

/// Exact optimum via two-phase simplex. Infeasible/unbounded are statuses,
/// not errors; the only errors are size-cap violations and internal
/// certification failures. Runs on i128 rationals and transparently retries
/// with arbitrary precision on overflow.
pub fn simplex_solve(lp: &LinearProgram) -> Result<LpSolution> {
    if lp.nonzeros() > MAX_NONZEROS {
        return Err(Error::SizeCap(format!("LP has {} nonzeros", lp.nonzeros())));
    }
    match solve_with::<R128>(lp) {
        Some(result) => result,
        None => solve_with::<Rat>(lp).expect("arbitrary precision cannot overflow"),
    }
}

/// `None` = scalar overflow; retry wider.
fn solve_with<T: Scalar>(lp: &LinearProgram) -> Option<Result<LpSolution>> {
    let nvars = lp.var_bounds.len();

    // variable mapping into the nonnegative standard space
    // NonNeg -> +y_k ; NonPos -> -y_k ; Free -> y_k - y_{k+1}
    let mut var_cols: Vec<(usize, Option<usize>, bool)> = Vec::with_capacity(nvars);
    let mut ncols = 0usize;
    for b in &lp.var_bounds {
        match b {
            VarBound::NonNeg => {
                var_cols.push((ncols, None, false));
                ncols += 1;
            }
            VarBound::NonPos => {
                var_cols.push((ncols, None, true));
                ncols += 1;
            }
            VarBound::Free => {
                var_cols.push((ncols, Some(ncols + 1), false));
                ncols += 2;
            }
        }
    }
    let nstruct = ncols;

    // objective in minimization form over structural columns
    let mut min_cost: Vec<T> = vec![T::zero(); nstruct];
    for (j, c) in &lp.objective {
        let c = if lp.direction == Direction::Max { -c } else { c.clone() };
        let c = T::from_rat(&c)?;
        let (p, q, negate) = var_cols[*j];
        let signed = if negate { T::zero().try_sub(&c)? } else { c.clone() };
        min_cost[p] = min_cost[p].try_add(&signed)?;
        if let Some(q) = q {
            min_cost[q] = min_cost[q].try_sub(&signed)?;
        }
    }

    let m = lp.constraints.len();
    // rows in y-space with rhs sign normalized
    let mut nslack = 0usize;
    let mut nart = 0usize;
    let mut dense_rows: Vec<(Vec<T>, Rel, T, bool)> = Vec::with_capacity(m);
    for con in &lp.constraints {
        let mut row: Vec<T> = vec![T::zero(); nstruct];
        for (j, a) in &con.coeffs {
            let a = T::from_rat(a)?;
            let (p, q, negate) = var_cols[*j];
            let a = if negate { T::zero().try_sub(&a)? } else { a };
            row[p] = row[p].try_add(&a)?;
            if let Some(q) = q {
                row[q] = row[q].try_sub(&a)?;
            }
        }
        let mut rel = con.rel;
        let mut rhs = T::from_rat(&con.rhs)?;
        let mut flipped = false;
        if rhs.is_neg() {
            for v in row.iter_mut() {
                *v = T::zero().try_sub(v)?;
            }
            rhs = T::zero().try_sub(&rhs)?;
            flipped = true;
            rel = match rel {
                Rel::Le => Rel::Ge,
                Rel::Ge => Rel::Le,
                Rel::Eq => Rel::Eq,
            };
        }
        match rel {
            Rel::Le => nslack += 1,
            Rel::Ge => {
                nslack += 1;
                nart += 1;
            }
            Rel::Eq => nart += 1,
        }
        dense_rows.push((row, rel, rhs, flipped));
    }

    let slack_start = nstruct;
    let art_start = nstruct + nslack;
    let total = art_start + nart;

    let mut rows: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    // per original constraint: the column whose reduced cost reads off the
    // dual (slack or artificial), plus the sign flip applied to the row
    let mut dual_col: Vec<(usize, bool)> = Vec::with_capacity(m);
    let mut next_slack = slack_start;
    let mut next_art = art_start;
    for (row, rel, rhs, flipped) in dense_rows {
        let mut full: Vec<T> = vec![T::zero(); total + 1];
        full[..nstruct].clone_from_slice(&row);
        full[total] = rhs;
        match rel {
            Rel::Le => {
                full[next_slack] = T::one();
                basis.push(next_slack);
                dual_col.push((next_slack, flipped));
                next_slack += 1;
            }
            Rel::Ge => {
                full[next_slack] = T::zero().try_sub(&T::one())?;
                full[next_art] = T::one();
                basis.push(next_art);
                dual_col.push((next_art, flipped));
                next_slack += 1;
                next_art += 1;
            }
            Rel::Eq => {
                full[next_art] = T::one();
                basis.push(next_art);
                dual_col.push((next_art, flipped));
                next_art += 1;
            }
        }
        rows.push(full);
    }

    // phase 1: minimize the sum of artificials
    let mut cost: Vec<T> = vec![T::zero(); total + 1];
    for j in art_start..total {
        cost[j] = T::one();
    }
    for (i, &b) in basis.iter().enumerate() {
        if b >= art_start {
            for j in 0..=total {
                if !rows[i][j].is_zero() {
                    cost[j] = cost[j].try_sub(&rows[i][j])?;
                }
            }
        }
    }
    let mut std = Standard { rows, cost, basis, ncols: total };
    let status = std.run(|_| false)?;
    debug_assert_eq!(status, LpStatus::Optimal, "phase 1 cannot be unbounded");
    if !std.cost[total].is_zero() {
        return Some(Ok(LpSolution {
            status: LpStatus::Infeasible,
            primal: Vec::new(),
            dual: Vec::new(),
            objective: Rat::zero(),
        }));
    }

    // drive basic artificials out; rows that cannot pivot are redundant
    // (all-zero on real columns) and get dual value zero
    let mut redundant: Vec<usize> = Vec::new();
    for i in 0..std.rows.len() {
        if std.basis[i] < art_start {
            continue;
        }
        let col = (0..art_start).find(|&j| !std.rows[i][j].is_zero());
        match col {
            Some(c) => std.pivot(i, c)?,
            None => redundant.push(i),
        }
    }
    for &i in redundant.iter().rev() {
        std.rows.remove(i);
        std.basis.remove(i);
    }

    // phase 2: reduced-cost row of the real objective against the basis
    let mut cost2: Vec<T> = vec![T::zero(); total + 1];
    cost2[..nstruct].clone_from_slice(&min_cost);
    for (i, &b) in std.basis.iter().enumerate() {
        let cb = cost2[b].clone();
        if cb.is_zero() {
            continue;
        }
        for j in 0..=total {
            let v = std.rows[i][j].clone();
            if !v.is_zero() {
                cost2[j] = cost2[j].try_sub(&v.try_mul(&cb)?)?;
            }
        }
    }
    std.cost = cost2;

    let status = std.run(|j| j >= art_start)?;
    if status == LpStatus::Unbounded {
        return Some(Ok(LpSolution {
            status: LpStatus::Unbounded,
            primal: Vec::new(),
            dual: Vec::new(),
            objective: Rat::zero(),
        }));
    }

    // primal values in y-space
    let mut y = vec![Rat::zero(); total];
    for (i, &b) in std.basis.iter().enumerate() {
        y[b] = std.rows[i][total].to_rat();
    }
    let mut primal = Vec::with_capacity(nvars);
    for (p, q, negate) in &var_cols {
        let mut v = y[*p].clone();
        if let Some(q) = q {
            v = &v - &y[*q];
        }
        if *negate {
            v = -v;
        }
        primal.push(v);
    }

    // duals: pi_i = -reduced(indicator column of row i), sign-adjusted;
    // redundant rows take multiplier zero
    let mut dual = Vec::with_capacity(m);
    for (i, (col, flipped)) in dual_col.iter().enumerate() {
        if redundant.contains(&i) {
            dual.push(Rat::zero());
            continue;
        }
        let mut pi = -std.cost[*col].to_rat();
        if *flipped {
            pi = -pi;
        }
        if lp.direction == Direction::Max {
            pi = -pi;
        }
        dual.push(pi);
    }

    let objective = lp.objective_value(&primal);

    // certify before returning: feasibility on both sides plus equal
    // objectives implies optimality (and complementary slackness)
    if !lp.is_primal_feasible(&primal) {
        return Some(Err(Error::InvalidSpec("internal: simplex primal infeasible".into())));
    }
    if !lp.is_dual_feasible(&dual) {
        return Some(Err(Error::InvalidSpec("internal: simplex dual infeasible".into())));
    }
    if lp.dual_objective(&dual) != objective {
        return Some(Err(Error::InvalidSpec("internal: strong duality gap".into())));
    }

    Some(Ok(LpSolution { status: LpStatus::Optimal, primal, dual, objective }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(
        bounds: Vec<VarBound>,
        cons: Vec<(Vec<(usize, i64)>, Rel, i64)>,
        dir: Direction,
        obj: Vec<(usize, i64)>,
    ) -> LinearProgram {
        LinearProgram {
            var_bounds: bounds,
            constraints: cons
                .into_iter()
                .map(|(coeffs, rel, rhs)| Constraint {
                    coeffs: coeffs.into_iter().map(|(j, v)| (j, Rat::from(v))).collect(),
                    rel,
                    rhs: Rat::from(rhs),
                })
                .collect(),
            direction: dir,
            objective: obj.into_iter().map(|(j, v)| (j, Rat::from(v))).collect(),
        }
    }

    #[test]
    fn simple_box_max() {
        // max w1 + w2 s.t. w1 <= 1, w2 <= 1, w free
        let p = lp(
            vec![VarBound::Free, VarBound::Free],
            vec![(vec![(0, 1)], Rel::Le, 1), (vec![(1, 1)], Rel::Le, 1)],
            Direction::Max,
            vec![(0, 1), (1, 1)],
        );
        let sol = simplex_solve(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, Rat::from(2));
        assert_eq!(sol.primal, vec![Rat::one(), Rat::one()]);
    }

    #[test]
    fn equality_and_duals() {
        // min x + 2y s.t. x + y = 1, x,y >= 0 -> 1 at (1,0), dual 1
        let p = lp(
            vec![VarBound::NonNeg, VarBound::NonNeg],
            vec![(vec![(0, 1), (1, 1)], Rel::Eq, 1)],
            Direction::Min,
            vec![(0, 1), (1, 2)],
        );
        let sol = simplex_solve(&p).unwrap();
        assert_eq!(sol.objective, Rat::one());
        assert_eq!(sol.dual, vec![Rat::one()]);
    }

    #[test]
    fn infeasible_detected() {
        let p = lp(
            vec![VarBound::NonNeg],
            vec![(vec![(0, 1)], Rel::Le, -1)],
            Direction::Min,
            vec![(0, 1)],
        );
        let sol = simplex_solve(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let p = lp(
            vec![VarBound::NonNeg],
            vec![(vec![(0, 1)], Rel::Ge, 1)],
            Direction::Max,
            vec![(0, 1)],
        );
        let sol = simplex_solve(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn nonpos_variables() {
        // max w + z s.t. w + z <= 1, z <= 0 -> w = 1, z = 0
        let p = lp(
            vec![VarBound::Free, VarBound::NonPos],
            vec![(vec![(0, 1), (1, 1)], Rel::Le, 1)],
            Direction::Max,
            vec![(0, 1), (1, 1)],
        );
        let sol = simplex_solve(&p).unwrap();
        assert_eq!(sol.objective, Rat::one());
        assert_eq!(sol.primal[1], Rat::zero());
    }

    #[test]
    fn degenerate_terminates() {
        // a classically cycling-prone instance (Beale); Bland terminates
        let p = LinearProgram {
            var_bounds: vec![VarBound::NonNeg; 4],
            constraints: vec![
                Constraint {
                    coeffs: vec![
                        (0, Rat::new(1, 4)),
                        (1, Rat::from(-8)),
                        (2, Rat::from(-1)),
                        (3, Rat::from(9)),
                    ],
                    rel: Rel::Le,
                    rhs: Rat::zero(),
                },
                Constraint {
                    coeffs: vec![
                        (0, Rat::new(1, 2)),
                        (1, Rat::from(-12)),
                        (2, Rat::new(-1, 2)),
                        (3, Rat::from(3)),
                    ],
                    rel: Rel::Le,
                    rhs: Rat::zero(),
                },
                Constraint { coeffs: vec![(2, Rat::one())], rel: Rel::Le, rhs: Rat::one() },
            ],
            direction: Direction::Max,
            objective: vec![
                (0, Rat::new(3, 4)),
                (1, Rat::from(-20)),
                (2, Rat::new(1, 2)),
                (3, Rat::from(-6)),
            ],
        };
        let sol = simplex_solve(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, Rat::new(5, 4));
    }

    #[test]
    fn weak_duality_of_feasible_dual_points() {
        // min 3x + 2y s.t. x + y >= 2, x - y >= -1
        let p = lp(
            vec![VarBound::NonNeg, VarBound::NonNeg],
            vec![(vec![(0, 1), (1, 1)], Rel::Ge, 2), (vec![(0, 1), (1, -1)], Rel::Ge, -1)],
            Direction::Min,
            vec![(0, 3), (1, 2)],
        );
        let sol = simplex_solve(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        // any feasible dual point is a lower bound
        let y = vec![Rat::one(), Rat::zero()];
        assert!(p.is_dual_feasible(&y));
        assert!(p.dual_objective(&y) <= sol.objective);
        assert_eq!(p.dual_objective(&sol.dual), sol.objective);
    }

    #[test]
    fn permuting_rows_keeps_objective() {
        let base = lp(
            vec![VarBound::Free, VarBound::Free, VarBound::NonPos],
            vec![
                (vec![(0, 1), (2, 1)], Rel::Le, 1),
                (vec![(1, 1), (2, 1)], Rel::Le, 1),
                (vec![(0, 1), (1, 1), (2, 2)], Rel::Le, 1),
            ],
            Direction::Max,
            vec![(0, 1), (1, 1), (2, 3)],
        );
        let sol = simplex_solve(&base).unwrap();
        let mut permuted = base.clone();
        permuted.constraints.rotate_left(1);
        let sol2 = simplex_solve(&permuted).unwrap();
        assert_eq!(sol.objective, sol2.objective);
    }

    #[test]
    fn json_round_trip() {
        let p = lp(
            vec![VarBound::NonNeg, VarBound::Free],
            vec![(vec![(0, 1), (1, -2)], Rel::Ge, 3)],
            Direction::Min,
            vec![(0, 5)],
        );
        let js = serde_json::to_string(&p.to_json()).unwrap();
        let back = LinearProgram::from_json(&serde_json::from_str(&js).unwrap()).unwrap();
        let a = simplex_solve(&p).unwrap();
        let b = simplex_solve(&back).unwrap();
        assert_eq!(a.objective, b.objective);
    }
}
