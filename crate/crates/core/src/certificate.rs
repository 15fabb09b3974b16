//! Dual certificates: cell weights plus clique/rank constraint multipliers,
//! machine-checked down to every invariant.
//!
//! A certificate proves a formula size lower bound once (a) each clique's
//! generator pairs pairwise share a row and a column, which forces all member
//! rectangles to intersect, (b) each rank constraint's claimed stability
//! number is an upper bound for its member family, and (c) no monochromatic
//! rectangle's weight-plus-penalty sum exceeds 1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::matrix::{CellRef, CommMatrix, MatrixJson};
use crate::mis::max_independent_set;
use crate::oracle::{max_linear_form, OracleOutcome, PenaltyGroup, RectLinearForm};
use crate::rat::Rat;
use crate::rect::{is_monochromatic, rects_intersect, Rect};

/// Generator-pair clique: a rectangle is a member iff it contains both cells
/// of at least one pair. Validity is certified by the shared-row-and-column
/// condition across pairs, which makes all members pairwise intersecting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CliqueSpec {
    pub pairs: Vec<(CellRef, CellRef)>,
    pub z: Rat,
}

/// Rank constraint: members as above, bounded by `alpha` instead of 1.
/// Soundness comes from the witness-cell matching argument: every member
/// contains two witness cells, and disjoint members consume disjoint pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankSpec {
    pub pairs: Vec<(CellRef, CellRef)>,
    pub alpha: u64,
    pub witness: Vec<CellRef>,
    pub z: Rat,
}

#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub matrix_id: String,
    /// Sparse weights; unlisted cells weigh 0.
    pub weights: Vec<(CellRef, Rat)>,
    pub cliques: Vec<CliqueSpec>,
    pub ranks: Vec<RankSpec>,
    /// Declared objective, recomputed and cross-checked on verification.
    pub objective: Rat,
}

impl DualCertificate {
    /// sum of weights + sum of clique multipliers + sum of alpha-scaled rank
    /// multipliers
    pub fn computed_objective(&self) -> Rat {
        let mut v = Rat::zero();
        for (_, w) in &self.weights {
            v += w;
        }
        for q in &self.cliques {
            v += &q.z;
        }
        for g in &self.ranks {
            v += &(&Rat::from(g.alpha as i64) * &g.z);
        }
        v
    }

    pub fn dense_weights(&self, m: &CommMatrix) -> Result<Vec<Rat>> {
        let ncells = m.nrows() * m.ncols();
        let mut dense = vec![Rat::zero(); ncells];
        for (cell, w) in &self.weights {
            if cell.0 == 0 || cell.0 > ncells {
                return Err(Error::OutOfRange("certificate cell serial", cell.0.to_string()));
            }
            dense[cell.0 - 1] = w.clone();
        }
        Ok(dense)
    }

    pub fn to_form(&self, m: &CommMatrix) -> Result<RectLinearForm> {
        let weights = self.dense_weights(m)?;
        let mut groups = Vec::new();
        for q in &self.cliques {
            groups.push(PenaltyGroup { pairs: q.pairs.clone(), z: q.z.clone() });
        }
        for g in &self.ranks {
            groups.push(PenaltyGroup { pairs: g.pairs.clone(), z: g.z.clone() });
        }
        Ok(RectLinearForm { weights, groups })
    }

    pub fn to_json(&self, matrix: MatrixRefJson) -> CertificateJson {
        CertificateJson {
            matrix,
            weights: self
                .weights
                .iter()
                .map(|(c, w)| WeightJson { cell: c.0, value: w.clone() })
                .collect(),
            cliques: self.cliques.clone(),
            ranks: self.ranks.clone(),
            objective: self.objective.clone(),
        }
    }

    pub fn from_json(j: &CertificateJson) -> Self {
        DualCertificate {
            matrix_id: match &j.matrix {
                MatrixRefJson::Id(s) => s.clone(),
                MatrixRefJson::Inline(m) => format!("inline n={}", m.n),
            },
            weights: j.weights.iter().map(|w| (CellRef(w.cell), w.value.clone())).collect(),
            cliques: j.cliques.clone(),
            ranks: j.ranks.clone(),
            objective: j.objective.clone(),
        }
    }
}

/// Certificate JSON: serials are 1-based row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateJson {
    pub matrix: MatrixRefJson,
    pub weights: Vec<WeightJson>,
    pub cliques: Vec<CliqueSpec>,
    pub ranks: Vec<RankSpec>,
    pub objective: Rat,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixRefJson {
    Id(String),
    Inline(MatrixJson),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightJson {
    pub cell: usize,
    pub value: Rat,
}

#[derive(Debug, Clone)]
pub enum Violation {
    CliqueInvalid { index: usize, reason: String },
    RankInvalid { index: usize, reason: String },
    RectOverLimit { rect: Rect, value: Rat },
    Undecided { color: u32, best: Rat, upper: Rat },
    ObjectiveMismatch { declared: Rat, computed: Rat },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CliqueInvalid { index, reason } => {
                write!(f, "clique #{index}: {reason}")
            }
            Violation::RankInvalid { index, reason } => write!(f, "rank #{index}: {reason}"),
            Violation::RectOverLimit { rect, value } => {
                write!(f, "rectangle {:?} has value {value} > 1", rect.to_json())
            }
            Violation::Undecided { color, best, upper } => write!(
                f,
                "color {color}: oracle budget exhausted, value in [{best}, {upper}]"
            ),
            Violation::ObjectiveMismatch { declared, computed } => {
                write!(f, "declared objective {declared} differs from computed {computed}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub feasible: bool,
    /// Recomputed objective (the declared one is cross-checked against it).
    pub objective: Rat,
    pub violations: Vec<Violation>,
    /// False when some oracle call hit its budget, leaving feasibility open.
    pub exact: bool,
}

/// The spanned rectangle of a generator pair with its forced color, after
/// checking both cells are singletons of the same index.
fn pair_span(m: &CommMatrix, a: CellRef, b: CellRef) -> std::result::Result<Rect, String> {
    let ncells = m.nrows() * m.ncols();
    if a.0 == 0 || a.0 > ncells || b.0 == 0 || b.0 > ncells {
        return Err(format!("pair serial out of range ({}, {})", a.0, b.0));
    }
    if a == b {
        return Err(format!("pair uses the same cell twice (serial {})", a.0));
    }
    let ia = m.cell_at(a).sole().ok_or_else(|| format!("cell {} is not singleton", a.0))?;
    let ib = m.cell_at(b).sole().ok_or_else(|| format!("cell {} is not singleton", b.0))?;
    if ia != ib {
        return Err(format!("cells {} and {} hold different indices {ia} vs {ib}", a.0, b.0));
    }
    let (ra, ca) = a.row_col(m.ncols());
    let (rb, cb) = b.row_col(m.ncols());
    let rect = Rect::new((1 << ra) | (1 << rb), (1u64 << ca) | (1 << cb), ia);
    if !is_monochromatic(m, &rect) {
        return Err(format!("span of cells {} and {} is not monochromatic", a.0, b.0));
    }
    Ok(rect)
}

/// Validate a clique: singleton same-index pairs, monochromatic spans, and
/// every two pairs sharing at least one row and at least one column.
pub fn validate_clique(m: &CommMatrix, clique: &CliqueSpec) -> std::result::Result<(), String> {
    if clique.pairs.is_empty() {
        return Err("clique has no generator pairs".into());
    }
    if clique.z.is_positive() {
        return Err(format!("multiplier {} is positive", clique.z));
    }
    let mut spans = Vec::new();
    for &(a, b) in &clique.pairs {
        spans.push(pair_span(m, a, b)?);
    }
    for i in 0..spans.len() {
        for j in i + 1..spans.len() {
            if spans[i].rows & spans[j].rows == 0 || spans[i].cols & spans[j].cols == 0 {
                return Err(format!(
                    "pairs {i} and {j} do not share both a row and a column"
                ));
            }
        }
    }
    Ok(())
}

/// Validate a rank constraint. The claimed stability number must be an upper
/// bound for the member family: exact, because a member is any rectangle
/// containing some pair's span, so pairwise-disjoint members select
/// pairwise-disjoint spans and the span-disjointness graph decides alpha.
pub fn validate_rank(m: &CommMatrix, rank: &RankSpec) -> std::result::Result<(), String> {
    if rank.pairs.is_empty() {
        return Err("rank constraint has no generator pairs".into());
    }
    if rank.z.is_positive() {
        return Err(format!("multiplier {} is positive", rank.z));
    }
    let ncells = m.nrows() * m.ncols();
    for w in &rank.witness {
        if w.0 == 0 || w.0 > ncells {
            return Err(format!("witness serial {} out of range", w.0));
        }
    }
    let mut spans = Vec::new();
    for &(a, b) in &rank.pairs {
        let span = pair_span(m, a, b)?;
        let hits = rank
            .witness
            .iter()
            .filter(|w| {
                let (r, c) = w.row_col(m.ncols());
                span.contains_cell(r, c)
            })
            .count();
        if hits < 2 {
            return Err(format!(
                "span of pair ({}, {}) contains {hits} witness cells, needs 2",
                a.0, b.0
            ));
        }
        spans.push(span);
    }
    // matching bound: every member consumes two witness cells
    let matching_bound = (rank.witness.len() / 2) as u64;
    if rank.alpha >= matching_bound {
        return Ok(());
    }
    // otherwise the exact stability number over the spans decides
    let mut edges = Vec::new();
    for i in 0..spans.len() {
        for j in i + 1..spans.len() {
            if rects_intersect(&spans[i], &spans[j]) {
                edges.push((i, j));
            }
        }
    }
    let (alpha, _) = max_independent_set(spans.len(), &edges)
        .map_err(|e| format!("stability check failed: {e}"))?;
    if rank.alpha < alpha as u64 {
        return Err(format!(
            "claimed alpha {} is below the exact member stability number {alpha}",
            rank.alpha
        ));
    }
    Ok(())
}

/// Exact stability number of the member family of a rank constraint.
pub fn rank_stability_number(m: &CommMatrix, rank: &RankSpec) -> Result<usize> {
    let mut spans = Vec::new();
    for &(a, b) in &rank.pairs {
        spans.push(pair_span(m, a, b).map_err(Error::InvalidSpec)?);
    }
    let mut edges = Vec::new();
    for i in 0..spans.len() {
        for j in i + 1..spans.len() {
            if rects_intersect(&spans[i], &spans[j]) {
                edges.push((i, j));
            }
        }
    }
    Ok(max_independent_set(spans.len(), &edges)?.0)
}

/// Check a certificate end to end: constraint-family invariants, the
/// per-color rectangle maxima, and the declared objective.
pub fn verify_certificate(
    m: &CommMatrix,
    cert: &DualCertificate,
    oracle_budget: usize,
) -> Result<VerifyReport> {
    let mut violations = Vec::new();
    for (i, q) in cert.cliques.iter().enumerate() {
        if let Err(reason) = validate_clique(m, q) {
            violations.push(Violation::CliqueInvalid { index: i, reason });
        }
    }
    for (i, g) in cert.ranks.iter().enumerate() {
        if let Err(reason) = validate_rank(m, g) {
            violations.push(Violation::RankInvalid { index: i, reason });
        }
    }

    let mut exact = true;
    if violations.is_empty() {
        let form = cert.to_form(m)?;
        let mut outcomes: Vec<(u32, OracleOutcome)> = m
            .colors_present()
            .into_par_iter()
            .map(|color| max_linear_form(m, &form, color, oracle_budget).map(|o| (color, o)))
            .collect::<Result<Vec<_>>>()?;
        outcomes.sort_by_key(|(c, _)| *c);
        let one = Rat::one();
        for (color, out) in outcomes {
            if out.exact {
                if out.value > one {
                    violations.push(Violation::RectOverLimit { rect: out.rect, value: out.value });
                }
            } else if out.upper > one {
                exact = false;
                violations.push(Violation::Undecided { color, best: out.value, upper: out.upper });
            }
        }
    }

    let computed = cert.computed_objective();
    if computed != cert.objective {
        violations.push(Violation::ObjectiveMismatch {
            declared: cert.objective.clone(),
            computed: computed.clone(),
        });
    }

    Ok(VerifyReport { feasible: violations.is_empty(), objective: computed, violations, exact })
}

/// Weight pattern tangent to the per-rectangle limit: with
/// `a = (2k* - 1)/k*^2` and `b = -1/k*^2`, the parabola `k a + (k^2 - k) b`
/// equals `1 - (k - k*)^2 / k*^2`, so it peaks at exactly 1 at `k = k*`.
#[derive(Debug, Clone)]
pub struct TangencyScheme {
    pub kstar: Rat,
    pub a: Rat,
    pub b: Rat,
    /// group multiplier used when base cells move to a clique: 2b
    pub relax: Rat,
}

impl TangencyScheme {
    pub fn new(kstar: Rat) -> Self {
        assert!(kstar.is_positive());
        let ksq = &kstar * &kstar;
        let a = &(&(&Rat::from(2) * &kstar) - &Rat::one()) / &ksq;
        let b = -(Rat::one() / ksq);
        let relax = &Rat::from(2) * &b;
        TangencyScheme { kstar, a, b, relax }
    }

    /// `k a + (k^2 - k) b`
    pub fn value_at(&self, k: &Rat) -> Rat {
        let ksq = k * k;
        &(k * &self.a) + &(&(&ksq - k) * &self.b)
    }

    /// The tangency identity bounds the parabola by 1 everywhere; this checks
    /// it explicitly on the integer grid.
    pub fn holds_on_integer_grid(&self, kmax: u64) -> bool {
        let one = Rat::one();
        (1..=kmax).all(|k| self.value_at(&Rat::from(k as i64)) <= one)
    }
}

/// ceil(v) as used for integral bound reporting.
pub fn integral_bound(v: &Rat) -> BigInt {
    v.ceil_int()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bool_fn::maj;
    use crate::matrix::{build_matrix, Mode, Restriction};

    fn fig1() -> CommMatrix {
        build_matrix(&maj(3).unwrap(), Mode::General, Restriction::Terms).unwrap()
    }

    fn maj3_clique() -> CliqueSpec {
        CliqueSpec {
            pairs: vec![
                (CellRef(2), CellRef(6)),
                (CellRef(1), CellRef(9)),
                (CellRef(4), CellRef(8)),
            ],
            z: -Rat::one(),
        }
    }

    #[test]
    fn clique_validation_passes_and_fails() {
        let m = fig1();
        assert!(validate_clique(&m, &maj3_clique()).is_ok());
        // non-singleton cell rejected
        let bad = CliqueSpec { pairs: vec![(CellRef(3), CellRef(6))], z: -Rat::one() };
        assert!(validate_clique(&m, &bad).unwrap_err().contains("not singleton"));
        // different indices rejected
        let bad = CliqueSpec { pairs: vec![(CellRef(1), CellRef(2))], z: -Rat::one() };
        assert!(validate_clique(&m, &bad).unwrap_err().contains("different indices"));
        // positive multiplier rejected
        let bad = CliqueSpec { pairs: maj3_clique().pairs, z: Rat::one() };
        assert!(validate_clique(&m, &bad).unwrap_err().contains("positive"));
    }

    #[test]
    fn all_zero_certificate_is_feasible() {
        let m = fig1();
        let cert = DualCertificate {
            matrix_id: "maj l=1 general terms".into(),
            weights: vec![],
            cliques: vec![],
            ranks: vec![],
            objective: Rat::zero(),
        };
        let report = verify_certificate(&m, &cert, 1_000_000).unwrap();
        assert!(report.feasible);
        assert_eq!(report.objective, Rat::zero());
    }

    #[test]
    fn overweight_singleton_is_reported() {
        let m = fig1();
        let cert = DualCertificate {
            matrix_id: "maj l=1".into(),
            weights: vec![(CellRef(1), Rat::from(2))],
            cliques: vec![],
            ranks: vec![],
            objective: Rat::from(2),
        };
        let report = verify_certificate(&m, &cert, 1_000_000).unwrap();
        assert!(!report.feasible);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::RectOverLimit { rect, .. } if rect.area() == 1)));
    }

    #[test]
    fn objective_mismatch_detected() {
        let m = fig1();
        let cert = DualCertificate {
            matrix_id: "maj l=1".into(),
            weights: vec![(CellRef(1), Rat::one())],
            cliques: vec![],
            ranks: vec![],
            objective: Rat::from(5),
        };
        let report = verify_certificate(&m, &cert, 1_000_000).unwrap();
        assert!(!report.feasible);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ObjectiveMismatch { .. })));
        assert_eq!(report.objective, Rat::one());
    }

    #[test]
    fn tangency_scheme_identities() {
        // reproduces the printed weight choices of both recursive families
        for h in 2..=3u32 {
            let scheme = TangencyScheme::new(Rat::new(3 * (1 << (h - 2)), 1));
            assert_eq!(scheme.a, Rat::new(24 * (1 << h) - 16, 9 * 4i64.pow(h)));
            assert_eq!(scheme.b, Rat::new(-16, 9 * 4i64.pow(h)));
        }
        for h in 1..=3u32 {
            let scheme = TangencyScheme::new(Rat::new(3i64.pow(h), 2i64.pow(h)));
            assert_eq!(scheme.a, Rat::new(2 * 6i64.pow(h) - 4i64.pow(h), 9i64.pow(h)));
            assert_eq!(scheme.b, Rat::new(-4i64.pow(h), 9i64.pow(h)));
        }
        // peak value is exactly 1 at k*
        let s = TangencyScheme::new(Rat::new(8, 3));
        assert_eq!(s.value_at(&s.kstar.clone()), Rat::one());
        assert!(s.holds_on_integer_grid(1 << 12));
    }

    #[test]
    fn tangency_symbolic_identity() {
        // k a + (k^2 - k) b == 1 - (k - k*)^2 / k*^2 for arbitrary rationals
        let s = TangencyScheme::new(Rat::new(29, 4));
        for k in [Rat::new(1, 1), Rat::new(29, 4), Rat::new(100, 7), Rat::new(-3, 2)] {
            let lhs = s.value_at(&k);
            let d = &k - &s.kstar;
            let rhs = &Rat::one() - &(&(&d * &d) / &(&s.kstar * &s.kstar));
            assert_eq!(lhs, rhs);
        }
    }
}
