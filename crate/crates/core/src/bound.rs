//! LP lower bounds by constraint generation against the rectangle oracle.
//!
//! The dual of the fractional rectangle cover is solved over an implicit,
//! typically exponential constraint family: start from the per-cell unit
//! caps, repeatedly solve the restricted dual, and ask the oracle for a
//! maximum-value rectangle of each color; any value above 1 becomes a new
//! constraint. Termination certifies the exact optimum because the final
//! weights are feasible for every rectangle at once.
//!
//! Cells never touched by a generated rectangle are presolved to weight 1,
//! which keeps the LP at the size of the interesting region.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::certificate::{validate_clique, validate_rank, CliqueSpec, RankSpec};
use crate::error::{Error, Result};
use crate::lp::CoverLp;
use crate::matrix::{CellRef, CommMatrix};
use crate::oracle::{max_linear_form_collect, OracleOutcome, PenaltyGroup, RectLinearForm};
use crate::rat::Rat;
use crate::rect::Rect;

#[derive(Debug, Clone, Copy)]
pub struct BoundOptions {
    /// node budget per oracle call
    pub oracle_budget: usize,
    /// constraint-generation rounds before giving up with an interval
    pub max_rounds: usize,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions { oracle_budget: crate::oracle::DEFAULT_ORACLE_BUDGET, max_rounds: 400 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CgStats {
    pub rounds: usize,
    pub rect_constraints: usize,
    pub oracle_nodes: usize,
}

/// Outcome of a bound computation: either the exact optimum or a certified
/// enclosure when a budget ran out.
#[derive(Debug, Clone)]
pub enum BoundOutcome {
    Final { value: Rat, stats: CgStats },
    Interval { lo: Rat, hi: Rat, stats: CgStats },
}

impl BoundOutcome {
    pub fn value(&self) -> &Rat {
        match self {
            BoundOutcome::Final { value, .. } => value,
            BoundOutcome::Interval { lo, .. } => lo,
        }
    }

    pub fn is_final(&self) -> bool {
        matches!(self, BoundOutcome::Final { .. })
    }

    /// Certified lower bound on the true optimum (the scaled dual point).
    pub fn lower(&self) -> &Rat {
        match self {
            BoundOutcome::Final { value, .. } => value,
            BoundOutcome::Interval { lo, .. } => lo,
        }
    }
}

/// Exact optimum of the plain rectangle-cover LP dual on this matrix.
pub fn lp_bound(m: &CommMatrix, opts: &BoundOptions) -> Result<BoundOutcome> {
    strengthened_bound(m, &[], &[], opts)
}

/// Exact optimum of the dual extended with clique and rank constraints.
/// Constraint families are re-validated before anything is solved.
pub fn strengthened_bound(
    m: &CommMatrix,
    cliques: &[CliqueSpec],
    ranks: &[RankSpec],
    opts: &BoundOptions,
) -> Result<BoundOutcome> {
    for (i, q) in cliques.iter().enumerate() {
        validate_clique(m, q).map_err(|reason| Error::InvalidSpec(format!("clique #{i}: {reason}")))?;
    }
    for (i, g) in ranks.iter().enumerate() {
        validate_rank(m, g).map_err(|reason| Error::InvalidSpec(format!("rank #{i}: {reason}")))?;
    }

    let ncells = m.nrows() * m.ncols();
    let ncols = m.ncols();
    // groups in fixed order: cliques then ranks; a clique is capacity 1,
    // a rank constraint capacity alpha
    struct Group {
        pairs: Vec<(CellRef, CellRef)>,
        capacity: Rat,
    }
    let groups: Vec<Group> = cliques
        .iter()
        .map(|q| Group { pairs: q.pairs.clone(), capacity: Rat::one() })
        .chain(ranks.iter().map(|g| Group {
            pairs: g.pairs.clone(),
            capacity: Rat::from(g.alpha as i64),
        }))
        .collect();

    let member_of = |rect: &Rect, g: &Group| -> bool {
        g.pairs.iter().any(|(a, b)| {
            let (ra, ca) = a.row_col(ncols);
            let (rb, cb) = b.row_col(ncols);
            rect.contains_cell(ra, ca) && rect.contains_cell(rb, cb)
        })
    };

    let mut lp = CoverLp::new(ncells, groups.iter().map(|g| g.capacity.clone()).collect());
    let mut seen: HashSet<Rect> = HashSet::new();
    let mut stats = CgStats::default();
    let trace = std::env::var("RECTBOUND_TRACE").is_ok();

    let mut append = |lp: &mut CoverLp, rect: &Rect| {
        let cells: Vec<usize> = rect.cells(m).map(|cell| cell.0 - 1).collect();
        let memberships: Vec<usize> =
            groups.iter().enumerate().filter(|(_, g)| member_of(rect, g)).map(|(i, _)| i).collect();
        lp.add_column(cells, memberships);
    };

    // seed with the spans of same-color singleton pairs: these are the cuts
    // the structured certificates live on, and they spare the first rounds
    // from separating against the trivial all-ones point
    {
        let singles = m.singleton_cells();
        let mut seeds: Vec<Rect> = Vec::new();
        'outer: for (i, &(ca, color_a)) in singles.iter().enumerate() {
            for &(cb, color_b) in singles.iter().skip(i + 1) {
                if color_a != color_b {
                    continue;
                }
                let (ra, cca) = ca.row_col(ncols);
                let (rb, ccb) = cb.row_col(ncols);
                let rect =
                    Rect::new((1u64 << ra) | (1 << rb), (1u64 << cca) | (1 << ccb), color_a);
                if crate::rect::is_monochromatic(m, &rect) {
                    seeds.push(rect);
                }
                if seeds.len() > 600 {
                    seeds.clear();
                    break 'outer;
                }
            }
        }
        for rect in seeds {
            if seen.insert(rect) {
                append(&mut lp, &rect);
            }
        }
    }

    loop {
        let lp_started = std::time::Instant::now();
        let duals = lp.reoptimize();
        let lp_ms = lp_started.elapsed().as_millis();
        let restricted_obj = &duals.objective + &Rat::from(ncells as i64);
        let mut dense_w = vec![Rat::one(); ncells];
        for (c, y) in duals.cell_duals.iter().enumerate() {
            if !y.is_zero() {
                dense_w[c] = &Rat::one() + y;
            }
        }
        let zvals = duals.group_duals;

        // separation: one oracle call per color
        let one = Rat::one();
        let form = RectLinearForm {
            weights: dense_w,
            groups: groups
                .iter()
                .zip(zvals.iter())
                .map(|(g, z)| PenaltyGroup { pairs: g.pairs.clone(), z: z.clone() })
                .collect(),
        };
        let sep_started = std::time::Instant::now();
        let mut outcomes: Vec<(u32, OracleOutcome)> = m
            .colors_present()
            .into_par_iter()
            .map(|color| {
                max_linear_form_collect(m, &form, color, opts.oracle_budget, &one)
                    .map(|o| (color, o))
            })
            .collect::<Result<Vec<_>>>()?;
        outcomes.sort_by_key(|(c, _)| *c);
        let sep_ms = sep_started.elapsed().as_millis();
        stats.oracle_nodes += outcomes.iter().map(|(_, o)| o.nodes).sum::<usize>();

        let all_exact = outcomes.iter().all(|(_, o)| o.exact);
        let worst = outcomes.iter().map(|(_, o)| o.upper.clone()).max().unwrap_or_else(Rat::one);
        if trace {
            eprintln!(
                "cg round {}: columns={} obj={} worst={} lp={}ms sep={}ms",
                stats.rounds,
                seen.len(),
                restricted_obj.to_decimal(4),
                worst.to_decimal(4),
                lp_ms,
                sep_ms
            );
        }

        if all_exact && worst <= one {
            stats.rect_constraints = seen.len();
            return Ok(BoundOutcome::Final { value: restricted_obj, stats });
        }

        stats.rounds += 1;
        let exhausted = !all_exact || stats.rounds >= opts.max_rounds;
        if exhausted {
            // scale the current dual point feasible: dividing all weights and
            // multipliers by the worst rectangle value preserves every
            // constraint, so value/worst is a certified lower bound
            stats.rect_constraints = seen.len();
            let lo = &restricted_obj / &worst;
            return Ok(BoundOutcome::Interval { lo, hi: restricted_obj, stats });
        }

        let mut added = false;
        for (_, out) in &outcomes {
            if out.value > one && seen.insert(out.rect) {
                append(&mut lp, &out.rect);
                added = true;
            }
            for v in &out.violators {
                if seen.insert(*v) {
                    append(&mut lp, v);
                    added = true;
                }
            }
        }
        if !added {
            return Err(Error::InvalidSpec(
                "internal: separation found violations but no new rectangle".into(),
            ));
        }
    }
}
#[cfg(test)]
mod tests {
    use super::*;
    use crate::bool_fn::maj;
    use crate::builders::cert_maj3;
    use crate::matrix::{build_matrix, Mode, Restriction};

    fn fig1() -> CommMatrix {
        build_matrix(&maj(3).unwrap(), Mode::General, Restriction::Terms).unwrap()
    }

    #[test]
    fn plain_lp_bound_is_nine_halves() {
        let out = lp_bound(&fig1(), &BoundOptions::default()).unwrap();
        let BoundOutcome::Final { value, .. } = out else { panic!("budget should suffice") };
        assert_eq!(value, Rat::new(9, 2));
    }

    #[test]
    fn clique_strengthening_reaches_five() {
        let built = cert_maj3().unwrap();
        let out = strengthened_bound(
            &built.matrix,
            &built.cert.cliques,
            &[],
            &BoundOptions::default(),
        )
        .unwrap();
        let BoundOutcome::Final { value, .. } = out else { panic!() };
        assert_eq!(value, Rat::from(5));
    }

    #[test]
    fn no_groups_matches_plain_bound() {
        let m = fig1();
        let a = lp_bound(&m, &BoundOptions::default()).unwrap();
        let b = strengthened_bound(&m, &[], &[], &BoundOptions::default()).unwrap();
        assert_eq!(a.value(), b.value());
    }

    #[test]
    fn one_by_one_matrix_bound_is_one() {
        let m = build_matrix(
            &maj(3).unwrap(),
            Mode::General,
            Restriction::Explicit {
                rows: vec![crate::bool_fn::BitVector::parse("110").unwrap()],
                cols: vec![crate::bool_fn::BitVector::parse("100").unwrap()],
            },
        )
        .unwrap();
        let out = lp_bound(&m, &BoundOptions::default()).unwrap();
        assert_eq!(*out.value(), Rat::one());
    }

    #[test]
    fn interval_on_tiny_budget() {
        let out = lp_bound(&fig1(), &BoundOptions { oracle_budget: 2, max_rounds: 400 }).unwrap();
        let BoundOutcome::Interval { lo, hi, .. } = out else { panic!("expected interval") };
        assert!(lo <= hi);
        // the enclosure must contain the true optimum
        assert!(lo <= Rat::new(9, 2) && Rat::new(9, 2) <= hi);
    }

    #[test]
    fn invalid_clique_is_rejected() {
        let m = fig1();
        let bad = CliqueSpec { pairs: vec![(CellRef(3), CellRef(5))], z: -Rat::one() };
        assert!(matches!(
            strengthened_bound(&m, &[bad], &[], &BoundOptions::default()),
            Err(Error::InvalidSpec(_))
        ));
    }
}
