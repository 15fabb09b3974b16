//! Built-in dual certificates for the majority and recursive-majority
//! families. Builders construct weights and constraint groups; acceptance is
//! decided by [`crate::certificate::verify_certificate`], and the bound layer
//! falls back to solving when a constructed certificate does not verify.

use crate::bool_fn::maj;
use crate::certificate::{CliqueSpec, DualCertificate, RankSpec, TangencyScheme};
use crate::error::{Error, Result};
use crate::matrix::{build_matrix, CellRef, CommMatrix, Mode, Restriction};
use crate::rat::Rat;
use crate::submatrix::{brec_submatrix, urec_submatrix, Layout, SubmatrixSpec};

/// A certificate together with the matrix it lives on and the closed-form
/// objective it is expected to reach.
#[derive(Debug, Clone)]
pub struct BuiltCertificate {
    pub matrix: CommMatrix,
    pub spec: Option<SubmatrixSpec>,
    pub cert: DualCertificate,
    /// Closed-form target value; always equals `cert.objective` for the
    /// built-in schemes (asserted at construction).
    pub declared: Rat,
}

fn serial(m: &CommMatrix, row: usize, col: usize) -> CellRef {
    CellRef::from_row_col(row, col, m.ncols())
}

/// Unit weights on the six singleton cells plus one clique of the three
/// same-index singleton pairs at multiplier -1; objective 5 = 6 - 1.
pub fn cert_maj3() -> Result<BuiltCertificate> {
    let m = build_matrix(&maj(3)?, Mode::General, Restriction::Terms)?;
    let weights: Vec<(CellRef, Rat)> =
        m.singleton_cells().into_iter().map(|(cell, _)| (cell, Rat::one())).collect();
    debug_assert_eq!(weights.len(), 6);
    let clique = CliqueSpec {
        pairs: vec![
            (CellRef(2), CellRef(6)), // index 1
            (CellRef(1), CellRef(9)), // index 2
            (CellRef(4), CellRef(8)), // index 3
        ],
        z: -Rat::one(),
    };
    let cert = DualCertificate {
        matrix_id: "maj l=1 general terms".into(),
        weights,
        cliques: vec![clique],
        ranks: vec![],
        objective: Rat::from(5),
    };
    assert_eq!(cert.computed_objective(), Rat::from(5));
    Ok(BuiltCertificate { matrix: m, spec: None, cert, declared: Rat::from(5) })
}

fn combinations(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Tangency-weight certificate for the `2l+1`-bit majority on its
/// terms-restricted general matrix: weight `a` on distance-1 cells, 0 on
/// distance-3 cells, `b` on the rest, one clique per embedded 3x3 majority
/// submatrix at multiplier `2b`. Objective `(l+1)^2 / (1 - eps(l))` where
/// `eps(l) = l^2 (l+1) / (6 C(2l+1, l))`.
pub fn cert_maj(l: u32) -> Result<BuiltCertificate> {
    if !(2..=3).contains(&l) {
        return Err(Error::OutOfRange("majority certificate parameter", l.to_string()));
    }
    let n = 2 * l + 1;
    let m = build_matrix(&maj(n)?, Mode::General, Restriction::Terms)?;
    let mm = m.nrows() as i64;

    // saturation point k* = m/(l+1) - l^2/6
    let kstar = &Rat::new(mm, (l + 1) as i64) - &Rat::new((l * l) as i64, 6);
    let scheme = TangencyScheme::new(kstar);

    let mut weights = Vec::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let w = match m.cell(r, c).len() {
                1 => scheme.a.clone(),
                3 => continue,
                _ => scheme.b.clone(),
            };
            weights.push((serial(&m, r, c), w));
        }
    }

    // one clique per (3 chosen positions, balanced context on the rest)
    let row_at = |bits: u32| -> usize {
        m.rows().iter().position(|v| v.encoding() == bits).expect("minterm row")
    };
    let col_at = |bits: u32| -> usize {
        m.cols().iter().position(|v| v.encoding() == bits).expect("maxterm col")
    };
    let all_vars: Vec<u32> = (1..=n).collect();
    let mut cliques = Vec::new();
    for chosen in combinations(&all_vars, 3) {
        let (p1, p2, p3) = (chosen[0], chosen[1], chosen[2]);
        let rest: Vec<u32> = all_vars.iter().copied().filter(|v| !chosen.contains(v)).collect();
        for ones in combinations(&rest, (l - 1) as usize) {
            let ctx: u32 = ones.iter().map(|v| 1u32 << (v - 1)).sum();
            let bit = |v: u32| 1u32 << (v - 1);
            let cell = |x: u32, y: u32| {
                let (r, c) = (row_at(x), col_at(y));
                serial(&m, r, c)
            };
            // same-index singleton pairs of the embedded 3x3 block
            let pairs = vec![
                (cell(ctx | bit(p1) | bit(p2), ctx | bit(p2)), cell(ctx | bit(p1) | bit(p3), ctx | bit(p3))),
                (cell(ctx | bit(p1) | bit(p2), ctx | bit(p1)), cell(ctx | bit(p2) | bit(p3), ctx | bit(p3))),
                (cell(ctx | bit(p1) | bit(p3), ctx | bit(p1)), cell(ctx | bit(p2) | bit(p3), ctx | bit(p2))),
            ];
            cliques.push(CliqueSpec { pairs, z: scheme.relax.clone() });
        }
    }
    let expected_cliques =
        (l as u64 * l as u64 * (l as u64 + 1) * binomial(n as u64, l as u64)) / 6;
    assert_eq!(cliques.len() as u64, expected_cliques);

    // declared objective (l+1)^2 / (1 - eps)
    let eps = Rat::new((l * l * (l + 1)) as i64, 6 * binomial(n as u64, l as u64) as i64);
    let declared = &Rat::from(((l + 1) * (l + 1)) as i64) / &(&Rat::one() - &eps);

    let mut cert = DualCertificate {
        matrix_id: format!("maj l={l} general terms"),
        weights,
        cliques,
        ranks: vec![],
        objective: Rat::zero(),
    };
    cert.objective = cert.computed_objective();
    assert_eq!(cert.objective, declared, "tangency bookkeeping must match the closed form");
    Ok(BuiltCertificate { matrix: m, spec: None, cert, declared })
}

// the 12 cliques and the 18-pair rank subgraph of the height-2 balanced
// submatrix, by 1-based row-major serials of its 9x9 grid
const BREC2_CLIQUES: [[(usize, usize); 3]; 12] = [
    [(5, 15), (4, 24), (13, 23)],
    [(35, 45), (34, 54), (43, 53)],
    [(2, 12), (1, 21), (10, 20)],
    [(62, 72), (61, 81), (70, 80)],
    [(29, 39), (28, 48), (37, 47)],
    [(59, 69), (58, 78), (67, 77)],
    [(5, 35), (2, 62), (29, 59)],
    [(15, 45), (12, 72), (39, 69)],
    [(4, 34), (1, 61), (28, 58)],
    [(24, 54), (21, 81), (48, 78)],
    [(13, 43), (10, 70), (37, 67)],
    [(23, 53), (20, 80), (47, 77)],
];

const BREC2_RANK_PAIRS: [(usize, usize); 18] = [
    (5, 45),
    (15, 35),
    (4, 54),
    (24, 34),
    (13, 53),
    (23, 43),
    (2, 72),
    (12, 62),
    (1, 81),
    (21, 61),
    (10, 80),
    (20, 70),
    (29, 69),
    (39, 59),
    (28, 78),
    (48, 58),
    (37, 77),
    (47, 67),
];

const BREC2_RANK_WITNESS: [usize; 9] = [9, 17, 25, 33, 41, 49, 57, 65, 73];

/// Unit weights on all 36 singleton cells of the height-2 balanced
/// submatrix, the 12 listed cliques, and one rank constraint with claimed
/// stability number 4 over the anti-diagonal witness cells; all multipliers
/// -1, objective 36 - 12 - 4 = 20.
pub fn cert_brec2() -> Result<BuiltCertificate> {
    let (m, spec) = brec_submatrix(2)?;
    let weights: Vec<(CellRef, Rat)> =
        m.singleton_cells().into_iter().map(|(cell, _)| (cell, Rat::one())).collect();
    assert_eq!(weights.len(), 36);
    let cliques: Vec<CliqueSpec> = BREC2_CLIQUES
        .iter()
        .map(|pairs| CliqueSpec {
            pairs: pairs.iter().map(|&(a, b)| (CellRef(a), CellRef(b))).collect(),
            z: -Rat::one(),
        })
        .collect();
    let rank = RankSpec {
        pairs: BREC2_RANK_PAIRS.iter().map(|&(a, b)| (CellRef(a), CellRef(b))).collect(),
        alpha: 4,
        witness: BREC2_RANK_WITNESS.iter().map(|&s| CellRef(s)).collect(),
        z: -Rat::one(),
    };
    let cert = DualCertificate {
        matrix_id: "brec h=2 submatrix".into(),
        weights,
        cliques,
        ranks: vec![rank],
        objective: Rat::from(20),
    };
    assert_eq!(cert.computed_objective(), Rat::from(20));
    Ok(BuiltCertificate { matrix: m, spec: Some(spec), cert, declared: Rat::from(20) })
}

/// Tangency certificate for the unbalanced family on its recursive
/// submatrix: weight `a` on base-block singletons, `b` on the rest of the
/// all-base region, `1/(3 2^{h-2})` on the per-level designated cells, one
/// clique per base block at `2b`. Declared objective `4h + (8/9) 2^{-h}`.
pub fn cert_urec(h: u32) -> Result<BuiltCertificate> {
    if !(2..=3).contains(&h) {
        return Err(Error::OutOfRange("unbalanced certificate height", h.to_string()));
    }
    let (m, spec) = urec_submatrix(h)?;
    let Layout::Urec { all_s1_rows, all_s1_cols, s1_blocks, xy_levels } = &spec.layout else {
        unreachable!()
    };
    let scheme = TangencyScheme::new(Rat::from(3 * (1i64 << (h - 2))));

    let mut weights: Vec<(CellRef, Rat)> = Vec::new();
    // all-base region: a on base-block singletons, 0 inside base blocks
    // otherwise, b on the mixed-path cells
    let mut in_block = vec![false; m.nrows() * m.ncols()];
    for block in s1_blocks {
        for &r in &block.rows {
            for &c in &block.cols {
                in_block[r * m.ncols() + c] = true;
                let cell = serial(&m, r, c);
                if m.cell(r, c).is_singleton() {
                    weights.push((cell, scheme.a.clone()));
                }
            }
        }
    }
    for &r in all_s1_rows {
        for &c in all_s1_cols {
            if !in_block[r * m.ncols() + c] {
                weights.push((serial(&m, r, c), scheme.b.clone()));
            }
        }
    }
    // designated per-level cells
    let xy_weight = Rat::new(1, 3 * (1i64 << (h - 2)));
    for xy in xy_levels {
        for &(r, c) in xy.x_lo.iter().chain(&xy.x_hi).chain(&xy.y_lo).chain(&xy.y_hi) {
            weights.push((serial(&m, r, c), xy_weight.clone()));
        }
    }

    // one clique per base block: the three same-index singleton pairs
    let mut cliques = Vec::new();
    for block in s1_blocks {
        let cell = |r: usize, c: usize| serial(&m, block.rows[r], block.cols[c]);
        cliques.push(CliqueSpec {
            pairs: vec![
                (cell(0, 1), cell(1, 2)), // index 1
                (cell(0, 0), cell(2, 2)), // index 2
                (cell(1, 0), cell(2, 1)), // index 3
            ],
            z: scheme.relax.clone(),
        });
    }

    let mut cert = DualCertificate {
        matrix_id: format!("urec h={h} submatrix"),
        weights,
        cliques,
        ranks: vec![],
        objective: Rat::zero(),
    };
    cert.objective = cert.computed_objective();
    // 4h + (8/9) 2^{-h}
    let declared = &Rat::from(4 * h as i64) + &Rat::new(8, 9 * (1i64 << h));
    assert_eq!(cert.objective, declared, "per-level bookkeeping must match the closed form");
    Ok(BuiltCertificate { matrix: m, spec: Some(spec), cert, declared })
}

/// Tangency certificate for the balanced family on its same-structure
/// submatrix: weight `a` on all singleton cells, 0 elsewhere inside the
/// height-2 blocks, `b` outside them; per block the 12 cliques and the rank
/// constraint at multiplier `2b`. Declared objective
/// `4^h + (13/36) (8/3)^h`.
pub fn cert_brec(h: u32) -> Result<BuiltCertificate> {
    if !(2..=3).contains(&h) {
        return Err(Error::OutOfRange("balanced certificate height", h.to_string()));
    }
    let (m, spec) = brec_submatrix(h)?;
    let Layout::Brec { s2_blocks } = &spec.layout else { unreachable!() };
    let scheme = TangencyScheme::new(Rat::new(3i64.pow(h), 1 << h));

    let mut in_block = vec![false; m.nrows() * m.ncols()];
    for block in s2_blocks {
        for &r in &block.rows {
            for &c in &block.cols {
                in_block[r * m.ncols() + c] = true;
            }
        }
    }
    let mut weights: Vec<(CellRef, Rat)> = Vec::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let cell = m.cell(r, c);
            if cell.is_singleton() {
                debug_assert!(in_block[r * m.ncols() + c]);
                weights.push((serial(&m, r, c), scheme.a.clone()));
            } else if !in_block[r * m.ncols() + c] {
                weights.push((serial(&m, r, c), scheme.b.clone()));
            }
        }
    }

    let mut cliques = Vec::new();
    let mut ranks = Vec::new();
    for block in s2_blocks {
        let map = |s: usize| -> CellRef {
            let (r, c) = ((s - 1) / 9, (s - 1) % 9);
            serial(&m, block.rows[r], block.cols[c])
        };
        for pairs in &BREC2_CLIQUES {
            cliques.push(CliqueSpec {
                pairs: pairs.iter().map(|&(a, b)| (map(a), map(b))).collect(),
                z: scheme.relax.clone(),
            });
        }
        ranks.push(RankSpec {
            pairs: BREC2_RANK_PAIRS.iter().map(|&(a, b)| (map(a), map(b))).collect(),
            alpha: 4,
            witness: BREC2_RANK_WITNESS.iter().map(|&s| map(s)).collect(),
            z: scheme.relax.clone(),
        });
    }

    let mut cert = DualCertificate {
        matrix_id: format!("brec h={h} submatrix"),
        weights,
        cliques,
        ranks,
        objective: Rat::zero(),
    };
    cert.objective = cert.computed_objective();
    // 4^h + (13/36) (8/3)^h
    let declared =
        &Rat::from(4i64.pow(h)) + &(&Rat::new(13, 36) * &Rat::new(8i64.pow(h), 3i64.pow(h)));
    assert_eq!(cert.objective, declared, "block bookkeeping must match the closed form");
    Ok(BuiltCertificate { matrix: m, spec: Some(spec), cert, declared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{validate_clique, validate_rank, verify_certificate};

    #[test]
    fn maj3_certificate_verifies_at_five() {
        let built = cert_maj3().unwrap();
        assert_eq!(built.cert.objective, Rat::from(5));
        let report = verify_certificate(&built.matrix, &built.cert, 10_000_000).unwrap();
        assert!(report.feasible, "violations: {:?}", report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>());
        assert_eq!(report.objective, Rat::from(5));
    }

    #[test]
    fn maj_l2_closed_forms() {
        let built = cert_maj(2).unwrap();
        // eps(2) = 12/60 = 1/5, objective 9 / (4/5) = 45/4
        assert_eq!(built.declared, Rat::new(45, 4));
        assert_eq!(built.cert.cliques.len(), 20);
        // k* = 10/3 - 2/3 = 8/3
        assert_eq!(built.cert.objective, Rat::new(45, 4));
    }

    #[test]
    fn maj_l3_closed_forms() {
        let built = cert_maj(3).unwrap();
        assert_eq!(built.declared, Rat::new(560, 29));
        assert_eq!(built.cert.cliques.len(), 210);
    }

    #[test]
    fn maj_l2_certificate_verifies() {
        let built = cert_maj(2).unwrap();
        let report = verify_certificate(&built.matrix, &built.cert, 10_000_000).unwrap();
        assert!(report.feasible, "violations: {:?}", report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>());
        assert_eq!(report.objective, Rat::new(45, 4));
    }

    #[test]
    fn brec2_certificate_structure() {
        let built = cert_brec2().unwrap();
        assert_eq!(built.cert.objective, Rat::from(20));
        for q in &built.cert.cliques {
            validate_clique(&built.matrix, q).unwrap();
        }
        validate_rank(&built.matrix, &built.cert.ranks[0]).unwrap();
        // the witness argument: pair (5,45) spans corners {5, 9, 41, 45} and
        // cells 9 and 41 are on the witness diagonal
        let span = [5usize, 9, 41, 45];
        let witness_hits: Vec<usize> =
            span.iter().copied().filter(|s| BREC2_RANK_WITNESS.contains(s)).collect();
        assert_eq!(witness_hits, [9, 41]);
    }

    #[test]
    fn brec2_certificate_verifies_at_twenty() {
        let built = cert_brec2().unwrap();
        let report = verify_certificate(&built.matrix, &built.cert, 10_000_000).unwrap();
        assert!(report.feasible, "violations: {:?}", report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>());
        assert_eq!(report.objective, Rat::from(20));
    }

    #[test]
    fn urec_declared_values() {
        assert_eq!(cert_urec(2).unwrap().declared, Rat::new(74, 9));
        assert_eq!(cert_urec(3).unwrap().declared, Rat::new(109, 9));
    }

    #[test]
    fn brec_declared_values() {
        assert_eq!(cert_brec(2).unwrap().declared, Rat::new(1504, 81));
        assert_eq!(cert_brec(3).unwrap().declared, Rat::new(17216, 243));
    }

    #[test]
    fn brec_h2_tangency_certificate_verifies() {
        let built = cert_brec(2).unwrap();
        let report = verify_certificate(&built.matrix, &built.cert, 10_000_000).unwrap();
        assert!(report.feasible, "violations: {:?}", report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>());
        assert_eq!(report.objective, Rat::new(1504, 81));
    }

    #[test]
    fn base_scheme_degenerates_to_four_at_height_one() {
        // 6a + 3b with the height-1 tangency weights
        let s = TangencyScheme::new(Rat::new(3, 2));
        let v = &(&Rat::from(6) * &s.a) + &(&Rat::from(3) * &s.b);
        assert_eq!(v, Rat::from(4));
    }
}
