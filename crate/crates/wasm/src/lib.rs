//! Browser demo bindings: build the paper-family matrices, compute LP
//! bounds, and verify the built-in certificates, all in the page.
//!
//! Every export returns a JSON string; the page parses and renders it. The
//! demo sticks to instances that finish comfortably inside a browser frame
//! budget (the 35x35 majority matrix is CLI-only).

use wasm_bindgen::prelude::*;

use rectbound::bound::{strengthened_bound, BoundOptions, BoundOutcome};
use rectbound::certificate::verify_certificate;
use rectbound::error::Error;
use rectbound::rat::Rat;
use rectbound::report::{family_certificate, family_matrix, parse_family};
use rectbound::submatrix::Family;

fn err_json(err: &Error) -> String {
    format!("{{\"error\": {}}}", serde_json::to_string(&err.to_string()).unwrap())
}

fn family_of(name: &str) -> Result<(Family, u32), Error> {
    let (fam, param) = name
        .split_once('-')
        .ok_or_else(|| Error::Parse(format!("preset {name:?}, expected e.g. \"maj-1\"")))?;
    let family = parse_family(fam)?;
    let param: u32 = param.parse().map_err(|_| Error::Parse(format!("bad parameter in {name:?}")))?;
    Ok((family, param))
}

/// Presets the page offers, with display labels.
#[wasm_bindgen]
pub fn presets() -> String {
    r#"[
  {"id": "maj-1", "label": "MAJ3 (3-bit majority, general cells)"},
  {"id": "maj-2", "label": "MAJ5 (5-bit majority, general cells)"},
  {"id": "urec-2", "label": "Unbalanced recursive majority, height 2"},
  {"id": "urec-3", "label": "Unbalanced recursive majority, height 3"},
  {"id": "brec-2", "label": "Balanced recursive majority, height 2 (9x9)"},
  {"id": "brec-3", "label": "Balanced recursive majority, height 3 (27x27)"}
]"#
    .to_string()
}

/// The preset's communication matrix as JSON, plus singleton-cell serials.
#[wasm_bindgen]
pub fn matrix_json(preset: &str) -> String {
    let go = || -> Result<String, Error> {
        let (family, param) = family_of(preset)?;
        let m = family_matrix(family, param)?;
        let singles: Vec<(usize, u32)> =
            m.singleton_cells().into_iter().map(|(c, i)| (c.0, i)).collect();
        let doc = serde_json::json!({
            "matrix": m.to_json(),
            "singletons": singles,
        });
        Ok(doc.to_string())
    };
    go().unwrap_or_else(|e| err_json(&e))
}

/// LP bound of the preset's matrix, optionally strengthened with the
/// built-in clique/rank families.
#[wasm_bindgen]
pub fn bound_json(preset: &str, with_groups: bool) -> String {
    let go = || -> Result<String, Error> {
        let (family, param) = family_of(preset)?;
        let opts = BoundOptions { oracle_budget: 20_000_000, max_rounds: 200 };
        let out = if with_groups {
            let built = family_certificate(family, param, family == Family::Brec && param != 2)?;
            strengthened_bound(&built.matrix, &built.cert.cliques, &built.cert.ranks, &opts)?
        } else {
            let m = family_matrix(family, param)?;
            rectbound::bound::lp_bound(&m, &opts)?
        };
        let doc = match out {
            BoundOutcome::Final { value, stats } => serde_json::json!({
                "status": "final",
                "value": value.to_string(),
                "decimal": value.to_decimal(6),
                "integral_bound": value.ceil_int().to_string(),
                "rounds": stats.rounds,
                "rects": stats.rect_constraints,
            }),
            BoundOutcome::Interval { lo, hi, stats } => serde_json::json!({
                "status": "interval",
                "lower": lo.to_string(),
                "upper": hi.to_string(),
                "rounds": stats.rounds,
            }),
        };
        Ok(doc.to_string())
    };
    go().unwrap_or_else(|e| err_json(&e))
}

/// Verify the preset's built-in certificate and return its weights for the
/// cell overlay, every violation included.
#[wasm_bindgen]
pub fn certificate_json(preset: &str) -> String {
    let go = || -> Result<String, Error> {
        let (family, param) = family_of(preset)?;
        let built = family_certificate(family, param, false)?;
        let report = verify_certificate(&built.matrix, &built.cert, 20_000_000)?;
        let weights: Vec<(usize, String, String)> = built
            .cert
            .weights
            .iter()
            .map(|(c, w)| (c.0, w.to_string(), w.to_decimal(4)))
            .collect();
        let violations: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        let clique_cells: Vec<Vec<usize>> = built
            .cert
            .cliques
            .iter()
            .map(|q| q.pairs.iter().flat_map(|(a, b)| [a.0, b.0]).collect())
            .collect();
        let max_singleton = built
            .cert
            .weights
            .iter()
            .map(|(_, w)| w.clone())
            .max()
            .unwrap_or_else(Rat::one);
        let doc = serde_json::json!({
            "declared": built.declared.to_string(),
            "objective": report.objective.to_string(),
            "objective_decimal": report.objective.to_decimal(6),
            "feasible": report.feasible,
            "violations": violations,
            "weights": weights,
            "cliques": clique_cells,
            "weight_scale": max_singleton.to_decimal(6),
        });
        Ok(doc.to_string())
    };
    go().unwrap_or_else(|e| err_json(&e))
}
