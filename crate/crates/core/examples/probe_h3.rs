use rectbound::bound::{lp_bound, strengthened_bound, BoundOptions, BoundOutcome};
use rectbound::builders::cert_urec;
use rectbound::submatrix::brec_submatrix;

fn show(label: &str, out: &BoundOutcome, ms: u128) {
    match out {
        BoundOutcome::Final { value, stats } => println!(
            "{label}: FINAL {value} (~{}) rounds={} rects={} ({} ms)",
            value.to_decimal(4), stats.rounds, stats.rect_constraints, ms
        ),
        BoundOutcome::Interval { lo, hi, stats } => println!(
            "{label}: INTERVAL [{} , {}] rounds={} ({} ms)",
            lo.to_decimal(4), hi.to_decimal(4), stats.rounds, ms
        ),
    }
}

fn main() {
    let opts = BoundOptions::default();
    let built = cert_urec(3).unwrap();
    let t = std::time::Instant::now();
    let out = strengthened_bound(&built.matrix, &built.cert.cliques, &[], &opts).unwrap();
    show("urec h=3 lp+cliques (target 109/9=12.111)", &out, t.elapsed().as_millis());
    let (m9, _) = brec_submatrix(2).unwrap();
    let t = std::time::Instant::now();
    let out = lp_bound(&m9, &opts).unwrap();
    show("brec2 9x9 lp (target <= 16.5)", &out, t.elapsed().as_millis());
}
