use rectbound::bound::{lp_bound, strengthened_bound, BoundOptions, BoundOutcome};
use rectbound::builders::{cert_urec, cert_brec2};
use rectbound::submatrix::brec_submatrix;

fn show(label: &str, out: &BoundOutcome) {
    match out {
        BoundOutcome::Final { value, stats } => println!(
            "{label}: FINAL {value} (~{}) rounds={} rects={} nodes={}",
            value.to_decimal(4), stats.rounds, stats.rect_constraints, stats.oracle_nodes
        ),
        BoundOutcome::Interval { lo, hi, stats } => println!(
            "{label}: INTERVAL [{lo}, {hi}] rounds={} rects={}",
            stats.rounds, stats.rect_constraints
        ),
    }
}

fn main() {
    let opts = BoundOptions::default();
    for h in 2..=3u32 {
        let built = cert_urec(h).unwrap();
        let t = std::time::Instant::now();
        let out = strengthened_bound(&built.matrix, &built.cert.cliques, &[], &opts).unwrap();
        show(&format!("urec h={h} lp+cliques (target {})", built.declared), &out);
        println!("   {} ms", t.elapsed().as_millis());
        let t = std::time::Instant::now();
        let lp = lp_bound(&built.matrix, &opts).unwrap();
        show(&format!("urec h={h} lp only"), &lp);
        println!("   {} ms", t.elapsed().as_millis());
    }
    let (m9, _) = brec_submatrix(2).unwrap();
    let t = std::time::Instant::now();
    let out = lp_bound(&m9, &opts).unwrap();
    show("brec2 9x9 lp only (target <= 33/2)", &out);
    println!("   {} ms", t.elapsed().as_millis());
    let built = cert_brec2().unwrap();
    let t = std::time::Instant::now();
    let out = strengthened_bound(&built.matrix, &built.cert.cliques, &built.cert.ranks, &opts).unwrap();
    show("brec2 9x9 lp+12cliques+rank (cert gives 20)", &out);
    println!("   {} ms", t.elapsed().as_millis());
}
