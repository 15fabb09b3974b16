use rectbound::bound::{strengthened_bound, BoundOptions, BoundOutcome};
use rectbound::builders::cert_urec;

fn main() {
    let built = cert_urec(2).unwrap();
    for rounds in [1usize, 3, 6, 10, 20, 40, 80, 160] {
        let t = std::time::Instant::now();
        let opts = BoundOptions { oracle_budget: 50_000_000, max_rounds: rounds };
        let out = strengthened_bound(&built.matrix, &built.cert.cliques, &[], &opts).unwrap();
        match &out {
            BoundOutcome::Final { value, stats } => {
                println!(
                    "rounds<={rounds}: FINAL {value} rects={} ({} ms)",
                    stats.rect_constraints,
                    t.elapsed().as_millis()
                );
                break;
            }
            BoundOutcome::Interval { lo, hi, stats } => println!(
                "rounds<={rounds}: [{} , {}] rects={} ({} ms)",
                lo.to_decimal(4),
                hi.to_decimal(4),
                stats.rect_constraints,
                t.elapsed().as_millis()
            ),
        }
    }
}
