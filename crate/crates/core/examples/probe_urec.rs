use rectbound::builders::{cert_urec, cert_brec};
use rectbound::certificate::verify_certificate;

fn main() {
    for h in 2..=3u32 {
        let built = cert_urec(h).unwrap();
        let t = std::time::Instant::now();
        let report = verify_certificate(&built.matrix, &built.cert, 50_000_000).unwrap();
        println!("urec h={h}: declared={} feasible={} exact={} ({} ms)", built.declared, report.feasible, report.exact, t.elapsed().as_millis());
        for v in report.violations.iter().take(4) {
            println!("   violation: {v}");
        }
    }
    let built = cert_brec(3).unwrap();
    let t = std::time::Instant::now();
    let report = verify_certificate(&built.matrix, &built.cert, 50_000_000).unwrap();
    println!("brec h=3: declared={} feasible={} exact={} ({} ms)", built.declared, report.feasible, report.exact, t.elapsed().as_millis());
    for v in report.violations.iter().take(4) {
        println!("   violation: {v}");
    }
}
