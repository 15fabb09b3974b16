use rectbound::builders::cert_urec;
use rectbound::oracle::{max_linear_form, PenaltyGroup, RectLinearForm};
use rectbound::rat::Rat;

fn main() {
    eprintln!("building certificate...");
    let built = cert_urec(2).unwrap();
    let m = &built.matrix;
    eprintln!("matrix {}x{}", m.nrows(), m.ncols());
    // first CG round: all-ones weights, zero multipliers
    let form = RectLinearForm {
        weights: vec![Rat::one(); m.nrows() * m.ncols()],
        groups: built
            .cert
            .cliques
            .iter()
            .map(|q| PenaltyGroup { pairs: q.pairs.clone(), z: Rat::zero() })
            .collect(),
    };
    for color in m.colors_present() {
        let t = std::time::Instant::now();
        let out = max_linear_form(m, &form, color, 50_000_000).unwrap();
        eprintln!(
            "color {color}: value {} exact {} nodes {} ({} ms)",
            out.value,
            out.exact,
            out.nodes,
            t.elapsed().as_millis()
        );
    }
}
