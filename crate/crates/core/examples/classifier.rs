//! Symbolic equivalence decisions between multi-norms.

use multinorm::classify::{classify_pq_pair, classify_standard_t, classify_vs_max, classify_vs_min, curve_params, hilbert_ideal, TrianglePoint};
use multinorm::spaces::Exponent;

fn main() -> multinorm::Result<()> {
    let pt = TrianglePoint::from_f64;
    for r in [1.0, 1.5, 2.0, 4.0] {
        let r = Exponent::new(r)?;
        println!("r = {r}");
        for (a, b) in [(pt(1.0, 2.0)?, pt(1.5, 2.0)?), (pt(1.0, 3.0)?, pt(2.0, 2.0)?), (pt(1.0, 1.5)?, pt(1.2, 1.8)?)] {
            let v = classify_pq_pair(a, b, r);
            println!("  ({},{}) vs ({},{}): {:?}  [{}]", a.p, a.q, b.p, b.q, v.verdict, v.citation);
        }
        let p = pt(1.0, 4.0)?;
        println!("  (1,4) vs min: {:?}; vs max: {:?}", classify_vs_min(p, r).verdict, classify_vs_max(p, r).verdict);
        println!("  (1,4) vs standard 4: {:?}", classify_standard_t(p, Exponent::new(4.0)?, r)?.verdict);
        println!("  curve through (1,4): c = {:.4}", curve_params(p, r).c);
    }
    println!("Hilbert ideal of (1,3): {:?}", hilbert_ideal(pt(1.0, 3.0)?));
    Ok(())
}
