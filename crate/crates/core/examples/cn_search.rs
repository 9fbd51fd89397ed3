//! Lower bounds for the best constant c_n with max <= c_n H.

use multinorm::optkernel::OptimizerConfig;
use multinorm::spaces::ScalarField;
use multinorm::torus_geometry::cn_lower_bound;

fn main() -> multinorm::Result<()> {
    let cfg = OptimizerConfig { restarts: 8, ..Default::default() };
    for (n, d) in [(2, 2), (3, 3), (4, 4)] {
        let rep = cn_lower_bound(n, d, ScalarField::Complex, &cfg)?;
        println!(
            "n={n} d={d}: ratio {:.6} (conservative {:.6}) from {} after {} candidates",
            rep.ratio, rep.conservative_ratio, rep.origin, rep.candidates_evaluated
        );
    }
    Ok(())
}
