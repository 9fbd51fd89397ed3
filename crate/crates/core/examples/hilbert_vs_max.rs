//! The ratio max/H on structured tuples and a constructed tuple where the
//! maximum multi-norm strictly exceeds the Hilbert multi-norm.

use multinorm::optkernel::OptimizerConfig;
use multinorm::spaces::{Exponent, ScalarField, SequenceSpace, VectorTuple};
use multinorm::torus_geometry::{elliptope_gap_tuple, max_hilbert_ratio, structured_tuples};

fn main() -> multinorm::Result<()> {
    let cfg = OptimizerConfig::default();
    for n in 2..=5 {
        let space = SequenceSpace::new(n, Exponent::TWO, ScalarField::Complex)?;
        for (name, rows) in structured_tuples(n, n, ScalarField::Complex) {
            let (ratio, mx, h) = max_hilbert_ratio(&VectorTuple::new(space, rows)?, &cfg)?;
            println!("n={n} {name:<18} max={:.6} (<= {:.6})  H={:.6}  ratio={ratio:.6}", mx.value, mx.upper_bound.unwrap_or(f64::NAN), h.value);
        }
    }
    let x = VectorTuple::new(SequenceSpace::new(4, Exponent::TWO, ScalarField::Complex)?, elliptope_gap_tuple(4, 0.02))?;
    let (ratio, _, h) = max_hilbert_ratio(&x, &cfg)?;
    println!("elliptope gap tuple: H = {:.9} (sqrt 4 = 2), max/H = {ratio:.6}, ceiling 2/sqrt(pi) = {:.6}", h.value, 2.0 / std::f64::consts::PI.sqrt());
    Ok(())
}
