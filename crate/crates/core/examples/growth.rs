//! Growth of delta-basis norms and of phi_n against the predicted powers of n.

use multinorm::classify::{delta_exponent, phi_exponent};
use multinorm::multinorms::{phi_estimate, pq_norm, MultiNormKind};
use multinorm::optkernel::OptimizerConfig;
use multinorm::spaces::{Exponent, ScalarField, SequenceSpace, VectorTuple};

fn main() -> multinorm::Result<()> {
    let cfg = OptimizerConfig::default();
    let (p, q, r) = (Exponent::TWO, Exponent::new(3.0)?, Exponent::TWO);
    println!("delta basis, (p,q) = (2,3), r = 2");
    for n in 1..=6 {
        let x = VectorTuple::delta_basis(n, r, ScalarField::Real)?;
        let v = pq_norm(&x, p, q, &cfg)?.value;
        println!("  n={n}: {v:.9} vs n^{:.4} = {:.9}", delta_exponent(2.0, 3.0, 2.0), (n as f64).powf(delta_exponent(2.0, 3.0, 2.0)));
    }
    let (p, q) = (Exponent::new(1.5)?, Exponent::new(2.0)?);
    println!("phi_n for (1.5,2) on complex l2");
    for n in 1..=3 {
        let space = SequenceSpace::new(n, Exponent::TWO, ScalarField::Complex)?;
        let est = phi_estimate(MultiNormKind::PQ { p, q }, space, n, &cfg)?;
        println!("  n={n}: {:.6} vs n^{:.4} = {:.6}", est.value.value, phi_exponent(p, q, Exponent::TWO), (n as f64).powf(est.predicted_exponent));
    }
    Ok(())
}
