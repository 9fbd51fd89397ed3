//! The five multi-norm families on one tuple, with witnesses re-evaluated.

use multinorm::multinorms::{evaluate_at_witness, norm, MultiNormKind};
use multinorm::optkernel::OptimizerConfig;
use multinorm::spaces::{Exponent, ScalarField, SequenceSpace, VectorTuple};

fn main() -> multinorm::Result<()> {
    let cfg = OptimizerConfig::default();
    let space = SequenceSpace::new(3, Exponent::TWO, ScalarField::Real)?;
    let x = VectorTuple::from_real(space, &[vec![1.0, 0.5, 0.0], vec![0.0, 1.0, -1.0], vec![0.3, 0.0, 2.0]])?;
    for kind in ["min", "pq:1,4", "pq:2,3", "std:3", "std:2", "hilbert", "max"] {
        let kind: MultiNormKind = kind.parse()?;
        let est = norm(kind, &x, &cfg)?;
        let again = evaluate_at_witness(kind, &x, &est.witness).unwrap_or(f64::NAN);
        println!("{:<10} {:>12.9}  {:<20} witness gives {:.9}", kind.to_string(), est.value, format!("{:?}", est.certification), again);
    }
    Ok(())
}
