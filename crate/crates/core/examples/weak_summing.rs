//! Operator norms, weak p-summing norms and summing constants.

use multinorm::optkernel::OptimizerConfig;
use multinorm::spaces::{Exponent, ScalarField, SequenceSpace, VectorTuple, C64};
use multinorm::weak_summing::{mu, mu_orthogonal_closed_form, op_norm, summing_constant_estimate, OperatorMatrix};

fn main() -> multinorm::Result<()> {
    let cfg = OptimizerConfig::default();
    let c = |re: f64| C64::new(re, 0.0);

    let a = OperatorMatrix::new(vec![vec![c(1.0), c(2.0)], vec![c(0.0), c(3.0)]], Exponent::TWO, Exponent::TWO, ScalarField::Real)?;
    let est = op_norm(&a, &cfg)?;
    println!("||A : l2 -> l2||       = {:.9} ({:?})", est.value, est.certification);

    let space = SequenceSpace::new(3, Exponent::TWO, ScalarField::Complex)?;
    let x = VectorTuple::new(space, vec![vec![c(3.0), c(0.0), c(0.0)], vec![c(0.0), c(4.0), c(0.0)], vec![c(0.0), c(0.0), c(12.0)]])?;
    for p in [1.0, 4.0 / 3.0, 2.0, 3.0] {
        let p = Exponent::new(p)?;
        let computed = mu(&x, p, &cfg)?;
        let closed = mu_orthogonal_closed_form(&x.row_norms(), p)?;
        println!("mu_{p}(x) = {:.9}   closed form {:.9}", computed.value, closed);
    }

    let id = OperatorMatrix::new(
        (0..3).map(|i| (0..3).map(|j| c(if i == j { 1.0 } else { 0.0 })).collect()).collect(),
        Exponent::TWO,
        Exponent::TWO,
        ScalarField::Real,
    )?;
    let (q, p) = (Exponent::new(2.0)?, Exponent::ONE);
    let pi = summing_constant_estimate(&id, q, p, 3, &cfg)?;
    println!("pi^(3)_(2,1)(I_3) >= {:.6}, never above 3^(1/2) = {:.6}", pi.value, 3f64.sqrt());
    Ok(())
}
