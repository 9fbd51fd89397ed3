//! Maximizers of the phase problem on a torus for triples and the two
//! extremal witnesses.

use multinorm::optkernel::OptimizerConfig;
use multinorm::spaces::C64;
use multinorm::torus_geometry::{classify_triple, complex_witness_4_scaled, extreme_point_test, mu1_maximize, real_witness_3};

fn main() -> multinorm::Result<()> {
    let cfg = OptimizerConfig::default();
    let v = |z: &[(f64, f64)]| z.iter().map(|&(a, b)| C64::new(a, b)).collect::<Vec<_>>();
    let triple = [v(&[(1.0, 0.0), (0.0, 0.0)]), v(&[(0.5, 0.5), (1.0, 0.0)]), v(&[(-0.3, 0.0), (0.2, -0.8)])];
    let cls = classify_triple(&triple[0], &triple[1], &triple[2])?;
    println!("triple: class {:?}, max = {:.9}, {} maximizer class(es)", cls.class, cls.value, cls.maximizer_classes.len());

    for (name, y) in [("real witness", real_witness_3()), ("complex witness", complex_witness_4_scaled())] {
        let mu1 = mu1_maximize(&y, &cfg)?;
        let ext = extreme_point_test(&y, &cfg)?;
        println!(
            "{name}: mu1 = {:.9}, {} maximizer classes, nullspace {}, verdict {:?}",
            mu1.estimate.value,
            mu1.classes.len(),
            ext.nullspace_dim,
            ext.verdict
        );
    }
    Ok(())
}
