// Fit an epsilon-SVR to a noisy sine and inspect the solution.

use jamcast::featureset::EncodedSample;
use jamcast::svr::{dual_objective, train_svr_traced, SvrHyperparams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let samples: Vec<EncodedSample> = (0..60)
        .map(|i| {
            let x = i as f64 / 10.0;
            let wobble = if i % 2 == 0 { 0.05 } else { -0.05 };
            EncodedSample::new(vec![x], x.sin() + wobble)
        })
        .collect();
    let hp = SvrHyperparams {
        c: 10.0,
        epsilon: 0.1,
        gamma: 0.5,
        tol: 1e-4,
        max_passes: 1000,
    };
    let (model, trace) = train_svr_traced(&samples, &hp)?;

    let beta = model.coefficients_for(&samples)?;
    println!("support vectors: {} of {}", model.support_vectors().len(), samples.len());
    println!("bias: {:.5}", model.bias());
    println!("SMO iterations: {}", trace.len() - 1);
    println!("dual objective: {:.6}", dual_objective(&samples, &hp, &beta)?);
    println!("max KKT violation: {:.2e}", model.kkt_violation(&samples)?);
    for x in [0.5, 1.5, 3.0, 4.5] {
        println!("f({x}) = {:+.4}   sin = {:+.4}", model.predict(&[x])?, f64::sin(x));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
