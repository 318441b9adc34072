#![allow(dead_code)]

pub mod oracle;
pub mod reference;

use jamcast::featureset::EncodedSample;
use jamcast::svr::SvrHyperparams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random small regression problem with random hyperparameters.
pub struct SmallProblem {
    pub samples: Vec<EncodedSample>,
    pub hp: SvrHyperparams,
    pub probes: Vec<Vec<f64>>,
}

pub fn small_problem(seed: u64, max_n: usize) -> SmallProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_n);
    let d = rng.random_range(1..=3);
    let samples = (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
            EncodedSample::new(x, rng.random_range(0.0..10.0))
        })
        .collect();
    let hp = SvrHyperparams {
        c: rng.random_range(0.5..10.0),
        epsilon: rng.random_range(0.01..0.5),
        gamma: rng.random_range(0.3..2.0),
        tol: 1e-7,
        max_passes: 100_000,
    };
    let probes = (0..20)
        .map(|_| (0..d).map(|_| rng.random_range(-2.5..2.5)).collect())
        .collect();
    SmallProblem { samples, hp, probes }
}

pub fn oracle_for(samples: &[EncodedSample], hp: &SvrHyperparams) -> oracle::Oracle {
    let xs: Vec<Vec<f64>> = samples.iter().map(|s| s.features.clone()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.target).collect();
    oracle::Oracle::new(&xs, &ys, hp.c, hp.epsilon, hp.gamma)
}
