//! Epsilon-support vector regression with an RBF kernel.
//!
//! Training solves the dual problem with SMO (see [`smo`]); the fitted
//! function is `f(x) = sum_i beta_i K(sv_i, x) + bias` with
//! `beta_i = alpha_i - alpha*_i`, `|beta_i| <= C` and `sum_i beta_i = 0`.
//!
//! ```
//! use jamcast::featureset::EncodedSample;
//! use jamcast::svr::{train_svr, SvrHyperparams};
//!
//! let samples: Vec<_> = (0..6)
//!     .map(|i| EncodedSample::new(vec![i as f64 / 5.0], (i as f64 / 5.0).sin()))
//!     .collect();
//! let hp = SvrHyperparams { c: 10.0, epsilon: 0.01, gamma: 1.0, ..Default::default() };
//! let model = train_svr(&samples, &hp).unwrap();
//! assert!((model.predict(&[0.3]).unwrap() - 0.3f64.sin()).abs() < 0.05);
//! ```

mod kernel;
mod model;
mod smo;

pub use kernel::{rbf_kernel, GramMatrix};
pub use model::SvrModel;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featureset::{EncodedSample, ScalerParams};

/// Epsilon-SVR hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvrHyperparams {
    /// Box constraint on each dual coefficient.
    pub c: f64,
    /// Half-width of the insensitive tube.
    pub epsilon: f64,
    /// RBF width.
    pub gamma: f64,
    /// KKT tolerance used as the stopping criterion.
    pub tol: f64,
    /// Iteration budget, in multiples of the training set size.
    pub max_passes: usize,
}

impl Default for SvrHyperparams {
    /// `C = 10`, `epsilon = 0.1`, `gamma = 1/9` (one over the feature
    /// dimension), `tol = 1e-3`, `max_passes = 1000`.
    fn default() -> Self {
        Self::for_dimension(crate::featureset::FEATURE_DIM)
    }
}

impl SvrHyperparams {
    /// Defaults with `gamma = 1/dim`.
    pub fn for_dimension(dim: usize) -> Self {
        Self {
            c: 10.0,
            epsilon: 0.1,
            gamma: 1.0 / dim.max(1) as f64,
            tol: 1e-3,
            max_passes: 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::validation(name, format!("must be positive and finite, got {v}")))
            }
        };
        positive("c", self.c)?;
        positive("gamma", self.gamma)?;
        positive("tol", self.tol)?;
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::validation(
                "epsilon",
                format!("must be non-negative and finite, got {}", self.epsilon),
            ));
        }
        if self.max_passes == 0 {
            return Err(Error::validation("max_passes", "must be at least 1"));
        }
        Ok(())
    }
}

fn check_samples(samples: &[EncodedSample]) -> Result<usize> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "SVR training needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    check_consistent(samples)
}

/// Common dimension of non-empty `samples`, all values finite.
fn check_consistent(samples: &[EncodedSample]) -> Result<usize> {
    let dim = samples[0].dim();
    if dim == 0 {
        return Err(Error::Shape("samples have no features".into()));
    }
    for (i, s) in samples.iter().enumerate() {
        if s.dim() != dim {
            return Err(Error::Shape(format!(
                "sample {i} has dimension {}, expected {dim}",
                s.dim()
            )));
        }
        if !s.target.is_finite() || s.features.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation(format!("samples[{i}]"), "non-finite value"));
        }
    }
    Ok(dim)
}

fn train_inner(
    samples: &[EncodedSample],
    hp: &SvrHyperparams,
    trace: Option<&mut Vec<f64>>,
) -> Result<SvrModel> {
    hp.validate()?;
    let dim = check_samples(samples)?;
    let points: Vec<Vec<f64>> = samples.iter().map(|s| s.features.clone()).collect();
    let targets: Vec<f64> = samples.iter().map(|s| s.target).collect();
    let gram = GramMatrix::new(&points, hp.gamma)?;
    let problem = smo::SmoProblem {
        gram: &gram,
        targets: &targets,
        c: hp.c,
        epsilon: hp.epsilon,
        tol: hp.tol,
        max_iterations: hp.max_passes.saturating_mul(samples.len()),
    };
    let solution = smo::solve(&problem, trace)?;
    log::debug!(
        "SMO converged after {} iterations on {} samples",
        solution.iterations,
        samples.len()
    );

    let mut support_vectors = Vec::new();
    let mut dual_coefs = Vec::new();
    for (point, beta) in points.into_iter().zip(solution.beta) {
        if beta != 0.0 {
            support_vectors.push(point);
            dual_coefs.push(beta);
        }
    }
    SvrModel::from_parts(
        support_vectors,
        dual_coefs,
        solution.bias,
        *hp,
        ScalerParams::identity(dim),
        format!("generic:{dim}"),
    )
}

/// Trains an epsilon-SVR on already-scaled samples.
///
/// The returned model carries an identity scaler and a generic layout tag;
/// the pipeline replaces both. The solver is deterministic, so identical
/// inputs give bitwise-identical models.
pub fn train_svr(samples: &[EncodedSample], hp: &SvrHyperparams) -> Result<SvrModel> {
    train_inner(samples, hp, None)
}

/// Like [`train_svr`], also returning the dual objective after every SMO
/// iteration (starting with the all-zero point).
pub fn train_svr_traced(
    samples: &[EncodedSample],
    hp: &SvrHyperparams,
) -> Result<(SvrModel, Vec<f64>)> {
    let mut trace = Vec::new();
    let model = train_inner(samples, hp, Some(&mut trace))?;
    Ok((model, trace))
}

/// Epsilon-SVR dual objective (maximization form) at coefficients `beta`:
///
/// ```text
/// W(beta) = -1/2 beta'K beta - eps * sum|beta_i| + sum y_i beta_i
/// ```
pub fn dual_objective(samples: &[EncodedSample], hp: &SvrHyperparams, beta: &[f64]) -> Result<f64> {
    hp.validate()?;
    if samples.len() != beta.len() {
        return Err(Error::Shape(format!(
            "{} samples but {} coefficients",
            samples.len(),
            beta.len()
        )));
    }
    if samples.is_empty() {
        return Ok(0.0);
    }
    check_consistent(samples)?;
    let sum: f64 = beta.iter().sum();
    if sum.abs() > 1e-9 {
        return Err(Error::validation("dual_coefs", format!("sum to {sum:e}, expected 0")));
    }
    if let Some(b) = beta.iter().find(|b| b.abs() > hp.c || !b.is_finite()) {
        return Err(Error::validation("dual_coefs", format!("{b} outside [-C, C]")));
    }
    let mut quad = 0.0;
    for (i, si) in samples.iter().enumerate() {
        if beta[i] == 0.0 {
            continue;
        }
        for (j, sj) in samples.iter().enumerate() {
            if beta[j] != 0.0 {
                quad += beta[i] * beta[j] * kernel::rbf_unchecked(&si.features, &sj.features, hp.gamma);
            }
        }
    }
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    let fit: f64 = samples.iter().zip(beta).map(|(s, b)| s.target * b).sum();
    Ok(-0.5 * quad - hp.epsilon * l1 + fit)
}
