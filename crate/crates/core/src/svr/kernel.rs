//! Gaussian (RBF) kernel.

use crate::error::{Error, Result};

/// `exp(-gamma * ||x - y||^2)`.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "kernel arguments have dimensions {} and {}",
            x.len(),
            y.len()
        )));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    Ok(rbf_unchecked(x, y, gamma))
}

#[inline]
pub(crate) fn rbf_unchecked(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (-gamma * d2).exp()
}

/// Dense row-major Gram matrix.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    n: usize,
    values: Vec<f64>,
}

impl GramMatrix {
    /// Builds the full matrix, filling the lower triangle from the upper one
    /// so the result is exactly symmetric.
    pub fn new(points: &[Vec<f64>], gamma: f64) -> Result<Self> {
        let n = points.len();
        if let Some(first) = points.first() {
            if let Some(bad) = points.iter().find(|p| p.len() != first.len()) {
                return Err(Error::Shape(format!(
                    "points have dimensions {} and {}",
                    first.len(),
                    bad.len()
                )));
            }
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0;
            for j in (i + 1)..n {
                let k = rbf_unchecked(&points[i], &points[j], gamma);
                values[i * n + j] = k;
                values[j * n + i] = k;
            }
        }
        Ok(Self { n, values })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_points_give_one() {
        let x = [0.3, -1.2, 4.0];
        assert_eq!(rbf_kernel(&x, &x, 0.7).unwrap(), 1.0);
    }

    #[test]
    fn unit_exponent_gives_inverse_e() {
        // gamma * ||x - y||^2 = 0.25 * 4 = 1
        let k = rbf_kernel(&[0.0, 0.0], &[2.0, 0.0], 0.25).unwrap();
        assert!((k - 0.367_879_441_171_442_33).abs() < 1e-15);
    }

    #[test]
    fn symmetric() {
        let x = [0.1, 0.9];
        let y = [-2.0, 0.4];
        assert_eq!(
            rbf_kernel(&x, &y, 1.3).unwrap(),
            rbf_kernel(&y, &x, 1.3).unwrap()
        );
    }

    #[test]
    fn errors() {
        assert!(matches!(rbf_kernel(&[1.0], &[1.0, 2.0], 1.0), Err(Error::Shape(_))));
        assert!(matches!(rbf_kernel(&[1.0], &[1.0], 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn gram_is_symmetric_with_unit_diagonal() {
        let pts = vec![vec![0.0, 1.0], vec![0.5, -0.5], vec![2.0, 2.0]];
        let g = GramMatrix::new(&pts, 0.5).unwrap();
        for i in 0..3 {
            assert_eq!(g.get(i, i), 1.0);
            for j in 0..3 {
                assert_eq!(g.get(i, j), g.get(j, i));
            }
        }
    }
}
