//! Sequential minimal optimization for the epsilon-SVR dual.
//!
//! The dual is solved in its 2n-variable form
//!
//! ```text
//! min_a  1/2 a'Qa + p'a   s.t.  y'a = 0,  0 <= a_t <= C
//! ```
//!
//! where `a = [alpha; alpha*]`, `y_t = +1` for the first n variables and `-1`
//! for the last n, `Q_ts = y_t y_s K(x_t, x_s)`, `p_t = eps - y_k` for `alpha_k`
//! and `p_t = eps + y_k` for `alpha*_k`. The regression coefficients are
//! `beta_k = alpha_k - alpha*_k`.
//!
//! Each iteration picks the maximal violating pair (first-order working set
//! selection, ties going to the lowest index) and solves the two-variable
//! subproblem analytically.

use super::kernel::GramMatrix;
use crate::error::{Error, Result};

/// Curvature floor for degenerate pairs (e.g. `alpha_k` with `alpha*_k`).
const TAU: f64 = 1e-12;

pub(crate) struct SmoSolution {
    pub beta: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
}

pub(crate) struct SmoProblem<'a> {
    pub gram: &'a GramMatrix,
    pub targets: &'a [f64],
    pub c: f64,
    pub epsilon: f64,
    pub tol: f64,
    pub max_iterations: usize,
}

struct State {
    n: usize,
    c: f64,
    alpha: Vec<f64>,
    grad: Vec<f64>,
    linear: Vec<f64>,
}

impl State {
    #[inline]
    fn sign(&self, t: usize) -> f64 {
        if t < self.n {
            1.0
        } else {
            -1.0
        }
    }

    #[inline]
    fn in_up(&self, t: usize) -> bool {
        if t < self.n {
            self.alpha[t] < self.c
        } else {
            self.alpha[t] > 0.0
        }
    }

    #[inline]
    fn in_low(&self, t: usize) -> bool {
        if t < self.n {
            self.alpha[t] > 0.0
        } else {
            self.alpha[t] < self.c
        }
    }

    /// `-y_t * grad_t`
    #[inline]
    fn score(&self, t: usize) -> f64 {
        -self.sign(t) * self.grad[t]
    }

    /// Maximal violating pair `(i, j, m, M)` with `m = max_up`, `M = min_low`.
    fn select_pair(&self) -> (Option<usize>, Option<usize>, f64, f64) {
        let mut i = None;
        let mut j = None;
        let mut up_max = f64::NEG_INFINITY;
        let mut low_min = f64::INFINITY;
        for t in 0..2 * self.n {
            let g = self.score(t);
            if self.in_up(t) && g > up_max {
                up_max = g;
                i = Some(t);
            }
            if self.in_low(t) && g < low_min {
                low_min = g;
                j = Some(t);
            }
        }
        (i, j, up_max, low_min)
    }

    /// Maximization-form dual objective, `-(1/2) a'(G + p)`.
    fn objective(&self) -> f64 {
        -0.5 * self
            .alpha
            .iter()
            .zip(self.grad.iter().zip(&self.linear))
            .map(|(a, (g, p))| a * (g + p))
            .sum::<f64>()
    }

    fn bias(&self, up_max: f64, low_min: f64) -> f64 {
        let (sum, count) = (0..2 * self.n)
            .filter(|&t| self.alpha[t] > 0.0 && self.alpha[t] < self.c)
            .fold((0.0, 0usize), |(s, c), t| (s + self.score(t), c + 1));
        if count > 0 {
            sum / count as f64
        } else {
            0.5 * (up_max + low_min)
        }
    }
}

/// Runs SMO to a `tol`-approximate KKT point. When `trace` is given, the dual
/// objective is pushed after initialization and after every pair update.
pub(crate) fn solve(problem: &SmoProblem<'_>, mut trace: Option<&mut Vec<f64>>) -> Result<SmoSolution> {
    let n = problem.targets.len();
    let gram = problem.gram;
    let c = problem.c;
    let eps = problem.epsilon;

    let linear: Vec<f64> = problem
        .targets
        .iter()
        .map(|y| eps - y)
        .chain(problem.targets.iter().map(|y| eps + y))
        .collect();
    let mut st = State {
        n,
        c,
        alpha: vec![0.0; 2 * n],
        grad: linear.clone(),
        linear,
    };
    if let Some(tr) = trace.as_deref_mut() {
        tr.push(st.objective());
    }

    let mut iterations = 0;
    loop {
        let (i, j, up_max, low_min) = st.select_pair();
        let (i, j) = match (i, j) {
            (Some(i), Some(j)) if up_max - low_min >= problem.tol => (i, j),
            _ => {
                let bias = st.bias(up_max, low_min);
                let beta = (0..n).map(|k| st.alpha[k] - st.alpha[k + n]).collect();
                return Ok(SmoSolution {
                    beta,
                    bias,
                    iterations,
                });
            }
        };
        if iterations >= problem.max_iterations {
            return Err(Error::Convergence {
                iterations,
                violation: up_max - low_min,
            });
        }
        iterations += 1;

        let (ki, kj) = (i % n, j % n);
        let (yi, yj) = (st.sign(i), st.sign(j));
        let q_ij = yi * yj * gram.get(ki, kj);
        let q_ii = gram.get(ki, ki);
        let q_jj = gram.get(kj, kj);
        let (old_i, old_j) = (st.alpha[i], st.alpha[j]);
        let (mut ai, mut aj) = (old_i, old_j);
        let (gi, gj) = (st.grad[i], st.grad[j]);

        if yi != yj {
            let mut quad = q_ii + q_jj + 2.0 * q_ij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-gi - gj) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let mut quad = q_ii + q_jj - 2.0 * q_ij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (gi - gj) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }

        st.alpha[i] = ai;
        st.alpha[j] = aj;
        let (di, dj) = (ai - old_i, aj - old_j);
        let (row_i, row_j) = (gram.row(ki), gram.row(kj));
        for k in 0..n {
            // Q_{t,i} for t = k and t = k + n differ only in sign.
            let d = yi * di * row_i[k] + yj * dj * row_j[k];
            st.grad[k] += d;
            st.grad[k + n] -= d;
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(st.objective());
        }
    }
}
