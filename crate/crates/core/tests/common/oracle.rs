//! Reference solver for the epsilon-SVR dual on tiny problems.
//!
//! Works on the split form `a = [alpha; alpha*]` with accelerated projected
//! gradient (projection onto the box intersected with the equality
//! hyperplane, by bisection on the multiplier), then polishes the iterate by
//! guessing the active set and solving the equality-constrained KKT system
//! exactly. A polished point is accepted only when it is feasible and passes
//! an explicit KKT check. Shares no code with the library solver.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub struct OracleSolution {
    pub beta: Vec<f64>,
    pub bias: f64,
    /// Dual objective, maximization form.
    pub objective: f64,
    pub certified: bool,
}

pub struct Oracle {
    xs: Vec<Vec<f64>>,
    kernel: DMatrix<f64>,
    ys: Vec<f64>,
    c: f64,
    eps: f64,
    gamma: f64,
}

fn gaussian(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    let mut d2 = 0.0;
    for k in 0..x.len() {
        let d = x[k] - y[k];
        d2 += d * d;
    }
    (-gamma * d2).exp()
}

impl Oracle {
    pub fn new(xs: &[Vec<f64>], ys: &[f64], c: f64, eps: f64, gamma: f64) -> Self {
        let n = xs.len();
        let kernel = DMatrix::from_fn(n, n, |i, j| gaussian(&xs[i], &xs[j], gamma));
        Self {
            xs: xs.to_vec(),
            kernel,
            ys: ys.to_vec(),
            c,
            eps,
            gamma,
        }
    }

    fn n(&self) -> usize {
        self.ys.len()
    }

    fn sign(&self, t: usize) -> f64 {
        if t < self.n() {
            1.0
        } else {
            -1.0
        }
    }

    fn q(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(2 * n, 2 * n, |s, t| {
            self.sign(s) * self.sign(t) * self.kernel[(s % n, t % n)]
        })
    }

    fn p(&self) -> DVector<f64> {
        let n = self.n();
        DVector::from_fn(2 * n, |t, _| {
            if t < n {
                self.eps - self.ys[t]
            } else {
                self.eps + self.ys[t - n]
            }
        })
    }

    fn y(&self) -> DVector<f64> {
        DVector::from_fn(2 * self.n(), |t, _| self.sign(t))
    }

    /// Minimization-form objective.
    fn f(&self, q: &DMatrix<f64>, p: &DVector<f64>, a: &DVector<f64>) -> f64 {
        0.5 * a.dot(&(q * a)) + p.dot(a)
    }

    fn project(&self, v: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let c = self.c;
        let clip = |lam: f64| v.zip_map(y, |vi, yi| (vi - lam * yi).clamp(0.0, c));
        let h = |lam: f64| clip(lam).dot(y);
        let bound = v.amax() + c + 1.0;
        let (mut lo, mut hi) = (-bound, bound);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * bound {
                break;
            }
        }
        clip(0.5 * (lo + hi))
    }

    /// Scores `g_t = -y_t (Qa + p)_t` and the extreme values over the
    /// up / low index sets.
    fn kkt_gap(&self, q: &DMatrix<f64>, p: &DVector<f64>, a: &DVector<f64>) -> (Vec<f64>, f64, f64) {
        let n = self.n();
        let grad = q * a + p;
        let g: Vec<f64> = (0..2 * n).map(|t| -self.sign(t) * grad[t]).collect();
        let mut up = f64::NEG_INFINITY;
        let mut low = f64::INFINITY;
        for t in 0..2 * n {
            let (is_up, is_low) = if t < n {
                (a[t] < self.c, a[t] > 0.0)
            } else {
                (a[t] > 0.0, a[t] < self.c)
            };
            if is_up {
                up = up.max(g[t]);
            }
            if is_low {
                low = low.min(g[t]);
            }
        }
        (g, up, low)
    }

    fn polish(
        &self,
        q: &DMatrix<f64>,
        p: &DVector<f64>,
        y: &DVector<f64>,
        a: &DVector<f64>,
        delta: f64,
    ) -> Option<DVector<f64>> {
        let m = a.len();
        let mut fixed = DVector::zeros(m);
        let mut free = Vec::new();
        for t in 0..m {
            if a[t] <= delta {
                fixed[t] = 0.0;
            } else if a[t] >= self.c - delta {
                fixed[t] = self.c;
            } else {
                free.push(t);
            }
        }
        let bound_part: Vec<usize> = (0..m).filter(|t| !free.contains(t)).collect();
        let ya_b: f64 = bound_part.iter().map(|&t| y[t] * fixed[t]).sum();
        let mut out = fixed.clone();
        if free.is_empty() {
            if ya_b.abs() > 1e-12 {
                return None;
            }
        } else {
            let k = free.len();
            let mut sys = DMatrix::zeros(k + 1, k + 1);
            let mut rhs = DVector::zeros(k + 1);
            for (r, &s) in free.iter().enumerate() {
                for (cidx, &t) in free.iter().enumerate() {
                    sys[(r, cidx)] = q[(s, t)];
                }
                sys[(r, k)] = y[s];
                sys[(k, r)] = y[s];
                let mut lin = p[s];
                for &t in &bound_part {
                    lin += q[(s, t)] * fixed[t];
                }
                rhs[r] = -lin;
            }
            rhs[k] = -ya_b;
            // Duplicated points make the system singular; take the
            // minimum-norm solution and insist that it solves the system.
            let sol = sys.clone().svd(true, true).solve(&rhs, 1e-12).ok()?;
            if (&sys * &sol - &rhs).amax() > 1e-9 {
                return None;
            }
            for (r, &s) in free.iter().enumerate() {
                let v = sol[r];
                if !(v > 0.0 && v < self.c) {
                    return None;
                }
                out[s] = v;
            }
        }
        let (_, up, low) = self.kkt_gap(q, p, &out);
        (up - low <= 1e-9).then_some(out)
    }

    pub fn solve(&self) -> OracleSolution {
        let n = self.n();
        let q = self.q();
        let p = self.p();
        let y = self.y();
        let lmax = SymmetricEigen::new(self.kernel.clone())
            .eigenvalues
            .max()
            .max(1e-12);
        let step = 1.0 / (2.0 * lmax);

        let mut a = DVector::zeros(2 * n);
        let mut z = a.clone();
        let mut t_mom: f64 = 1.0;
        let mut f_prev = self.f(&q, &p, &a);
        let mut best = a.clone();
        let mut certified = false;

        'outer: for _round in 0..200 {
            for _ in 0..500 {
                let grad = &q * &z + &p;
                let next = self.project(&(&z - step * grad), &y);
                let f_next = self.f(&q, &p, &next);
                if f_next > f_prev {
                    // adaptive restart
                    t_mom = 1.0;
                    z = a.clone();
                    continue;
                }
                let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_mom * t_mom).sqrt());
                z = &next + ((t_mom - 1.0) / t_next) * (&next - &a);
                a = next;
                t_mom = t_next;
                f_prev = f_next;
            }
            best = a.clone();
            for exp in 2..=10 {
                let delta = self.c * 10f64.powi(-exp);
                if let Some(pol) = self.polish(&q, &p, &y, &a, delta) {
                    best = pol;
                    certified = true;
                    break 'outer;
                }
            }
        }

        let (g, up, low) = self.kkt_gap(&q, &p, &best);
        let free: Vec<f64> = (0..2 * n)
            .filter(|&t| best[t] > 0.0 && best[t] < self.c)
            .map(|t| g[t])
            .collect();
        let bias = if free.is_empty() {
            0.5 * (up + low)
        } else {
            free.iter().sum::<f64>() / free.len() as f64
        };
        let beta: Vec<f64> = (0..n).map(|k| best[k] - best[k + n]).collect();
        OracleSolution {
            objective: -self.f(&q, &p, &best),
            beta,
            bias,
            certified,
        }
    }

    pub fn predict(&self, sol: &OracleSolution, x: &[f64]) -> f64 {
        self.xs
            .iter()
            .zip(&sol.beta)
            .map(|(xi, b)| b * gaussian(xi, x, self.gamma))
            .sum::<f64>()
            + sol.bias
    }
}

/// Smallest eigenvalue of a symmetric matrix given row by row.
pub fn min_eigenvalue(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    SymmetricEigen::new(m).eigenvalues.min()
}
