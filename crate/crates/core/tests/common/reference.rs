//! Independent reference computations used as test oracles.

/// Two-pass RMSE: residuals first, then a separate sum of squares.
pub fn rmse_two_pass(actual: &[f64], predicted: &[f64]) -> f64 {
    assert_eq!(actual.len(), predicted.len());
    let residuals: Vec<f64> = actual.iter().zip(predicted).map(|(a, p)| a - p).collect();
    let mut sum_sq = 0.0;
    for r in &residuals {
        sum_sq += r.powi(2);
    }
    (sum_sq / residuals.len() as f64).sqrt()
}

/// Normalized periodogram power from an explicit least-squares fit of
/// `a cos(wt) + b sin(wt)` to the mean-removed values: the explained sum of
/// squares over twice the sample variance. No time shift is involved.
pub fn periodogram_lsq(times: &[f64], values: &[f64], frequency: f64) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let y: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let var = y.iter().map(|v| v * v).sum::<f64>() / (n - 1.0);
    let w = 2.0 * std::f64::consts::PI * frequency;
    let (mut cc, mut cs, mut ss, mut yc, mut ys) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (t, v) in times.iter().zip(&y) {
        let (s, c) = ((w * (t - times[0])).sin(), (w * (t - times[0])).cos());
        cc += c * c;
        cs += c * s;
        ss += s * s;
        yc += v * c;
        ys += v * s;
    }
    // normal equations [cc cs; cs ss] [a; b] = [yc; ys]
    let det = cc * ss - cs * cs;
    let a = (yc * ss - ys * cs) / det;
    let b = (ys * cc - yc * cs) / det;
    let explained = a * yc + b * ys;
    explained / (2.0 * var)
}

/// Index of the grid point nearest to `target` in log distance.
pub fn nearest_index(grid: &[f64], target: f64) -> usize {
    let mut best = 0;
    for (i, f) in grid.iter().enumerate() {
        if (f.ln() - target.ln()).abs() < (grid[best].ln() - target.ln()).abs() {
            best = i;
        }
    }
    best
}

/// Index of the largest power, lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
