//! Summary statistics shared by the experiments.

use crate::HarnessError;

/// Two-sample Kolmogorov-Smirnov statistic `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64, HarnessError> {
    if a.is_empty() || b.is_empty() {
        return Err(HarnessError::EmptySample("KS statistic needs two non-empty samples".into()));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(HarnessError::EmptySample("KS statistic got a NaN sample".into()));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut sup = 0.0f64;
    while i < xs.len() && j < ys.len() {
        // Step past every copy of the smaller value so ties are handled together.
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(sup)
}

/// Weighted least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
}

/// Fits with weights `w_i` taken as inverse variances of `y_i`.
pub fn weighted_linear_fit(x: &[f64], y: &[f64], w: &[f64]) -> Result<LinearFit, HarnessError> {
    if x.len() != y.len() || x.len() != w.len() {
        return Err(HarnessError::DegenerateFit("mismatched input lengths".into()));
    }
    let pts: Vec<(f64, f64, f64)> = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((&x, &y), &w)| (x, y, w))
        .filter(|&(x, y, w)| x.is_finite() && y.is_finite() && w > 0.0 && w.is_finite())
        .collect();
    if pts.len() < 2 {
        return Err(HarnessError::DegenerateFit(format!("{} usable points", pts.len())));
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let sx: f64 = pts.iter().map(|p| p.2 * p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.2 * p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.2 * p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * p.0 * p.1).sum();
    let det = sw * sxx - sx * sx;
    if !(det > 0.0) {
        return Err(HarnessError::DegenerateFit("abscissae do not vary".into()));
    }
    Ok(LinearFit {
        slope: (sw * sxy - sx * sy) / det,
        intercept: (sxx * sy - sx * sxy) / det,
        slope_se: (sw / det).sqrt(),
        intercept_se: (sxx / det).sqrt(),
    })
}

/// Fraction of `k` successes in `r` trials with its binomial standard error.
pub fn proportion(k: usize, r: usize) -> (f64, f64) {
    if r == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = k as f64 / r as f64;
    (p, (p * (1.0 - p) / r as f64).sqrt())
}
