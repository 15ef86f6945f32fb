/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub replicas: usize,
}

impl Estimate {
    /// Sample mean and `sqrt(s^2 / k)` with the unbiased variance `s^2`.
    pub fn from_samples(xs: &[f64]) -> Self {
        let k = xs.len();
        if k == 0 {
            return Self { mean: f64::NAN, std_err: f64::NAN, replicas: 0 };
        }
        let mean = xs.iter().sum::<f64>() / k as f64;
        let var = if k > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64 } else { 0.0 };
        Self { mean, std_err: (var / k as f64).sqrt(), replicas: k }
    }

    /// Whether `target` lies within `z` standard errors of the mean.
    pub fn agrees_with(&self, target: f64, z: f64) -> bool {
        (self.mean - target).abs() <= z * self.std_err
    }
}
