//! Closed-form quantities for the voter model on `d`-regular graphs.
//!
//! Two walks started at the endpoints of an edge of the infinite `d`-regular
//! tree see their distance perform a rate-2 biased walk on `{0, 1, 2, ...}`
//! that steps up with probability `(d-1)/d`. The probability that it has hit
//! zero by time `t` is a Poisson mixture of first-passage probabilities,
//!
//! ```text
//! 1 - f_d(t) = sum_k e^{-2t} (2t)^k / k! * sum_{s <= (k-1)/2} C_s (1/d)^{s+1} ((d-1)/d)^s,
//! ```
//!
//! where `C_s` are the Catalan numbers. The inner sum is a prefix of the
//! Catalan generating function evaluated at `(d-1)/d^2 < 1/4`, so it
//! converges to `1/(d-1)` and `f_d` decreases to `theta_d = (d-2)/(d-1)`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error("degree must be at least 3, got {0}")]
    InvalidDegree(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Catalan number C_{0} exceeds the exact 64-bit range (k <= {max})", max = MAX_EXACT_CATALAN)]
    CatalanOverflow(u32),
}

/// Largest index served exactly by [`catalan`].
pub const MAX_EXACT_CATALAN: u32 = 30;

const CATALAN: [u64; MAX_EXACT_CATALAN as usize + 1] = {
    let mut table = [0u64; MAX_EXACT_CATALAN as usize + 1];
    table[0] = 1;
    let mut k = 0;
    while k < MAX_EXACT_CATALAN as usize {
        // C_{k+1} = C_k * 2(2k+1) / (k+2); the division is exact.
        table[k + 1] = table[k] * 2 * (2 * k as u64 + 1) / (k as u64 + 2);
        k += 1;
    }
    table
};

/// Above this Poisson mean the mixture is summed over a window around the mean.
const WINDOW_THRESHOLD: f64 = 700.0;
const WINDOW_HALF_WIDTH_SD: f64 = 12.0;

fn check_degree(d: usize) -> Result<(), AnalyticError> {
    if d < 3 {
        Err(AnalyticError::InvalidDegree(d))
    } else {
        Ok(())
    }
}

/// `theta_d = (d-2)/(d-1)`: the probability that the tree distance walk
/// started at 1 never reaches 0.
pub fn theta(d: usize) -> Result<f64, AnalyticError> {
    check_degree(d)?;
    Ok((d as f64 - 2.0) / (d as f64 - 1.0))
}

/// The Catalan number `C_k = binom(2k, k) / (k+1)`, exactly.
pub fn catalan(k: u32) -> Result<u64, AnalyticError> {
    CATALAN.get(k as usize).copied().ok_or(AnalyticError::CatalanOverflow(k))
}

/// `ln(k!)`, exact summation for small `k` and Stirling's series beyond.
fn ln_factorial(k: u64) -> f64 {
    if k < 64 {
        return (2..=k).map(|i| (i as f64).ln()).sum();
    }
    let x = k as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x + 0.5 * (std::f64::consts::TAU * x).ln() + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// The law of the meeting time of two walks started at adjacent vertices of
/// the infinite `d`-regular tree.
///
/// Construction caches the partial sums of the first-passage series; each
/// evaluation then only sums Poisson weights.
#[derive(Debug, Clone)]
pub struct TreeMeetingLaw {
    d: usize,
    tolerance: f64,
    /// `prefix[s] = sum_{j <= s} C_j p^{j+1} q^j`, extended until it stops changing.
    prefix: Vec<f64>,
}

impl TreeMeetingLaw {
    pub fn new(d: usize, tolerance: f64) -> Result<Self, AnalyticError> {
        check_degree(d)?;
        if !(tolerance > 0.0 && tolerance < 1.0) {
            return Err(AnalyticError::InvalidParameter(format!("tolerance {tolerance} not in (0, 1)")));
        }
        let p = 1.0 / d as f64;
        let q = 1.0 - p;
        let mut prefix = Vec::new();
        let mut sum = 0.0;
        let mut term = p;
        let mut s = 0u32;
        loop {
            if s <= MAX_EXACT_CATALAN {
                term = CATALAN[s as usize] as f64 * p.powi(s as i32 + 1) * q.powi(s as i32);
            } else {
                let prev = f64::from(s - 1);
                term *= 2.0 * (2.0 * prev + 1.0) / (prev + 2.0) * p * q;
            }
            sum += term;
            prefix.push(sum);
            if term < sum * 1e-18 {
                break;
            }
            s += 1;
        }
        Ok(Self { d, tolerance, prefix })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Probability that the skeleton distance walk has hit 0 within `jumps` steps.
    fn hit_within(&self, jumps: u64) -> f64 {
        if jumps == 0 {
            return 0.0;
        }
        let s = ((jumps - 1) / 2) as usize;
        self.prefix[s.min(self.prefix.len() - 1)]
    }

    /// `P(meeting time <= t)`, accurate to the configured tolerance.
    pub fn meeting_cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let lambda = 2.0 * t;
        let ln_lambda = lambda.ln();
        let (start, mut ln_weight) = if lambda <= WINDOW_THRESHOLD {
            (0u64, -lambda)
        } else {
            let lo = (lambda - WINDOW_HALF_WIDTH_SD * lambda.sqrt()).floor().max(0.0) as u64;
            (lo, -lambda + lo as f64 * ln_lambda - ln_factorial(lo))
        };
        let half_tol = 0.5 * self.tolerance;
        let mut total = 0.0;
        let mut k = start;
        loop {
            let weight = ln_weight.exp();
            total += weight * self.hit_within(k);
            let kf = k as f64;
            if kf >= lambda {
                // Remaining Poisson mass is dominated by a geometric series.
                let next = weight * lambda / (kf + 1.0);
                let ratio = lambda / (kf + 2.0);
                if next / (1.0 - ratio) < half_tol {
                    break;
                }
            }
            k += 1;
            ln_weight += ln_lambda - (k as f64).ln();
        }
        total.clamp(0.0, 1.0 / (self.d as f64 - 1.0))
    }

    /// `f_d(t) = P(meeting time > t)`.
    pub fn survival(&self, t: f64) -> f64 {
        1.0 - self.meeting_cdf(t)
    }
}

/// `1 - f_d(t)`: probability that two walks from adjacent tree vertices meet by `t`.
pub fn meeting_cdf_tree(d: usize, t: f64, tolerance: f64) -> Result<f64, AnalyticError> {
    if !(t >= 0.0) {
        return Err(AnalyticError::InvalidParameter(format!("time {t} is negative")));
    }
    Ok(TreeMeetingLaw::new(d, tolerance)?.meeting_cdf(t))
}

/// `f_d(t)`, the probability that two walks from adjacent tree vertices have not met by `t`.
pub fn f_survival(d: usize, t: f64, tolerance: f64) -> Result<f64, AnalyticError> {
    Ok(1.0 - meeting_cdf_tree(d, t, tolerance)?)
}

/// Predicted density of discordant edges at time `t` on a graph of size `n`,
/// starting from i.i.d. Bernoulli(`u`) opinions:
/// `2u(1-u) f_d(t) exp(-2 theta_d t / n)`.
pub fn expected_discordance(u: f64, d: usize, t: f64, n: usize, tolerance: f64) -> Result<f64, AnalyticError> {
    check_unit(u)?;
    if n == 0 {
        return Err(AnalyticError::InvalidParameter("n must be positive".into()));
    }
    let th = theta(d)?;
    Ok(2.0 * u * (1.0 - u) * f_survival(d, t, tolerance)? * (-2.0 * th * t / n as f64).exp())
}

fn check_unit(u: f64) -> Result<(), AnalyticError> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(AnalyticError::InvalidParameter(format!("density {u} not in [0, 1]")))
    }
}

/// `E[B_s (1 - B_s)] = u(1-u) exp(-2 theta_d s)` for the Fisher-Wright
/// diffusion `dB = sqrt(2 theta_d B(1-B)) dW` started at `u`.
pub fn fw_variability(u: f64, d: usize, s: f64) -> Result<f64, AnalyticError> {
    check_unit(u)?;
    if !(s >= 0.0) {
        return Err(AnalyticError::InvalidParameter(format!("time {s} is negative")));
    }
    Ok(u * (1.0 - u) * (-2.0 * theta(d)? * s).exp())
}

/// Probability that the tree distance walk started at `z0` ever reaches 0,
/// `(1/(d-1))^z0`.
pub fn gambler_hit_prob(d: usize, z0: u32) -> Result<f64, AnalyticError> {
    check_degree(d)?;
    Ok((1.0 / (d as f64 - 1.0)).powi(z0 as i32))
}
