//! Time grids given on the command line as `lin:a:b:k` or `geo:a:b:k`.

use std::fmt;
use std::str::FromStr;

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grid {
    /// `k` equally spaced points from `a` to `b` inclusive.
    Linear { start: f64, end: f64, points: usize },
    /// `k` points from `a` to `b` with constant ratio; needs `0 < a`.
    Geometric { start: f64, end: f64, points: usize },
}

impl Grid {
    pub fn linear(start: f64, end: f64, points: usize) -> Self {
        Grid::Linear { start, end, points }
    }

    pub fn geometric(start: f64, end: f64, points: usize) -> Self {
        Grid::Geometric { start, end, points }
    }

    pub fn points(&self) -> Vec<f64> {
        match *self {
            Grid::Linear { start, end, points } => spaced(points, |i, last| start + (end - start) * i / last, start, end),
            Grid::Geometric { start, end, points } => {
                let ratio = (end / start).ln();
                spaced(points, |i, last| start * (ratio * i / last).exp(), start, end)
            }
        }
    }

    fn validate(self) -> Result<Self, HarnessError> {
        let (start, end, points) = match self {
            Grid::Linear { start, end, points } | Grid::Geometric { start, end, points } => (start, end, points),
        };
        let bad = |why: &str| Err(HarnessError::Grid(format!("{self}: {why}")));
        if points == 0 {
            return bad("needs at least one point");
        }
        if !start.is_finite() || !end.is_finite() || start < 0.0 {
            return bad("bounds must be finite and non-negative");
        }
        if points > 1 && end <= start {
            return bad("end must exceed start");
        }
        if matches!(self, Grid::Geometric { .. }) && start <= 0.0 {
            return bad("geometric grid must start above zero");
        }
        Ok(self)
    }
}

fn spaced(points: usize, at: impl Fn(f64, f64) -> f64, start: f64, end: f64) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    let last = (points - 1) as f64;
    let mut xs: Vec<f64> = (0..points).map(|i| at(i as f64, last)).collect();
    // Pin the end points so rounding never moves them.
    xs[0] = start;
    xs[points - 1] = end;
    xs
}

impl FromStr for Grid {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let err = || HarnessError::Grid(format!("expected lin:a:b:k or geo:a:b:k, got {s:?}"));
        let [kind, a, b, k] = parts.as_slice() else { return Err(err()) };
        let start: f64 = a.parse().map_err(|_| err())?;
        let end: f64 = b.parse().map_err(|_| err())?;
        let points: usize = k.parse().map_err(|_| err())?;
        let grid = match *kind {
            "lin" => Grid::linear(start, end, points),
            "geo" => Grid::geometric(start, end, points),
            _ => return Err(err()),
        };
        grid.validate()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Linear { start, end, points } => write!(f, "lin:{start}:{end}:{points}"),
            Grid::Geometric { start, end, points } => write!(f, "geo:{start}:{end}:{points}"),
        }
    }
}
