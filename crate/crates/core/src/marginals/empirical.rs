use crate::error::{Error, Result};
use crate::numeric::{clamp_unit, U_EPS};

/// Continuous empirical distribution: piecewise-linear CDF through the
/// distinct sample values at their average-rank plotting positions
/// `R / (n + 1)`, extended linearly past the extremes.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sample: Vec<f64>,
    knots_x: Vec<f64>,
    knots_u: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.iter().any(|v| !v.is_finite()) {
            return Err(Error::FitFailure("empirical margin requires finite data".into()));
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut knots_x = Vec::new();
        let mut knots_u = Vec::new();
        let mut start = 0;
        while start < n {
            let mut end = start;
            while end + 1 < n && sorted[end + 1] == sorted[start] {
                end += 1;
            }
            let avg_rank = 0.5 * ((start + 1) + (end + 1)) as f64;
            knots_x.push(sorted[start]);
            knots_u.push(avg_rank / (n + 1) as f64);
            start = end + 1;
        }
        if knots_x.len() < 2 {
            return Err(Error::FitFailure(
                "empirical margin needs at least two distinct values".into(),
            ));
        }
        Ok(Self { sample: sorted, knots_x, knots_u })
    }

    /// The sorted training sample.
    pub fn sample(&self) -> &[f64] {
        &self.sample
    }

    fn end_slopes(&self) -> (f64, f64) {
        let k = self.knots_x.len();
        let first = (self.knots_u[1] - self.knots_u[0]) / (self.knots_x[1] - self.knots_x[0]);
        let last = (self.knots_u[k - 1] - self.knots_u[k - 2])
            / (self.knots_x[k - 1] - self.knots_x[k - 2]);
        (first, last)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.knots_x.len();
        let (first, last) = self.end_slopes();
        if x <= self.knots_x[0] {
            return clamp_unit(self.knots_u[0] + first * (x - self.knots_x[0]));
        }
        if x >= self.knots_x[k - 1] {
            return clamp_unit(self.knots_u[k - 1] + last * (x - self.knots_x[k - 1]));
        }
        let i = self.knots_x.partition_point(|&v| v <= x) - 1;
        let t = (x - self.knots_x[i]) / (self.knots_x[i + 1] - self.knots_x[i]);
        clamp_unit(self.knots_u[i] + t * (self.knots_u[i + 1] - self.knots_u[i]))
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(U_EPS, 1.0 - U_EPS);
        let k = self.knots_u.len();
        let (first, last) = self.end_slopes();
        if u <= self.knots_u[0] {
            return self.knots_x[0] + (u - self.knots_u[0]) / first;
        }
        if u >= self.knots_u[k - 1] {
            return self.knots_x[k - 1] + (u - self.knots_u[k - 1]) / last;
        }
        let i = self.knots_u.partition_point(|&v| v <= u) - 1;
        let t = (u - self.knots_u[i]) / (self.knots_u[i + 1] - self.knots_u[i]);
        self.knots_x[i] + t * (self.knots_x[i + 1] - self.knots_x[i])
    }

    /// Slope of the CDF; zero where the linear tails have saturated.
    pub fn pdf(&self, x: f64) -> f64 {
        let k = self.knots_x.len();
        let (first, last) = self.end_slopes();
        if x < self.knots_x[0] {
            let lo = self.knots_x[0] - (self.knots_u[0] - U_EPS) / first;
            return if x >= lo { first } else { 0.0 };
        }
        if x >= self.knots_x[k - 1] {
            let hi = self.knots_x[k - 1] + (1.0 - U_EPS - self.knots_u[k - 1]) / last;
            return if x <= hi { last } else { 0.0 };
        }
        let i = self.knots_x.partition_point(|&v| v <= x) - 1;
        (self.knots_u[i + 1] - self.knots_u[i]) / (self.knots_x[i + 1] - self.knots_x[i])
    }
}
