//! Generalized lambda distribution defined through its quantile function
//! `Q(y) = l1 + (y^l3 - (1 - y)^l4) / l2`, and starship fitting.

use crate::error::{Error, Result};
use crate::numeric::{nelder_mead, sorted_quantile, NelderMeadOptions, U_EPS};

use super::anderson_darling_sorted;

/// GLD parameters: location, inverse scale, left and right shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GldParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
}

const VALIDITY_GRID: usize = 2000;
const TAIL_PROBES: [f64; 6] = [1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-3];

impl GldParams {
    /// Build and validate a parameter set.
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64, lambda4: f64) -> Result<Self> {
        let p = Self::new_unchecked(lambda1, lambda2, lambda3, lambda4);
        p.validate()?;
        Ok(p)
    }

    pub const fn new_unchecked(lambda1: f64, lambda2: f64, lambda3: f64, lambda4: f64) -> Self {
        Self { lambda1, lambda2, lambda3, lambda4 }
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.lambda1, self.lambda2, self.lambda3, self.lambda4]
    }

    /// Checks `lambda2 != 0`, `Q'(y) > 0` on a dense grid of `(0, 1)` and
    /// that `Q(0)`, `Q(1)` bound the grid values.
    pub fn validate(&self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "GLD parameters {:?} do not define an increasing quantile function",
                self.to_array()
            )))
        }
    }

    pub fn is_valid(&self) -> bool {
        if !self.to_array().iter().all(|v| v.is_finite()) || self.lambda2 == 0.0 {
            return false;
        }
        let grid = (1..=VALIDITY_GRID).map(|k| k as f64 / (VALIDITY_GRID + 1) as f64);
        let tails = TAIL_PROBES.iter().flat_map(|&t| [t, 1.0 - t]);
        let increasing = grid.chain(tails).all(|y| {
            let d = self.quantile_derivative(y);
            d > 0.0 && d.is_finite()
        });
        // Q' can turn negative below the smallest probe (e.g. l3 ~ 1e-14);
        // the exact ends must still bracket the probed range
        let (lo, hi) = self.support();
        let (first, last) = (TAIL_PROBES[0], 1.0 - TAIL_PROBES[0]);
        increasing && !(lo > self.raw_quantile(first)) && !(hi < self.raw_quantile(last))
    }

    #[inline]
    fn raw_quantile(&self, y: f64) -> f64 {
        // y^l3 - (1-y)^l4 written as a difference of expm1 terms: exact
        // cancellation of the ones keeps tiny l3, l4 well conditioned
        self.lambda1 + (pow_m1(y.ln(), self.lambda3) - pow_m1((-y).ln_1p(), self.lambda4)) / self.lambda2
    }

    /// `dQ/dy`.
    #[inline]
    pub fn quantile_derivative(&self, y: f64) -> f64 {
        let left = if self.lambda3 == 0.0 {
            0.0
        } else {
            self.lambda3 * y.powf(self.lambda3 - 1.0)
        };
        let right = if self.lambda4 == 0.0 {
            0.0
        } else {
            self.lambda4 * (1.0 - y).powf(self.lambda4 - 1.0)
        };
        (left + right) / self.lambda2
    }

    /// `(Q(0), Q(1))`; infinite ends for unbounded tails.
    pub fn support(&self) -> (f64, f64) {
        (self.raw_quantile(0.0), self.raw_quantile(1.0))
    }
}

/// `exp(l * ln_base) - 1`, with `0 * -inf` read as `0^0 - 1 = 0`.
#[inline]
fn pow_m1(ln_base: f64, l: f64) -> f64 {
    if l == 0.0 {
        0.0
    } else {
        (l * ln_base).exp_m1()
    }
}

/// `Q(y)` for `y` in `(0, 1)`.
pub fn gld_quantile(y: f64, p: &GldParams) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "GLD quantile needs 0 < y < 1, got {y}"
        )));
    }
    p.validate()?;
    Ok(p.raw_quantile(y))
}

/// CDF by inverting `Q`: bisection to a 1e-6 bracket, then safeguarded
/// Newton. Saturates at `U_EPS` / `1 - U_EPS` outside the support.
pub fn gld_cdf(x: f64, p: &GldParams) -> f64 {
    invert(x, p, U_EPS, 1.0 - U_EPS, None)
}

/// Density `l2 / (l3 y^(l3-1) + l4 (1-y)^(l4-1))` at `y = F(x)`; zero off support.
pub fn gld_pdf(x: f64, p: &GldParams) -> f64 {
    let (lo, hi) = p.support();
    if x < lo || x > hi || x.is_nan() {
        return 0.0;
    }
    let y = gld_cdf(x, p);
    let d = p.quantile_derivative(y);
    if d > 0.0 && d.is_finite() {
        1.0 / d
    } else {
        0.0
    }
}

fn invert(x: f64, p: &GldParams, lo: f64, hi: f64, start: Option<f64>) -> f64 {
    if x.is_nan() {
        return 0.5;
    }
    let q_lo = p.raw_quantile(lo);
    if x <= q_lo {
        return lo;
    }
    let q_hi = p.raw_quantile(hi);
    if x >= q_hi {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    let mut y = match start {
        Some(s) if s > a && s < b => s,
        _ => {
            while b - a > 1e-6 {
                let m = 0.5 * (a + b);
                if p.raw_quantile(m) < x {
                    a = m;
                } else {
                    b = m;
                }
            }
            0.5 * (a + b)
        }
    };
    let tol = 1e-10 * x.abs().max(1.0);
    for _ in 0..100 {
        let r = p.raw_quantile(y) - x;
        if r == 0.0 {
            break;
        }
        if r < 0.0 {
            a = y;
        } else {
            b = y;
        }
        let d = p.quantile_derivative(y);
        let mut next = y - r / d;
        if !(next >= a && next <= b) || !next.is_finite() {
            next = 0.5 * (a + b);
        }
        let step = (next - y).abs();
        y = next;
        if (r.abs() <= tol && step <= 1e-15) || step == 0.0 || b - a <= f64::EPSILON * b {
            break;
        }
    }
    y.clamp(lo, hi)
}

/// CDF of every element of an ascending slice, reusing the previous root as a
/// starting point.
pub(crate) fn gld_cdf_sorted(sorted: &[f64], p: &GldParams) -> Vec<f64> {
    let mut out = Vec::with_capacity(sorted.len());
    let mut prev: Option<f64> = None;
    for &x in sorted {
        let lo = prev.unwrap_or(U_EPS);
        let y = invert(x, p, lo, 1.0 - U_EPS, prev.map(|v| (v + 1e-9).min(1.0 - U_EPS)));
        prev = Some(y);
        out.push(y);
    }
    out
}

/// Anderson-Darling uniformity statistic of the PIT of `sorted` under `p`;
/// infinite for invalid parameters.
pub fn starship_objective(sorted: &[f64], p: &GldParams) -> f64 {
    if !p.is_valid() {
        return f64::INFINITY;
    }
    anderson_darling_sorted(&gld_cdf_sorted(sorted, p))
}

fn grid_value(i: i32) -> f64 {
    i as f64 / 20.0
}

/// Parameters sharing the sample median and interquartile range for the
/// shapes `(l3, l4)`.
fn anchored(l3: f64, l4: f64, median: f64, iqr: f64) -> Option<GldParams> {
    let spread = 0.75f64.powf(l3) - 0.25f64.powf(l3) + 0.75f64.powf(l4) - 0.25f64.powf(l4);
    let l2 = spread / iqr;
    if l2 == 0.0 || !l2.is_finite() {
        return None;
    }
    let l1 = median - (0.5f64.powf(l3) - 0.5f64.powf(l4)) / l2;
    Some(GldParams::new_unchecked(l1, l2, l3, l4))
}

/// Starship estimate: grid search over the shapes `(l3, l4)` in
/// `[-1.5, 1.5]^2` (step 0.05) with location and scale anchored to the sample
/// median and IQR, followed by Nelder-Mead over all four parameters. The
/// objective is the Anderson-Darling statistic of the transformed data.
pub fn gld_fit_starship(column: &[f64]) -> Result<GldParams> {
    if column.iter().any(|v| !v.is_finite()) {
        return Err(Error::FitFailure("GLD fit requires finite data".into()));
    }
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    let distinct = 1 + sorted.windows(2).filter(|w| w[0] != w[1]).count();
    if sorted.is_empty() || distinct < 20 {
        return Err(Error::FitFailure(format!(
            "GLD fit requires at least 20 distinct values, got {}",
            if sorted.is_empty() { 0 } else { distinct }
        )));
    }
    let median = sorted_quantile(&sorted, 0.5);
    let iqr = sorted_quantile(&sorted, 0.75) - sorted_quantile(&sorted, 0.25);
    if !(iqr > 0.0) {
        return Err(Error::FitFailure("interquartile range is zero".into()));
    }

    // Grid stage on a thinned set of order statistics.
    const GRID_POINTS: usize = 500;
    let thinned: Vec<f64> = if sorted.len() > GRID_POINTS {
        let n = sorted.len();
        (0..GRID_POINTS)
            .map(|k| sorted[((k as f64 + 0.5) * n as f64 / GRID_POINTS as f64) as usize])
            .collect()
    } else {
        sorted.clone()
    };

    let mut best_grid: Option<(f64, GldParams)> = None;
    for i in -30..=30 {
        for j in -30..=30 {
            let Some(p) = anchored(grid_value(i), grid_value(j), median, iqr) else {
                continue;
            };
            let obj = starship_objective(&thinned, &p);
            if !obj.is_finite() {
                continue;
            }
            if best_grid.as_ref().map_or(true, |(b, _)| obj < *b) {
                best_grid = Some((obj, p));
            }
        }
    }
    let Some((_, grid_best)) = best_grid else {
        return Err(Error::FitFailure(
            "no valid GLD parameters in the search region".into(),
        ));
    };

    let objective = |v: &[f64]| {
        starship_objective(&sorted, &GldParams::new_unchecked(v[0], v[1], v[2], v[3]))
    };
    let start = grid_best.to_array();
    let steps = [0.05 * iqr, 0.05 * start[1].abs(), 0.05, 0.05];
    let (refined, refined_obj) = nelder_mead(
        objective,
        &start,
        &steps,
        NelderMeadOptions { max_evals: 1500, f_tol: 1e-10, x_tol: 1e-9 },
    );

    let mut candidates = vec![(
        refined_obj,
        GldParams::new_unchecked(refined[0], refined[1], refined[2], refined[3]),
    )];
    candidates.push((starship_objective(&sorted, &grid_best), grid_best));
    if let Some(uniform) = anchored(1.0, 1.0, median, iqr) {
        candidates.push((starship_objective(&sorted, &uniform), uniform));
    }
    candidates
        .into_iter()
        .filter(|(obj, p)| obj.is_finite() && p.is_valid())
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, p)| p)
        .ok_or_else(|| Error::FitFailure("GLD refinement produced no valid parameters".into()))
}
