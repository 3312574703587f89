//! Johnson system: unbounded (SU), bounded (SB) and lower-bounded (SL)
//! transforms of a standard normal variable.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{clamp_unit, normal_cdf, normal_quantile, sorted_quantile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JohnsonVariant {
    /// Unbounded, `asinh` transform.
    SU,
    /// Bounded on `[epsilon, epsilon + lambda]`, logit transform.
    SB,
    /// Bounded below by `epsilon`, log transform.
    SL,
}

impl JohnsonVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            JohnsonVariant::SU => "SU",
            JohnsonVariant::SB => "SB",
            JohnsonVariant::SL => "SL",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "SU" => Some(JohnsonVariant::SU),
            "SB" => Some(JohnsonVariant::SB),
            "SL" => Some(JohnsonVariant::SL),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JohnsonParams {
    pub variant: JohnsonVariant,
    pub gamma: f64,
    pub eta: f64,
    pub epsilon: f64,
    pub lambda: f64,
}

impl JohnsonParams {
    pub fn new(variant: JohnsonVariant, gamma: f64, eta: f64, epsilon: f64, lambda: f64) -> Result<Self> {
        let p = Self { variant, gamma, eta, epsilon, lambda };
        if !(eta > 0.0 && lambda > 0.0) || ![gamma, eta, epsilon, lambda].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Johnson parameters need finite values with eta > 0 and lambda > 0: {p:?}"
            )));
        }
        Ok(p)
    }

    /// `(lower, upper)` support bounds.
    pub fn support(&self) -> (f64, f64) {
        match self.variant {
            JohnsonVariant::SU => (f64::NEG_INFINITY, f64::INFINITY),
            JohnsonVariant::SB => (self.epsilon, self.epsilon + self.lambda),
            JohnsonVariant::SL => (self.epsilon, f64::INFINITY),
        }
    }

    /// The standard normal score `gamma + eta * g((x - epsilon) / lambda)`.
    pub fn normal_score(&self, x: f64) -> f64 {
        let t = (x - self.epsilon) / self.lambda;
        let g = match self.variant {
            JohnsonVariant::SU => t.asinh(),
            JohnsonVariant::SB => {
                if t <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                if t >= 1.0 {
                    return f64::INFINITY;
                }
                (t / (1.0 - t)).ln()
            }
            JohnsonVariant::SL => {
                if t <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                t.ln()
            }
        };
        self.gamma + self.eta * g
    }

    pub fn cdf(&self, x: f64) -> f64 {
        clamp_unit(normal_cdf(self.normal_score(x)))
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let w = (normal_quantile(u) - self.gamma) / self.eta;
        match self.variant {
            JohnsonVariant::SU => self.epsilon + self.lambda * w.sinh(),
            JohnsonVariant::SB => self.epsilon + self.lambda / (1.0 + (-w).exp()),
            JohnsonVariant::SL => self.epsilon + self.lambda * w.exp(),
        }
    }
}

/// Density `f_U`, `f_B` or `f_L` according to the variant; zero off support.
pub fn johnson_pdf(x: f64, p: &JohnsonParams) -> f64 {
    let (lo, hi) = p.support();
    if !(x > lo && x < hi) {
        return 0.0;
    }
    let dx = x - p.epsilon;
    let z = p.normal_score(x);
    let kernel = (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
    let jacobian = match p.variant {
        JohnsonVariant::SU => p.eta / (dx * dx + p.lambda * p.lambda).sqrt(),
        JohnsonVariant::SB => p.eta * p.lambda / (dx * (p.lambda - dx)),
        JohnsonVariant::SL => p.eta / dx,
    };
    jacobian * kernel
}

/// Normal abscissa used for quantile matching.
pub const QUANTILE_MATCH_Z: f64 = 0.524;

/// Bracket of the tail-ratio discriminant `mn/p^2` that is treated as the
/// SU/SL boundary when choosing or fitting the unbounded variant.
const BOUNDARY_BAND: f64 = 0.05;

struct QuantileSpans {
    /// x at Phi(-z) and Phi(z), plus the upper, lower and central spans
    x_m1: f64,
    x_p1: f64,
    m: f64,
    n: f64,
    p: f64,
}

impl QuantileSpans {
    fn from_sorted(sorted: &[f64]) -> Self {
        let z = QUANTILE_MATCH_Z;
        let q = |k: f64| sorted_quantile(sorted, normal_cdf(k * z));
        let (x_m3, x_m1, x_p1, x_p3) = (q(-3.0), q(-1.0), q(1.0), q(3.0));
        Self {
            x_m1,
            x_p1,
            m: x_p3 - x_p1,
            n: x_m1 - x_m3,
            p: x_p1 - x_m1,
        }
    }

    fn discriminant(&self) -> f64 {
        self.m * self.n / (self.p * self.p)
    }
}

fn prepare(column: &[f64]) -> Result<Vec<f64>> {
    if column.len() < 20 {
        return Err(Error::FitFailure(format!(
            "Johnson fit requires at least 20 observations, got {}",
            column.len()
        )));
    }
    if column.iter().any(|v| !v.is_finite()) {
        return Err(Error::FitFailure("Johnson fit requires finite data".into()));
    }
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

/// Four-quantile matching fit at normal abscissae `+-z`, `+-3z`.
pub fn johnson_fit(column: &[f64], variant: JohnsonVariant) -> Result<JohnsonParams> {
    let sorted = prepare(column)?;
    let spans = QuantileSpans::from_sorted(&sorted);
    if !(spans.m > 0.0 && spans.n > 0.0 && spans.p > 0.0) {
        return Err(Error::FitFailure("sample quantiles are not strictly increasing".into()));
    }
    let params = match variant {
        JohnsonVariant::SU => fit_su(&spans)?,
        JohnsonVariant::SB => fit_sb(&spans)?,
        JohnsonVariant::SL => fit_sl(&spans)?,
    };
    let (lo, hi) = params.support();
    if sorted[0] <= lo || sorted[sorted.len() - 1] >= hi {
        return Err(Error::FitFailure(format!(
            "data range [{}, {}] falls outside the fitted {} support [{lo}, {hi}]",
            sorted[0],
            sorted[sorted.len() - 1],
            variant.as_str()
        )));
    }
    Ok(params)
}

/// Picks the variant from the quantile-ratio discriminant `mn/p^2` (above one
/// SU, below one SB, near one SL) and fits it. If the preferred variant is
/// inconsistent with the data (e.g. observations outside a fitted SB range),
/// the remaining variants are tried in the order SU, SL, SB, and finally the
/// near-normal SU member.
pub fn johnson_fit_auto(column: &[f64]) -> Result<JohnsonParams> {
    let sorted = prepare(column)?;
    let spans = QuantileSpans::from_sorted(&sorted);
    let disc = spans.discriminant();
    if !disc.is_finite() {
        return Err(Error::FitFailure("degenerate quantile spans".into()));
    }
    let preferred = if (disc - 1.0).abs() <= 0.01 {
        JohnsonVariant::SL
    } else if disc >= 1.0 - BOUNDARY_BAND {
        JohnsonVariant::SU
    } else {
        JohnsonVariant::SB
    };
    let mut first_err = None;
    for variant in [preferred, JohnsonVariant::SU, JohnsonVariant::SL, JohnsonVariant::SB] {
        match johnson_fit(&sorted, variant) {
            Ok(p) => return Ok(p),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    // nothing matches the four quantiles: the normal limit of the system
    // always covers the data
    log::debug!("no Johnson variant matches the sample quantiles; using the normal limit");
    su_normal_limit(&spans).map_err(|_| first_err.expect("at least one variant was tried"))
}

fn fit_su(s: &QuantileSpans) -> Result<JohnsonParams> {
    let (mp, np) = (s.m / s.p, s.n / s.p);
    let disc = s.discriminant();
    // With x_k = eps + lambda sinh(k w + c), w = z / eta, c = -gamma / eta:
    //   m/p + n/p = 2 cosh(2w),  m/p - n/p = 2 tanh(c) sinh(2w).
    if disc > 1.0 {
        let cosh2w = 0.5 * (mp + np);
        let sinh2w = (cosh2w * cosh2w - 1.0).sqrt();
        su_from_spans(s, cosh2w, (mp - np) / (2.0 * sinh2w))
    } else if disc >= 1.0 - BOUNDARY_BAND {
        // lighter tails than any SU within sampling noise
        su_normal_limit(s)
    } else {
        Err(Error::FitFailure(format!(
            "quantile ratios (mn/p^2 = {disc:.4}) are inconsistent with SU"
        )))
    }
}

/// The near-normal SU member without skew matching the central span.
fn su_normal_limit(s: &QuantileSpans) -> Result<JohnsonParams> {
    su_from_spans(s, 1.0 + 1e-6, 0.0)
}

fn su_from_spans(s: &QuantileSpans, cosh2w: f64, tanh_c: f64) -> Result<JohnsonParams> {
    let z = QUANTILE_MATCH_Z;
    if !(cosh2w > 1.0) || !(tanh_c.abs() < 1.0) {
        return Err(Error::FitFailure("SU quantile system has no solution".into()));
    }
    let w = 0.5 * cosh2w.acosh();
    let c = tanh_c.atanh();
    let eta = z / w;
    let gamma = 0.0 - c * eta;
    let lambda = s.p / (2.0 * c.cosh() * w.sinh());
    let epsilon = 0.5 * (s.x_p1 + s.x_m1) - lambda * c.sinh() * w.cosh();
    JohnsonParams::new(JohnsonVariant::SU, gamma, eta, epsilon, lambda)
        .map_err(|e| Error::FitFailure(e.to_string()))
}

fn fit_sb(s: &QuantileSpans) -> Result<JohnsonParams> {
    let z = QUANTILE_MATCH_Z;
    let (pm, pn) = (s.p / s.m, s.p / s.n);
    let ratio = pm * pn;
    if !(ratio > 1.0) {
        return Err(Error::FitFailure(format!(
            "quantile ratios (p^2/mn = {ratio:.4}) are inconsistent with SB"
        )));
    }
    let prod = (1.0 + pm) * (1.0 + pn);
    let eta = z / (0.5 * prod.sqrt()).acosh();
    let gamma = eta * ((pn - pm) * (prod - 4.0).sqrt() / (2.0 * (ratio - 1.0))).asinh();
    let lambda = s.p * ((prod - 2.0).powi(2) - 4.0).sqrt() / (ratio - 1.0);
    let epsilon = 0.5 * (s.x_p1 + s.x_m1) - 0.5 * lambda + s.p * (pn - pm) / (2.0 * (ratio - 1.0));
    JohnsonParams::new(JohnsonVariant::SB, gamma, eta, epsilon, lambda)
        .map_err(|e| Error::FitFailure(e.to_string()))
}

fn fit_sl(s: &QuantileSpans) -> Result<JohnsonParams> {
    let z = QUANTILE_MATCH_Z;
    let mp = s.m / s.p;
    if !(mp > 1.0) {
        return Err(Error::FitFailure(format!(
            "quantile ratio m/p = {mp:.4} is inconsistent with SL"
        )));
    }
    let eta = 2.0 * z / mp.ln();
    let gamma = eta * ((mp - 1.0) / (s.p * mp.sqrt())).ln();
    let epsilon = 0.5 * (s.x_p1 + s.x_m1) - 0.5 * s.p * (mp + 1.0) / (mp - 1.0);
    JohnsonParams::new(JohnsonVariant::SL, gamma, eta, epsilon, 1.0)
        .map_err(|e| Error::FitFailure(e.to_string()))
}
