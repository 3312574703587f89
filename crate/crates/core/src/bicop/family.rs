//! Unrotated one-parameter families. All of them are exchangeable, so a
//! single h-function `h(u | v) = dC(u, v)/dv` serves both conditioning sides.

use std::f64::consts::PI;

use crate::numeric::{
    bivariate_normal_cdf, brent_root, integrate, normal_cdf, normal_quantile,
};

/// Copula family tag. The declaration order is the fixed tie-break order
/// used by family selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Independence,
    Gaussian,
    Clayton,
    Gumbel,
    Frank,
    Joe,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Independence,
        Family::Gaussian,
        Family::Clayton,
        Family::Gumbel,
        Family::Frank,
        Family::Joe,
    ];

    pub fn n_params(self) -> usize {
        match self {
            Family::Independence => 0,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Independence => "Independence",
            Family::Gaussian => "Gaussian",
            Family::Clayton => "Clayton",
            Family::Gumbel => "Gumbel",
            Family::Frank => "Frank",
            Family::Joe => "Joe",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
    }

    /// Families whose lower and upper tails differ, the only ones that are
    /// rotated.
    pub fn is_tail_asymmetric(self) -> bool {
        matches!(self, Family::Clayton | Family::Gumbel | Family::Joe)
    }

    pub fn in_domain(self, theta: f64) -> bool {
        if !theta.is_finite() {
            return false;
        }
        match self {
            Family::Independence => true,
            Family::Gaussian => theta > -1.0 && theta < 1.0,
            Family::Clayton => theta > 0.0,
            Family::Gumbel | Family::Joe => theta >= 1.0,
            Family::Frank => theta != 0.0,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

const FRANK_ZERO: f64 = 1e-10;

/// `ln(e^a + e^b - 1)` for `a, b >= 0`.
#[inline]
fn ln_sum_exp_minus_one(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp() - (-m).exp()).ln()
}

/// Base CDF at an interior point.
pub(crate) fn cdf(family: Family, theta: f64, u: f64, v: f64) -> f64 {
    match family {
        Family::Independence => u * v,
        Family::Gaussian => {
            bivariate_normal_cdf(normal_quantile(u), normal_quantile(v), theta)
        }
        Family::Clayton => {
            let s = ln_sum_exp_minus_one(-theta * u.ln(), -theta * v.ln());
            (-s / theta).exp()
        }
        Family::Gumbel => (-gumbel_a(theta, -u.ln(), -v.ln())).exp(),
        Family::Frank => {
            if theta.abs() < FRANK_ZERO {
                return u * v;
            }
            let a = (-theta * u).exp_m1();
            let b = (-theta * v).exp_m1();
            let e = (-theta).exp_m1();
            -(a * b / e).ln_1p() / theta
        }
        Family::Joe => {
            let a = (1.0 - u).powf(theta);
            let b = (1.0 - v).powf(theta);
            1.0 - (a + b - a * b).powf(1.0 / theta)
        }
    }
}

/// `(x^t + y^t)^(1/t)` without overflow.
#[inline]
fn gumbel_a(theta: f64, x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == 0.0 {
        return 0.0;
    }
    hi * (((lo / hi).powf(theta)).ln_1p() / theta).exp()
}

/// Base log-density at an interior point.
pub(crate) fn log_pdf(family: Family, theta: f64, u: f64, v: f64) -> f64 {
    match family {
        Family::Independence => 0.0,
        Family::Gaussian => gaussian_log_pdf(theta, normal_quantile(u), normal_quantile(v)),
        Family::Clayton => clayton_log_pdf(theta, u.ln(), v.ln()),
        Family::Gumbel => {
            let (x, y) = (-u.ln(), -v.ln());
            gumbel_log_pdf(theta, x, y, x.ln(), y.ln())
        }
        Family::Frank => frank_log_pdf(theta, u, v),
        Family::Joe => joe_log_pdf(theta, (-u).ln_1p(), (-v).ln_1p()),
    }
}

#[inline]
pub(crate) fn gaussian_log_pdf(rho: f64, a: f64, b: f64) -> f64 {
    let r2 = 1.0 - rho * rho;
    -0.5 * r2.ln() - (rho * rho * (a * a + b * b) - 2.0 * rho * a * b) / (2.0 * r2)
}

#[inline]
pub(crate) fn clayton_log_pdf(theta: f64, lu: f64, lv: f64) -> f64 {
    let s = ln_sum_exp_minus_one(-theta * lu, -theta * lv);
    theta.ln_1p() - (theta + 1.0) * (lu + lv) - (1.0 / theta + 2.0) * s
}

/// `x = -ln u`, `y = -ln v` with their logarithms.
#[inline]
pub(crate) fn gumbel_log_pdf(theta: f64, x: f64, y: f64, lx: f64, ly: f64) -> f64 {
    let a = gumbel_a(theta, x, y);
    let la = a.ln();
    -a + x + y + (theta - 1.0) * (lx + ly) + (1.0 - 2.0 * theta) * la + (a + theta - 1.0).ln()
}

#[inline]
pub(crate) fn frank_log_pdf(theta: f64, u: f64, v: f64) -> f64 {
    if theta.abs() < FRANK_ZERO {
        return 0.0;
    }
    let a = (-theta * u).exp_m1();
    let b = (-theta * v).exp_m1();
    let e = (-theta).exp_m1();
    (-theta * e).ln() - theta * (u + v) - 2.0 * (e + a * b).abs().ln()
}

/// `lu = ln(1 - u)`, `lv = ln(1 - v)`.
#[inline]
pub(crate) fn joe_log_pdf(theta: f64, lu: f64, lv: f64) -> f64 {
    let a = (theta * lu).exp();
    let b = (theta * lv).exp();
    let s = a + b - a * b;
    (1.0 / theta - 2.0) * s.ln() + (theta - 1.0) * (lu + lv) + (theta - 1.0 + s).ln()
}

/// `h(u | v) = dC(u, v) / dv`.
pub(crate) fn h(family: Family, theta: f64, u: f64, v: f64) -> f64 {
    match family {
        Family::Independence => u,
        Family::Gaussian => {
            let (a, b) = (normal_quantile(u), normal_quantile(v));
            normal_cdf((a - theta * b) / (1.0 - theta * theta).sqrt())
        }
        Family::Clayton => {
            let (lu, lv) = (u.ln(), v.ln());
            let s = ln_sum_exp_minus_one(-theta * lu, -theta * lv);
            (-(theta + 1.0) * lv - (1.0 / theta + 1.0) * s).exp()
        }
        Family::Gumbel => {
            let (x, y) = (-u.ln(), -v.ln());
            let a = gumbel_a(theta, x, y);
            (-a + (1.0 - theta) * a.ln() + (theta - 1.0) * y.ln() + y).exp()
        }
        Family::Frank => {
            if theta.abs() < FRANK_ZERO {
                return u;
            }
            let a = (-theta * u).exp_m1();
            let b = (-theta * v).exp_m1();
            let e = (-theta).exp_m1();
            (-theta * v).exp() * a / (e + a * b)
        }
        Family::Joe => {
            let (lu, lv) = ((-u).ln_1p(), (-v).ln_1p());
            let a = (theta * lu).exp();
            let b = (theta * lv).exp();
            let s = a + b - a * b;
            ((1.0 / theta - 1.0) * s.ln() + (theta - 1.0) * lv).exp() * -(theta * lu).exp_m1()
        }
    }
}

/// Closed-form inverse of `u -> h(u | v)` where one exists.
pub(crate) fn h_inverse_closed_form(family: Family, theta: f64, p: f64, v: f64) -> Option<f64> {
    match family {
        Family::Independence => Some(p),
        Family::Gaussian => Some(normal_cdf(
            normal_quantile(p) * (1.0 - theta * theta).sqrt() + theta * normal_quantile(v),
        )),
        Family::Clayton => {
            // u^-t = 1 + v^-t (p^(-t/(t+1)) - 1)
            let x = (-theta * v.ln()).exp() * (-theta / (theta + 1.0) * p.ln()).exp_m1();
            Some((-x.ln_1p() / theta).exp())
        }
        Family::Frank => {
            if theta.abs() < FRANK_ZERO {
                return Some(p);
            }
            let b = (-theta * v).exp_m1();
            let e = (-theta).exp_m1();
            let a = p * e / (1.0 + b * (1.0 - p));
            Some(-a.ln_1p() / theta)
        }
        Family::Gumbel | Family::Joe => None,
    }
}

/// Kendall's tau of the unrotated family.
pub(crate) fn tau(family: Family, theta: f64) -> f64 {
    match family {
        Family::Independence => 0.0,
        Family::Gaussian => 2.0 / PI * theta.asin(),
        Family::Clayton => theta / (theta + 2.0),
        Family::Gumbel => 1.0 - 1.0 / theta,
        Family::Frank => {
            if theta.abs() < FRANK_ZERO {
                return 0.0;
            }
            // 1 - 4/t + 4 D1(t)/t with the Debye function D1
            let integrand = |t: f64| if t == 0.0 { 1.0 } else { t / t.exp_m1() };
            let integral = integrate(integrand, 0.0, theta, 1e-15, 1e-14);
            let debye = integral / theta;
            1.0 - 4.0 / theta * (1.0 - debye)
        }
        Family::Joe => {
            if theta == 1.0 {
                return 0.0;
            }
            // Archimedean identity tau = 1 + 4 int_0^1 phi / phi'
            let ratio = |t: f64| {
                let w = 1.0 - t;
                if w <= 0.0 {
                    return 0.0;
                }
                let s = w.powf(theta);
                (-s).ln_1p() * (1.0 - s) / (theta * w.powf(theta - 1.0))
            };
            1.0 + 4.0 * integrate(ratio, 0.0, 1.0, 1e-15, 1e-14)
        }
    }
}

/// Inverse of [`tau`] for a nonnegative (or, for Gaussian and Frank, any)
/// attainable tau. `None` when unattainable.
pub(crate) fn tau_inverse(family: Family, tau: f64) -> Option<f64> {
    if !(tau > -1.0 && tau < 1.0) {
        return None;
    }
    match family {
        Family::Independence => (tau == 0.0).then_some(0.0),
        Family::Gaussian => Some((PI / 2.0 * tau).sin()),
        Family::Clayton => (tau > 0.0).then(|| 2.0 * tau / (1.0 - tau)),
        Family::Gumbel => (tau >= 0.0).then(|| 1.0 / (1.0 - tau)),
        Family::Frank => {
            if tau == 0.0 {
                return None;
            }
            let f = |t: f64| self::tau(Family::Frank, t) - tau;
            // tau is increasing in theta; grow the bracket away from zero
            let near_zero = 1e-9_f64.copysign(tau);
            let mut far = 1.0_f64.copysign(tau);
            while f(far).signum() != tau.signum() && far.abs() < 1e6 {
                far *= 2.0;
            }
            brent_root(f, near_zero, far, 1e-13)
        }
        Family::Joe => {
            if tau < 0.0 {
                return None;
            }
            if tau == 0.0 {
                return Some(1.0);
            }
            let f = |t: f64| self::tau(Family::Joe, t) - tau;
            let mut hi = 2.0;
            while f(hi) < 0.0 && hi < 1e6 {
                hi *= 2.0;
            }
            brent_root(f, 1.0, hi, 1e-13)
        }
    }
}

/// Closed-form `(lower, upper)` tail dependence of the unrotated family.
pub(crate) fn tail_dependence(family: Family, theta: f64) -> (f64, f64) {
    match family {
        Family::Clayton => (2f64.powf(-1.0 / theta), 0.0),
        Family::Gumbel | Family::Joe => (0.0, 2.0 - 2f64.powf(1.0 / theta)),
        _ => (0.0, 0.0),
    }
}
