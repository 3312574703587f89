//! Parametric bivariate copulas: distribution function, density,
//! h-functions and their inverses, Kendall's tau links, tail dependence,
//! rotations, maximum-likelihood fitting and AIC/BIC selection.
//!
//! Rotations act on the arguments of the base density:
//! `c_rot(u1, u2) = c(rotate_inputs(rotation, u1, u2))` with
//! 90 -> `(u2, 1 - u1)`, 180 -> `(1 - u1, 1 - u2)`, 270 -> `(1 - u2, u1)`.

mod family;
mod fit;

pub use family::Family;
pub use fit::{default_candidates, fit_mle, select_family, Criterion, FittedPairCopula};

use crate::error::{Error, Result};
use crate::numeric::{clamp_unit, U_EPS};

/// Counter-clockwise rotation of a copula density in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Rotation {
    #[default]
    R0,
    R90,
    R180,
    R270,
}

impl Rotation {
    pub const ALL: [Rotation; 4] = [Rotation::R0, Rotation::R90, Rotation::R180, Rotation::R270];

    pub fn degrees(self) -> u32 {
        match self {
            Rotation::R0 => 0,
            Rotation::R90 => 90,
            Rotation::R180 => 180,
            Rotation::R270 => 270,
        }
    }

    pub fn from_degrees(deg: u32) -> Option<Rotation> {
        match deg {
            0 => Some(Rotation::R0),
            90 => Some(Rotation::R90),
            180 => Some(Rotation::R180),
            270 => Some(Rotation::R270),
            _ => None,
        }
    }

    /// 90 and 270 degree rotations turn positive into negative dependence.
    pub fn negates_dependence(self) -> bool {
        matches!(self, Rotation::R90 | Rotation::R270)
    }
}

/// Which copula argument an h-function conditions on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CondOn {
    /// `dC(u1, u2)/du1`, the conditional distribution of `u2` given `u1`.
    First,
    /// `dC(u1, u2)/du2`, the conditional distribution of `u1` given `u2`.
    Second,
}

/// Map `(u1, u2)` to the base-density arguments of a rotated copula.
pub fn rotate_inputs(rotation: Rotation, u1: f64, u2: f64) -> (f64, f64) {
    match rotation {
        Rotation::R0 => (u1, u2),
        Rotation::R90 => (u2, 1.0 - u1),
        Rotation::R180 => (1.0 - u1, 1.0 - u2),
        Rotation::R270 => (1.0 - u2, u1),
    }
}

/// A bivariate copula: family, rotation and parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCopulaSpec {
    family: Family,
    rotation: Rotation,
    params: Vec<f64>,
}

impl PairCopulaSpec {
    /// Validates the parameter count, the family domain and the rotation.
    pub fn new(family: Family, rotation: Rotation, params: Vec<f64>) -> Result<Self> {
        if params.len() != family.n_params() {
            return Err(Error::Domain(format!(
                "{family} takes {} parameter(s), got {}",
                family.n_params(),
                params.len()
            )));
        }
        if let Some(&theta) = params.first() {
            if !family.in_domain(theta) {
                return Err(Error::Domain(format!("{family} parameter {theta}")));
            }
        }
        if rotation != Rotation::R0 && !family.is_tail_asymmetric() {
            return Err(Error::Domain(format!(
                "{family} is only used unrotated, got {} degrees",
                rotation.degrees()
            )));
        }
        Ok(Self { family, rotation, params })
    }

    pub fn independence() -> Self {
        Self { family: Family::Independence, rotation: Rotation::R0, params: Vec::new() }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rotation(&self) -> Rotation {
        self.rotation
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    fn theta(&self) -> f64 {
        self.params.first().copied().unwrap_or(0.0)
    }

    /// `Family` or `Family_<degrees>` for rotated copulas.
    pub fn label(&self) -> String {
        match self.rotation {
            Rotation::R0 => self.family.name().to_string(),
            r => format!("{}_{}", self.family.name(), r.degrees()),
        }
    }

    /// Copula distribution function. Exact on the boundary of the unit square.
    pub fn cdf(&self, u1: f64, u2: f64) -> f64 {
        if u1 <= 0.0 || u2 <= 0.0 {
            return 0.0;
        }
        if u1 >= 1.0 {
            return u2.min(1.0);
        }
        if u2 >= 1.0 {
            return u1;
        }
        let (f, t) = (self.family, self.theta());
        let base = |a: f64, b: f64| {
            if a <= 0.0 || b <= 0.0 {
                0.0
            } else {
                family::cdf(f, t, a, b)
            }
        };
        let c = match self.rotation {
            Rotation::R0 => base(u1, u2),
            Rotation::R90 => u2 - base(u2, 1.0 - u1),
            Rotation::R180 => u1 + u2 - 1.0 + base(1.0 - u1, 1.0 - u2),
            Rotation::R270 => u1 - base(1.0 - u2, u1),
        };
        c.clamp(0.0, u1.min(u2))
    }

    /// Log-density; inputs are clamped into `[1e-12, 1 - 1e-12]`.
    pub fn log_pdf(&self, u1: f64, u2: f64) -> f64 {
        let (a, b) = rotate_inputs(self.rotation, clamp_unit(u1), clamp_unit(u2));
        family::log_pdf(self.family, self.theta(), clamp_unit(a), clamp_unit(b))
    }

    pub fn pdf(&self, u1: f64, u2: f64) -> f64 {
        self.log_pdf(u1, u2).exp()
    }

    /// Conditional distribution function: with [`CondOn::Second`] this is
    /// `integral_0^{u_free} c(t, u_cond) dt`, with [`CondOn::First`]
    /// `integral_0^{u_free} c(u_cond, t) dt`.
    pub fn hfunc(&self, cond_on: CondOn, u_cond: f64, u_free: f64) -> f64 {
        let c = clamp_unit(u_cond);
        let f = clamp_unit(u_free);
        let (fam, t) = (self.family, self.theta());
        let hb = |free: f64, cond: f64| family::h(fam, t, clamp_unit(free), clamp_unit(cond));
        let v = match (self.rotation, cond_on) {
            (Rotation::R0, _) => hb(f, c),
            (Rotation::R90, CondOn::First) => hb(f, 1.0 - c),
            (Rotation::R90, CondOn::Second) => 1.0 - hb(1.0 - f, c),
            (Rotation::R180, _) => 1.0 - hb(1.0 - f, 1.0 - c),
            (Rotation::R270, CondOn::First) => 1.0 - hb(1.0 - f, c),
            (Rotation::R270, CondOn::Second) => hb(f, 1.0 - c),
        };
        v.clamp(0.0, 1.0)
    }

    /// Inverse of [`Self::hfunc`] in its free argument.
    pub fn hinv(&self, cond_on: CondOn, u_cond: f64, p: f64) -> f64 {
        let c = clamp_unit(u_cond);
        let p = p.clamp(0.0, 1.0);
        let (fam, t) = (self.family, self.theta());
        let base_inv = |q: f64, cond: f64| family::h_inverse_closed_form(fam, t, q, clamp_unit(cond));
        let guess = match (self.rotation, cond_on) {
            (Rotation::R0, _) => base_inv(p, c),
            (Rotation::R90, CondOn::First) | (Rotation::R270, CondOn::Second) => base_inv(p, 1.0 - c),
            (Rotation::R90, CondOn::Second) | (Rotation::R270, CondOn::First) => {
                base_inv(1.0 - p, c).map(|x| 1.0 - x)
            }
            (Rotation::R180, _) => base_inv(1.0 - p, 1.0 - c).map(|x| 1.0 - x),
        };
        self.polish_hinv(cond_on, c, p, guess)
    }

    /// Safeguarded Newton on the monotone map `x -> hfunc(x) - p`, with the
    /// density as derivative and bisection whenever a step leaves the bracket.
    fn polish_hinv(&self, cond_on: CondOn, c: f64, p: f64, guess: Option<f64>) -> f64 {
        let (mut lo, mut hi) = (U_EPS, 1.0 - U_EPS);
        let g = |x: f64| self.hfunc(cond_on, c, x) - p;
        if g(lo) >= 0.0 {
            return lo;
        }
        if g(hi) <= 0.0 {
            return hi;
        }
        let mut x = match guess {
            Some(v) if v.is_finite() && v > lo && v < hi => v,
            _ => 0.5,
        };
        for _ in 0..200 {
            let r = g(x);
            if r == 0.0 {
                break;
            }
            if r < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let slope = match cond_on {
                CondOn::First => self.pdf(c, x),
                CondOn::Second => self.pdf(x, c),
            };
            let mut next = x - r / slope;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            let step = (next - x).abs();
            x = next;
            if step <= 1e-16 || hi - lo <= 2.0 * f64::EPSILON * hi {
                break;
            }
        }
        x
    }

    /// Kendall's tau of the copula.
    pub fn tau(&self) -> f64 {
        let base = family::tau(self.family, self.theta());
        if self.rotation.negates_dependence() {
            -base
        } else {
            base
        }
    }

    /// Closed-form `(lambda_lower, lambda_upper)`.
    pub fn tail_dependence(&self) -> (f64, f64) {
        let (l, u) = family::tail_dependence(self.family, self.theta());
        match self.rotation {
            Rotation::R0 => (l, u),
            Rotation::R180 => (u, l),
            Rotation::R90 | Rotation::R270 => (0.0, 0.0),
        }
    }
}

/// Copula distribution function `C(u1, u2)`.
pub fn bicop_cdf(spec: &PairCopulaSpec, u1: f64, u2: f64) -> f64 {
    spec.cdf(u1, u2)
}

/// Copula density `c(u1, u2)`.
pub fn bicop_pdf(spec: &PairCopulaSpec, u1: f64, u2: f64) -> f64 {
    spec.pdf(u1, u2)
}

pub fn hfunc(spec: &PairCopulaSpec, cond_on: CondOn, u_cond: f64, u_free: f64) -> f64 {
    spec.hfunc(cond_on, u_cond, u_free)
}

pub fn hinv(spec: &PairCopulaSpec, cond_on: CondOn, u_cond: f64, p: f64) -> f64 {
    spec.hinv(cond_on, u_cond, p)
}

pub fn param_to_tau(spec: &PairCopulaSpec) -> f64 {
    spec.tau()
}

/// Copula with the given Kendall's tau, or a range error when the family
/// and rotation cannot attain it.
pub fn tau_to_param(family: Family, rotation: Rotation, tau: f64) -> Result<PairCopulaSpec> {
    if family == Family::Independence {
        return if tau == 0.0 {
            Ok(PairCopulaSpec::independence())
        } else {
            Err(Error::TauOutOfRange { tau, reason: "independence has tau = 0".into() })
        };
    }
    if rotation != Rotation::R0 && !family.is_tail_asymmetric() {
        return Err(Error::Domain(format!("{family} is only used unrotated")));
    }
    let base_tau = if rotation.negates_dependence() { -tau } else { tau };
    let theta = family::tau_inverse(family, base_tau).ok_or_else(|| Error::TauOutOfRange {
        tau,
        reason: format!(
            "{} at {} degrees",
            family.name(),
            rotation.degrees()
        ),
    })?;
    PairCopulaSpec::new(family, rotation, vec![theta]).map_err(|_| Error::TauOutOfRange {
        tau,
        reason: format!("{} parameter {theta} outside its domain", family.name()),
    })
}

/// Closed-form tail-dependence coefficients `(lambda_lower, lambda_upper)`.
pub fn tail_dependence(spec: &PairCopulaSpec) -> (f64, f64) {
    spec.tail_dependence()
}

/// Tail dependence from the defining limits `C(t,t)/t` (t -> 0) and
/// `(1 - 2t + C(t,t)) / (1 - t)` (t -> 1), evaluated at distances 1e-6 and
/// 1e-7 from the corner. A limit is reported only when both evaluations
/// agree to 1e-3, otherwise 0.
pub fn tail_dependence_numeric(spec: &PairCopulaSpec) -> (f64, f64) {
    let lower = |t: f64| spec.cdf(t, t) / t;
    let upper = |d: f64| {
        let t = 1.0 - d;
        (1.0 - 2.0 * t + spec.cdf(t, t)) / d
    };
    let settle = |a: f64, b: f64| {
        if (a - b).abs() <= 1e-3 {
            b.clamp(0.0, 1.0)
        } else {
            0.0
        }
    };
    (
        settle(lower(1e-6), lower(1e-7)),
        settle(upper(1e-6), upper(1e-7)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(f: Family, r: Rotation, t: f64) -> PairCopulaSpec {
        PairCopulaSpec::new(f, r, vec![t]).unwrap()
    }

    #[test]
    fn independence_basics() {
        let ind = PairCopulaSpec::independence();
        assert!((ind.cdf(0.3, 0.7) - 0.21).abs() < 1e-16);
        assert_eq!(ind.pdf(0.2, 0.9), 1.0);
        assert_eq!(ind.hfunc(CondOn::Second, 0.4, 0.3), 0.3);
        assert_eq!(ind.hinv(CondOn::First, 0.4, 0.3), 0.3);
        assert_eq!(ind.tail_dependence(), (0.0, 0.0));
        assert_eq!(ind.tau(), 0.0);
    }

    #[test]
    fn gaussian_zero_is_independence() {
        let g = spec(Family::Gaussian, Rotation::R0, 0.0);
        assert!((g.pdf(0.2, 0.7) - 1.0).abs() < 1e-15);
        assert_eq!(g.tau(), 0.0);
        let g = spec(Family::Gaussian, Rotation::R0, 0.5);
        assert!((g.hfunc(CondOn::Second, 0.5, 0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn domains_and_rotations_validated() {
        assert!(PairCopulaSpec::new(Family::Gaussian, Rotation::R0, vec![1.0]).is_err());
        assert!(PairCopulaSpec::new(Family::Clayton, Rotation::R0, vec![0.0]).is_err());
        assert!(PairCopulaSpec::new(Family::Gumbel, Rotation::R0, vec![0.9]).is_err());
        assert!(PairCopulaSpec::new(Family::Frank, Rotation::R0, vec![0.0]).is_err());
        assert!(PairCopulaSpec::new(Family::Joe, Rotation::R0, vec![0.5]).is_err());
        assert!(PairCopulaSpec::new(Family::Frank, Rotation::R90, vec![2.0]).is_err());
        assert!(PairCopulaSpec::new(Family::Clayton, Rotation::R0, vec![]).is_err());
        assert!(PairCopulaSpec::new(Family::Gumbel, Rotation::R0, vec![1.0]).is_ok());
    }

    #[test]
    fn rotate_inputs_examples() {
        assert_eq!(rotate_inputs(Rotation::R180, 0.2, 0.3), (0.8, 0.7));
        assert_eq!(rotate_inputs(Rotation::R0, 0.2, 0.3), (0.2, 0.3));
        let base = spec(Family::Clayton, Rotation::R0, 2.0);
        let rot = spec(Family::Clayton, Rotation::R90, 2.0);
        assert_eq!(rot.pdf(0.2, 0.9), base.pdf(0.9, 0.8));
    }

    #[test]
    fn uniform_margins_on_boundary() {
        for s in [
            spec(Family::Clayton, Rotation::R90, 3.0),
            spec(Family::Gumbel, Rotation::R180, 2.0),
            spec(Family::Joe, Rotation::R270, 1.7),
            spec(Family::Frank, Rotation::R0, -4.0),
            spec(Family::Gaussian, Rotation::R0, 0.7),
        ] {
            for &u in &[0.1, 0.5, 0.93] {
                assert!((s.cdf(u, 1.0) - u).abs() < 1e-12);
                assert!((s.cdf(1.0, u) - u).abs() < 1e-12);
                assert_eq!(s.cdf(u, 0.0), 0.0);
                assert_eq!(s.cdf(0.0, u), 0.0);
                assert!((s.cdf(u, 1.0 - 1e-12) - u).abs() < 1e-9, "{s:?}");
            }
        }
    }

    #[test]
    fn tau_links() {
        assert_eq!(spec(Family::Gumbel, Rotation::R0, 1.0).tau(), 0.0);
        assert!((spec(Family::Clayton, Rotation::R0, 5.0).tau() - 5.0 / 7.0).abs() < 1e-15);
        let g = tau_to_param(Family::Gaussian, Rotation::R0, 0.0).unwrap();
        assert_eq!(g.params(), &[0.0]);
        let c = tau_to_param(Family::Clayton, Rotation::R0, 5.0 / 7.0).unwrap();
        assert!((c.params()[0] - 5.0).abs() < 1e-3);
        assert!(matches!(
            tau_to_param(Family::Clayton, Rotation::R0, -0.3),
            Err(Error::TauOutOfRange { .. })
        ));
        for (f, r, t) in [
            (Family::Frank, Rotation::R0, 0.4),
            (Family::Frank, Rotation::R0, -0.6),
            (Family::Joe, Rotation::R0, 0.25),
            (Family::Joe, Rotation::R90, -0.5),
            (Family::Gumbel, Rotation::R270, -0.3),
            (Family::Clayton, Rotation::R180, 0.2),
        ] {
            let s = tau_to_param(f, r, t).unwrap();
            assert!((s.tau() - t).abs() < 1e-6, "{f:?} {r:?}");
        }
    }

    #[test]
    fn rotation_sign_of_tau() {
        for f in [Family::Clayton, Family::Gumbel, Family::Joe] {
            let base = spec(f, Rotation::R0, 2.0).tau();
            assert!((spec(f, Rotation::R90, 2.0).tau() + base).abs() < 1e-12);
            assert!((spec(f, Rotation::R270, 2.0).tau() + base).abs() < 1e-12);
            assert!((spec(f, Rotation::R180, 2.0).tau() - base).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_dependence_values() {
        let (l, u) = spec(Family::Clayton, Rotation::R0, 5.0).tail_dependence();
        assert_eq!((l * 100.0).round() / 100.0, 0.87);
        assert_eq!(u, 0.0);
        let (l, u) = spec(Family::Clayton, Rotation::R180, 5.0).tail_dependence();
        assert_eq!(l, 0.0);
        assert!(u > 0.87);
        let g = spec(Family::Gumbel, Rotation::R0, 2.0);
        let (_, closed) = g.tail_dependence();
        let (_, numeric) = tail_dependence_numeric(&g);
        assert!((closed - numeric).abs() < 1e-4);
    }
}
