//! Univariate margins: the generalized lambda distribution with starship
//! fitting, the Johnson system, empirical margins, pseudo-observations and
//! the probability integral transform.

mod empirical;
mod gld;
mod johnson;

pub use empirical::EmpiricalCdf;
pub use gld::{gld_cdf, gld_fit_starship, gld_pdf, gld_quantile, starship_objective, GldParams};
pub use johnson::{
    johnson_fit, johnson_fit_auto, johnson_pdf, JohnsonParams, JohnsonVariant, QUANTILE_MATCH_Z,
};

use crate::error::{Error, Result};
use crate::numeric::{clamp_unit, U_EPS};

/// A fitted univariate distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum MarginalModel {
    Gld(GldParams),
    Johnson(JohnsonParams),
    Empirical(EmpiricalCdf),
}

impl MarginalModel {
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            MarginalModel::Gld(p) => gld_cdf(x, p),
            MarginalModel::Johnson(p) => p.cdf(x),
            MarginalModel::Empirical(e) => e.cdf(x),
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(U_EPS, 1.0 - U_EPS);
        match self {
            MarginalModel::Gld(p) => {
                p.lambda1 + (u.powf(p.lambda3) - (1.0 - u).powf(p.lambda4)) / p.lambda2
            }
            MarginalModel::Johnson(p) => p.quantile(u),
            MarginalModel::Empirical(e) => e.quantile(u),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            MarginalModel::Gld(p) => gld_pdf(x, p),
            MarginalModel::Johnson(p) => johnson_pdf(x, p),
            MarginalModel::Empirical(e) => e.pdf(x),
        }
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            MarginalModel::Gld(_) => "gld",
            MarginalModel::Johnson(_) => "johnson",
            MarginalModel::Empirical(_) => "empirical",
        }
    }
}

/// Average ranks of a column (1-based).
fn average_ranks(column: &[f64]) -> Vec<f64> {
    let n = column.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| column[a].total_cmp(&column[b]));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && column[idx[end + 1]] == column[idx[start]] {
            end += 1;
        }
        let avg = 0.5 * ((start + 1) + (end + 1)) as f64;
        for &i in &idx[start..=end] {
            ranks[i] = avg;
        }
        start = end + 1;
    }
    ranks
}

/// Rank-based uniforms `R / (n + 1)` per column, ties receiving the average rank.
pub fn pseudo_observations(columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
    columns
        .iter()
        .map(|col| {
            let denom = (col.len() + 1) as f64;
            average_ranks(col).into_iter().map(|r| r / denom).collect()
        })
        .collect()
}

fn check_arity(columns: usize, models: usize) -> Result<()> {
    if columns != models {
        return Err(Error::LengthMismatch { left: columns, right: models });
    }
    Ok(())
}

/// Probability integral transform `u = F_k(x)` per column, clamped to
/// `[1e-12, 1 - 1e-12]`.
pub fn pit(columns: &[Vec<f64>], models: &[MarginalModel]) -> Result<Vec<Vec<f64>>> {
    check_arity(columns.len(), models.len())?;
    Ok(columns
        .iter()
        .zip(models)
        .map(|(col, m)| col.iter().map(|&x| clamp_unit(m.cdf(x))).collect())
        .collect())
}

/// Inverse transform `x = F_k^{-1}(u)` per column.
pub fn inverse_pit(uniforms: &[Vec<f64>], models: &[MarginalModel]) -> Result<Vec<Vec<f64>>> {
    check_arity(uniforms.len(), models.len())?;
    Ok(uniforms
        .iter()
        .zip(models)
        .map(|(col, m)| col.iter().map(|&u| m.quantile(u)).collect())
        .collect())
}

/// Anderson-Darling statistic of a sample against the standard uniform.
pub fn anderson_darling(uniforms: &[f64]) -> f64 {
    let mut sorted = uniforms.to_vec();
    sorted.sort_by(f64::total_cmp);
    anderson_darling_sorted(&sorted)
}

pub(crate) fn anderson_darling_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::INFINITY;
    }
    let mut s = 0.0;
    for i in 0..n {
        let lo = clamp_unit(sorted[i]).ln();
        let hi = (1.0 - clamp_unit(sorted[n - 1 - i])).ln();
        s += (2 * i + 1) as f64 * (lo + hi);
    }
    -(n as f64) - s / n as f64
}

/// 5% critical value of the Anderson-Darling statistic for a fully
/// specified uniform null.
pub const AD_CRITICAL_5PCT: f64 = 2.492;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dependence::kendall_tau;
    use proptest::prelude::*;

    #[test]
    fn pseudo_observation_examples() {
        let u = pseudo_observations(&[vec![10.0, 20.0, 15.0]]);
        assert_eq!(u[0], vec![0.25, 0.75, 0.5]);
        let tied = pseudo_observations(&[vec![5.0, 5.0]]);
        assert_eq!(tied[0], vec![0.5, 0.5]);
    }

    #[test]
    fn pit_examples() {
        let m = MarginalModel::Gld(GldParams::new(0.0, 1.0, 1.0, 1.0).unwrap());
        let u = pit(&[vec![0.0]], std::slice::from_ref(&m)).unwrap();
        assert_eq!(u[0][0], 0.5);
        let x = inverse_pit(&[vec![0.5]], &[m]).unwrap();
        assert_eq!(x[0][0], 0.0);
        let su = MarginalModel::Johnson(
            JohnsonParams::new(JohnsonVariant::SU, 0.0, 1.0, 0.0, 1.0).unwrap(),
        );
        assert_eq!(inverse_pit(&[vec![0.5]], &[su]).unwrap()[0][0], 0.0);
        assert!(pit(&[vec![0.0], vec![1.0]], &[]).is_err());
    }

    #[test]
    fn anderson_darling_small_for_uniform_grid() {
        let u: Vec<f64> = (1..=1000).map(|k| k as f64 / 1001.0).collect();
        assert!(anderson_darling(&u) < 0.1);
        let bunched: Vec<f64> = (1..=1000).map(|k| 0.5 * k as f64 / 1001.0).collect();
        assert!(anderson_darling(&bunched) > AD_CRITICAL_5PCT);
    }

    proptest! {
        #[test]
        fn pseudo_observations_rank_invariant(col in prop::collection::vec(-50.0f64..50.0, 2..100)) {
            let transformed: Vec<f64> = col.iter().map(|v| v * 2.0 + 0.0).collect();
            let a = pseudo_observations(&[col.clone()]);
            let b = pseudo_observations(&[transformed]);
            prop_assert_eq!(&a, &b);
            prop_assert!(a[0].iter().all(|&u| u > 0.0 && u < 1.0));
        }

        #[test]
        fn pseudo_observations_preserve_order(col in prop::collection::hash_set(-1000i32..1000, 2..60)) {
            let col: Vec<f64> = col.into_iter().map(f64::from).collect();
            let u = pseudo_observations(&[col.clone()]);
            prop_assert_eq!(kendall_tau(&col, &u[0]).unwrap(), 1.0);
        }
    }
}
