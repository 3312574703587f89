//! Rank-based dependence: sample Kendall's tau, the pairwise tau matrix and
//! partial tau between conditional variates.
//!
//! Ties contribute zero to the concordance sum and the denominator is always
//! `n (n - 1) / 2`; no tie correction is applied.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Sample Kendall's tau, `O(n log n)`.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    let n = x.len() as i64;
    Ok(concordance_sum(x, y) as f64 / (n * (n - 1) / 2) as f64)
}

/// Sample Kendall's tau by direct enumeration of all pairs, `O(n^2)`.
pub fn kendall_tau_brute_force(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    let n = x.len();
    let mut sum: i64 = 0;
    for i in 0..n {
        for j in i + 1..n {
            let s = sign(x[i] - x[j]) * sign(y[i] - y[j]);
            sum += s;
        }
    }
    let n = n as i64;
    Ok(sum as f64 / (n * (n - 1) / 2) as f64)
}

/// Kendall's tau between conditional variates `u_{i|D}` and `u_{j|D}`.
pub fn partial_tau(u_i_given_d: &[f64], u_j_given_d: &[f64]) -> Result<f64> {
    kendall_tau(u_i_given_d, u_j_given_d)
}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::InvalidParameter(
            "kendall's tau needs at least two observations".into(),
        ));
    }
    Ok(())
}

#[inline]
fn sign(v: f64) -> i64 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Sum of `sign[(x_i - x_j)(y_i - y_j)]` over all pairs (Knight's algorithm).
fn concordance_sum(x: &[f64], y: &[f64]) -> i64 {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| match x[a].total_cmp(&x[b]) {
        Ordering::Equal => y[a].total_cmp(&y[b]),
        o => o,
    });

    let pairs = |run: i64| run * (run - 1) / 2;

    let mut ties_x = 0i64;
    let mut ties_xy = 0i64;
    let mut run_x = 1i64;
    let mut run_xy = 1i64;
    for w in idx.windows(2) {
        let (a, b) = (w[0], w[1]);
        if x[a] == x[b] {
            run_x += 1;
            if y[a] == y[b] {
                run_xy += 1;
            } else {
                ties_xy += pairs(run_xy);
                run_xy = 1;
            }
        } else {
            ties_x += pairs(run_x);
            ties_xy += pairs(run_xy);
            run_x = 1;
            run_xy = 1;
        }
    }
    ties_x += pairs(run_x);
    ties_xy += pairs(run_xy);

    // Sorting by y now counts the discordant pairs as inversions.
    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut ys, &mut buf);

    let mut ties_y = 0i64;
    let mut run_y = 1i64;
    for w in ys.windows(2) {
        if w[0] == w[1] {
            run_y += 1;
        } else {
            ties_y += pairs(run_y);
            run_y = 1;
        }
    }
    ties_y += pairs(run_y);

    let total = pairs(n as i64);
    total - ties_x - ties_y + ties_xy - 2 * swaps
}

fn merge_count(v: &mut [f64], buf: &mut [f64]) -> i64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (left, right) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(left, bl) + merge_count(right, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as i64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Symmetric matrix of pairwise sample Kendall's tau with variable labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TauMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl TauMatrix {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Labeled square CSV table: a header of labels, then one row per variable.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("variable");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (label, row) in self.labels.iter().zip(&self.values) {
            out.push_str(label);
            for v in row {
                let _ = write!(out, ",{}", crate::fmt_f64(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// Pairwise sample Kendall's tau of the given columns.
pub fn tau_matrix(columns: &[Vec<f64>], labels: &[String]) -> Result<TauMatrix> {
    let d = columns.len();
    if d < 2 {
        return Err(Error::InvalidParameter(
            "tau matrix needs at least two columns".into(),
        ));
    }
    if labels.len() != d {
        return Err(Error::LengthMismatch { left: labels.len(), right: d });
    }
    let mut values = vec![vec![1.0; d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let t = kendall_tau(&columns[i], &columns[j])?;
            values[i][j] = t;
            values[j][i] = t;
        }
    }
    Ok(TauMatrix { labels: labels.to_vec(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        // 5 concordant, 1 discordant
        let t = kendall_tau(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!(t, 4.0 / 6.0);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            kendall_tau(&[1.0, 2.0], &[1.0]),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn ties_count_zero() {
        // pairs: (1,2) tie in x -> 0; (1,3) +1; (2,3) +1
        let t = kendall_tau(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(t, 2.0 / 3.0);
        assert_eq!(kendall_tau(&[5.0, 5.0], &[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn identical_partial_variates() {
        let u = [0.1, 0.7, 0.3, 0.9];
        assert_eq!(partial_tau(&u, &u).unwrap(), 1.0);
    }

    #[test]
    fn identical_columns_matrix() {
        let c = vec![0.3, 0.1, 0.8, 0.5];
        let m = tau_matrix(&[c.clone(), c], &["a".into(), "b".into()]).unwrap();
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(1, 0), 1.0);
        assert_eq!(m.get(0, 0), 1.0);
    }

    fn tied_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec((0i32..12).prop_map(|v| v as f64), n)
    }

    proptest! {
        #[test]
        fn fast_matches_brute_force(
            (x, y) in (2usize..200).prop_flat_map(|n| (tied_vec(n), tied_vec(n)))
        ) {
            prop_assert_eq!(kendall_tau(&x, &y).unwrap(), kendall_tau_brute_force(&x, &y).unwrap());
        }

        #[test]
        fn symmetric_and_rank_invariant(
            (x, y) in (2usize..100).prop_flat_map(|n| (
                prop::collection::vec(-100.0f64..100.0, n),
                prop::collection::vec(-100.0f64..100.0, n),
            ))
        ) {
            let t = kendall_tau(&x, &y).unwrap();
            prop_assert_eq!(t, kendall_tau(&y, &x).unwrap());
            let gx: Vec<f64> = x.iter().map(|v| v * 2.0).collect();
            prop_assert_eq!(t, kendall_tau(&gx, &y).unwrap());
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            prop_assert_eq!(-t, kendall_tau(&neg, &y).unwrap());
        }
    }
}
