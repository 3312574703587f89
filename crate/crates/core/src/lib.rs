//! Vine copula modelling: univariate margins, parametric pair-copulas,
//! rank dependence, regular-vine structure selection, joint density and
//! simulation.

pub mod bicop;
pub mod cli;
pub mod dependence;
pub mod error;
pub mod marginals;
pub mod numeric;
pub mod vine;

pub use error::{Error, Result};

/// Round-trip decimal formatting (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}
