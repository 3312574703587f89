//! Two-dimensional slice of a joint density with Gaussian-copula dependence
//! and Johnson SU margins. With SU(0,1,0,1) the normal scores are
//! `asinh(x)`, so the slice equals a bivariate normal density in those
//! scores times the Jacobians `1/sqrt(1+x^2)`.

use vinecop::bicop::{Family, PairCopulaSpec, Rotation};
use vinecop::marginals::{JohnsonParams, JohnsonVariant, MarginalModel};
use vinecop::vine::{density_slice, FixPolicy, Margins, VineModel, VineStructure};

fn main() -> vinecop::Result<()> {
    let labels = vec!["x".to_string(), "y".to_string()];
    let structure = VineStructure::d_vine(labels, &[0, 1])?;
    let rho = 0.6;
    let copulas = vec![vec![PairCopulaSpec::new(Family::Gaussian, Rotation::R0, vec![rho])?]];
    let normal = MarginalModel::Johnson(JohnsonParams::new(JohnsonVariant::SU, 0.0, 1.0, 0.0, 1.0)?);
    let model = VineModel::from_specs(structure, copulas, Margins::Fitted(vec![normal.clone(), normal]))?;

    let axis: Vec<f64> = (0..5).map(|k| -2.0 + k as f64).collect();
    let grid = density_slice(&model, "x", "y", &axis, &axis, &FixPolicy::Median)?;
    let s = 1.0 - rho * rho;
    for (a, row) in grid.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            let (x, y) = (axis[a].asinh(), axis[b].asinh());
            let jacobian = 1.0 / ((1.0 + axis[a].powi(2)) * (1.0 + axis[b].powi(2))).sqrt();
            let exact = jacobian * (-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * s)).exp()
                / (2.0 * std::f64::consts::PI * s.sqrt());
            print!("{v:.5}({:+.0e}) ", v - exact);
        }
        println!();
    }
    Ok(())
}
