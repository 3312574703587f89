//! Simulate from a known 4-dimensional C-vine and recover it with the
//! sequential tree-by-tree fit.

use vinecop::bicop::{Family, PairCopulaSpec, Rotation};
use vinecop::vine::{
    classify_structure, fit_vine, loglik, simulate, tree_summary, FitOptions, Margins, VineModel,
    VineStructure,
};

fn main() -> vinecop::Result<()> {
    let labels: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    let structure = VineStructure::c_vine(labels.clone(), &[1, 0, 2, 3])?;
    let p = |f, t| PairCopulaSpec::new(f, Rotation::R0, vec![t]);
    let copulas = vec![
        vec![p(Family::Gaussian, 0.6)?, p(Family::Clayton, 2.0)?, p(Family::Gumbel, 1.5)?],
        vec![p(Family::Frank, 1.0)?, p(Family::Gaussian, 0.1)?],
        vec![p(Family::Clayton, 0.3)?],
    ];
    let truth = VineModel::from_specs(structure, copulas, Margins::PseudoObservations)?;
    println!("generator:\n{}", tree_summary(&truth));

    let u = simulate(&truth, 3000, 11)?;
    let fitted = fit_vine(&u, &labels, &FitOptions::default())?;
    println!("fitted {}:\n{}", classify_structure(&fitted.structure), tree_summary(&fitted));

    let ll = loglik(&fitted, &u)?;
    println!("loglik {:.2}, {} parameters, AIC {:.2}, BIC {:.2}", ll.loglik, ll.n_params, ll.aic, ll.bic);

    let truncated = fit_vine(&u, &labels, &FitOptions { trunc_level: Some(1), ..FitOptions::default() })?;
    println!("truncated after tree 1: {} parameters", truncated.n_params());
    Ok(())
}
