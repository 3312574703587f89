//! Fit GLD (starship) and Johnson margins to a skewed sample and map it to
//! uniforms with the probability integral transform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use vinecop::marginals::{
    anderson_darling, gld_fit_starship, inverse_pit, johnson_fit_auto, pit, pseudo_observations,
    MarginalModel,
};

fn main() -> vinecop::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dist = LogNormal::new(0.0, 0.5).unwrap();
    let x: Vec<f64> = (0..2000).map(|_| dist.sample(&mut rng)).collect();

    let gld = MarginalModel::Gld(gld_fit_starship(&x)?);
    let johnson = MarginalModel::Johnson(johnson_fit_auto(&x)?);

    for model in [&gld, &johnson] {
        let u = pit(&[x.clone()], std::slice::from_ref(model))?;
        let back = inverse_pit(&u, std::slice::from_ref(model))?;
        let max_err = x.iter().zip(&back[0]).map(|(a, b)| (a - b).abs() / a.abs()).fold(0.0, f64::max);
        println!(
            "{:<8} median {:.4}  AD {:.3}  max rel round-trip error {:.1e}  {:?}",
            model.kind(),
            model.median(),
            anderson_darling(&u[0]),
            max_err,
            model
        );
    }

    let ranks = pseudo_observations(&[vec![10.0, 20.0, 15.0]]);
    println!("pseudo-observations of [10, 20, 15]: {:?}", ranks[0]);
    Ok(())
}
