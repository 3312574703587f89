//! The command-line pipeline driven in-process: write a CSV, then run
//! `tau`, `fit`, `report`, `simulate` and `slice` on it.

use std::fs;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use vinecop::cli::main_with_args;

fn main() -> std::io::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let dir = tempfile::tempdir()?;
    let input = dir.path().join("data.csv");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut csv = String::from("hub,left,right\n");
    for _ in 0..400 {
        let z: f64 = StandardNormal.sample(&mut rng);
        let e1: f64 = StandardNormal.sample(&mut rng);
        let e2: f64 = StandardNormal.sample(&mut rng);
        csv.push_str(&format!("{z},{},{}\n", 0.8 * z + 0.6 * e1, (0.5 * z + e2).exp()));
    }
    fs::write(&input, csv)?;
    let out = dir.path().to_str().unwrap().to_string();
    let input = input.to_str().unwrap().to_string();
    let model = format!("{out}/model.json");

    let runs: Vec<Vec<&str>> = vec![
        vec!["tau", "--input", &input, "--output-dir", &out],
        vec!["fit", "--input", &input, "--output-dir", &out, "--margins", "johnson", "--criterion", "bic"],
        vec!["report", "--input", &model, "--output-dir", &out],
        vec!["simulate", "--input", &model, "--output-dir", &out, "-n", "5", "--seed", "1"],
        vec!["slice", "--input", &model, "--output-dir", &out, "--var-i", "hub", "--var-j", "left", "--grid", "3"],
        vec!["slice", "--input", &model, "--output-dir", &out, "--var-i", "hub", "--var-j", "nope"],
    ];
    for args in runs {
        let code = main_with_args(std::iter::once("vinecop").chain(args.iter().copied()));
        println!("$ vinecop {} -> exit {code}", args[0]);
    }
    for name in ["tau.csv", "margins.csv", "report.csv", "simulated.csv", "slice.csv"] {
        println!("--- {name}\n{}", fs::read_to_string(dir.path().join(name))?);
    }
    Ok(())
}
