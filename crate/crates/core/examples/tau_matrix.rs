//! Sample Kendall's tau matrix and the maximum spanning tree that becomes
//! the first vine tree.

use vinecop::dependence::tau_matrix;
use vinecop::vine::{complete_graph, max_spanning_tree};

fn main() -> vinecop::Result<()> {
    let labels: Vec<String> = ["logLK", "logLIR", "logMHI", "logMH2v"].iter().map(|s| s.to_string()).collect();
    // a published-style tau table; variable 2 dominates its row
    let tau = [[1.0, 0.25, 0.03, 0.25], [0.25, 1.0, 0.49, 0.61], [0.03, 0.49, 1.0, 0.33], [0.25, 0.61, 0.33, 1.0]];
    let mut candidates = complete_graph(4);
    for c in candidates.iter_mut() {
        c.weight = tau[c.a][c.b];
    }
    for e in max_spanning_tree(4, &candidates)? {
        println!("{} - {}  |tau| {:.2}", labels[e.a], labels[e.b], e.weight.abs());
    }

    let x: Vec<f64> = (0..50).map(|k| (k as f64 * 0.37).sin()).collect();
    let y: Vec<f64> = x.iter().enumerate().map(|(k, v)| v + 0.3 * (k as f64 * 1.9).cos()).collect();
    let z: Vec<f64> = x.iter().map(|v| -v.powi(3)).collect();
    let m = tau_matrix(&[x, y, z], &labels[..3])?;
    print!("{}", m.to_csv());
    Ok(())
}
