//! Persist a model as JSON, read it back and print the edge report and the
//! per-tree summary.

use vinecop::bicop::{Family, PairCopulaSpec, Rotation};
use vinecop::vine::{deserialize, report, report_csv, serialize, tree_summary, Margins, VineModel, VineStructure};

fn main() -> vinecop::Result<()> {
    let labels = vec!["u".to_string(), "v".to_string()];
    let structure = VineStructure::d_vine(labels, &[0, 1])?;
    let copulas = vec![vec![PairCopulaSpec::new(Family::Clayton, Rotation::R0, vec![5.0])?]];
    let model = VineModel::from_specs(structure, copulas, Margins::PseudoObservations)?;

    let json = serialize(&model);
    println!("{json}");
    let back = deserialize(&json)?;
    assert_eq!(serialize(&back), json);

    print!("{}", report_csv(&report(&back)));
    print!("{}", tree_summary(&back));
    Ok(())
}
