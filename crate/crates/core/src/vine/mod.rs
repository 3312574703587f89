//! Regular vines: structure, Algorithm 1 fitting, joint density,
//! conditional-uniform propagation, simulation, density slices, reports and
//! model documents.

mod io;
mod model;
mod propagate;
mod structure;

pub use io::{deserialize, serialize, MODEL_VERSION};
pub use model::{
    conditional_uniforms, density_slice, fit_vine, joint_log_density, joint_log_density_columns,
    loglik, report, report_csv, simulate, tree_summary, vine_log_density, vine_log_density_columns,
    EdgeReport, FitOptions, FixPolicy, LogLik, Margins, PairFit, VineModel, MIN_VINE_OBS,
};
pub use structure::{
    allowed_edges, classify_structure, complete_graph, max_spanning_tree, CandidateEdge, Edge,
    VineClass, VineStructure,
};
