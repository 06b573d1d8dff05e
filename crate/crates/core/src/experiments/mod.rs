//! Dataset ingestion, synthetic graphs and the error sweeps.

mod io;
mod sweep;
mod synth;

pub use io::{
    parse_edge_list, parse_edge_list_from, read_edge_list, write_edge_list, write_edge_list_to,
    EdgeList,
};
pub use sweep::{run_sweep, ErrorReport, ErrorRow, ExperimentConfig, Method, SweepAxis};
pub use synth::{
    default_lambda, generate_milan_like, generate_synthetic, induced_subsample,
    milan_scale_weights, MILAN_EDGES, MILAN_TOTAL_CALLS,
};

pub(crate) use sweep::sweep;
