pub mod assignment;
pub mod budget;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod graph;
pub mod mechanisms;
pub mod protocol;
pub mod sensitivity;

/// Noise-free protocol runs for identity checks. Nothing here is private.
pub mod debug {
    use crate::error::Result;
    use crate::experiments::{ErrorReport, ExperimentConfig};
    use crate::graph::WeightedGraph;

    pub use crate::protocol::noiseless::{run_baseline, run_two_step};

    pub fn run_sweep(cfg: &ExperimentConfig, graph: &WeightedGraph) -> Result<ErrorReport> {
        crate::experiments::sweep(cfg, graph, true)
    }
}
