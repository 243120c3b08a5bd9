//! Campaign orchestration: configuration, repeated seeded runs over cells of
//! operator settings, and trajectory/snapshot output.

mod campaign;
mod config;
mod output;

pub use campaign::{
    run_campaign, run_campaign_with, run_single, snapshot_phenotype, CampaignResult, CellResult, RunResult, Setup,
};
pub use config::{Blocks, CampaignConfig, CellSpec, ProblemSpec, StatsSpec, SweepSpec, SynthSpec, TopologySpec};
pub use output::{load_final_scores, write_campaign, FinalScores};
