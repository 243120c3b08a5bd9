//! Nonparametric comparison of algorithm results: pairwise Wilcoxon
//! rank-sum tests and Friedman ranking with the Nemenyi critical difference.

mod nemenyi;
mod qtable;
mod wilcoxon;

pub use nemenyi::{emit_cd_plot_data, friedman_nemenyi, CdResult, SampleMatrix};
pub use qtable::{nemenyi_q, NEMENYI_Q_005};
pub use wilcoxon::{emit_matrix, midranks, wilcoxon_matrix, wilcoxon_rank_sum, EquivalenceMatrix, RankSumTest};
