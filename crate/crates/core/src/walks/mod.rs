//! Random walks on networks, speed of the biased walk and the explicit disordered-walk
//! thresholds on Z and on regular trees.

mod drw;
mod sim;

use thiserror::Error;

pub use drw::{
    classify_z_drw, harmonic_log_profile, tree_drw_threshold, tree_drw_threshold_numeric, z_drw_threshold, Side,
    SideStats, ZDrwClassification, ZDrwCriteria, ZDrwEnvironment,
};
pub use sim::{estimate_speed, simulate_walk, SpeedEstimate, WalkSummary};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("start vertex {0} has no positive-conductance edge")]
    StuckStart(usize),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}
