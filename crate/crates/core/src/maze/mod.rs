//! The simulated world: geometry of the maze, the robot body, doors,
//! rewards and the per-trial lifecycle.

pub mod body;
pub mod canonical;
pub mod collision;
pub mod file;
pub mod layout;
pub mod scripted;
pub mod trial;
pub mod validate;

pub use body::{step_kinematics, Pose, RobotBody};
pub use collision::resolve_collision;
pub use layout::{
    CodingDirection, Door, DoorKind, DoorStates, LayoutKind, MazeLayout, RewardSite, SegmentRegion, TJunction,
    Texture, Wall,
};
pub use trial::{
    compute_fitness, run_trial, run_trial_summary, Controller, Environment, Event, LogRow, PathVisit, Phase,
    TrialConfig, TrialLog, TrialState, TrialSummary,
};
