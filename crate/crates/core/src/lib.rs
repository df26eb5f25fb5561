//! Simulator, recurrent controller, neuroevolution and population-code
//! analysis for a robot solving a triple T-maze.

pub mod analysis;
pub mod config;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod io;
pub mod maze;
pub mod rnn;
pub mod sensors;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use geometry::{Rect, Segment, Vec2};
pub use maze::{Controller, Environment, MazeLayout, Pose, RobotBody, TrialLog, TrialSummary};
pub use rnn::{Ablation, Genotype, RnnController, WeightSet, GENE_COUNT};
pub use sensors::{SensorConfig, SensorFrame};
