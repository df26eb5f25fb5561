//! Post-hoc analyses of recorded trials.

pub mod ablation;
pub mod activity;
pub mod bins;
pub mod decode;
pub mod stats;
pub mod synthetic;
pub mod trajectory;
pub mod transitions;

pub use ablation::{ablation_battery, AblationRow, ABLATION_ALPHA};
pub use activity::{bin_activity_matrix, expected_matrix, BinMatrix, ExpectedActivityMatrix};
pub use bins::{Bin, BinGrid};
pub use decode::{decode_location, spatial_decoding_report, BinPrediction, SpatialReport, BUILD_TRIALS};
pub use stats::{rank_sum_test, t_test_vs_chance};
pub use trajectory::{trajectory_decode, trajectory_report, SegmentResult, SegmentTemplate};
pub use transitions::{transition_matrix, Edge, TransitionMatrix, EDGE_THRESHOLD};
