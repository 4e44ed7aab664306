//! The per-frame mining pipeline: seed, orient, clip, snap to ground,
//! complete amodally, score and suppress.

mod fit;
mod nms;
mod orient;
mod params;
mod pipeline;

use serde::{Deserialize, Serialize};

use crate::geom::Cuboid;

pub use fit::{amodal_complete, clip_instance, initial_cuboid};
pub use nms::{apply_confidence_policy, nms_bev, score};
pub use orient::{orient_by_calipers, orient_by_map, seed_point};
pub use params::{
    default_class_map, default_classes, ClassParams, MinerConfig, OrientationMode, SEED_MAX_ITER, SEED_TOL,
    UNDER_GROUND_TOL,
};
pub use pipeline::{inflate_proposal, mine_frame, Frame};

/// One mined label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinedCuboid {
    pub cuboid: Cuboid,
    pub class: String,
    pub confidence: f64,
    pub dont_care: bool,
}
