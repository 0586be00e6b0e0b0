//! Amplified (completely bounded) norms of linear and bilinear maps,
//! cb-distance upper bounds, and Hausdorff distance estimates between
//! represented subalgebras.

mod bilmap;
mod distance;
mod estimate;
mod linmap;

pub use bilmap::{BilMap, BilMapJson};
pub use distance::{cb_distance_upper, kk_distance_estimate};
pub use estimate::{
    amplified_norm, bilinear_h_norm, bilinear_h_norm_default_level, cb_norm, NormEstimate,
};
pub use linmap::{LinMap, LinMapJson};
