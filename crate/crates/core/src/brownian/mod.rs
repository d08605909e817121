//! Planar Brownian motion and bridges sampled on a uniform grid, with the
//! winding, clock and sausage functionals.

mod angle;
mod clock;
mod path;
mod sausage;
mod special;
mod werner;

pub use angle::{bm_winding_angle, BmWinding, DEFAULT_REFINE_DEPTH};
pub use clock::{z_epsilon, ClockValue};
pub use path::MAX_REFINE_DEPTH;
pub use path::{gen_bm, gen_bridge, BmKind, BmPath};
pub use sausage::{hitting_time, sausage_contains, sausage_contains_refined};
pub use special::{exp_integral_e1, p_integral_target, spitzer_target};
pub use werner::{
    polygon_level_areas, werner_area_estimate, werner_path_areas, LevelAreaOptions, WernerEstimate,
    WernerOptions,
};
