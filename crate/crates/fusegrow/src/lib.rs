//! Dense stereo disparity reconstruction fused with sparse range-sensor data.
//!
//! A rectified stereo pair plus a handful of range measurements — projected
//! into both images as correspondence seeds — grow into a dense,
//! full-resolution disparity map. The growth is regularized by a prior map
//! interpolated from the seeds, so weakly textured and repetitive surfaces
//! match reliably where purely photometric stereo fails.
//!
//! The pipeline stages are file-connected and individually reusable:
//!
//! 1. [`seeding`] — produce and refine correspondence seeds, either by
//!    projecting a real range-camera frame or by sampling a ground-truth
//!    disparity map on a grid.
//! 2. [`prior`] — Delaunay-triangulate the seeds and interpolate a dense
//!    prior disparity map.
//! 3. [`grower`] — best-first growth of matches under a pluggable
//!    [`similarity`] statistic.
//! 4. [`postproc`] — median gap filling, color rendering, PLY export.
//! 5. [`eval`] — ground-truth accuracy reports.

pub mod error;
pub mod eval;
pub mod grower;
pub mod imaging;
pub mod postproc;
pub mod prior;
pub mod seeding;
pub mod similarity;
pub mod synthetic;

pub use error::{Error, Result};
pub use eval::{evaluate, nonoccluded_mask, EvaluationReport};
pub use grower::{grow, grown_statistics, GrowthStats, MatchState};
pub use imaging::{
    extract_window, load_disparity, load_gray, DisparityMap, GrayImage, PriorMap, RgbImage,
    Window,
};
pub use postproc::{colorize, export_ply, fill_gaps, ColorPolarity, StereoGeometry};
pub use prior::{interpolate_prior, triangulate_seeds, SeedTriangulation};
pub use seeding::{
    project_tof_seeds, refine_seeds, simulate_tof_seeds, CalibrationRig, RefineParams,
    SeedCorrespondence, TofFrame,
};
pub use similarity::{SimilarityParams, Statistic};
