//! anchorlab: attachment-anchor scene representation for laparoscopic
//! grasping-point prediction.
//!
//! An attachment anchor is a mechanical origin plus three directed unit
//! vectors (one adhesion, two mounting) that partition the local scene into
//! angular regions. The crate is organized bottom-up:
//!
//! - [`anchor`]: domain types, angle arithmetic, anchor validation, regions.
//! - [`frame`]: piecewise-linear angular warps, canonicalization, raster warps.
//! - [`codec`]: radial grasp codes and grid-cell detection codes.
//! - [`augment`]: adhesion-vector warp augmentation.
//! - [`synth`]: seeded synthetic scene oracle and sector renderer.
//! - [`stats`]: representation projections, std reports, Student/Welch t-tests.
//! - [`metrics`]: Precision@radius, RMSE, angular RMSE, type precision.
//! - [`protocol`]: stratified k-fold, group holdout, surgeon grouping, run aggregation.
//! - [`predictor`]: statistical grasp predictors and cross-validated evaluation.
//!
//! Data-parallel loops go through [`Exec`]; with the `parallel` feature
//! (default) they run on rayon, otherwise sequentially. Results never depend
//! on the schedule.

pub mod anchor;
pub mod augment;
pub mod codec;
mod error;
mod exec;
pub mod frame;
pub mod metrics;
pub mod predictor;
pub mod protocol;
pub mod raster;
pub mod stats;
pub mod synth;

pub use anchor::{
    angle_of, region_of, validate_anchor, AnchorCase, AttachmentAnchor, ImageDims, Point2, Region, Sample, Violation,
};
pub use error::{Error, Result};
pub use exec::Exec;
pub use raster::Raster;
