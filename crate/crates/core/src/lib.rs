//! Object-level mapping from depth images with compact latent shape models.
//!
//! The crate is organised around a probabilistic volumetric renderer
//! ([`renderer`]) that turns occupancy grids ([`voxel`]) decoded from
//! low-dimensional class-conditional shape codes ([`shape_codec`]) into
//! expected depth images with per-pixel uncertainty. Shape and pose are
//! recovered by Levenberg-Marquardt inference ([`fitter`]), and the same
//! measurement function drives camera tracking and sliding-window joint
//! optimisation in an incremental multi-object SLAM pipeline ([`slam`]).
//!
//! Synthetic scenes with an independent high-resolution raycaster live in
//! [`simworld`]; classical comparison methods (a local-receptive-field
//! renderer and per-object TSDF fusion) in [`baselines`]; shape and
//! trajectory evaluation in [`metrics`]; experiment drivers in
//! [`experiments`].

pub mod baselines;
pub mod experiments;
pub mod fitter;
pub mod geometry;
pub mod img;
pub mod metrics;
pub mod optim;
pub mod renderer;
pub mod shape_codec;
pub mod simworld;
pub mod slam;
pub mod voxel;

pub use geometry::{Affine3, CameraIntrinsics, CameraPose, ObjectPose, Ray};
pub use img::Image;
pub use renderer::{RenderConfig, RenderResult};
pub use shape_codec::{ClassId, DecoderModel, ShapeCode};
pub use voxel::OccupancyGrid;
