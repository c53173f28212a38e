//! Poses, camera model, rays, and the local parametrization used by the
//! optimisers.
//!
//! Conventions: the camera frame is +z optical axis, +x right, +y down.
//! "Depth" always means z-depth (distance along the optical axis), matching
//! what depth images store; rays keep a unit direction and sampling a ray at
//! depth `d` evaluates `origin + d * direction / direction.z`.
//!
//! Object poses are 9-DoF similarity transforms (rotation, translation,
//! per-axis scale kept in log space so positivity is unconstrained). Local
//! updates retract with a left-multiplicative rotation exponential and
//! additive translation / log-scale.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix3, SMatrix, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("pixel ({u}, {v}) outside {width}x{height} image")]
    PixelOutOfBounds {
        u: f64,
        v: f64,
        width: u32,
        height: u32,
    },
    #[error("invalid camera intrinsics: {0}")]
    InvalidIntrinsics(String),
    #[error("non-finite retraction delta")]
    NonFiniteDelta,
    #[error("retraction delta has {got} entries, expected {expected}")]
    DeltaSize { got: usize, expected: usize },
    #[error("trajectory line {line}: {reason}")]
    TrajectoryParse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Pinhole camera intrinsics in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl CameraIntrinsics {
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: u32,
        height: u32,
    ) -> Result<Self, GeometryError> {
        if !(fx > 0.0 && fy > 0.0) {
            return Err(GeometryError::InvalidIntrinsics(format!(
                "focal lengths must be positive, got fx={fx}, fy={fy}"
            )));
        }
        if !(0.0..width as f64).contains(&cx) || !(0.0..height as f64).contains(&cy) {
            return Err(GeometryError::InvalidIntrinsics(format!(
                "principal point ({cx}, {cy}) outside {width}x{height} image"
            )));
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        })
    }

    /// Default synthetic-benchmark camera: 160x120, ~60 degree horizontal FOV.
    pub fn default_synthetic() -> Self {
        Self {
            fx: 140.0,
            fy: 140.0,
            cx: 80.0,
            cy: 60.0,
            width: 160,
            height: 120,
        }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= 0.0 && u < self.width as f64 && v >= 0.0 && v < self.height as f64
    }

    /// Back-project the pixel center into a unit-norm ray through the origin.
    pub fn backproject(&self, u: f64, v: f64) -> Result<Ray, GeometryError> {
        if !self.contains(u, v) {
            return Err(GeometryError::PixelOutOfBounds {
                u,
                v,
                width: self.width,
                height: self.height,
            });
        }
        let dir = Vector3::new((u - self.cx) / self.fx, (v - self.cy) / self.fy, 1.0);
        Ok(Ray {
            origin: Vector3::zeros(),
            direction: dir.normalize(),
        })
    }

    /// Project a camera-frame point (z > 0) to pixel coordinates.
    pub fn project(&self, p: &Vector3<f64>) -> (f64, f64) {
        (
            self.fx * p.x / p.z + self.cx,
            self.fy * p.y / p.z + self.cy,
        )
    }
}

/// Ray with unit direction. `point_at_depth` uses the z-depth convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vector3<f64>,
    pub direction: Vector3<f64>,
}

impl Ray {
    /// The point whose z-coordinate (in the ray's frame) equals `depth`.
    pub fn point_at_depth(&self, depth: f64) -> Vector3<f64> {
        self.origin + self.direction * (depth / self.direction.z)
    }

    /// Direction rescaled so that advancing the parameter by 1 advances
    /// z-depth by 1.
    pub fn depth_direction(&self) -> Vector3<f64> {
        self.direction / self.direction.z
    }
}

/// General affine map `p -> linear * p + translation`. Used to compose pose
/// chains exactly; anisotropic similarity transforms do not close under
/// composition so chains are carried in this form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine3 {
    pub linear: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Affine3 {
    pub fn identity() -> Self {
        Self {
            linear: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// `self` applied after `other`.
    pub fn compose(&self, other: &Affine3) -> Affine3 {
        Affine3 {
            linear: self.linear * other.linear,
            translation: self.linear * other.translation + self.translation,
        }
    }

    #[inline]
    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.linear * p + self.translation
    }

    #[inline]
    pub fn transform_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.linear * v
    }
}

fn check_delta(delta: &[f64], expected: usize) -> Result<(), GeometryError> {
    if delta.len() != expected {
        return Err(GeometryError::DeltaSize {
            got: delta.len(),
            expected,
        });
    }
    if delta.iter().any(|d| !d.is_finite()) {
        return Err(GeometryError::NonFiniteDelta);
    }
    Ok(())
}

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Rigid 6-DoF camera pose, stored camera-to-world.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraPose {
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vector3<f64>,
}

impl CameraPose {
    pub fn identity() -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    /// Camera at `eye` looking at `target`, with image "up" opposed to
    /// `world_up` (camera y points down).
    pub fn look_at(eye: Vector3<f64>, target: Vector3<f64>, world_up: Vector3<f64>) -> Self {
        let forward = (target - eye).normalize();
        let mut right = forward.cross(&world_up);
        if right.norm() < 1e-9 {
            right = forward.cross(&Vector3::x());
            if right.norm() < 1e-9 {
                right = forward.cross(&Vector3::y());
            }
        }
        let right = right.normalize();
        let down = forward.cross(&right).normalize();
        let m = Matrix3::from_columns(&[right, down, forward]);
        Self {
            rotation: UnitQuaternion::from_matrix(&m),
            translation: eye,
        }
    }

    /// Camera frame -> world frame.
    #[inline]
    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// World frame -> camera frame.
    #[inline]
    pub fn inverse_transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.inverse() * (p - self.translation)
    }

    pub fn inverse(&self) -> CameraPose {
        let rot = self.rotation.inverse();
        CameraPose {
            rotation: rot,
            translation: -(rot * self.translation),
        }
    }

    /// `self` applied after `other` (both camera-to-world style maps).
    pub fn compose(&self, other: &CameraPose) -> CameraPose {
        CameraPose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn to_affine(&self) -> Affine3 {
        Affine3 {
            linear: self.rotation.to_rotation_matrix().into_inner(),
            translation: self.translation,
        }
    }

    pub fn inverse_affine(&self) -> Affine3 {
        let rt = self
            .rotation
            .inverse()
            .to_rotation_matrix()
            .into_inner();
        Affine3 {
            linear: rt,
            translation: -(rt * self.translation),
        }
    }

    /// Apply a local update `[rotation (3), translation (3)]`: rotation by
    /// left-multiplied exponential map, translation additively.
    pub fn retract(&self, delta: &[f64]) -> Result<CameraPose, GeometryError> {
        check_delta(delta, 6)?;
        let omega = Vector3::new(delta[0], delta[1], delta[2]);
        Ok(CameraPose {
            rotation: UnitQuaternion::from_scaled_axis(omega) * self.rotation,
            translation: self.translation + Vector3::new(delta[3], delta[4], delta[5]),
        })
    }

    /// d(transform_point(retract(delta), p)) / d(delta) at delta = 0.
    pub fn retraction_jacobian(&self, p: &Vector3<f64>) -> SMatrix<f64, 3, 6> {
        let mut j = SMatrix::<f64, 3, 6>::zeros();
        j.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&(-skew(&(self.rotation * p))));
        j.fixed_view_mut::<3, 3>(0, 3)
            .copy_from(&Matrix3::identity());
        j
    }

    /// Rotation angle to another pose, in radians.
    pub fn rotation_angle_to(&self, other: &CameraPose) -> f64 {
        self.rotation.angle_to(&other.rotation)
    }
}

/// 9-DoF similarity transform of an object: rotation, translation, and
/// per-axis scale in log space. Maps object-frame points to the parent
/// frame as `R * (scale ⊙ p) + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectPose {
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vector3<f64>,
    pub log_scale: Vector3<f64>,
}

impl ObjectPose {
    pub fn identity() -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
            log_scale: Vector3::zeros(),
        }
    }

    pub fn new(
        rotation: UnitQuaternion<f64>,
        translation: Vector3<f64>,
        log_scale: Vector3<f64>,
    ) -> Self {
        Self {
            rotation,
            translation,
            log_scale,
        }
    }

    #[inline]
    pub fn scale(&self) -> Vector3<f64> {
        self.log_scale.map(f64::exp)
    }

    /// Object frame -> parent frame: scale, then rotate, then translate.
    #[inline]
    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p.component_mul(&self.scale()) + self.translation
    }

    /// Parent frame -> object frame.
    #[inline]
    pub fn inverse_transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        (self.rotation.inverse() * (p - self.translation)).component_div(&self.scale())
    }

    pub fn to_affine(&self) -> Affine3 {
        let r = self.rotation.to_rotation_matrix().into_inner();
        let s = self.scale();
        let mut linear = r;
        for c in 0..3 {
            linear.column_mut(c).scale_mut(s[c]);
        }
        Affine3 {
            linear,
            translation: self.translation,
        }
    }

    pub fn inverse_affine(&self) -> Affine3 {
        let rt = self
            .rotation
            .inverse()
            .to_rotation_matrix()
            .into_inner();
        let s = self.scale();
        let mut linear = rt;
        for r in 0..3 {
            linear.row_mut(r).scale_mut(1.0 / s[r]);
        }
        Affine3 {
            translation: -(linear * self.translation),
            linear,
        }
    }

    /// Apply a local update `[rotation (3), translation (3), log-scale (3)]`.
    pub fn retract(&self, delta: &[f64]) -> Result<ObjectPose, GeometryError> {
        check_delta(delta, 9)?;
        let omega = Vector3::new(delta[0], delta[1], delta[2]);
        Ok(ObjectPose {
            rotation: UnitQuaternion::from_scaled_axis(omega) * self.rotation,
            translation: self.translation + Vector3::new(delta[3], delta[4], delta[5]),
            log_scale: self.log_scale + Vector3::new(delta[6], delta[7], delta[8]),
        })
    }

    /// d(transform_point(retract(delta), p)) / d(delta) at delta = 0.
    pub fn retraction_jacobian(&self, p: &Vector3<f64>) -> SMatrix<f64, 3, 9> {
        let s = self.scale();
        let scaled = p.component_mul(&s);
        let rotated = self.rotation * scaled;
        let mut j = SMatrix::<f64, 3, 9>::zeros();
        j.fixed_view_mut::<3, 3>(0, 0).copy_from(&(-skew(&rotated)));
        j.fixed_view_mut::<3, 3>(0, 3)
            .copy_from(&Matrix3::identity());
        let r = self.rotation.to_rotation_matrix().into_inner();
        for k in 0..3 {
            // d/d log_scale_k: R * (s_k p_k e_k)
            let col = r.column(k) * (s[k] * p[k]);
            j.fixed_view_mut::<3, 1>(0, 6 + k).copy_from(&col);
        }
        j
    }
}

/// Format one TUM trajectory line: `timestamp tx ty tz qx qy qz qw`.
pub fn format_tum_line(timestamp: f64, pose: &CameraPose) -> String {
    let t = pose.translation;
    let q = pose.rotation.quaternion();
    let mut s = String::new();
    write!(s, "{} {} {} {} {} {} {} {}", timestamp, t.x, t.y, t.z, q.i, q.j, q.k, q.w).unwrap();
    s
}

pub fn parse_tum_line(line: &str, line_no: usize) -> Result<(f64, CameraPose), GeometryError> {
    let fields: Vec<f64> = line
        .split_whitespace()
        .map(|f| f.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| GeometryError::TrajectoryParse {
            line: line_no,
            reason: e.to_string(),
        })?;
    if fields.len() != 8 {
        return Err(GeometryError::TrajectoryParse {
            line: line_no,
            reason: format!("expected 8 fields, got {}", fields.len()),
        });
    }
    let translation = Vector3::new(fields[1], fields[2], fields[3]);
    let q = nalgebra::Quaternion::new(fields[7], fields[4], fields[5], fields[6]);
    let rotation = UnitQuaternion::from_quaternion(q);
    Ok((fields[0], CameraPose::new(rotation, translation)))
}

/// Write a trajectory in the TUM text format, one `timestamp tx ty tz qx qy
/// qz qw` line per frame.
pub fn write_tum(path: &Path, entries: &[(f64, CameraPose)]) -> Result<(), GeometryError> {
    let mut out = String::new();
    for (ts, pose) in entries {
        out.push_str(&format_tum_line(*ts, pose));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read a TUM trajectory file; '#' comment lines and blank lines are skipped.
pub fn read_tum(path: &Path) -> Result<Vec<(f64, CameraPose)>, GeometryError> {
    let text = std::fs::read_to_string(path)?;
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        entries.push(parse_tum_line(line, i + 1)?);
    }
    Ok(entries)
}
