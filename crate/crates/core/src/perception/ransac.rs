//! Line models and RANSAC line fitting.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix2, SymmetricEigen};
use rand::Rng;

use crate::geom::{normalize_axis, point_segment_distance, Pose2, Vec2};

use super::PerceptionFailure;

/// An infinite line with slope-intercept parameters plus the normal form
/// used internally, and the extent covered by its inliers.
///
/// The normal form is `n·p = offset` with `n = (−sin θ, cos θ)` and `θ` the
/// direction angle in `[0, π)`. `slope`/`intercept` mirror `y = m·x + c` and
/// are only meaningful when `representation_valid` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct LineModel {
    pub slope: f64,
    pub intercept: f64,
    pub angle: f64,
    pub offset: f64,
    /// Inlier projections onto the direction vector, `(min, max)`.
    pub extent: (f64, f64),
    pub inlier_count: usize,
    pub representation_valid: bool,
}

impl LineModel {
    /// Builds a model from a direction angle and a point on the line.
    pub fn from_angle_point(angle: f64, point: &Vec2, extent: (f64, f64), inlier_count: usize) -> Self {
        let angle = normalize_axis(angle);
        let n = Vec2::new(-angle.sin(), angle.cos());
        let offset = n.dot(point);
        let mut line = Self {
            slope: 0.0,
            intercept: 0.0,
            angle,
            offset,
            extent,
            inlier_count,
            representation_valid: true,
        };
        line.refresh_slope_intercept(f64::INFINITY);
        line
    }

    /// `y = m·x + c`, extent unknown.
    pub fn from_slope_intercept(m: f64, c: f64) -> Self {
        Self::from_angle_point(m.atan(), &Vec2::new(0.0, c), (0.0, 0.0), 0)
    }

    fn refresh_slope_intercept(&mut self, x_spread: f64) {
        let (s, c) = self.angle.sin_cos();
        self.slope = s / c;
        self.intercept = self.offset / c;
        self.representation_valid =
            x_spread >= VERTICAL_SPREAD && (self.angle - FRAC_PI_2).abs() > 1e-12 && self.slope.is_finite();
    }

    pub fn direction(&self) -> Vec2 {
        Vec2::new(self.angle.cos(), self.angle.sin())
    }

    pub fn normal(&self) -> Vec2 {
        Vec2::new(-self.angle.sin(), self.angle.cos())
    }

    pub fn distance(&self, p: &Vec2) -> f64 {
        (self.normal().dot(p) - self.offset).abs()
    }

    /// Foot of the perpendicular from the origin.
    pub fn anchor(&self) -> Vec2 {
        self.normal() * self.offset
    }

    pub fn endpoints(&self) -> (Vec2, Vec2) {
        let (a, d) = (self.anchor(), self.direction());
        (a + d * self.extent.0, a + d * self.extent.1)
    }

    /// Distance to the inlier-covered segment rather than the infinite line.
    pub fn segment_distance(&self, p: &Vec2) -> f64 {
        let (a, b) = self.endpoints();
        point_segment_distance(p, &a, &b)
    }

    pub fn midpoint(&self) -> Vec2 {
        let (a, b) = self.endpoints();
        (a + b) / 2.0
    }

    /// Re-expresses the line in the frame that `pose` maps into.
    pub fn transformed(&self, pose: &Pose2) -> LineModel {
        let (a, b) = self.endpoints();
        let (a, b) = (pose.to_world(&a), pose.to_world(&b));
        let mut out = LineModel::from_angle_point(self.angle + pose.heading, &a, (0.0, 0.0), self.inlier_count);
        let d = out.direction();
        let anchor = out.anchor();
        let (ta, tb) = ((a - anchor).dot(&d), (b - anchor).dot(&d));
        out.extent = (ta.min(tb), ta.max(tb));
        out.refresh_slope_intercept((a.x - b.x).abs());
        out
    }
}

/// Inlier x-spread below which slope-intercept form is flagged unusable.
pub const VERTICAL_SPREAD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct RansacConfig {
    pub iterations: usize,
    pub inlier_tol: f64,
    pub min_inliers: usize,
}

impl Default for RansacConfig {
    fn default() -> Self {
        Self {
            iterations: 200,
            inlier_tol: 0.08,
            min_inliers: 10,
        }
    }
}

/// Total-least-squares line through `points` (principal axis of their
/// scatter), with extent and conditioning flag filled in.
pub fn fit_line_least_squares(points: &[Vec2]) -> LineModel {
    let n = points.len() as f64;
    let mean = points.iter().fold(Vec2::zeros(), |a, p| a + p) / n;
    let scatter = points.iter().fold(Matrix2::zeros(), |a, p| {
        let d = p - mean;
        a + d * d.transpose()
    });
    let eig = SymmetricEigen::new(scatter);
    let major = if eig.eigenvalues[0] >= eig.eigenvalues[1] { 0 } else { 1 };
    let dir = eig.eigenvectors.column(major).into_owned();
    let mut line = LineModel::from_angle_point(dir.y.atan2(dir.x), &mean, (0.0, 0.0), points.len());
    let d = line.direction();
    let anchor = line.anchor();
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let t = (p - anchor).dot(&d);
        (lo.min(t), hi.max(t))
    });
    line.extent = (lo, hi);
    let (xlo, xhi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.x), hi.max(p.x))
    });
    line.refresh_slope_intercept(xhi - xlo);
    line
}

/// Best two-point hypothesis by inlier count (ties: lower mean residual),
/// refined by least squares over its inliers. Returns the model and the
/// inliers it was refined on.
pub fn fit_line_ransac<R: Rng>(
    points: &[Vec2],
    cfg: &RansacConfig,
    rng: &mut R,
) -> Result<(LineModel, Vec<Vec2>), PerceptionFailure> {
    let n = points.len();
    if n < 2 {
        return Err(PerceptionFailure::InsufficientPoints { needed: 2, got: n });
    }
    let mut best: Option<(usize, f64, Vec2, Vec2)> = None;
    for _ in 0..cfg.iterations {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = (points[i], points[j]);
        let d = b - a;
        let len = d.norm();
        if len == 0.0 {
            continue;
        }
        let normal = Vec2::new(-d.y, d.x) / len;
        let (count, sum) = points.iter().fold((0usize, 0.0), |(c, s), p| {
            let r = normal.dot(&(p - a)).abs();
            if r <= cfg.inlier_tol {
                (c + 1, s + r)
            } else {
                (c, s)
            }
        });
        let mean = sum / count.max(1) as f64;
        let better = match best {
            None => true,
            Some((bc, bm, _, _)) => count > bc || (count == bc && mean < bm),
        };
        if better {
            best = Some((count, mean, a, normal));
        }
    }
    let (count, _, a, normal) = best.ok_or(PerceptionFailure::FitFailed)?;
    if count < cfg.min_inliers.max(2) {
        return Err(PerceptionFailure::FitFailed);
    }
    let inliers: Vec<Vec2> = points
        .iter()
        .filter(|p| normal.dot(&(*p - a)).abs() <= cfg.inlier_tol)
        .copied()
        .collect();
    Ok((fit_line_least_squares(&inliers), inliers))
}
