//! Small planar geometry helpers shared by the simulator and perception.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Vector2};

pub type Vec2 = Vector2<f64>;

/// Wraps an angle into `(-π, π]`.
pub fn normalize_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    // rem_euclid can return exactly TAU for tiny negative inputs
    if a <= -PI {
        a += TAU;
    }
    a
}

/// Wraps an angle into `[0, π)`, the natural range for an undirected line.
pub fn normalize_axis(angle: f64) -> f64 {
    let a = angle.rem_euclid(PI);
    if a >= PI {
        0.0
    } else {
        a
    }
}

/// Smallest difference between two undirected axis angles, in `[0, π/2]`.
pub fn axis_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

pub fn rot2(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

pub fn unit(angle: f64) -> Vec2 {
    let (s, c) = angle.sin_cos();
    Vec2::new(c, s)
}

/// 2D cross product (z component).
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Rigid planar pose used for frame changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading }
    }

    pub fn translation(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Local (body) point to world: `R(ψ)·p + t`.
    pub fn to_world(&self, local: &Vec2) -> Vec2 {
        rot2(self.heading) * local + self.translation()
    }

    /// World point to local (body): `Rᵀ(ψ)·(p − t)`.
    pub fn to_local(&self, world: &Vec2) -> Vec2 {
        rot2(self.heading).transpose() * (world - self.translation())
    }

    pub fn heading_to_world(&self, local_heading: f64) -> f64 {
        normalize_angle(local_heading + self.heading)
    }

    pub fn heading_to_local(&self, world_heading: f64) -> f64 {
        normalize_angle(world_heading - self.heading)
    }
}
