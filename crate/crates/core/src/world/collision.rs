use crate::geom::{point_segment_distance, Vec2};
use crate::vessel::{VesselParams, VesselState};

use super::DockGeometry;

pub const CRITICAL_CLEARANCE: f64 = 0.25;
pub const WARNING_CLEARANCE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    Critical,
    Warning,
    Clear,
}

impl Zone {
    /// Half-open bands: `[0, 0.25)`, `[0.25, 0.5)`, `[0.5, ∞)`.
    pub fn classify(min_clearance: f64) -> Zone {
        if min_clearance < CRITICAL_CLEARANCE {
            Zone::Critical
        } else if min_clearance < WARNING_CLEARANCE {
            Zone::Warning
        } else {
            Zone::Clear
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Zone::Critical => "critical",
            Zone::Warning => "warning",
            Zone::Clear => "clear",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionReport {
    pub colliding: bool,
    pub min_clearance: f64,
    pub zone: Zone,
}

/// Footprint corners in world coordinates, counter-clockwise starting at the
/// port bow.
pub fn vessel_corners(state: &VesselState, params: &VesselParams) -> [Vec2; 4] {
    let pose = state.pose();
    let (hl, hw) = (params.length / 2.0, params.width / 2.0);
    [
        Vec2::new(hl, hw),
        Vec2::new(-hl, hw),
        Vec2::new(-hl, -hw),
        Vec2::new(hl, -hw),
    ]
    .map(|c| pose.to_world(&c))
}

fn project(poly: &[Vec2; 4], axis: &Vec2) -> (f64, f64) {
    poly.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let d = p.dot(axis);
        (lo.min(d), hi.max(d))
    })
}

/// Separating-axis test for two convex quadrilaterals. Touching counts as
/// intersecting.
pub fn polygons_intersect(a: &[Vec2; 4], b: &[Vec2; 4]) -> bool {
    for poly in [a, b] {
        for i in 0..4 {
            let e = poly[(i + 1) % 4] - poly[i];
            let axis = Vec2::new(-e.y, e.x);
            let (a0, a1) = project(a, &axis);
            let (b0, b1) = project(b, &axis);
            if a1 < b0 || b1 < a0 {
                return false;
            }
        }
    }
    true
}

fn polygon_distance(a: &[Vec2; 4], b: &[Vec2; 4]) -> f64 {
    let mut best = f64::INFINITY;
    for (from, to) in [(a, b), (b, a)] {
        for p in from {
            for i in 0..4 {
                best = best.min(point_segment_distance(p, &to[i], &to[(i + 1) % 4]));
            }
        }
    }
    best
}

/// Ground-truth contact and clearance between the vessel footprint and the
/// dock walls. Clearance is the exact rectangle-to-rectangle distance.
pub fn check_collision(state: &VesselState, dock: &DockGeometry, params: &VesselParams) -> CollisionReport {
    let hull = vessel_corners(state, params);
    let mut colliding = false;
    let mut min_clearance = f64::INFINITY;
    for wall in &dock.walls {
        let rect = wall.corners();
        if polygons_intersect(&hull, &rect) {
            colliding = true;
            min_clearance = 0.0;
            break;
        }
        min_clearance = min_clearance.min(polygon_distance(&hull, &rect));
    }
    CollisionReport {
        colliding,
        min_clearance,
        zone: Zone::classify(min_clearance),
    }
}
