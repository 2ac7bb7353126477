//! Dock geometry derived from fitted wall lines.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::geom::{axis_difference, unit, Vec2};

use super::{LineModel, PerceptionFailure};

/// Signed axis difference `b − a` wrapped into `(−π/2, π/2]`.
fn signed_axis_delta(a: f64, b: f64) -> f64 {
    let mut d = (b - a).rem_euclid(PI);
    if d > FRAC_PI_2 {
        d -= PI;
    }
    d
}

/// Wraps an axis angle into `(−π/2, π/2]`, the range of `arctan`.
fn to_arctan_range(a: f64) -> f64 {
    let mut a = a.rem_euclid(PI);
    if a > FRAC_PI_2 {
        a -= PI;
    }
    a
}

/// Perpendicular gap between two (nearly) parallel lines, measured at the
/// midpoint of each and averaged so the result is symmetric.
pub fn line_separation(a: &LineModel, b: &LineModel) -> f64 {
    0.5 * (a.distance(&b.midpoint()) + b.distance(&a.midpoint()))
}

/// Among all pairs whose axis angles differ by less than `parallel_tol`
/// (mod π), the one with the widest separation.
pub fn find_parallel_pair(lines: &[LineModel], parallel_tol: f64) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), f64)> = None;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if axis_difference(lines[i].angle, lines[j].angle) >= parallel_tol {
                continue;
            }
            let sep = line_separation(&lines[i], &lines[j]);
            if best.is_none_or(|(_, s)| sep > s) {
                best = Some(((i, j), sep));
            }
        }
    }
    best.map(|(p, _)| p)
}

/// Mean of two axis angles, robust to the `±π/2` wrap of `arctan`.
pub fn mean_axis_angle(a: f64, b: f64) -> f64 {
    to_arctan_range(a + 0.5 * signed_axis_delta(a, b))
}

/// Dock axis angle in `(−π/2, π/2]` as the average angle of the parallel
/// wall pair. The direction (mod π) is resolved separately.
pub fn estimate_orientation(lines: &[LineModel], parallel_tol: f64) -> Result<f64, PerceptionFailure> {
    let (i, j) = find_parallel_pair(lines, parallel_tol).ok_or(PerceptionFailure::NoParallelPair)?;
    Ok(mean_axis_angle(lines[i].angle, lines[j].angle))
}

/// Per wall, the smallest corner distance `|m·x₀ − y₀ + c| / √(m² + 1)`.
/// Walls flagged near-vertical use the equivalent normal form.
pub fn wall_clearances(corners: &[Vec2], lines: &[LineModel]) -> Vec<f64> {
    lines
        .iter()
        .map(|l| {
            corners
                .iter()
                .map(|p| {
                    if l.representation_valid {
                        (l.slope * p.x - p.y + l.intercept).abs() / (l.slope * l.slope + 1.0).sqrt()
                    } else {
                        l.distance(p)
                    }
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// `center + d_entry·(cos(θ + π), sin(θ + π))`.
pub fn entry_point(center: &Vec2, orientation: f64, d_entry: f64) -> Vec2 {
    center + unit(orientation + PI) * d_entry
}
