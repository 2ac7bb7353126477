//! Top-down SVG trajectory plots.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::vessel::{VesselParams, VesselState};
use crate::world::{vessel_corners, DockGeometry};

use super::log::TrajectoryPoint;

/// Pixels per metre.
const SCALE: f64 = 20.0;
const MARGIN: f64 = 1.5;

/// World-frame axis-aligned box `(min, max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Vec2,
    pub max: Vec2,
}

impl Bounds {
    fn empty() -> Self {
        Self {
            min: Vec2::repeat(f64::INFINITY),
            max: Vec2::repeat(f64::NEG_INFINITY),
        }
    }

    fn include(&mut self, p: &Vec2) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    pub fn contains(&self, p: &Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

fn footprints(log: &[TrajectoryPoint]) -> Vec<&TrajectoryPoint> {
    let mut out = Vec::new();
    let mut next = 0.0;
    for p in log {
        if p.t + 1e-9 >= next {
            out.push(p);
            next = p.t.floor() + 1.0;
        }
    }
    out
}

fn hull(p: &TrajectoryPoint, params: &VesselParams) -> [Vec2; 4] {
    vessel_corners(&VesselState::at_rest(p.x, p.y, p.psi), params)
}

/// Box around every trajectory point, footprint snapshot, wall and marker,
/// padded by a margin.
pub fn plot_bounds(log: &[TrajectoryPoint], dock: &DockGeometry, params: &VesselParams) -> Bounds {
    let mut b = Bounds::empty();
    for p in log {
        b.include(&Vec2::new(p.x, p.y));
        for m in [p.dock_center, p.entry_point].into_iter().flatten() {
            b.include(&m);
        }
    }
    for p in footprints(log) {
        for c in hull(p, params) {
            b.include(&c);
        }
    }
    for w in &dock.walls {
        for c in w.corners() {
            b.include(&c);
        }
    }
    b.min -= Vec2::repeat(MARGIN);
    b.max += Vec2::repeat(MARGIN);
    b
}

/// Renders walls, footprints once per second, the path and the last dock
/// estimate (centre and entry markers).
pub fn emit_plot(log: &[TrajectoryPoint], dock: &DockGeometry, params: &VesselParams) -> Result<String> {
    if log.is_empty() {
        return Err(Error::EmptyPlot);
    }
    let b = plot_bounds(log, dock, params);
    let (w, h) = ((b.max.x - b.min.x) * SCALE, (b.max.y - b.min.y) * SCALE);
    let px = |p: &Vec2| ((p.x - b.min.x) * SCALE, (b.max.y - p.y) * SCALE);
    let poly = |pts: &[Vec2]| {
        pts.iter()
            .map(|p| {
                let (x, y) = px(p);
                format!("{x:.2},{y:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.2} {h:.2}">"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="0" y="0" width="{w:.2}" height="{h:.2}" fill="#eef5fb"/>"##
    );
    let _ = writeln!(s, r#"<g id="walls">"#);
    for wall in &dock.walls {
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#5a4632" stroke="#2b2118" stroke-width="1"/>"##,
            poly(&wall.corners())
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g id="footprints">"#);
    for p in footprints(log) {
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="none" stroke="#1f77b4" stroke-opacity="0.5" stroke-width="1"/>"##,
            poly(&hull(p, params))
        );
    }
    let _ = writeln!(s, "</g>");
    let path: Vec<Vec2> = log.iter().map(|p| Vec2::new(p.x, p.y)).collect();
    let _ = writeln!(
        s,
        r##"<polyline id="trajectory" points="{}" fill="none" stroke="#d62728" stroke-width="2"/>"##,
        poly(&path)
    );
    if let Some(c) = log.iter().rev().find_map(|p| p.dock_center) {
        let (x, y) = px(&c);
        let _ = writeln!(
            s,
            r##"<circle id="dock-center" cx="{x:.2}" cy="{y:.2}" r="5" fill="#2ca02c"/>"##
        );
    }
    if let Some(e) = log.iter().rev().find_map(|p| p.entry_point) {
        let (x, y) = px(&e);
        let _ = writeln!(
            s,
            r##"<rect id="entry-point" x="{:.2}" y="{:.2}" width="10" height="10" fill="#ff7f0e"/>"##,
            x - 5.0,
            y - 5.0
        );
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}
