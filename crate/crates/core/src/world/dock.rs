use crate::error::{Error, Result};
use crate::geom::{normalize_angle, Pose2, Vec2};

/// A wall modelled as a centreline segment swept by `thickness`.
#[derive(Debug, Clone, PartialEq)]
pub struct WallSegment {
    pub p1: Vec2,
    pub p2: Vec2,
    pub thickness: f64,
}

impl WallSegment {
    pub fn new(p1: Vec2, p2: Vec2, thickness: f64) -> Result<Self> {
        if p1 == p2 {
            return Err(Error::config("wall endpoints must differ"));
        }
        Ok(Self { p1, p2, thickness })
    }

    pub fn direction(&self) -> Vec2 {
        (self.p2 - self.p1).normalize()
    }

    pub fn angle(&self) -> f64 {
        let d = self.p2 - self.p1;
        d.y.atan2(d.x)
    }

    /// Rectangle corners, counter-clockwise.
    pub fn corners(&self) -> [Vec2; 4] {
        let d = self.direction();
        let n = Vec2::new(-d.y, d.x) * (self.thickness / 2.0);
        [self.p1 - n, self.p2 - n, self.p2 + n, self.p1 + n]
    }
}

/// U-shaped berth: two parallel side walls closed by a back wall.
///
/// `orientation` is the heading of a vessel that has entered the berth bow
/// first, i.e. it points from the opening towards the back wall.
#[derive(Debug, Clone, PartialEq)]
pub struct DockGeometry {
    pub center: Vec2,
    pub orientation: f64,
    pub width: f64,
    pub depth: f64,
    pub wall_thickness: f64,
    /// `[side (+y local), side (−y local), back]`.
    pub walls: Vec<WallSegment>,
}

impl DockGeometry {
    pub fn pose(&self) -> Pose2 {
        Pose2::new(self.center.x, self.center.y, self.orientation)
    }

    /// Unit vector pointing out of the berth through the opening.
    pub fn opening_direction(&self) -> Vec2 {
        -crate::geom::unit(self.orientation)
    }

    /// Point on the dock axis at the mouth of the berth.
    pub fn opening_center(&self) -> Vec2 {
        self.center + self.opening_direction() * (self.depth / 2.0)
    }
}

pub const DEFAULT_CENTER: (f64, f64) = (10.0, -5.0);
pub const DEFAULT_WIDTH: f64 = 4.0;
pub const DEFAULT_DEPTH: f64 = 4.0;
pub const DEFAULT_WALL_THICKNESS: f64 = 0.1;

impl Default for DockGeometry {
    fn default() -> Self {
        build_dock(
            Vec2::new(DEFAULT_CENTER.0, DEFAULT_CENTER.1),
            0.0,
            DEFAULT_WIDTH,
            DEFAULT_DEPTH,
            DEFAULT_WALL_THICKNESS,
        )
        .expect("default dock is valid")
    }
}

/// Builds the three walls around `center`. Side-wall inner faces sit at
/// `±width/2` from the axis, the back-wall inner face at `+depth/2` along it.
pub fn build_dock(center: Vec2, orientation: f64, width: f64, depth: f64, wall_thickness: f64) -> Result<DockGeometry> {
    for (name, v) in [("width", width), ("depth", depth), ("wall_thickness", wall_thickness)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::config(format!("dock {name} must be positive, got {v}")));
        }
    }
    let orientation = normalize_angle(orientation);
    let pose = Pose2::new(center.x, center.y, orientation);
    let (hw, hd, t) = (width / 2.0, depth / 2.0, wall_thickness);
    let side_y = hw + t / 2.0;
    let back_x = hd + t / 2.0;
    let local = [
        (Vec2::new(-hd, side_y), Vec2::new(hd + t, side_y)),
        (Vec2::new(-hd, -side_y), Vec2::new(hd + t, -side_y)),
        (Vec2::new(back_x, -(hw + t)), Vec2::new(back_x, hw + t)),
    ];
    let walls = local
        .iter()
        .map(|(a, b)| WallSegment::new(pose.to_world(a), pose.to_world(b), t))
        .collect::<Result<Vec<_>>>()?;
    Ok(DockGeometry {
        center,
        orientation,
        width,
        depth,
        wall_thickness,
        walls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::axis_difference;
    use std::f64::consts::PI;

    #[test]
    fn default_dock_inner_faces() {
        let dock = DockGeometry::default();
        let ys: Vec<f64> = dock.walls[..2]
            .iter()
            .map(|w| {
                let c = w.corners();
                // inner face is the edge closest to the centre line
                let y_faces = [c[0].y, c[2].y];
                if (y_faces[0] - dock.center.y).abs() < (y_faces[1] - dock.center.y).abs() {
                    y_faces[0]
                } else {
                    y_faces[1]
                }
            })
            .collect();
        assert!((ys[0] - -3.0).abs() < 1e-12, "{ys:?}");
        assert!((ys[1] - -7.0).abs() < 1e-12, "{ys:?}");
    }

    #[test]
    fn flipped_orientation_flips_opening() {
        let a = build_dock(Vec2::new(0.0, 0.0), 0.0, 4.0, 4.0, 0.1).unwrap();
        let b = build_dock(Vec2::new(0.0, 0.0), PI, 4.0, 4.0, 0.1).unwrap();
        assert!((a.opening_direction() + b.opening_direction()).norm() < 1e-12);
        assert!(a.opening_direction().x < 0.0);
    }

    #[test]
    fn three_walls_parallel_sides() {
        for (o, w, d) in [(0.3, 4.0, 4.0), (-2.0, 3.0, 6.0), (1.57, 5.0, 2.0)] {
            let dock = build_dock(Vec2::new(1.0, 2.0), o, w, d, 0.1).unwrap();
            assert_eq!(dock.walls.len(), 3);
            assert!(axis_difference(dock.walls[0].angle(), dock.walls[1].angle()) < 1e-12);
            let back = axis_difference(dock.walls[0].angle(), dock.walls[2].angle());
            assert!((back - PI / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_positive_dimensions() {
        assert!(build_dock(Vec2::zeros(), 0.0, 0.0, 4.0, 0.1).is_err());
        assert!(build_dock(Vec2::zeros(), 0.0, 4.0, -1.0, 0.1).is_err());
        assert!(build_dock(Vec2::zeros(), 0.0, 4.0, 4.0, 0.0).is_err());
    }
}
