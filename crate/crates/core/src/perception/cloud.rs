use crate::geom::Vec2;
use crate::world::LidarScan;

/// Points in the vessel (sensor) frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vec2>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec2>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> Option<Vec2> {
        if self.points.is_empty() {
            return None;
        }
        let sum = self.points.iter().fold(Vec2::zeros(), |acc, p| acc + p);
        Some(sum / self.points.len() as f64)
    }
}

/// Polar to Cartesian for every hit beam with `range ≤ d_max`.
pub fn scan_to_points(scan: &LidarScan, d_max: f64) -> PointCloud {
    let points = scan
        .hits()
        .filter(|b| b.range <= d_max)
        .map(|b| {
            let (s, c) = b.angle.sin_cos();
            Vec2::new(b.range * c, b.range * s)
        })
        .collect();
    PointCloud { points }
}
