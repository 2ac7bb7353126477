//! Grid-accelerated DBSCAN.
//!
//! Core points have at least `min_pts` neighbours within `eps`, counting
//! themselves. Clusters are the connected components of core points under the
//! `eps` relation. A border point joins the cluster of its nearest core point
//! (lowest index on ties), which makes the labelling independent of input
//! order. Cluster ids are numbered by their lowest member index.

use std::collections::HashMap;

use crate::geom::Vec2;

use super::{PerceptionFailure, PointCloud};

/// `None` marks noise.
pub type Labels = Vec<Option<usize>>;

struct Grid {
    cell: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl Grid {
    fn new(points: &[Vec2], cell: f64) -> Self {
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::key(p, cell)).or_default().push(i);
        }
        Self { cell, cells }
    }

    fn key(p: &Vec2, cell: f64) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    /// Indices within `eps` of `points[i]` (including `i`), ascending.
    fn neighbours(&self, points: &[Vec2], i: usize, eps2: f64) -> Vec<usize> {
        let (cx, cy) = Self::key(&points[i], self.cell);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = self.cells.get(&(cx + dx, cy + dy)) {
                    out.extend(
                        bucket
                            .iter()
                            .copied()
                            .filter(|&j| (points[j] - points[i]).norm_squared() <= eps2),
                    );
                }
            }
        }
        out.sort_unstable();
        out
    }
}

pub fn dbscan(cloud: &PointCloud, eps: f64, min_pts: usize) -> Labels {
    let pts = &cloud.points;
    let n = pts.len();
    let eps2 = eps * eps;
    let grid = Grid::new(pts, eps);
    let neighbours: Vec<Vec<usize>> = (0..n).map(|i| grid.neighbours(pts, i, eps2)).collect();
    let is_core: Vec<bool> = neighbours.iter().map(|nb| nb.len() >= min_pts).collect();

    let mut labels: Labels = vec![None; n];
    let mut next_id = 0;
    let mut stack = Vec::new();
    for seed in 0..n {
        if !is_core[seed] || labels[seed].is_some() {
            continue;
        }
        labels[seed] = Some(next_id);
        stack.push(seed);
        while let Some(p) = stack.pop() {
            for &q in &neighbours[p] {
                if is_core[q] && labels[q].is_none() {
                    labels[q] = Some(next_id);
                    stack.push(q);
                }
            }
        }
        next_id += 1;
    }

    for i in 0..n {
        if is_core[i] {
            continue;
        }
        let nearest_core = neighbours[i].iter().copied().filter(|&j| is_core[j]).min_by(|&a, &b| {
            let da = (pts[a] - pts[i]).norm_squared();
            let db = (pts[b] - pts[i]).norm_squared();
            da.total_cmp(&db).then(a.cmp(&b))
        });
        labels[i] = nearest_core.and_then(|j| labels[j]);
    }

    // renumber by lowest member index (border points can precede their core)
    let mut remap: HashMap<usize, usize> = HashMap::new();
    for l in labels.iter_mut().flatten() {
        let fresh = remap.len();
        *l = *remap.entry(*l).or_insert(fresh);
    }
    labels
}

/// Splits a cloud into per-cluster point lists, ordered by cluster id.
pub fn clusters(cloud: &PointCloud, labels: &Labels) -> Vec<Vec<Vec2>> {
    let count = labels.iter().flatten().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); count];
    for (p, l) in cloud.points.iter().zip(labels) {
        if let Some(l) = l {
            out[*l].push(*p);
        }
    }
    out
}

/// Largest cluster plus any cluster with a point within `merge_radius` of
/// it, and the arithmetic mean of the resulting dock points.
///
/// Only the dock returns LiDAR echoes, but its walls can break into separate
/// clusters when the berth is seen from the side; merging keeps them
/// together. `merge_radius = 0` selects the largest cluster alone.
pub fn extract_dock_cluster(
    cloud: &PointCloud,
    eps: f64,
    min_pts: usize,
    merge_radius: f64,
) -> Result<(PointCloud, Vec2), PerceptionFailure> {
    if cloud.is_empty() {
        return Err(PerceptionFailure::EmptyCloud);
    }
    let labels = dbscan(cloud, eps, min_pts);
    let groups = clusters(cloud, &labels);
    let largest = groups
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .ok_or(PerceptionFailure::NoCluster)?;

    let mut dock: Vec<Vec2> = groups[largest].clone();
    if merge_radius > 0.0 {
        let r2 = merge_radius * merge_radius;
        for (i, g) in groups.iter().enumerate() {
            if i == largest {
                continue;
            }
            let near = g
                .iter()
                .any(|p| groups[largest].iter().any(|q| (p - q).norm_squared() <= r2));
            if near {
                dock.extend_from_slice(g);
            }
        }
    }
    let cloud = PointCloud::new(dock);
    let centroid = cloud.centroid().ok_or(PerceptionFailure::NoCluster)?;
    Ok((cloud, centroid))
}
