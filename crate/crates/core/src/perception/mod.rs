//! Map-free dock perception from a single LiDAR scan.
//!
//! Pipeline: polar returns to vessel-frame points, DBSCAN to isolate the dock,
//! a Gaussian mixture to split it into walls, RANSAC lines per wall, then the
//! berth axis from the parallel side-wall pair. Everything is computed in the
//! vessel frame and moved to the world frame at the end.

mod cloud;
mod dbscan;
mod features;
mod gmm;
mod ransac;

use std::f64::consts::PI;

pub use cloud::{scan_to_points, PointCloud};
pub use dbscan::{clusters, dbscan, extract_dock_cluster, Labels};
pub use features::{
    entry_point, estimate_orientation, find_parallel_pair, line_separation, mean_axis_angle, wall_clearances,
};
pub use gmm::{segment_walls, GmmConfig};
pub use ransac::{fit_line_least_squares, fit_line_ransac, LineModel, RansacConfig, VERTICAL_SPREAD};

use crate::geom::{axis_difference, normalize_angle, unit, Pose2, Vec2};
use crate::rng::{substream, Purpose};
use crate::vessel::{VesselParams, VesselState};
use crate::world::{vessel_corners, LidarScan};

/// Why a scan did not yield a dock estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerceptionFailure {
    EmptyCloud,
    NoCluster,
    InsufficientPoints { needed: usize, got: usize },
    DegenerateMixture,
    FitFailed,
    NoParallelPair,
}

impl std::fmt::Display for PerceptionFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::EmptyCloud => write!(f, "no returns within range"),
            Self::NoCluster => write!(f, "no dense cluster"),
            Self::InsufficientPoints { needed, got } => {
                write!(f, "needed at least {needed} points, got {got}")
            }
            Self::DegenerateMixture => write!(f, "mixture fit kept collapsing"),
            Self::FitFailed => write!(f, "too few line inliers"),
            Self::NoParallelPair => write!(f, "no parallel wall pair"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerceptionConfig {
    /// Returns beyond this range are discarded [m].
    pub d_max: f64,
    pub dbscan_eps: f64,
    pub dbscan_min_pts: usize,
    /// Clusters this close to the largest one are treated as dock [m].
    pub cluster_merge_radius: f64,
    pub n_components: usize,
    pub gmm: GmmConfig,
    pub ransac: RansacConfig,
    /// Lines extracted per mixture component. Later lines are fitted to the
    /// points the earlier ones left unexplained.
    pub lines_per_component: usize,
    /// Angle tolerance for parallel walls [rad].
    pub parallel_tol: f64,
    /// Parallel lines closer than this are one wall split in two [m].
    pub min_wall_separation: f64,
    /// Lines within this angle of perpendicular to the side walls can be the
    /// back wall [rad].
    pub back_wall_tol: f64,
    /// Entry waypoint offset from the dock centre [m].
    pub d_entry: f64,
    /// Fraction trimmed from each end when measuring side-wall extents.
    pub extent_trim: f64,
}

impl Default for PerceptionConfig {
    fn default() -> Self {
        Self {
            d_max: 50.0,
            dbscan_eps: 0.3,
            dbscan_min_pts: 5,
            cluster_merge_radius: 6.0,
            n_components: 3,
            gmm: GmmConfig::default(),
            ransac: RansacConfig::default(),
            lines_per_component: 2,
            parallel_tol: 10f64.to_radians(),
            min_wall_separation: 1.0,
            back_wall_tol: 30f64.to_radians(),
            d_entry: 3.5,
            extent_trim: 0.01,
        }
    }
}

/// Dock state as seen by the controller, in world coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct DockEstimate {
    pub center: Vec2,
    /// Heading of a vessel docked bow first.
    pub orientation: f64,
    pub entry_point: Vec2,
    pub wall_lines: Vec<LineModel>,
    /// Per wall, smallest corner-to-line distance at perception time [m].
    pub wall_clearances: Vec<f64>,
    /// Mean of the raw dock cluster points.
    pub cluster_centroid: Vec2,
    pub valid: bool,
    pub failure: Option<PerceptionFailure>,
    pub timestamp: f64,
}

impl DockEstimate {
    pub fn invalid(timestamp: f64, failure: PerceptionFailure) -> Self {
        Self {
            center: Vec2::zeros(),
            orientation: 0.0,
            entry_point: Vec2::zeros(),
            wall_lines: Vec::new(),
            wall_clearances: Vec::new(),
            cluster_centroid: Vec2::zeros(),
            valid: false,
            failure: Some(failure),
            timestamp,
        }
    }

    /// Applies `pose` (vessel frame → world) to every geometric field.
    pub fn to_world(&self, pose: &Pose2) -> DockEstimate {
        DockEstimate {
            center: pose.to_world(&self.center),
            orientation: pose.heading_to_world(self.orientation),
            entry_point: pose.to_world(&self.entry_point),
            wall_lines: self.wall_lines.iter().map(|l| l.transformed(pose)).collect(),
            wall_clearances: self.wall_clearances.clone(),
            cluster_centroid: pose.to_world(&self.cluster_centroid),
            valid: self.valid,
            failure: self.failure,
            timestamp: self.timestamp,
        }
    }

    /// Inverse of [`DockEstimate::to_world`].
    pub fn to_local(&self, pose: &Pose2) -> DockEstimate {
        let inv_heading = -pose.heading;
        let t = Pose2::new(0.0, 0.0, inv_heading).to_world(&(-pose.translation()));
        self.to_world(&Pose2::new(t.x, t.y, inv_heading))
    }
}

/// Points within this many inlier tolerances of a fitted line are not
/// offered to the next fit in the same component.
const RESIDUAL_BAND: f64 = 2.5;

struct WallFit {
    line: LineModel,
    inliers: Vec<Vec2>,
}

/// Fuses lines that are the same physical wall split by the mixture.
fn merge_collinear(mut walls: Vec<WallFit>, cfg: &PerceptionConfig) -> Vec<WallFit> {
    'outer: loop {
        for i in 0..walls.len() {
            for j in i + 1..walls.len() {
                let (a, b) = (&walls[i].line, &walls[j].line);
                if axis_difference(a.angle, b.angle) < cfg.parallel_tol
                    && line_separation(a, b) < cfg.min_wall_separation
                {
                    let b = walls.remove(j);
                    let a = &mut walls[i];
                    a.inliers.extend(b.inliers);
                    a.line = fit_line_least_squares(&a.inliers);
                    continue 'outer;
                }
            }
        }
        return walls;
    }
}

fn trimmed_range(mut v: Vec<f64>, trim: f64) -> (f64, f64) {
    v.sort_by(f64::total_cmp);
    let k = ((v.len() as f64) * trim).floor() as usize;
    let k = k.min((v.len() - 1) / 2);
    (v[k], v[v.len() - 1 - k])
}

/// Vessel-frame estimate from vessel-frame points. Errors mark the stage
/// that failed.
fn perceive_local(
    cloud: &PointCloud,
    cfg: &PerceptionConfig,
    seed: u64,
    scan_index: u64,
    timestamp: f64,
) -> Result<DockEstimate, PerceptionFailure> {
    let (dock_points, centroid) =
        extract_dock_cluster(cloud, cfg.dbscan_eps, cfg.dbscan_min_pts, cfg.cluster_merge_radius)?;

    let mut rng = substream(seed, Purpose::Perception, scan_index, 0);
    let subsets = segment_walls(&dock_points, cfg.n_components, &cfg.gmm, &mut rng)?;
    let mut fits: Vec<WallFit> = Vec::new();
    for (k, pts) in subsets.iter().enumerate() {
        let mut rest = pts.clone();
        for round in 0..cfg.lines_per_component {
            let stream = 1 + (k * cfg.lines_per_component + round) as u64;
            let mut rng = substream(seed, Purpose::Perception, scan_index, stream);
            let Ok((line, inliers)) = fit_line_ransac(&rest, &cfg.ransac, &mut rng) else {
                break;
            };
            // drop the whole noise band around the line, not just its inliers
            rest.retain(|p| line.distance(p) > RESIDUAL_BAND * cfg.ransac.inlier_tol);
            fits.push(WallFit { line, inliers });
            if rest.len() < cfg.ransac.min_inliers {
                break;
            }
        }
    }
    if fits.is_empty() {
        return Err(PerceptionFailure::FitFailed);
    }
    let walls = merge_collinear(fits, cfg);
    let lines: Vec<LineModel> = walls.iter().map(|w| w.line.clone()).collect();

    let (i, j) = find_parallel_pair(&lines, cfg.parallel_tol).ok_or(PerceptionFailure::NoParallelPair)?;
    if line_separation(&lines[i], &lines[j]) < cfg.min_wall_separation {
        return Err(PerceptionFailure::NoParallelPair);
    }
    let axis_angle = mean_axis_angle(lines[i].angle, lines[j].angle);
    let axis = unit(axis_angle);
    let lateral = Vec2::new(-axis.y, axis.x);

    // centre: midway between the side walls, midway along their joint extent
    let mid_lateral = 0.5 * (lateral.dot(&lines[i].anchor()) + lateral.dot(&lines[j].anchor()));
    let along: Vec<f64> = walls[i]
        .inliers
        .iter()
        .chain(&walls[j].inliers)
        .map(|p| axis.dot(p))
        .collect();
    let (lo, hi) = trimmed_range(along, cfg.extent_trim);
    let mut center = lateral * mid_lateral + axis * (0.5 * (lo + hi));

    // the back wall closes the berth on the +orientation side
    let back = lines
        .iter()
        .enumerate()
        .filter(|(k, l)| {
            *k != i && *k != j && axis_difference(l.angle, axis_angle) > std::f64::consts::FRAC_PI_2 - cfg.back_wall_tol
        })
        .max_by_key(|(_, l)| l.inlier_count)
        .map(|(_, l)| l);
    let forward = match back {
        Some(l) => axis.dot(&(l.midpoint() - center)) > 0.0,
        // no back wall in view: assume the opening faces the sensor
        None => axis.dot(&center) > 0.0,
    };
    // Side-wall returns near the back corner tend to go to the back wall, so
    // with the back wall in view its face bounds the berth instead.
    if let Some(l) = back {
        let d = l.direction();
        let across = lateral.dot(&d);
        if across.abs() > 1e-6 {
            let a = l.anchor();
            let face = axis.dot(&(a + d * ((mid_lateral - lateral.dot(&a)) / across)));
            let mouth = if forward { lo } else { hi };
            center = lateral * mid_lateral + axis * (0.5 * (mouth + face));
        }
    }
    let orientation = if forward {
        normalize_angle(axis_angle)
    } else {
        normalize_angle(axis_angle + PI)
    };

    Ok(DockEstimate {
        center,
        orientation,
        entry_point: entry_point(&center, orientation, cfg.d_entry),
        wall_lines: lines,
        wall_clearances: Vec::new(),
        cluster_centroid: centroid,
        valid: true,
        failure: None,
        timestamp,
    })
}

/// Full scan-to-estimate pipeline. Never fails outright: a stage failure
/// yields `valid = false` with the reason attached.
///
/// Random draws come from substreams of `(seed, scan_index)`.
pub fn perceive(
    scan: &LidarScan,
    vessel: &VesselState,
    vessel_params: &VesselParams,
    cfg: &PerceptionConfig,
    seed: u64,
    scan_index: u64,
) -> DockEstimate {
    let cloud = scan_to_points(scan, cfg.d_max);
    match perceive_local(&cloud, cfg, seed, scan_index, scan.timestamp) {
        Ok(local) => {
            let mut world = local.to_world(&vessel.pose());
            let corners = vessel_corners(vessel, vessel_params);
            world.wall_clearances = wall_clearances(&corners, &world.wall_lines);
            world
        }
        Err(f) => DockEstimate::invalid(scan.timestamp, f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{lidar_test_support::scan_of, simulate_lidar, DockGeometry, LidarConfig};

    #[test]
    fn empty_scan_is_invalid() {
        let scan = scan_of(&[(0.0, 50.0, false), (1.0, 50.0, false)]);
        let est = perceive(
            &scan,
            &VesselState::default(),
            &VesselParams::default(),
            &PerceptionConfig::default(),
            0,
            0,
        );
        assert!(!est.valid);
        assert_eq!(est.failure, Some(PerceptionFailure::EmptyCloud));
    }

    #[test]
    fn noiseless_front_view() {
        let dock = DockGeometry::default();
        let vessel = VesselState::at_rest(0.0, -5.0, 0.0);
        let cfg = LidarConfig {
            noise_sigma: 0.0,
            ..Default::default()
        };
        let scan = simulate_lidar(&vessel, &dock, &cfg, 0, 0, 0.0);
        let est = perceive(
            &scan,
            &vessel,
            &VesselParams::default(),
            &PerceptionConfig::default(),
            0,
            0,
        );
        assert!(est.valid, "{:?}", est.failure);
        assert!((est.center - dock.center).norm() < 0.05, "{:?}", est.center);
        assert!(normalize_angle(est.orientation - dock.orientation).abs() < 0.5f64.to_radians());
        assert!(((est.entry_point - est.center).norm() - 3.5).abs() < 1e-9);
    }

    #[test]
    fn local_world_round_trip() {
        let dock = DockGeometry::default();
        let vessel = VesselState::at_rest(1.0, -4.2, 0.2);
        let scan = simulate_lidar(&vessel, &dock, &LidarConfig::default(), 4, 0, 0.0);
        let est = perceive(
            &scan,
            &vessel,
            &VesselParams::default(),
            &PerceptionConfig::default(),
            4,
            0,
        );
        assert!(est.valid, "{:?}", est.failure);
        let back = est.to_local(&vessel.pose()).to_world(&vessel.pose());
        assert!((back.center - est.center).norm() < 1e-12);
        assert!((back.entry_point - est.entry_point).norm() < 1e-12);
        assert!(normalize_angle(back.orientation - est.orientation).abs() < 1e-12);
    }

    #[test]
    fn to_world_examples() {
        let p = Pose2::new(0.0, 0.0, 0.0);
        assert_eq!(p.to_world(&Vec2::new(1.5, -2.0)), Vec2::new(1.5, -2.0));
        let p = Pose2::new(2.0, 3.0, std::f64::consts::FRAC_PI_2);
        assert!((p.to_world(&Vec2::new(1.0, 0.0)) - Vec2::new(2.0, 4.0)).norm() < 1e-12);
    }
}
