//! Scenario configuration file.
//!
//! A TOML document with `[vessel]`, `[dock]`, `[lidar]`, `[perception]`,
//! `[mppi]`, `[cost]` and `[scenario]` sections. Every key is optional and
//! falls back to the built-in default; unknown keys are rejected.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{Matrix3, Matrix3x4};
use serde::{Deserialize, Serialize};

use crate::cost::{ClearanceGeometry, CostWeights, SpeedPenalty};
use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::mppi::MppiConfig;
use crate::perception::{GmmConfig, PerceptionConfig, RansacConfig};
use crate::vessel::{default_allocation, VesselParams, VesselState};
use crate::world::{build_dock, DockGeometry, LidarConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VesselSection {
    pub mass: [[f64; 3]; 3],
    pub damping: [[f64; 3]; 3],
    /// Thruster allocation rows (surge, sway, yaw); derived from the
    /// footprint when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allocation: Option<[[f64; 4]; 3]>,
    pub length: f64,
    pub width: f64,
    pub t_max: f64,
}

impl Default for VesselSection {
    fn default() -> Self {
        Self {
            mass: [[25.0, 0.0, 0.0], [0.0, 30.0, 0.0], [0.0, 0.0, 6.0]],
            damping: [[8.0, 0.0, 0.0], [0.0, 10.0, 0.0], [0.0, 0.0, 4.0]],
            allocation: None,
            length: 2.0,
            width: 1.0,
            t_max: 20.0,
        }
    }
}

impl VesselSection {
    pub fn build(&self) -> Result<VesselParams> {
        let m3 = |rows: &[[f64; 3]; 3]| Matrix3::from_fn(|r, c| rows[r][c]);
        let allocation = match &self.allocation {
            Some(rows) => Matrix3x4::from_fn(|r, c| rows[r][c]),
            None => default_allocation(self.length, self.width),
        };
        VesselParams::new(
            m3(&self.mass),
            m3(&self.damping),
            allocation,
            self.length,
            self.width,
            self.t_max,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DockSection {
    pub center: [f64; 2],
    pub orientation: f64,
    pub width: f64,
    pub depth: f64,
    pub wall_thickness: f64,
}

impl Default for DockSection {
    fn default() -> Self {
        Self {
            center: [10.0, -5.0],
            orientation: 0.0,
            width: 4.0,
            depth: 4.0,
            wall_thickness: 0.1,
        }
    }
}

impl DockSection {
    pub fn build(&self) -> Result<DockGeometry> {
        build_dock(
            Vec2::new(self.center[0], self.center[1]),
            self.orientation,
            self.width,
            self.depth,
            self.wall_thickness,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LidarSection {
    pub max_range: f64,
    pub noise_sigma: f64,
    pub rate_hz: f64,
}

impl Default for LidarSection {
    fn default() -> Self {
        let d = LidarConfig::default();
        Self {
            max_range: d.max_range,
            noise_sigma: d.noise_sigma,
            rate_hz: d.rate_hz,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PerceptionSection {
    pub d_max: f64,
    pub dbscan_eps: f64,
    pub dbscan_min_pts: usize,
    pub cluster_merge_radius: f64,
    pub gmm_components: usize,
    pub gmm_max_iter: usize,
    pub gmm_tol: f64,
    pub gmm_max_restarts: usize,
    pub ransac_iterations: usize,
    pub ransac_inlier_tol: f64,
    pub ransac_min_inliers: usize,
    pub lines_per_component: usize,
    pub parallel_tol_deg: f64,
    pub min_wall_separation: f64,
    pub d_entry: f64,
}

impl Default for PerceptionSection {
    fn default() -> Self {
        let p = PerceptionConfig::default();
        Self {
            d_max: p.d_max,
            dbscan_eps: p.dbscan_eps,
            dbscan_min_pts: p.dbscan_min_pts,
            cluster_merge_radius: p.cluster_merge_radius,
            gmm_components: p.n_components,
            gmm_max_iter: p.gmm.max_iter,
            gmm_tol: p.gmm.tol,
            gmm_max_restarts: p.gmm.max_restarts,
            ransac_iterations: p.ransac.iterations,
            ransac_inlier_tol: p.ransac.inlier_tol,
            ransac_min_inliers: p.ransac.min_inliers,
            lines_per_component: p.lines_per_component,
            parallel_tol_deg: p.parallel_tol.to_degrees(),
            min_wall_separation: p.min_wall_separation,
            d_entry: p.d_entry,
        }
    }
}

impl PerceptionSection {
    pub fn build(&self) -> Result<PerceptionConfig> {
        if !(self.d_max > 0.0 && self.dbscan_eps > 0.0 && self.d_entry > 0.0) {
            return Err(Error::config(
                "perception d_max, dbscan_eps and d_entry must be positive",
            ));
        }
        if self.dbscan_min_pts == 0 || self.gmm_components == 0 || self.lines_per_component == 0 {
            return Err(Error::config(
                "dbscan_min_pts, gmm_components and lines_per_component must be at least 1",
            ));
        }
        let base = PerceptionConfig::default();
        Ok(PerceptionConfig {
            d_max: self.d_max,
            dbscan_eps: self.dbscan_eps,
            dbscan_min_pts: self.dbscan_min_pts,
            cluster_merge_radius: self.cluster_merge_radius,
            n_components: self.gmm_components,
            gmm: GmmConfig {
                max_iter: self.gmm_max_iter,
                tol: self.gmm_tol,
                max_restarts: self.gmm_max_restarts,
                ..base.gmm
            },
            ransac: RansacConfig {
                iterations: self.ransac_iterations,
                inlier_tol: self.ransac_inlier_tol,
                min_inliers: self.ransac_min_inliers,
            },
            lines_per_component: self.lines_per_component,
            parallel_tol: self.parallel_tol_deg.to_radians(),
            min_wall_separation: self.min_wall_separation,
            d_entry: self.d_entry,
            ..base
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MppiSection {
    pub samples: usize,
    pub horizon: usize,
    pub lambda: f64,
    /// Diagonal of the sampling covariance [N²].
    pub sigma: [f64; 4],
    pub exploration_scale: f64,
    pub dt: f64,
}

impl Default for MppiSection {
    fn default() -> Self {
        let m = MppiConfig::default();
        Self {
            samples: m.samples,
            horizon: m.horizon,
            lambda: m.lambda,
            sigma: m.sigma,
            exploration_scale: m.exploration_scale,
            dt: m.dt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeedPenaltyName {
    Literal,
    Hinge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClearanceName {
    Line,
    Segment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostSection {
    pub w_dock_goal: f64,
    pub w_back: f64,
    pub w_rot: f64,
    pub w_lat: f64,
    pub w_max_speed: f64,
    pub w_goal_ori: f64,
    pub w_dock_heading: f64,
    pub w_dock_clear: f64,
    pub w_dock_entrance: f64,
    pub v_max: f64,
    pub d_crit: f64,
    pub d_warn: f64,
    pub d_th: f64,
    pub entrance_gate: f64,
    pub speed_penalty: SpeedPenaltyName,
    pub entrance_latch: bool,
    pub berth_speed_penalty: SpeedPenaltyName,
    pub clearance_geometry: ClearanceName,
}

/// Table defaults plus the docking profile: the entrance term latches off
/// once reached and the max-speed term turns one-sided inside the berth.
impl Default for CostSection {
    fn default() -> Self {
        Self {
            entrance_latch: true,
            berth_speed_penalty: SpeedPenaltyName::Hinge,
            ..CostSection::from(&CostWeights::default())
        }
    }
}

impl From<SpeedPenalty> for SpeedPenaltyName {
    fn from(p: SpeedPenalty) -> Self {
        match p {
            SpeedPenalty::Literal => SpeedPenaltyName::Literal,
            SpeedPenalty::Hinge => SpeedPenaltyName::Hinge,
        }
    }
}

impl From<SpeedPenaltyName> for SpeedPenalty {
    fn from(p: SpeedPenaltyName) -> Self {
        match p {
            SpeedPenaltyName::Literal => SpeedPenalty::Literal,
            SpeedPenaltyName::Hinge => SpeedPenalty::Hinge,
        }
    }
}

impl From<&CostWeights> for CostSection {
    fn from(w: &CostWeights) -> Self {
        Self {
            w_dock_goal: w.w_dock_goal,
            w_back: w.w_back,
            w_rot: w.w_rot,
            w_lat: w.w_lat,
            w_max_speed: w.w_max_speed,
            w_goal_ori: w.w_goal_ori,
            w_dock_heading: w.w_dock_heading,
            w_dock_clear: w.w_dock_clear,
            w_dock_entrance: w.w_dock_entrance,
            v_max: w.v_max,
            d_crit: w.d_crit,
            d_warn: w.d_warn,
            d_th: w.d_th,
            entrance_gate: w.entrance_gate,
            speed_penalty: w.speed_penalty.into(),
            entrance_latch: w.entrance_latch,
            berth_speed_penalty: w.berth_speed_penalty.into(),
            clearance_geometry: match w.clearance_geometry {
                ClearanceGeometry::Line => ClearanceName::Line,
                ClearanceGeometry::Segment => ClearanceName::Segment,
            },
        }
    }
}

impl CostSection {
    pub fn build(&self) -> Result<CostWeights> {
        let w = CostWeights {
            w_dock_goal: self.w_dock_goal,
            w_back: self.w_back,
            w_rot: self.w_rot,
            w_lat: self.w_lat,
            w_max_speed: self.w_max_speed,
            w_goal_ori: self.w_goal_ori,
            w_dock_heading: self.w_dock_heading,
            w_dock_clear: self.w_dock_clear,
            w_dock_entrance: self.w_dock_entrance,
            v_max: self.v_max,
            d_crit: self.d_crit,
            d_warn: self.d_warn,
            d_th: self.d_th,
            entrance_gate: self.entrance_gate,
            speed_penalty: self.speed_penalty.into(),
            entrance_latch: self.entrance_latch,
            berth_speed_penalty: self.berth_speed_penalty.into(),
            clearance_geometry: match self.clearance_geometry {
                ClearanceName::Line => ClearanceGeometry::Line,
                ClearanceName::Segment => ClearanceGeometry::Segment,
            },
        };
        w.validate().map_err(Error::Config)?;
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    /// 1 = front, 2 = side, 3 = rear approach.
    pub id: u8,
    /// `[x, y, psi, u, v, r]`; derived from `id` and the dock when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<[f64; 6]>,
    /// Simulated time limit [s].
    pub time_limit: f64,
    pub seeds: Vec<u64>,
    /// Docked when within this distance of the dock centre [m] ...
    pub position_tol: f64,
    /// ... aligned within this angle [rad] ...
    pub heading_tol: f64,
    /// ... slower than this [m/s] ...
    pub speed_tol: f64,
    /// ... continuously for this long [s].
    pub hold_time: f64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            id: 1,
            initial_state: None,
            time_limit: 120.0,
            seeds: vec![0],
            position_tol: 0.5,
            heading_tol: 15f64.to_radians(),
            speed_tol: 0.05,
            hold_time: 2.0,
        }
    }
}

/// The configuration document as written on disk.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub vessel: VesselSection,
    pub dock: DockSection,
    pub lidar: LidarSection,
    pub perception: PerceptionSection,
    pub mppi: MppiSection,
    pub cost: CostSection,
    pub scenario: ScenarioSection,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessCriteria {
    pub position_tol: f64,
    pub heading_tol: f64,
    pub speed_tol: f64,
    pub hold_time: f64,
}

/// Validated, ready-to-run scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub id: u8,
    pub initial_state: VesselState,
    pub vessel: VesselParams,
    pub dock: DockGeometry,
    pub lidar: LidarConfig,
    pub perception: PerceptionConfig,
    /// Seed is overwritten per episode.
    pub mppi: MppiConfig,
    pub cost: CostWeights,
    pub time_limit: f64,
    pub seeds: Vec<u64>,
    pub success: SuccessCriteria,
    /// The document this was built from, with `id` applied.
    pub source: ConfigFile,
}

/// Default start pose for a scenario id, placed relative to the dock.
///
/// 1: 8 m out from the opening on the dock axis, facing in.
/// 2: abeam the entry waypoint, 8 m to the side, facing the dock.
/// 3: 10 m behind the back wall and 8 m to the side, heading along the dock
///    axis towards the open end. The back of the dock shows no parallel
///    wall pair, so perception stays blind until the vessel has moved.
pub fn default_initial_state(id: u8, dock: &DockGeometry, d_entry: f64) -> Result<VesselState> {
    let pose = dock.pose();
    let (hd, t) = (dock.depth / 2.0, dock.wall_thickness);
    let (local, local_heading) = match id {
        1 => (Vec2::new(-(hd + 8.0), 0.0), None),
        2 => (Vec2::new(-d_entry, 8.0), None),
        3 => (Vec2::new(hd + t + 10.0, 8.0), Some(PI)),
        other => return Err(Error::config(format!("scenario id must be 1, 2 or 3, got {other}"))),
    };
    let p = pose.to_world(&local);
    let heading = match local_heading {
        Some(h) => pose.heading_to_world(h),
        None => {
            let to_center = dock.center - p;
            to_center.y.atan2(to_center.x)
        }
    };
    Ok(VesselState::at_rest(p.x, p.y, heading))
}

impl ScenarioConfig {
    pub fn from_file(file: ConfigFile) -> Result<Self> {
        let vessel = file.vessel.build()?;
        let dock = file.dock.build()?;
        let l = &file.lidar;
        if !(l.max_range > 0.0 && l.noise_sigma >= 0.0 && l.rate_hz > 0.0) {
            return Err(Error::config(
                "lidar max_range and rate_hz must be positive, noise_sigma non-negative",
            ));
        }
        let lidar = LidarConfig {
            max_range: l.max_range,
            noise_sigma: l.noise_sigma,
            rate_hz: l.rate_hz,
        };
        let perception = file.perception.build()?;
        let m = &file.mppi;
        let mppi = MppiConfig {
            samples: m.samples,
            horizon: m.horizon,
            lambda: m.lambda,
            sigma: m.sigma,
            exploration_scale: m.exploration_scale,
            dt: m.dt,
            seed: 0,
        };
        mppi.validate()?;
        let cost = file.cost.build()?;
        let s = &file.scenario;
        if !(s.time_limit > 0.0) {
            return Err(Error::config("scenario time_limit must be positive"));
        }
        if s.seeds.is_empty() {
            return Err(Error::config("scenario needs at least one seed"));
        }
        if !(s.hold_time >= 0.0 && s.position_tol > 0.0 && s.heading_tol > 0.0 && s.speed_tol > 0.0) {
            return Err(Error::config("success tolerances must be positive"));
        }
        let initial_state = match s.initial_state {
            Some([x, y, psi, u, v, r]) => VesselState::new(x, y, psi, u, v, r),
            None => default_initial_state(s.id, &dock, perception.d_entry)?,
        };
        if !initial_state.is_finite() {
            return Err(Error::config("initial state must be finite"));
        }
        Ok(Self {
            id: s.id,
            initial_state,
            vessel,
            dock,
            lidar,
            perception,
            mppi,
            cost,
            time_limit: s.time_limit,
            seeds: s.seeds.clone(),
            success: SuccessCriteria {
                position_tol: s.position_tol,
                heading_tol: s.heading_tol,
                speed_tol: s.speed_tol,
                hold_time: s.hold_time,
            },
            source: file,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_file(ConfigFile::load(path)?)
    }

    /// Default configuration for scenario `id`.
    pub fn for_scenario(id: u8) -> Result<Self> {
        let mut file = ConfigFile::default();
        file.scenario.id = id;
        Self::from_file(file)
    }

    /// Same configuration with another scenario id; the start pose is
    /// re-derived unless the document pins it.
    pub fn with_scenario(&self, id: u8) -> Result<Self> {
        let mut file = self.source.clone();
        file.scenario.id = id;
        Self::from_file(file)
    }

    pub fn with_seeds(&self, seeds: Vec<u64>) -> Result<Self> {
        let mut file = self.source.clone();
        file.scenario.seeds = seeds;
        Self::from_file(file)
    }

    pub fn control_steps(&self) -> usize {
        (self.time_limit / self.mppi.dt).round() as usize
    }
}
