//! Six-term docking stage cost evaluated on rollout states.
//!
//! All terms read the dock through a [`CostContext`] snapshot taken once per
//! control step, so the same perceived geometry is shared by every rollout.

use crate::geom::{normalize_angle, Vec2};
use crate::perception::{DockEstimate, LineModel};
use crate::vessel::{VesselParams, VesselState};
use crate::world::vessel_corners;

/// How the max-speed term treats speeds below `v_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedPenalty {
    /// `(‖v‖ − v_max)²`: also penalizes being slower than `v_max`.
    Literal,
    /// `ReLU(‖v‖ − v_max)²`: penalizes only overspeed.
    Hinge,
}

/// Which wall geometry the clearance term measures against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClearanceGeometry {
    /// Infinite fitted lines.
    Line,
    /// Fitted lines clipped to the extent of their inliers.
    Segment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostWeights {
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
    /// Distance from the entry point inside which the entrance term switches
    /// off [m].
    pub entrance_gate: f64,
    pub speed_penalty: SpeedPenalty,
    /// Keep the entrance term off for the rest of the episode once the vessel
    /// has been inside the gate. Applied by the episode loop, not by
    /// [`CostContext::new`].
    pub entrance_latch: bool,
    /// Max-speed form used after the entrance latch has tripped.
    pub berth_speed_penalty: SpeedPenalty,
    pub clearance_geometry: ClearanceGeometry,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            w_dock_goal: 1.0,
            w_back: 0.08,
            w_rot: 10.0,
            w_lat: 1.0,
            w_max_speed: 5.0,
            w_goal_ori: 1.0,
            w_dock_heading: 3.0,
            w_dock_clear: 2.0,
            w_dock_entrance: 3.0,
            v_max: 0.3,
            d_crit: 0.25,
            d_warn: 0.5,
            d_th: 0.5,
            entrance_gate: 0.5,
            speed_penalty: SpeedPenalty::Literal,
            entrance_latch: false,
            berth_speed_penalty: SpeedPenalty::Literal,
            clearance_geometry: ClearanceGeometry::Segment,
        }
    }
}

impl CostWeights {
    pub fn validate(&self) -> Result<(), String> {
        let weights = [
            ("w_dock_goal", self.w_dock_goal),
            ("w_back", self.w_back),
            ("w_rot", self.w_rot),
            ("w_lat", self.w_lat),
            ("w_max_speed", self.w_max_speed),
            ("w_goal_ori", self.w_goal_ori),
            ("w_dock_heading", self.w_dock_heading),
            ("w_dock_clear", self.w_dock_clear),
            ("w_dock_entrance", self.w_dock_entrance),
            ("d_th", self.d_th),
            ("entrance_gate", self.entrance_gate),
        ];
        for (name, w) in weights {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(format!("{name} must be finite and non-negative"));
            }
        }
        if !(self.v_max > 0.0) {
            return Err("v_max must be positive".into());
        }
        if !(0.0 <= self.d_crit && self.d_crit < self.d_warn) {
            return Err("need 0 <= d_crit < d_warn".into());
        }
        Ok(())
    }
}

/// Per-term stage cost.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostBreakdown {
    pub goal: f64,
    pub velocity: f64,
    pub heading: f64,
    pub orientation: f64,
    pub clearance: f64,
    pub entrance: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.goal + self.velocity + self.heading + self.orientation + self.clearance + self.entrance
    }

    pub fn without_velocity(mut self) -> Self {
        self.velocity = 0.0;
        self
    }
}

impl std::ops::AddAssign for CostBreakdown {
    fn add_assign(&mut self, o: Self) {
        self.goal += o.goal;
        self.velocity += o.velocity;
        self.heading += o.heading;
        self.orientation += o.orientation;
        self.clearance += o.clearance;
        self.entrance += o.entrance;
    }
}

pub fn dock_goal_cost(pos: &Vec2, dock: &DockEstimate, w: &CostWeights) -> f64 {
    w.w_dock_goal * (pos - dock.center).norm()
}

/// Body-frame velocity penalty on `(u, v, r)`.
pub fn velocity_cost(u: f64, v: f64, r: f64, w: &CostWeights) -> f64 {
    let speed = u.hypot(v);
    let excess = match w.speed_penalty {
        SpeedPenalty::Literal => speed - w.v_max,
        SpeedPenalty::Hinge => (speed - w.v_max).max(0.0),
    };
    w.w_back * (-u).max(0.0) + w.w_lat * v * v + w.w_rot * r * r + w.w_max_speed * excess * excess
}

/// Heading error towards the dock centre, active strictly beyond `d_th`.
pub fn dock_heading_cost(state: &VesselState, dock: &DockEstimate, w: &CostWeights) -> f64 {
    let to_dock = dock.center - state.position();
    if to_dock.norm() > w.d_th {
        let err = normalize_angle(to_dock.y.atan2(to_dock.x) - state.psi);
        w.w_dock_heading * err * err
    } else {
        0.0
    }
}

/// Alignment with the dock axis, active strictly inside `d_th`.
pub fn dock_orientation_cost(state: &VesselState, dock: &DockEstimate, w: &CostWeights) -> f64 {
    if (dock.center - state.position()).norm() < w.d_th {
        let err = normalize_angle(state.psi - dock.orientation);
        w.w_goal_ori * err * err
    } else {
        0.0
    }
}

/// Piecewise-constant clearance penalty.
pub fn dock_clearance_cost(min_clearance: f64, w: &CostWeights) -> f64 {
    let level = if min_clearance < w.d_crit {
        10.0
    } else if min_clearance < w.d_warn {
        5.0
    } else {
        0.0
    };
    w.w_dock_clear * level
}

/// Entrance attraction. The gate is evaluated on the *current* vessel
/// position; the penalty on the rollout position.
pub fn dock_entrance_cost(rollout_pos: &Vec2, current_pos: &Vec2, dock: &DockEstimate, w: &CostWeights) -> f64 {
    if (current_pos - dock.entry_point).norm() > w.entrance_gate {
        w.w_dock_entrance * (rollout_pos - dock.entry_point).norm()
    } else {
        0.0
    }
}

/// Smallest distance from any footprint corner to any perceived wall.
pub fn perceived_clearance(
    state: &VesselState,
    walls: &[LineModel],
    params: &VesselParams,
    geometry: ClearanceGeometry,
) -> f64 {
    let corners = vessel_corners(state, params);
    walls
        .iter()
        .flat_map(|l| {
            corners.iter().map(move |c| match geometry {
                ClearanceGeometry::Line => l.distance(c),
                ClearanceGeometry::Segment => l.segment_distance(c),
            })
        })
        .fold(f64::INFINITY, f64::min)
}

/// Everything the stage cost needs besides the rollout state, fixed for one
/// control step.
#[derive(Debug, Clone)]
pub struct CostContext<'a> {
    pub weights: &'a CostWeights,
    pub params: &'a VesselParams,
    /// Latest valid estimate; `None` until perception first succeeds.
    pub dock: Option<&'a DockEstimate>,
    pub current_position: Vec2,
    /// Whether the entrance term is active for this step.
    pub entrance_active: bool,
}

impl<'a> CostContext<'a> {
    /// Context with the entrance gate evaluated on `current`.
    pub fn new(
        weights: &'a CostWeights,
        params: &'a VesselParams,
        dock: Option<&'a DockEstimate>,
        current: &VesselState,
    ) -> Self {
        let dock = dock.filter(|d| d.valid);
        let current_position = current.position();
        let entrance_active = dock
            .map(|d| (current_position - d.entry_point).norm() > weights.entrance_gate)
            .unwrap_or(false);
        Self {
            weights,
            params,
            dock,
            current_position,
            entrance_active,
        }
    }

    /// Stage cost of one rollout state. Without a dock estimate only the
    /// velocity term applies.
    pub fn stage(&self, state: &VesselState) -> CostBreakdown {
        let w = self.weights;
        let velocity = velocity_cost(state.u, state.v, state.r, w);
        let Some(dock) = self.dock else {
            return CostBreakdown {
                velocity,
                ..Default::default()
            };
        };
        let pos = state.position();
        let clearance = if dock.wall_lines.is_empty() {
            0.0
        } else {
            let d = perceived_clearance(state, &dock.wall_lines, self.params, w.clearance_geometry);
            dock_clearance_cost(d, w)
        };
        let entrance = if self.entrance_active {
            w.w_dock_entrance * (pos - dock.entry_point).norm()
        } else {
            0.0
        };
        CostBreakdown {
            goal: dock_goal_cost(&pos, dock, w),
            velocity,
            heading: dock_heading_cost(state, dock, w),
            orientation: dock_orientation_cost(state, dock, w),
            clearance,
            entrance,
        }
    }

    /// Terminal cost: the stage cost without its velocity term.
    pub fn terminal(&self, state: &VesselState) -> CostBreakdown {
        self.stage(state).without_velocity()
    }
}

/// Stage cost of `rollout` given the current vessel state and estimate.
pub fn total_stage_cost(
    rollout: &VesselState,
    current: &VesselState,
    dock: Option<&DockEstimate>,
    params: &VesselParams,
    w: &CostWeights,
) -> CostBreakdown {
    CostContext::new(w, params, dock, current).stage(rollout)
}
