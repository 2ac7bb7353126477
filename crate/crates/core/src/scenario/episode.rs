//! Closed-loop docking episodes.

use std::time::Instant;

use crate::cost::{CostBreakdown, CostContext, CostWeights};
use crate::error::Result;
use crate::geom::{cross, normalize_angle, unit, Vec2};
use crate::mppi::{Diagnostics, MppiController};
use crate::par::Execution;
use crate::perception::{perceive, DockEstimate};
use crate::vessel::{step, ThrustCommand, VesselState};
use crate::world::{check_collision, simulate_lidar, CollisionReport};

use super::config::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Docked,
    Collision,
    Timeout,
    SolverStarved,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Docked => "docked",
            Outcome::Collision => "collision",
            Outcome::Timeout => "timeout",
            Outcome::SolverStarved => "solver-starved",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "docked" => Some(Outcome::Docked),
            "collision" => Some(Outcome::Collision),
            "timeout" => Some(Outcome::Timeout),
            "solver-starved" => Some(Outcome::SolverStarved),
            _ => None,
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub scenario: u8,
    pub seed: u64,
    pub outcome: Outcome,
    /// Distance from the true dock centre at the end [m].
    pub position_error: f64,
    /// Heading error against the true dock orientation at the end [rad].
    pub heading_error: f64,
    pub final_speed: f64,
    pub path_length: f64,
    /// Smallest ground-truth clearance over the episode [m].
    pub min_clearance: f64,
    pub sim_time: f64,
    pub control_steps: usize,
    /// Mean wall-clock time per control step, perception included [s].
    pub compute_per_step: f64,
    pub compute_total: f64,
    /// Share of scans that produced a valid estimate.
    pub perception_valid_rate: f64,
}

/// One row of the trajectory log: the state at `t` and what was done there.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub state: VesselState,
    /// Zero on the terminal row.
    pub command: ThrustCommand,
    /// Stage cost of `state` under the controller's context.
    pub cost: CostBreakdown,
    pub collision: CollisionReport,
    /// Estimate in use by the controller, possibly stale.
    pub dock: Option<DockEstimate>,
    /// Whether the most recent scan produced a valid estimate.
    pub latest_valid: bool,
    /// Absent on the terminal row.
    pub diagnostics: Option<Diagnostics>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTiming {
    pub perception: f64,
    pub solve: f64,
}

#[derive(Debug, Clone, Default)]
pub struct EpisodeLog {
    pub steps: Vec<StepRecord>,
    /// Every scan's estimate, valid or not.
    pub estimates: Vec<DockEstimate>,
    /// Wall-clock per control step; excluded from the deterministic logs.
    pub timing: Vec<StepTiming>,
}

/// Number of control steps between LiDAR scans.
pub fn scan_interval(rate_hz: f64, dt: f64) -> usize {
    ((1.0 / (rate_hz * dt)).round() as usize).max(1)
}

/// Docking tolerances met by `state` this instant.
pub fn within_success(state: &VesselState, cfg: &ScenarioConfig) -> bool {
    let s = &cfg.success;
    let pos = (state.position() - cfg.dock.center).norm();
    let heading = normalize_angle(state.psi - cfg.dock.orientation).abs();
    pos < s.position_tol && heading < s.heading_tol && state.speed() < s.speed_tol
}

/// Whether `pos` lies on the final leg between the entry point and the
/// estimated centre, within `gate` of the dock axis.
pub fn on_final_leg(pos: &Vec2, dock: &DockEstimate, gate: f64) -> bool {
    let axis = unit(dock.orientation);
    let rel = pos - dock.entry_point;
    let along = rel.dot(&axis);
    along >= 0.0 && along <= (dock.center - dock.entry_point).norm() && cross(&axis, &rel).abs() <= gate
}

/// Runs one closed-loop episode.
///
/// Control at `1/dt`, perception every [`scan_interval`] steps with the last
/// valid estimate held in between. Ends on ground-truth collision, on the
/// success tolerances holding for `hold_time`, on solver starvation or at the
/// time limit.
pub fn run_episode(cfg: &ScenarioConfig, seed: u64, exec: Execution) -> Result<(EpisodeResult, EpisodeLog)> {
    let dt = cfg.mppi.dt;
    let max_steps = cfg.control_steps();
    let interval = scan_interval(cfg.lidar.rate_hz, dt);
    let mut mppi = cfg.mppi.clone();
    mppi.seed = seed;
    let mut controller = MppiController::new(mppi)?.with_execution(exec);

    let mut log = EpisodeLog::default();
    let mut state = cfg.initial_state;
    let mut dock: Option<DockEstimate> = None;
    let mut latest_valid = false;
    let mut held_since: Option<f64> = None;
    let mut path_length = 0.0;
    let mut min_clearance = f64::INFINITY;
    let mut valid_scans = 0usize;
    let mut entrance_reached = false;
    let berth_weights = CostWeights {
        speed_penalty: cfg.cost.berth_speed_penalty,
        ..cfg.cost.clone()
    };

    let mut i = 0usize;
    let outcome = loop {
        let t = i as f64 * dt;
        let collision = check_collision(&state, &cfg.dock, &cfg.vessel);
        min_clearance = min_clearance.min(collision.min_clearance);

        let held = if within_success(&state, cfg) {
            let since = *held_since.get_or_insert(t);
            t - since >= cfg.success.hold_time - 1e-9
        } else {
            held_since = None;
            false
        };
        let terminal = if collision.colliding {
            Some(Outcome::Collision)
        } else if held {
            Some(Outcome::Docked)
        } else if i >= max_steps {
            Some(Outcome::Timeout)
        } else {
            None
        };

        if let Some(o) = terminal {
            let ctx = CostContext::new(&cfg.cost, &cfg.vessel, dock.as_ref(), &state);
            log.steps.push(StepRecord {
                t,
                state,
                command: ThrustCommand::ZERO,
                cost: ctx.stage(&state),
                collision,
                dock: dock.clone(),
                latest_valid,
                diagnostics: None,
            });
            break o;
        }

        let started = Instant::now();
        if i.is_multiple_of(interval) {
            let scan_index = (i / interval) as u64;
            let scan = simulate_lidar(&state, &cfg.dock, &cfg.lidar, seed, scan_index, t);
            let est = perceive(&scan, &state, &cfg.vessel, &cfg.perception, seed, scan_index);
            latest_valid = est.valid;
            if est.valid {
                valid_scans += 1;
                dock = Some(est.clone());
            }
            log.estimates.push(est);
        }
        let perceived = started.elapsed().as_secs_f64();

        let mut ctx = CostContext::new(&cfg.cost, &cfg.vessel, dock.as_ref(), &state);
        if cfg.cost.entrance_latch {
            entrance_reached |= ctx.dock.is_some_and(|d| {
                !ctx.entrance_active || on_final_leg(&ctx.current_position, d, cfg.cost.entrance_gate)
            });
            if entrance_reached {
                ctx.entrance_active = false;
                ctx.weights = &berth_weights;
            }
        }
        let out = controller.control(&state, &ctx, &cfg.vessel);
        let solved = started.elapsed().as_secs_f64() - perceived;
        log.timing.push(StepTiming {
            perception: perceived,
            solve: solved,
        });

        log.steps.push(StepRecord {
            t,
            state,
            command: out.command,
            cost: ctx.stage(&state),
            collision,
            dock: dock.clone(),
            latest_valid,
            diagnostics: Some(out.diagnostics),
        });
        if out.diagnostics.starved {
            break Outcome::SolverStarved;
        }

        let next = step(&state, &out.command, dt, &cfg.vessel)?;
        path_length += (next.position() - state.position()).norm();
        state = next;
        i += 1;
    };

    let last = log.steps.last().map(|r| r.state).unwrap_or(state);
    let compute_total: f64 = log.timing.iter().map(|s| s.perception + s.solve).sum();
    let result = EpisodeResult {
        scenario: cfg.id,
        seed,
        outcome,
        position_error: (last.position() - cfg.dock.center).norm(),
        heading_error: normalize_angle(last.psi - cfg.dock.orientation),
        final_speed: last.speed(),
        path_length,
        min_clearance,
        sim_time: log.steps.last().map(|r| r.t).unwrap_or(0.0),
        control_steps: log.timing.len(),
        compute_per_step: if log.timing.is_empty() {
            0.0
        } else {
            compute_total / log.timing.len() as f64
        },
        compute_total,
        perception_valid_rate: if log.estimates.is_empty() {
            0.0
        } else {
            valid_scans as f64 / log.estimates.len() as f64
        },
    };
    Ok((result, log))
}
