//! CSV run logs.
//!
//! `trajectory.csv` and `estimates.csv` depend only on the configuration and
//! seed. Wall-clock numbers go to `timing.csv` so the other two stay
//! byte-identical across runs and worker counts.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::perception::DockEstimate;

use super::episode::{EpisodeLog, EpisodeResult, Outcome};

pub const TRAJECTORY_HEADER: [&str; 29] = [
    "t",
    "x",
    "y",
    "psi",
    "u",
    "v",
    "r",
    "t1",
    "t2",
    "t3",
    "t4",
    "cost_goal",
    "cost_velocity",
    "cost_heading",
    "cost_orientation",
    "cost_clearance",
    "cost_entrance",
    "cost_total",
    "min_clearance",
    "zone",
    "colliding",
    "dock_cx",
    "dock_cy",
    "dock_theta",
    "entry_x",
    "entry_y",
    "valid",
    "s_min",
    "ess",
];

pub const ESTIMATE_HEADER: [&str; 7] = ["timestamp", "cx", "cy", "theta", "ex", "ey", "valid"];

pub const RESULT_HEADER: [&str; 14] = [
    "scenario",
    "seed",
    "outcome",
    "position_error",
    "heading_error",
    "final_speed",
    "path_length",
    "min_clearance",
    "sim_time",
    "control_steps",
    "compute_per_step",
    "compute_total",
    "perception_valid_rate",
    "docked",
];

fn num(x: f64) -> String {
    format!("{x}")
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| csv_err(path, e))
}

fn estimate_fields(d: Option<&DockEstimate>) -> [String; 5] {
    match d {
        Some(d) => [
            num(d.center.x),
            num(d.center.y),
            num(d.orientation),
            num(d.entry_point.x),
            num(d.entry_point.y),
        ],
        None => Default::default(),
    }
}

/// Trajectory rows as strings, in [`TRAJECTORY_HEADER`] order.
pub fn trajectory_rows(log: &EpisodeLog) -> Vec<Vec<String>> {
    log.steps
        .iter()
        .map(|r| {
            let s = &r.state;
            let c = &r.cost;
            let mut row = vec![num(r.t), num(s.x), num(s.y), num(s.psi), num(s.u), num(s.v), num(s.r)];
            row.extend(r.command.0.iter().map(|&x| num(x)));
            row.extend([
                num(c.goal),
                num(c.velocity),
                num(c.heading),
                num(c.orientation),
                num(c.clearance),
                num(c.entrance),
                num(c.total()),
                num(r.collision.min_clearance),
                r.collision.zone.as_str().to_string(),
                flag(r.collision.colliding).to_string(),
            ]);
            row.extend(estimate_fields(r.dock.as_ref()));
            row.push(flag(r.latest_valid).to_string());
            match &r.diagnostics {
                Some(d) => row.extend([num(d.s_min), num(d.ess)]),
                None => row.extend([String::new(), String::new()]),
            }
            row
        })
        .collect()
}

pub fn write_trajectory_csv(log: &EpisodeLog, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(TRAJECTORY_HEADER).map_err(|e| csv_err(path, e))?;
    for row in trajectory_rows(log) {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per scan. Failed scans leave the geometry fields empty.
pub fn write_estimates_csv(estimates: &[DockEstimate], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(ESTIMATE_HEADER).map_err(|e| csv_err(path, e))?;
    for e in estimates {
        let mut row = vec![num(e.timestamp)];
        row.extend(estimate_fields(e.valid.then_some(e)));
        row.push(flag(e.valid).to_string());
        w.write_record(&row).map_err(|err| csv_err(path, err))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_timing_csv(log: &EpisodeLog, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["step", "perception_s", "solve_s"])
        .map_err(|e| csv_err(path, e))?;
    for (i, t) in log.timing.iter().enumerate() {
        w.write_record([i.to_string(), num(t.perception), num(t.solve)])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn result_row(r: &EpisodeResult) -> Vec<String> {
    vec![
        r.scenario.to_string(),
        r.seed.to_string(),
        r.outcome.as_str().to_string(),
        num(r.position_error),
        num(r.heading_error),
        num(r.final_speed),
        num(r.path_length),
        num(r.min_clearance),
        num(r.sim_time),
        r.control_steps.to_string(),
        num(r.compute_per_step),
        num(r.compute_total),
        num(r.perception_valid_rate),
        flag(r.outcome == Outcome::Docked).to_string(),
    ]
}

pub fn write_results_csv(results: &[EpisodeResult], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(RESULT_HEADER).map_err(|e| csv_err(path, e))?;
    for r in results {
        w.write_record(result_row(r)).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// The subset of a trajectory row needed to redraw a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub dock_center: Option<Vec2>,
    pub entry_point: Option<Vec2>,
}

pub fn read_trajectory_csv(path: &Path) -> Result<Vec<TrajectoryPoint>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            message: format!("missing column {name}"),
        })
    };
    let idx = [
        col("t")?,
        col("x")?,
        col("y")?,
        col("psi")?,
        col("dock_cx")?,
        col("dock_cy")?,
        col("entry_x")?,
        col("entry_y")?,
    ];
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let field = |k: usize| -> Result<Option<f64>> {
            let s = rec.get(idx[k]).unwrap_or("");
            if s.is_empty() {
                return Ok(None);
            }
            s.parse::<f64>().map(Some).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                message: format!("row {}: {e}", line + 2),
            })
        };
        let required = |k: usize| -> Result<f64> {
            field(k)?.ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                message: format!("row {}: empty pose field", line + 2),
            })
        };
        let pair = |a: Option<f64>, b: Option<f64>| a.zip(b).map(|(x, y)| Vec2::new(x, y));
        out.push(TrajectoryPoint {
            t: required(0)?,
            x: required(1)?,
            y: required(2)?,
            psi: required(3)?,
            dock_center: pair(field(4)?, field(5)?),
            entry_point: pair(field(6)?, field(7)?),
        });
    }
    Ok(out)
}
