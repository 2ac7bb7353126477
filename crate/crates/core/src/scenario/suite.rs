//! Multi-seed batches and their summary table.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::par::Execution;

use super::config::ScenarioConfig;
use super::episode::{run_episode, EpisodeResult, Outcome};
use super::log::write_text;

/// Per-scenario aggregate over a batch of episodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSummary {
    pub scenario: u8,
    pub episodes: usize,
    pub docked: usize,
    pub collisions: usize,
    pub timeouts: usize,
    pub starved: usize,
    pub success_rate: f64,
    pub mean_position_error: f64,
    pub max_position_error: f64,
    pub mean_heading_error: f64,
    pub max_heading_error: f64,
    pub mean_path_length: f64,
    pub min_clearance: f64,
    pub mean_compute_total: f64,
}

pub const SUMMARY_HEADER: [&str; 14] = [
    "scenario",
    "episodes",
    "docked",
    "collisions",
    "timeouts",
    "starved",
    "success_rate",
    "mean_position_error",
    "max_position_error",
    "mean_heading_error",
    "max_heading_error",
    "mean_path_length",
    "min_clearance",
    "mean_compute_total",
];

/// Aggregates results per scenario id, in ascending id order.
pub fn summarize(results: &[EpisodeResult]) -> Vec<ScenarioSummary> {
    let mut groups: BTreeMap<u8, Vec<&EpisodeResult>> = BTreeMap::new();
    for r in results {
        groups.entry(r.scenario).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(scenario, rs)| {
            let n = rs.len() as f64;
            let count = |o: Outcome| rs.iter().filter(|r| r.outcome == o).count();
            let mean = |f: &dyn Fn(&EpisodeResult) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
            let max = |f: &dyn Fn(&EpisodeResult) -> f64| rs.iter().map(|r| f(r)).fold(f64::NEG_INFINITY, f64::max);
            let docked = count(Outcome::Docked);
            ScenarioSummary {
                scenario,
                episodes: rs.len(),
                docked,
                collisions: count(Outcome::Collision),
                timeouts: count(Outcome::Timeout),
                starved: count(Outcome::SolverStarved),
                success_rate: docked as f64 / n,
                mean_position_error: mean(&|r| r.position_error),
                max_position_error: max(&|r| r.position_error),
                mean_heading_error: mean(&|r| r.heading_error.abs()),
                max_heading_error: max(&|r| r.heading_error.abs()),
                mean_path_length: mean(&|r| r.path_length),
                min_clearance: rs.iter().map(|r| r.min_clearance).fold(f64::INFINITY, f64::min),
                mean_compute_total: mean(&|r| r.compute_total),
            }
        })
        .collect()
}

pub fn write_summary_csv(summary: &[ScenarioSummary], path: &Path) -> Result<()> {
    let mut out = SUMMARY_HEADER.join(",");
    out.push('\n');
    for s in summary {
        let row = [
            s.scenario.to_string(),
            s.episodes.to_string(),
            s.docked.to_string(),
            s.collisions.to_string(),
            s.timeouts.to_string(),
            s.starved.to_string(),
            format!("{}", s.success_rate),
            format!("{}", s.mean_position_error),
            format!("{}", s.max_position_error),
            format!("{}", s.mean_heading_error),
            format!("{}", s.max_heading_error),
            format!("{}", s.mean_path_length),
            format!("{}", s.min_clearance),
            format!("{}", s.mean_compute_total),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_text(path, &out)
}

/// Runs every (config, seed) pair. With parallel execution the episodes and
/// each episode's rollouts share the worker pool; results come back in input
/// order.
///
/// `on_episode` sees each finished episode and its log, e.g. to write files.
pub fn run_suite<F>(
    configs: &[ScenarioConfig],
    seeds: &[u64],
    exec: Execution,
    on_episode: F,
) -> Result<Vec<EpisodeResult>>
where
    F: Fn(&ScenarioConfig, &EpisodeResult, &super::episode::EpisodeLog) -> Result<()> + Sync + Send,
{
    if seeds.is_empty() {
        return Err(Error::config("suite needs at least one seed"));
    }
    let jobs: Vec<(&ScenarioConfig, u64)> = configs
        .iter()
        .flat_map(|c| seeds.iter().map(move |&s| (c, s)))
        .collect();
    let results = exec.map(jobs.len(), |j| -> Result<EpisodeResult> {
        let (cfg, seed) = jobs[j];
        let (result, log) = run_episode(cfg, seed, exec)?;
        on_episode(cfg, &result, &log)?;
        Ok(result)
    });
    results.into_iter().collect()
}
