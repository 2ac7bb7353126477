//! Closed-loop docking scenarios: configuration, episodes, suites, logs and
//! plots.

mod config;
mod episode;
mod log;
mod plot;
mod suite;

pub use config::{
    default_initial_state, ConfigFile, CostSection, DockSection, LidarSection, MppiSection, PerceptionSection,
    ScenarioConfig, ScenarioSection, SuccessCriteria, VesselSection,
};
pub use episode::{
    on_final_leg, run_episode, scan_interval, within_success, EpisodeLog, EpisodeResult, Outcome, StepRecord,
    StepTiming,
};
pub use log::{
    read_trajectory_csv, result_row, trajectory_rows, write_estimates_csv, write_results_csv, write_text,
    write_timing_csv, write_trajectory_csv, TrajectoryPoint, ESTIMATE_HEADER, RESULT_HEADER, TRAJECTORY_HEADER,
};
pub use plot::{emit_plot, plot_bounds, Bounds};
pub use suite::{run_suite, summarize, write_summary_csv, ScenarioSummary, SUMMARY_HEADER};
