//! Command-line runner for docking episodes and suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use mppi_dock::par::Execution;
use mppi_dock::scenario::{
    emit_plot, read_trajectory_csv, run_episode, run_suite, summarize, write_estimates_csv, write_results_csv,
    write_summary_csv, write_text, write_timing_csv, write_trajectory_csv, ConfigFile, EpisodeLog, EpisodeResult,
    ScenarioConfig,
};

#[derive(Parser)]
#[command(
    name = "mppi-dock",
    version,
    about = "MPPI docking of a surface vessel with LiDAR dock perception"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed-loop episode.
    Run {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        scenario: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Configuration file; built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also write plot.svg.
        #[arg(long)]
        plot: bool,
        /// Evaluate rollouts on the calling thread only.
        #[arg(long)]
        sequential: bool,
    },
    /// Run seeds 0..N for each scenario and write a summary table.
    Suite {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seeds: u64,
        #[arg(long)]
        out: PathBuf,
        /// Scenario ids to include.
        #[arg(long, value_delimiter = ',', default_values_t = [1u8, 2, 3])]
        scenarios: Vec<u8>,
        #[arg(long)]
        sequential: bool,
    },
    /// Redraw a recorded trajectory.
    Replay {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        plot: bool,
        /// Configuration for the dock and hull; defaults to config.toml next
        /// to the log.
        #[arg(long)]
        config: Option<PathBuf>,
        /// SVG destination; defaults to plot.svg next to the log.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn load_file(path: Option<&Path>) -> anyhow::Result<ConfigFile> {
    Ok(match path {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    })
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_episode(
    dir: &Path,
    cfg: &ScenarioConfig,
    result: &EpisodeResult,
    log: &EpisodeLog,
    plot: bool,
) -> mppi_dock::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| mppi_dock::Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let mut file = cfg.source.clone();
    file.scenario.seeds = vec![result.seed];
    write_text(&dir.join("config.toml"), &file.to_toml())?;
    write_trajectory_csv(log, &dir.join("trajectory.csv"))?;
    write_estimates_csv(&log.estimates, &dir.join("estimates.csv"))?;
    write_timing_csv(log, &dir.join("timing.csv"))?;
    write_results_csv(std::slice::from_ref(result), &dir.join("result.csv"))?;
    if plot {
        let points = read_trajectory_csv(&dir.join("trajectory.csv"))?;
        write_text(&dir.join("plot.svg"), &emit_plot(&points, &cfg.dock, &cfg.vessel)?)?;
    }
    Ok(())
}

fn describe(r: &EpisodeResult) -> String {
    format!(
        "scenario {} seed {}: {} after {:.2} s, position error {:.3} m, heading error {:.2} deg, speed {:.3} m/s, \
         path {:.2} m, min clearance {:.3} m, {:.1} ms/step",
        r.scenario,
        r.seed,
        r.outcome,
        r.sim_time,
        r.position_error,
        r.heading_error.to_degrees(),
        r.final_speed,
        r.path_length,
        r.min_clearance,
        r.compute_per_step * 1e3
    )
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run {
            scenario,
            seed,
            config,
            out,
            plot,
            sequential,
        } => {
            let mut file = load_file(config.as_deref())?;
            file.scenario.id = scenario;
            file.scenario.seeds = vec![seed];
            let cfg = ScenarioConfig::from_file(file)?;
            create_dir(&out)?;
            let (result, log) = run_episode(&cfg, seed, execution(sequential))?;
            write_episode(&out, &cfg, &result, &log, plot)?;
            println!("{}", describe(&result));
        }
        Command::Suite {
            config,
            seeds,
            out,
            scenarios,
            sequential,
        } => {
            if seeds == 0 {
                bail!("--seeds must be at least 1");
            }
            let base = load_file(config.as_deref())?;
            let configs = scenarios
                .iter()
                .map(|&id| {
                    let mut f = base.clone();
                    f.scenario.id = id;
                    ScenarioConfig::from_file(f)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let seed_list: Vec<u64> = (0..seeds).collect();
            create_dir(&out)?;
            let results = run_suite(&configs, &seed_list, execution(sequential), |cfg, result, log| {
                let dir = out
                    .join(format!("scenario{}", cfg.id))
                    .join(format!("seed{}", result.seed));
                write_episode(&dir, cfg, result, log, false)
            })?;
            for r in &results {
                println!("{}", describe(r));
            }
            write_results_csv(&results, &out.join("episodes.csv"))?;
            let summary = summarize(&results);
            write_summary_csv(&summary, &out.join("summary.csv"))?;
            for s in &summary {
                println!(
                    "scenario {}: {}/{} docked ({} collisions, {} timeouts, {} starved), mean position error {:.3} m, \
                     mean path {:.2} m",
                    s.scenario,
                    s.docked,
                    s.episodes,
                    s.collisions,
                    s.timeouts,
                    s.starved,
                    s.mean_position_error,
                    s.mean_path_length
                );
            }
        }
        Command::Replay { log, plot, config, out } => {
            let points = read_trajectory_csv(&log)?;
            let dir = log.parent().unwrap_or(Path::new("."));
            let config = config.or_else(|| Some(dir.join("config.toml")).filter(|p| p.exists()));
            let cfg = ScenarioConfig::from_file(load_file(config.as_deref())?)?;
            let last = points.last().context("trajectory log has no rows")?;
            println!(
                "{} rows, {:.2} s, final pose ({:.3}, {:.3}, {:.2} deg), distance to dock centre {:.3} m",
                points.len(),
                last.t,
                last.x,
                last.y,
                last.psi.to_degrees(),
                (mppi_dock::geom::Vec2::new(last.x, last.y) - cfg.dock.center).norm()
            );
            if plot {
                let svg = emit_plot(&points, &cfg.dock, &cfg.vessel)?;
                let dest = out.unwrap_or_else(|| dir.join("plot.svg"));
                write_text(&dest, &svg)?;
                println!("wrote {}", dest.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
