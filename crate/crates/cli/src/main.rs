#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ptassign::experiments::{build_options, capacity_experiment, simulate, unlimited_experiment};
use ptassign::io::{
    load_bundle, read_config, write_arc_loads, write_day_reports, write_diff_loads, write_journeys, IoError,
    NetworkBundle,
};
use ptassign::network::{BuildOptions, Network};
use ptassign::sim::{DayReport, DayResult, SimConfig};

#[derive(Parser)]
#[command(name = "ptassign", version, about = "Capacity-feasible agent-based transit assignment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Multi-day simulation with learning.
    Simulate(Common),
    /// One-day probe, then more capacity on every trip that denied a boarding.
    ExperimentCapacity {
        #[command(flatten)]
        common: Common,
        /// Capacity increase in percent.
        #[arg(long, default_value_t = 40.0)]
        cap_increase_pct: f64,
    },
    /// Unlimited capacity against a baseline run.
    ExperimentUnlimited(Common),
    /// Load and validate the input bundle.
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Directory with stops.csv, footpaths.csv, trips.csv, stop_times.csv,
    /// dependencies.csv and od.csv.
    #[arg(long)]
    input: PathBuf,
    /// key=value configuration; defaults to config.txt in the input directory.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    days: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write journeys_dayN.csv.
    #[arg(long)]
    journeys: bool,
}

fn config_for(input: &Path, config: Option<&Path>) -> Result<SimConfig> {
    let default = input.join("config.txt");
    match config {
        Some(p) => read_config(p).with_context(|| format!("config {}", p.display())),
        None if default.exists() => read_config(&default).with_context(|| format!("config {}", default.display())),
        None => Ok(SimConfig::default()),
    }
}

fn load(input: &Path, opts: &BuildOptions) -> Result<NetworkBundle> {
    load_bundle(input, opts).map_err(|errs| {
        report_errors(&errs);
        anyhow::anyhow!("{} problem(s) in {}", errs.len(), input.display())
    })
}

fn report_errors(errs: &[IoError]) {
    for e in errs {
        eprintln!("{e}");
    }
}

impl Common {
    fn setup(&self) -> Result<(NetworkBundle, SimConfig)> {
        let mut cfg = config_for(&self.input, self.config.as_deref())?;
        if let Some(d) = self.days {
            cfg.days = d;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.threads {
            cfg.threads = t;
        }
        cfg.validate()?;
        let bundle = load(&self.input, &build_options(&cfg))?;
        std::fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok((bundle, cfg))
    }
}

fn write_days(dir: &Path, net: &Network, days: &[DayResult], journeys: bool) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let reports: Vec<DayReport> = days.iter().map(|d| d.report.clone()).collect();
    write_day_reports(&dir.join("day_report.csv"), &reports)?;
    for d in days {
        let n = d.report.day;
        write_arc_loads(&dir.join(format!("arc_loads_day{n}.csv")), net, &d.onboard)?;
        if journeys {
            write_journeys(&dir.join(format!("journeys_day{n}.csv")), net, &d.journeys)?;
        }
    }
    Ok(())
}

fn summary(label: &str, days: &[DayResult]) {
    if let (Some(first), Some(last)) = (days.first(), days.last()) {
        let (a, b) = (&first.report, &last.report);
        println!(
            "{label}: day {} total {:.1} s, denied/pax {:.3}; day {} total {:.1} s, denied/pax {:.3}",
            a.day, a.total, a.denied_per_pax, b.day, b.total, b.denied_per_pax
        );
    }
    let violations: usize = days.iter().map(|d| d.capacity_violations).sum();
    if violations > 0 {
        eprintln!("warning: {violations} capacity violations");
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { input, config } => {
            let cfg = config_for(&input, config.as_deref())?;
            let b = load(&input, &build_options(&cfg))?;
            let n = &b.network;
            println!(
                "ok: {} stops, {} lines, {} trips, {} driving arcs, {} footpaths, {} OD entries",
                n.stops.len(),
                n.lines.len(),
                n.trips.len(),
                n.num_driving_arcs(),
                n.num_footpaths(),
                b.od.len()
            );
        }
        Command::Simulate(c) => {
            let (bundle, cfg) = c.setup()?;
            let t = Instant::now();
            let days = simulate(&bundle, &bundle.network, &cfg)?;
            summary("simulate", &days);
            println!("simulated {} day(s) in {:.2} s", days.len(), t.elapsed().as_secs_f64());
            write_days(&c.out, &bundle.network, &days, c.journeys)?;
        }
        Command::ExperimentCapacity { common: c, cap_increase_pct } => {
            if !(cap_increase_pct >= 0.0) {
                bail!("--cap-increase-pct must be non-negative");
            }
            let (bundle, cfg) = c.setup()?;
            let r = capacity_experiment(&bundle, &cfg, cap_increase_pct)?;
            summary("probe", std::slice::from_ref(&r.probe));
            summary("raised", &r.runs);
            println!("raised capacity of {} trip(s) by {cap_increase_pct}%", r.raised.len());
            write_days(&c.out.join("probe"), &bundle.network, std::slice::from_ref(&r.probe), c.journeys)?;
            write_days(&c.out.join("raised"), &r.network, &r.runs, c.journeys)?;
            std::fs::write(c.out.join("raised_trips.txt"), r.raised.join("\n") + "\n")?;
        }
        Command::ExperimentUnlimited(c) => {
            let (bundle, cfg) = c.setup()?;
            let r = unlimited_experiment(&bundle, &cfg)?;
            summary("baseline", &r.baseline);
            summary("unlimited", &r.unlimited);
            write_days(&c.out.join("baseline"), &bundle.network, &r.baseline, c.journeys)?;
            write_days(&c.out.join("unlimited"), &r.network, &r.unlimited, c.journeys)?;
            let (base, unl) = (r.baseline.last().unwrap(), r.unlimited.last().unwrap());
            write_diff_loads(&c.out.join("diff_loads.csv"), &bundle.network, &base.onboard, &unl.onboard)?;
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
