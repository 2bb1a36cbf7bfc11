use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use volte_core::sched::{Policy, FRAME_TTIS};
use volte_sim::experiment::{build_run_topology, build_scenario, draw_sinr, run_policy};
use volte_sim::output::{write_channel, write_frame_allocation, write_rate_table};
use volte_sim::{emit_plotdata, read_results, run_experiment, write_results, write_summary};
use volte_sim::{ExperimentConfig, PlotFamily, ResultRow, SimError};

/// Downlink VoLTE + data scheduling experiments.
///
/// Without a subcommand, runs a sweep over the number of VoLTE users and
/// writes one CSV row per (policy, U, run).
#[derive(Parser)]
#[command(version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep (the default).
    Run(RunArgs),
    /// Turn a results CSV into per-figure tables.
    Plotdata {
        /// Results CSV written by `run`.
        #[arg(long)]
        input: PathBuf,
        /// throughput, outage, fairness or infeasibility; all four when omitted.
        #[arg(long)]
        family: Vec<String>,
        /// Output directory (one `<family>.csv` each); stdout for a single family when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the CQI table with bits per PRB.
    RateTable {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump SINR, CQI and bits for one run of a config.
    Channel {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Schedule one frame and dump the allocation as tti,prb,user,bits.
    Frame {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value = "heuristic")]
        policy: Policy,
    },
}

#[derive(Args, Default)]
struct ConfigArgs {
    /// key = value config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Carrier bandwidth in MHz: 1.4, 3 or 10.
    #[arg(long)]
    bandwidth: Option<String>,
    /// Number of data users K.
    #[arg(long)]
    num_data: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// Run the heuristics exactly as in the original pseudocode.
    #[arg(long)]
    strict_pseudocode: bool,
    /// Draw new fading every TTI instead of once per frame.
    #[arg(long)]
    per_tti_fading: bool,
    /// Extra `key=value` settings.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args, Default)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// VoLTE user counts: `0,5,10` or `start:stop:step`.
    #[arg(long)]
    volte_sweep: Option<String>,
    /// Policy to run; repeat for several.
    #[arg(long)]
    policy: Vec<String>,
    #[arg(long)]
    runs: Option<String>,
    /// Output directory for results.csv, summary.csv and plotdata/; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScenarioArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    num_volte: usize,
    /// Run index within the config's seed.
    #[arg(long, default_value_t = 0)]
    run: usize,
    /// Frame index within the run.
    #[arg(long, default_value_t = 0)]
    frame: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig, SimError> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        let flags = [
            ("bandwidth", &self.bandwidth),
            ("num_data", &self.num_data),
            ("seed", &self.seed),
            ("gamma", &self.gamma),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if self.strict_pseudocode {
            cfg.strict_pseudocode = true;
        }
        if self.per_tti_fading {
            cfg.per_tti_fading = true;
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| SimError::Config {
                line: 0,
                message: format!("--set expects KEY=VALUE, got `{kv}`"),
            })?;
            cfg.set(k.trim(), v)?;
        }
        Ok(cfg)
    }
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig, SimError> {
        let mut cfg = self.config.load()?;
        if let Some(v) = &self.volte_sweep {
            cfg.set("volte_sweep", v)?;
        }
        if !self.policy.is_empty() {
            cfg.set("policies", &self.policy.join(","))?;
        }
        if let Some(v) = &self.runs {
            cfg.set("runs", v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, SimError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| SimError::io(path, e))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, SimError> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(args: &RunArgs) -> Result<(), SimError> {
    let cfg = args.load()?;
    let records = run_experiment(&cfg)?;
    let rows: Vec<ResultRow> = records.iter().map(|r| ResultRow::from_record(&cfg, r)).collect();
    let timeouts: u64 = records.iter().map(|r| r.solver_timeouts).sum();
    if timeouts > 0 {
        eprintln!("note: {timeouts} solves stopped at the node limit; their best solutions were used");
    }
    match &args.out {
        None => write_results(io::stdout().lock(), &rows),
        Some(dir) => {
            write_results(create(&dir.join("results.csv"))?, &rows)?;
            write_summary(create(&dir.join("summary.csv"))?, &cfg, &records)?;
            for family in PlotFamily::ALL {
                let path = dir.join("plotdata").join(format!("{}.csv", family.name()));
                emit_plotdata(create(&path)?, &rows, family)?;
            }
            Ok(())
        }
    }
}

fn plotdata(input: &Path, families: &[String], out: Option<&Path>) -> Result<(), SimError> {
    let families: Vec<PlotFamily> = if families.is_empty() {
        PlotFamily::ALL.to_vec()
    } else {
        families.iter().map(|f| f.parse()).collect::<Result<_, _>>()?
    };
    let file = File::open(input).map_err(|e| SimError::io(input, e))?;
    let rows = read_results(file)?;
    match out {
        Some(dir) => {
            for f in families {
                emit_plotdata(create(&dir.join(format!("{}.csv", f.name())))?, &rows, f)?;
            }
            Ok(())
        }
        None if families.len() == 1 => emit_plotdata(io::stdout().lock(), &rows, families[0]),
        None => Err(SimError::invalid("out", "several families need an output directory")),
    }
}

fn channel(args: &ScenarioArgs) -> Result<(), SimError> {
    let cfg = args.config.load()?;
    let topo = build_run_topology(&cfg, args.num_volte, args.run)?;
    let f = 1 + args.frame as u64;
    let sinr = if cfg.per_tti_fading {
        (0..FRAME_TTIS as u64)
            .map(|t| draw_sinr(&cfg, &topo, args.num_volte, args.run, &[f, t]))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        vec![draw_sinr(&cfg, &topo, args.num_volte, args.run, &[f])?]
    };
    write_channel(sink(args.out.as_deref())?, args.num_volte, &sinr)
}

fn frame(args: &ScenarioArgs, policy: Policy) -> Result<(), SimError> {
    let mut cfg = args.config.load()?;
    cfg.policies = vec![policy];
    cfg.volte_sweep = vec![args.num_volte];
    cfg.frames = args.frame + 1;
    cfg.validate()?;
    cfg.check_caps()?;
    let s = build_scenario(&cfg, args.num_volte, args.run)?;
    let (_, frames) = run_policy(&cfg, &s, policy)?;
    write_frame_allocation(sink(args.out.as_deref())?, &frames[args.frame], &s.frames[args.frame])
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        None => run(&cli.run),
        Some(Command::Run(a)) => run(a),
        Some(Command::Plotdata { input, family, out }) => plotdata(input, family, out.as_deref()),
        Some(Command::RateTable { out }) => sink(out.as_deref()).and_then(write_rate_table),
        Some(Command::Channel { scenario }) => channel(scenario),
        Some(Command::Frame { scenario, policy }) => frame(scenario, *policy),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
