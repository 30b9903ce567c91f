use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use d2dsim::discovery::write_discovery_csv;
use d2dsim::experiment::runner::drop_seed;
use d2dsim::experiment::{
    baseline_config, emit_csv, run_scenario, run_sweep, DropContext, Execution, ScenarioConfig,
    SweepAxis, SweepTable,
};
use d2dsim::{Error, Result};

#[derive(Parser)]
#[command(
    name = "d2dsim",
    version,
    about = "Overlay D2D cellular Monte-Carlo simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario point.
    Run {
        #[command(flatten)]
        common: Common,
        /// Also write the discovery table of the first drop.
        #[arg(long)]
        dump_discovery: bool,
    },
    /// Simulate one point per value of a swept parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// d2d_power_dbm, delta_d2d_db or d2d_bandwidth_mhz.
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated; empty for a header-only table.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        values: String,
    },
    /// Simulate with D2D disabled.
    Baseline {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    drops: Option<usize>,
    /// Run drops on the calling thread only.
    #[arg(long)]
    serial: bool,
}

impl Common {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(drops) = self.drops {
            cfg.drops = drops;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn execution(&self) -> Execution {
        if self.serial {
            Execution::Serial
        } else {
            Execution::Parallel
        }
    }
}

fn write_outputs(table: &SweepTable, cfg: &ScenarioConfig, out: &Path) -> Result<()> {
    for path in emit_csv(table, out)? {
        eprintln!("wrote {}", path.display());
    }
    let cfg_path = out.join("config.cfg");
    std::fs::write(&cfg_path, cfg.to_cfg_string()).map_err(|e| Error::Io {
        path: cfg_path,
        source: e,
    })?;
    for row in &table.rows {
        let m = &row.metrics;
        println!(
            "{}={} paired_fraction={:.4} ee={:.6} baseline_ee={:.6}",
            table.axis.as_str(),
            row.axis_value,
            m.paired_fraction.mean,
            m.ee.mean,
            m.baseline_ee.mean
        );
    }
    Ok(())
}

fn dump_discovery(cfg: &ScenarioConfig, out: &Path) -> Result<()> {
    let ctx = DropContext::build(cfg, drop_seed(cfg, 0))?;
    let outcome = ctx.evaluate(cfg)?;
    let path = out.join("discovery.csv");
    let io = |e| Error::Io {
        path: path.clone(),
        source: e,
    };
    let mut w = BufWriter::new(File::create(&path).map_err(io)?);
    write_discovery_csv(&mut w, &outcome.reports, &outcome.matching).map_err(io)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse().map_err(|_| Error::InvalidParameter {
                name: "values",
                reason: format!("`{v}` is not a number"),
            })
        })
        .collect()
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            common,
            dump_discovery: dump,
        } => {
            let cfg = common.load()?;
            let table = run_scenario(&cfg, common.execution())?;
            write_outputs(&table, &cfg, &common.out)?;
            if dump {
                dump_discovery(&cfg, &common.out)?;
            }
        }
        Command::Sweep {
            common,
            axis,
            values,
        } => {
            let cfg = common.load()?;
            let table = run_sweep(&cfg, axis, &parse_values(&values)?, common.execution())?;
            write_outputs(&table, &cfg, &common.out)?;
        }
        Command::Baseline { common } => {
            let cfg = baseline_config(&common.load()?);
            let table = run_scenario(&cfg, common.execution())?;
            write_outputs(&table, &cfg, &common.out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
