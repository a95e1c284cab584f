use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use acn_core::experiments::{
    crosscheck, parse_config, parse_protocol_list, sci, write_csv, ExperimentConfig, RunManifest,
};
use acn_core::{Error, Mode};
use clap::{Args, Parser, Subcommand};

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_DEVIATION: u8 = 3;

/// Outage probabilities of adaptive cooperative NOMA at a road intersection.
#[derive(Debug, Parser)]
#[command(name = "acn-outage", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the configured sweep and write the result table as CSV.
    Simulate {
        config: PathBuf,
        /// CSV destination; stdout when omitted. A `.manifest` file is
        /// written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, value_parser = parse_mode)]
        mode: Option<Mode>,
        /// Comma-separated protocol names.
        #[arg(long)]
        protocols: Option<String>,
    },
    /// Parse and validate a config without running anything.
    Validate { config: PathBuf },
    /// Compare Monte-Carlo estimates with the closed forms.
    Crosscheck {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Largest tolerated deviation, in standard errors.
        #[arg(long, default_value_t = 3.0)]
        threshold: f64,
    },
}

#[derive(Debug, Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads; every core when omitted.
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

enum Failure {
    Core(Error),
    Io(String, io::Error),
    Deviation(f64, f64),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            Failure::Core(_) => EXIT_CONFIG,
            Failure::Io(what, _) if what.starts_with("read") => EXIT_CONFIG,
            Failure::Io(..) => EXIT_NUMERICAL,
            Failure::Deviation(..) => EXIT_DEVIATION,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Io(what, e) => format!("cannot {what}: {e}"),
            Failure::Deviation(z, t) => {
                format!("max deviation {z:.3} stderr exceeds threshold {t}")
            }
        }
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("read {}", path.display()), e))?;
    Ok(parse_config(&text)?)
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) -> Result<(), Failure> {
        if let Some(seed) = self.seed {
            cfg.mc.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.mc.trials = trials;
        }
        if let Some(threads) = self.threads {
            cfg.mc.threads = Some(threads);
        }
        cfg.mc.validate()?;
        Ok(())
    }
}

fn threads_used(cfg: &ExperimentConfig) -> usize {
    cfg.mc
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest");
    out.with_file_name(name)
}

fn simulate(
    path: &Path,
    out: Option<&Path>,
    overrides: &Overrides,
    mode: Option<Mode>,
    protocols: Option<&str>,
) -> Result<(), Failure> {
    let mut cfg = load(path)?;
    overrides.apply(&mut cfg)?;
    if let Some(mode) = mode {
        cfg.mc.mode = mode;
    }
    if let Some(list) = protocols {
        cfg.sweep.protocols = parse_protocol_list(list)?;
    }
    let table = cfg.run()?;
    match out {
        None => {
            let stdout = io::stdout();
            write_csv(&table, stdout.lock()).map_err(|e| Failure::Io("write stdout".into(), e))?;
        }
        Some(out) => {
            let file = fs::File::create(out)
                .map_err(|e| Failure::Io(format!("create {}", out.display()), e))?;
            write_csv(&table, io::BufWriter::new(file))
                .map_err(|e| Failure::Io(format!("write {}", out.display()), e))?;
            let manifest = RunManifest::new(&cfg, &table, threads_used(&cfg));
            let mpath = manifest_path(out);
            fs::write(&mpath, manifest.to_text())
                .map_err(|e| Failure::Io(format!("write {}", mpath.display()), e))?;
            eprintln!(
                "wrote {} rows to {} (manifest {})",
                table.rows.len(),
                out.display(),
                mpath.display()
            );
        }
    }
    Ok(())
}

fn validate(path: &Path) -> Result<(), Failure> {
    let cfg = load(path)?;
    println!(
        "ok: {} sweep over {} value(s), {} protocol(s), outputs {}, {} trials",
        cfg.sweep.parameter.name(),
        cfg.sweep.values.len(),
        cfg.sweep.protocols.len(),
        cfg.sweep.outputs.name(),
        cfg.mc.trials
    );
    Ok(())
}

fn run_crosscheck(path: &Path, overrides: &Overrides, threshold: f64) -> Result<(), Failure> {
    let mut cfg = load(path)?;
    overrides.apply(&mut cfg)?;
    if cfg.mc.mode != Mode::Factorized {
        eprintln!("note: closed forms assume independent fields; using factorized mode");
        cfg.mc.mode = Mode::Factorized;
    }
    let report = crosscheck(&cfg.scene, &cfg.sweep, &cfg.mc)?;
    let mut out = io::stdout().lock();
    let line = |out: &mut io::StdoutLock, s: String| {
        writeln!(out, "{s}").map_err(|e| Failure::Io("write stdout".into(), e))
    };
    line(
        &mut out,
        format!(
            "{:>14} {:>12} {:>4} {:>13} {:>13} {:>8}",
            cfg.sweep.parameter.name(),
            "protocol",
            "dest",
            "analytic",
            "mc",
            "z"
        ),
    )?;
    for d in &report.deviations {
        line(
            &mut out,
            format!(
                "{:>14} {:>12} {:>4} {:>13} {:>13} {:>8.3}",
                sci(d.sweep_value),
                d.protocol.name(),
                d.destination.name(),
                sci(d.analytic),
                sci(d.simulated),
                d.z
            ),
        )?;
    }
    let max = report.max_z();
    line(
        &mut out,
        format!("max deviation: {max:.3} stderr (threshold {threshold})"),
    )?;
    if max > threshold {
        return Err(Failure::Deviation(max, threshold));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Simulate {
            config,
            out,
            overrides,
            mode,
            protocols,
        } => simulate(
            config,
            out.as_deref(),
            overrides,
            *mode,
            protocols.as_deref(),
        ),
        Command::Validate { config } => validate(config),
        Command::Crosscheck {
            config,
            overrides,
            threshold,
        } => run_crosscheck(config, overrides, *threshold),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
