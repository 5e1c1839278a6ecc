mod config;
mod error;
mod output;
mod run;
mod suite;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{parse_entries, RunConfig};
use error::{CliError, CliResult};
use run::Outcome;

/// Graphical anisotropic mean curvature flow with contact-angle and
/// Dirichlet boundary conditions.
#[derive(Parser, Debug)]
#[command(name = "capflow", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the anisotropy constants and the assumption table.
    Info(RunArgs),
    /// Evolve a contact-angle problem to `solver.t_end`.
    Simulate(RunArgs),
    /// Solve for the translating soliton and its speed.
    Translator(RunArgs),
    /// Evolve a Dirichlet problem to `solver.t_end`.
    Dirichlet(RunArgs),
    /// Run the certificate suite for a configuration (or the shipped ones).
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Run every shipped configuration instead of `--config`.
        #[arg(long)]
        suite: Option<Suite>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Suite {
    All,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Configuration file, or a manifest from an earlier run.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid size as `NR,NPHI` (or `NR` on intervals).
    #[arg(long, value_name = "NR,NPHI")]
    resolution: Option<String>,
    /// Decreasing ε values for the translator extrapolation.
    #[arg(long, value_name = "A,B,C")]
    eps_schedule: Option<String>,
    /// Seed for randomized initial data.
    #[arg(long)]
    seed: Option<u64>,
    /// Any other `key=value` override.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl RunArgs {
    fn overrides(&self) -> CliResult<Vec<(String, String)>> {
        let mut kv = Vec::new();
        if let Some(out) = &self.out {
            kv.push(("output.dir".to_string(), out.display().to_string()));
        }
        if let Some(res) = &self.resolution {
            let parts: Vec<&str> = res.split(',').map(str::trim).collect();
            match parts.as_slice() {
                [nr] => kv.push(("solver.grid_nr".into(), nr.to_string())),
                [nr, nphi] => {
                    kv.push(("solver.grid_nr".into(), nr.to_string()));
                    kv.push(("solver.grid_nphi".into(), nphi.to_string()));
                }
                _ => return Err(CliError::Usage(format!("--resolution expects NR,NPHI, got `{res}`"))),
            }
        }
        if let Some(eps) = &self.eps_schedule {
            kv.push(("solver.eps_schedule".into(), eps.clone()));
        }
        if let Some(seed) = self.seed {
            kv.push(("initial.seed".into(), seed.to_string()));
        }
        for s in &self.set {
            let Some((k, v)) = s.split_once('=') else {
                return Err(CliError::Usage(format!("--set expects KEY=VALUE, got `{s}`")));
            };
            kv.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(kv)
    }

    /// The file (if any) with command-line overrides written over it, so
    /// the manifest echoes exactly what ran.
    fn load(&self) -> CliResult<RunConfig> {
        let text = match &self.config {
            Some(path) => std::fs::read_to_string(path).map_err(CliError::io(path))?,
            None => String::new(),
        };
        let mut entries = parse_entries(&text)?;
        entries.extend(self.overrides()?);
        Ok(RunConfig::from_entries(entries)?)
    }
}

fn report(outcome: &Outcome) {
    for c in &outcome.certificates {
        println!("{:<28} {:<12} bound = {} measured = {}", c.name, c.status.to_string(), c.bound, c.measured);
    }
    println!("wrote {}", outcome.dir.display());
}

fn single(args: &RunArgs, body: fn(&RunConfig, &Path) -> CliResult<Outcome>, strict: bool) -> CliResult<()> {
    let cfg = args.load()?;
    let outcome = body(&cfg, Path::new(&cfg.out_dir))?;
    report(&outcome);
    match outcome.failures() {
        n if strict && n > 0 => Err(CliError::Certificates(n)),
        _ => Ok(()),
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Info(args) => {
            let (lines, failure) = run::info(&args.load()?)?;
            for l in lines {
                println!("{l}");
            }
            failure.map_or(Ok(()), |e| Err(e.into()))
        }
        Command::Simulate(args) => single(&args, run::simulate, false),
        Command::Dirichlet(args) => single(&args, run::dirichlet, false),
        Command::Translator(args) => single(&args, run::translator, false),
        Command::Verify { run: args, suite: None } => single(&args, run::verify, true),
        Command::Verify { run: args, suite: Some(Suite::All) } => {
            let mut overrides = args.overrides()?;
            let out = match overrides.iter().position(|(k, _)| k == "output.dir") {
                Some(i) => PathBuf::from(overrides.remove(i).1),
                None => PathBuf::from("out"),
            };
            let mut failures = 0;
            let mut first_error = None;
            for (name, result) in suite::run_all(&out, &overrides) {
                println!("== {name}");
                match result {
                    Ok(o) => {
                        report(&o);
                        failures += o.failures();
                    }
                    Err(e) => {
                        eprintln!("error: {name}: {e}");
                        first_error.get_or_insert(e);
                    }
                }
            }
            match (first_error, failures) {
                (Some(e), _) => Err(e),
                (None, 0) => Ok(()),
                (None, n) => Err(CliError::Certificates(n)),
            }
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
