use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bridgesim::experiment::{ConventionArg, Mode, ScentKindArg};
use bridgesim::{
    run_experiment, run_sweep, run_verify, write_enumeration, CliError, ExperimentConfig, Limits, Result, Suite,
    SweepGrid,
};
use bridgesim_core::config::parse_ascii;
use bridgesim_core::observables::{render, RenderFormat};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "bridgesim",
    version,
    about = "Simulate and verify the bridging occupancy chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one chain from the empty state and write its artifacts.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report the total-variation distance to the exact measure.
        #[arg(long)]
        oracle_compare: bool,
    },
    /// Run a (beta, eta) grid of replicas into one CSV.
    Sweep {
        /// JSON sweep grid; the flags below override its base experiment.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        betas: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        etas: Vec<f64>,
        #[arg(long)]
        replicas: Option<u32>,
        #[command(flatten)]
        run: RunArgs,
        /// Sweep CSV path.
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
    /// Run property suites against the exact oracles.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
        /// Print the JSON report instead of the summary.
        #[arg(long)]
        json: bool,
        /// Also write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Dump every state with B, S, H and its Gibbs probability as CSV.
    Enumerate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert an ASCII snapshot to SVG or back to ASCII.
    Render {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "svg")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ascii,
    Svg,
}

/// Experiment fields; each overrides the `--config` file.
#[derive(Args, Default)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    #[arg(long, conflicts_with = "n")]
    rho: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, value_enum)]
    scent: Option<ScentKindArg>,
    #[arg(long)]
    scent_k: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    burn_in: Option<u64>,
    #[arg(long)]
    sample_every: Option<u64>,
    #[arg(long)]
    recheck_every: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    #[arg(long)]
    epsilon: Option<f64>,
}

impl RunArgs {
    fn resolve(&self, base: Option<ExperimentConfig>, need_steps: bool) -> Result<ExperimentConfig> {
        let base = match (&self.config, base) {
            (Some(path), _) => Some(ExperimentConfig::from_json_file(path)?),
            (None, b) => b,
        };
        let missing = |name: &str| CliError::Config(format!("--{name} is required without --config"));
        let mut c = match base {
            Some(c) => c,
            None => {
                let mut c = ExperimentConfig::new(
                    self.width.ok_or_else(|| missing("width"))?,
                    self.height.ok_or_else(|| missing("height"))?,
                    0,
                    self.beta.ok_or_else(|| missing("beta"))?,
                    self.eta.ok_or_else(|| missing("eta"))?,
                    if need_steps {
                        self.steps.ok_or_else(|| missing("steps"))?
                    } else {
                        0
                    },
                );
                c.n = None;
                c
            }
        };
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $target = v; })*
            };
        }
        set!(width => c.width, height => c.height, beta => c.beta, eta => c.eta, steps => c.steps,
             sample_every => c.sample_every, recheck_every => c.recheck_every, seed => c.seed,
             mode => c.mode, convention => c.convention, epsilon => c.epsilon,
             scent => c.scent.kind, scent_k => c.scent.k, phi => c.scent.phi);
        if let Some(b) = self.burn_in {
            c.burn_in = Some(b);
        }
        if let Some(n) = self.n {
            c.n = Some(n);
            c.rho = None;
        }
        if let Some(rho) = self.rho {
            c.rho = Some(rho);
            c.n = None;
        }
        if c.n.is_none() && c.rho.is_none() {
            return Err(CliError::Config("give --n or --rho".into()));
        }
        Ok(c)
    }
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.clone(),
            source,
        }),
        None => io::stdout().write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "stdout".into(),
            source,
        }),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            run,
            out,
            oracle_compare,
        } => {
            let mut cfg = run.resolve(None, true)?;
            cfg.oracle_compare |= oracle_compare;
            if out.is_some() {
                cfg.output_dir = out;
            }
            let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("run"));
            let summary = run_experiment(&cfg, &dir)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Sweep {
            grid,
            betas,
            etas,
            replicas,
            run,
            out,
        } => {
            let mut g = match grid {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|source| CliError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    serde_json::from_str::<SweepGrid>(&text)
                        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
                }
                None => SweepGrid {
                    beta_values: Vec::new(),
                    eta_values: Vec::new(),
                    replicas: 1,
                    base: run.resolve(None, true)?,
                },
            };
            g.base = run.resolve(Some(g.base.clone()), true)?;
            if !betas.is_empty() {
                g.beta_values = betas;
            }
            if !etas.is_empty() {
                g.eta_values = etas;
            }
            if let Some(r) = replicas {
                g.replicas = r;
            }
            let rows = run_sweep(&g, &out)?;
            eprintln!("{} rows in {}", rows.len(), out.display());
        }
        Command::Verify {
            suite,
            json,
            report,
            cases,
            samples,
            steps,
            seed,
        } => {
            let mut limits = Limits::default();
            limits.cases = cases.unwrap_or(limits.cases);
            limits.samples = samples.unwrap_or(limits.samples);
            limits.chain_steps = steps.unwrap_or(limits.chain_steps);
            limits.seed = seed.unwrap_or(limits.seed);
            let r = run_verify(suite, &limits)?;
            let text = serde_json::to_string_pretty(&r)?;
            if let Some(p) = &report {
                fs::write(p, &text).map_err(|source| CliError::Io {
                    path: p.clone(),
                    source,
                })?;
            }
            if json {
                println!("{text}");
            } else {
                print!("{}", r.human());
            }
            if !r.pass {
                return Err(CliError::Verification(r.first_counterexample.unwrap_or_default()));
            }
        }
        Command::Enumerate { run, out } => {
            let cfg = run.resolve(None, false)?;
            match &out {
                Some(p) => {
                    let f = fs::File::create(p).map_err(|source| CliError::Io {
                        path: p.clone(),
                        source,
                    })?;
                    write_enumeration(&cfg, io::BufWriter::new(f))?;
                }
                None => {
                    write_enumeration(&cfg, io::stdout().lock())?;
                }
            }
        }
        Command::Render { input, format, out } => {
            let text = fs::read_to_string(&input).map_err(|source| CliError::Io {
                path: input.clone(),
                source,
            })?;
            let cfg = parse_ascii(&text, usize::MAX)?;
            let fmt = match format {
                Format::Ascii => RenderFormat::Ascii,
                Format::Svg => RenderFormat::Svg,
            };
            write_out(out.as_ref(), &render(&cfg, fmt))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
