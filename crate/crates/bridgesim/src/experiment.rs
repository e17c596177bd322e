use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use bridgesim_core::chain::stream_rng;
use bridgesim_core::layerseq::thresholds;
use bridgesim_core::observables::{render, RenderFormat};
use bridgesim_core::oracle::{empirical_distribution, enumerate_omega, exact_distribution, total_variation};
use bridgesim_core::{
    AcceptanceMode, Chain, ChainParams, Configuration, Convention, LatticeDims, ScentFunction, Schedule,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const TIMESERIES_HEADER: [&str; 8] = [
    "step",
    "particles",
    "boundary",
    "scent",
    "hamiltonian",
    "nb",
    "mb_eps",
    "bridge_count",
];

/// Largest state space compared against the exact measure unless
/// `BRIDGESIM_MAX_STATES` says otherwise.
pub const DEFAULT_MAX_STATES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    ExactGibbs,
    PaperLiteral,
}

impl From<Mode> for AcceptanceMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::ExactGibbs => AcceptanceMode::ExactGibbs,
            Mode::PaperLiteral => AcceptanceMode::PaperLiteral,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ConventionArg {
    #[default]
    LambdaOnly,
    LambdaBar,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::LambdaOnly => Convention::LambdaOnly,
            ConventionArg::LambdaBar => Convention::LambdaBar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ScentKindArg {
    Power,
    #[default]
    Linear,
    Reciprocal,
    Zero,
}

/// Scent family, exponent and column sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScentSpec {
    pub kind: ScentKindArg,
    pub k: f64,
    pub phi: f64,
    /// Scale so the column sum equals `phi`; otherwise the raw family with
    /// unit prefactor.
    pub normalized: bool,
}

impl Default for ScentSpec {
    fn default() -> Self {
        ScentSpec {
            kind: ScentKindArg::Linear,
            k: 1.0,
            phi: 1.0,
            normalized: true,
        }
    }
}

impl ScentSpec {
    pub fn build(&self, h: usize) -> Result<ScentFunction> {
        let f = match (self.kind, self.normalized) {
            (ScentKindArg::Zero, _) => ScentFunction::zero(h),
            (ScentKindArg::Linear, true) => ScentFunction::linear(h, self.phi),
            (ScentKindArg::Linear, false) => ScentFunction::power_unnormalized(h, 1.0),
            (ScentKindArg::Power, true) => ScentFunction::power(h, self.k, self.phi),
            (ScentKindArg::Power, false) => ScentFunction::power_unnormalized(h, self.k),
            (ScentKindArg::Reciprocal, true) => ScentFunction::reciprocal(h, self.k, self.phi),
            (ScentKindArg::Reciprocal, false) => ScentFunction::reciprocal_unnormalized(h, self.k),
        };
        Ok(f?)
    }
}

fn default_sample_every() -> u64 {
    1
}

fn default_recheck_every() -> u64 {
    10_000
}

fn default_epsilon() -> f64 {
    0.3
}

/// One simulation, as read from a JSON file or assembled from flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub width: usize,
    pub height: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    pub beta: f64,
    pub eta: f64,
    #[serde(default)]
    pub scent: ScentSpec,
    pub steps: u64,
    /// Defaults to half the run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<u64>,
    #[serde(default = "default_sample_every")]
    pub sample_every: u64,
    #[serde(default = "default_recheck_every")]
    pub recheck_every: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub convention: ConventionArg,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Compare the sampled states with the exact Gibbs vector.
    #[serde(default)]
    pub oracle_compare: bool,
}

impl ExperimentConfig {
    pub fn new(width: usize, height: usize, n: usize, beta: f64, eta: f64, steps: u64) -> Self {
        ExperimentConfig {
            width,
            height,
            n: Some(n),
            rho: None,
            beta,
            eta,
            scent: ScentSpec::default(),
            steps,
            burn_in: None,
            sample_every: 1,
            recheck_every: default_recheck_every(),
            seed: 0,
            mode: Mode::default(),
            convention: ConventionArg::default(),
            epsilon: default_epsilon(),
            output_dir: None,
            oracle_compare: false,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn dims(&self) -> Result<LatticeDims> {
        Ok(LatticeDims::new(self.width, self.height)?)
    }

    pub fn burn_in(&self) -> u64 {
        self.burn_in.unwrap_or(self.steps / 2)
    }

    pub fn schedule(&self) -> Schedule {
        Schedule {
            steps: self.steps,
            burn_in: self.burn_in(),
            sample_every: self.sample_every,
            recheck_every: self.recheck_every,
            epsilon: self.epsilon,
        }
    }

    /// Density `n / h²`, either given or implied by the cap.
    pub fn density(&self) -> f64 {
        match (self.rho, self.n) {
            (Some(rho), _) => rho,
            (None, Some(n)) => n as f64 / (self.height * self.height) as f64,
            (None, None) => f64::NAN,
        }
    }

    pub fn params(&self) -> Result<ChainParams> {
        let dims = self.dims()?;
        let p = match (self.n, self.rho) {
            (Some(n), None) => ChainParams::new(self.beta, self.eta, n)?,
            (None, Some(rho)) => ChainParams::from_density(self.beta, self.eta, rho, dims)?,
            _ => return Err(CliError::Config("give exactly one of n and rho".into())),
        };
        Ok(p.with_mode(self.mode.into())
            .with_convention(self.convention.into())
            .with_seed(self.seed))
    }

    pub fn validate(&self) -> Result<()> {
        let dims = self.dims()?;
        self.params()?;
        self.scent.build(dims.height())?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) || self.epsilon * (self.height as f64) < 1.0 - 1e-9 {
            return Err(CliError::Config(format!(
                "epsilon = {} gives a window below one layer at height {}",
                self.epsilon, self.height
            )));
        }
        if self.sample_every == 0 || self.recheck_every == 0 {
            return Err(CliError::Config(
                "sample_every and recheck_every must be positive".into(),
            ));
        }
        if self.burn_in() > self.steps {
            return Err(CliError::Config(format!(
                "burn_in {} exceeds steps {}",
                self.burn_in(),
                self.steps
            )));
        }
        Ok(())
    }
}

/// Threshold constants at the run's density and aspect ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSummary {
    pub rho: f64,
    pub alpha: f64,
    pub phi: f64,
    pub beta: f64,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub hypothesis_holds: bool,
}

impl ThresholdSummary {
    fn new(rho: f64, alpha: f64, phi: f64, beta: f64) -> Self {
        let t = thresholds(rho, alpha, phi, beta).ok();
        ThresholdSummary {
            rho,
            alpha,
            phi,
            beta,
            beta1: t.map(|t| t.beta1),
            beta2: t.map(|t| t.beta2),
            eta1: t.map(|t| t.eta1),
            eta2: t.map(|t| t.eta2),
            hypothesis_holds: t.is_some_and(|t| t.hypothesis_holds),
        }
    }
}

/// Averages over the sampled states of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub seed: u64,
    pub samples: u64,
    pub nb_fraction: f64,
    pub mb_fraction: f64,
    pub mean_bridge_count: f64,
    #[serde(rename = "mean_H")]
    pub mean_h: f64,
    pub mean_particles: f64,
    pub mean_boundary: f64,
    pub final_particles: usize,
    pub thresholds: ThresholdSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_distance: Option<f64>,
}

#[derive(Default)]
struct Tally {
    samples: u64,
    nb: u64,
    mb: u64,
    bridges: f64,
    h: f64,
    particles: f64,
    boundary: f64,
}

/// Result of [`simulate`]: the summary and the final state.
pub struct Outcome {
    pub summary: Summary,
    pub final_config: Configuration,
}

/// Cap on enumerated states for oracle comparisons.
pub fn max_states() -> usize {
    std::env::var("BRIDGESIM_MAX_STATES")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_STATES)
}

/// Runs the chain of `config` from the empty configuration on stream
/// `(cell, replica)` of the seed, passing every sample row to `on_row`.
pub fn simulate<F>(config: &ExperimentConfig, cell: u32, replica: u32, mut on_row: F) -> Result<Outcome>
where
    F: FnMut(&bridgesim_core::chain::Sample) -> Result<()>,
{
    config.validate()?;
    let dims = config.dims()?;
    let params = config.params()?;
    let scent = config.scent.build(dims.height())?;
    let space = if config.oracle_compare {
        let space = enumerate_omega(dims, params.cap_n())?;
        if space.len() > max_states() {
            return Err(CliError::Config(format!(
                "{} states exceed BRIDGESIM_MAX_STATES = {}",
                space.len(),
                max_states()
            )));
        }
        Some(space)
    } else {
        None
    };
    let rng = stream_rng(config.seed, cell, replica);
    let mut chain = Chain::with_rng(Configuration::empty(dims, params.cap_n()), params, scent.clone(), rng)?;
    let mut tally = Tally::default();
    let mut masks = Vec::new();
    let mut row_error = None;
    chain.run_with(&config.schedule(), |s, cfg| {
        tally.samples += 1;
        tally.nb += u64::from(s.nb);
        tally.mb += u64::from(s.mb_eps);
        tally.bridges += s.bridge_count as f64;
        tally.h += s.hamiltonian;
        tally.particles += s.particles as f64;
        tally.boundary += s.boundary as f64;
        if space.is_some() {
            masks.push(cfg.mask().expect("enumerable lattices fit a mask"));
        }
        if row_error.is_none() {
            row_error = on_row(s).err();
        }
    })?;
    if let Some(e) = row_error {
        return Err(e);
    }
    let tv_distance = match &space {
        Some(space) => {
            let empirical = empirical_distribution(space, masks)?;
            let exact = exact_distribution(space, &params, &scent)?;
            Some(total_variation(&empirical, &exact.probs))
        }
        None => None,
    };
    let k = tally.samples.max(1) as f64;
    let final_config = chain.into_config();
    let summary = Summary {
        seed: config.seed,
        samples: tally.samples,
        nb_fraction: tally.nb as f64 / k,
        mb_fraction: tally.mb as f64 / k,
        mean_bridge_count: tally.bridges / k,
        mean_h: tally.h / k,
        mean_particles: tally.particles / k,
        mean_boundary: tally.boundary / k,
        final_particles: final_config.len(),
        thresholds: ThresholdSummary::new(config.density(), dims.aspect_ratio().as_f64(), scent.phi(), config.beta),
        tv_distance,
    };
    Ok(Outcome { summary, final_config })
}

fn write_dump(dir: &Path, err: &CliError) {
    if let CliError::Core(bridgesim_core::Error::InvariantViolation { step, reason, dump }) = err {
        let _ = fs::create_dir_all(dir);
        let _ = fs::write(dir.join("violation.txt"), format!("step {step}: {reason}\n{dump}"));
    }
}

/// Runs `config` and writes `timeseries.csv`, `summary.json` and the final
/// state under `snapshots/` into `out`. An invariant violation leaves
/// `snapshots/violation.txt` behind.
pub fn run_experiment(config: &ExperimentConfig, out: &Path) -> Result<Summary> {
    config.validate()?;
    fs::create_dir_all(out.join("snapshots")).map_err(CliError::io(out))?;
    let ts_path = out.join("timeseries.csv");
    let file = File::create(&ts_path).map_err(CliError::io(&ts_path))?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));
    writer.write_record(TIMESERIES_HEADER)?;
    let result = simulate(config, 0, 0, |s| {
        writer.write_record([
            s.step.to_string(),
            s.particles.to_string(),
            s.boundary.to_string(),
            s.scent.to_string(),
            s.hamiltonian.to_string(),
            u8::from(s.nb).to_string(),
            u8::from(s.mb_eps).to_string(),
            s.bridge_count.to_string(),
        ])?;
        Ok(())
    });
    writer.flush().map_err(CliError::io(&ts_path))?;
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            write_dump(&out.join("snapshots"), &e);
            return Err(e);
        }
    };
    let snap = out.join("snapshots");
    for (name, fmt) in [("final.txt", RenderFormat::Ascii), ("final.svg", RenderFormat::Svg)] {
        let path = snap.join(name);
        fs::write(&path, render(&outcome.final_config, fmt)).map_err(CliError::io(&path))?;
    }
    let path = out.join("summary.json");
    let mut f = BufWriter::new(File::create(&path).map_err(CliError::io(&path))?);
    serde_json::to_writer_pretty(&mut f, &outcome.summary)?;
    writeln!(f).and_then(|_| f.flush()).map_err(CliError::io(&path))?;
    Ok(outcome.summary)
}
