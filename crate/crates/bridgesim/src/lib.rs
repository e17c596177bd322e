//! Experiment runner, parameter sweeps and verification suites for the
//! bridging occupancy chain in `bridgesim-core`.

pub mod error;
pub mod experiment;
pub mod sweep;
pub mod verify;

use std::io::Write;

use bridgesim_core::oracle::{enumerate_omega, exact_distribution, state_records};

pub use error::{CliError, Result};
pub use experiment::{run_experiment, simulate, ExperimentConfig, ScentSpec, Summary};
pub use sweep::{run_sweep, SweepGrid, SweepRow};
pub use verify::{run_verify, Limits, Suite, VerifyReport};

pub const ENUMERATION_HEADER: [&str; 6] = ["index", "mask", "B", "S", "H", "pi"];

/// Writes every state of the configured lattice and cap with its energies and
/// exact Gibbs probability as CSV. Bit `i` of `mask` is domain site
/// `(i mod w, i / w + 1)`.
pub fn write_enumeration<W: Write>(config: &ExperimentConfig, out: W) -> Result<usize> {
    let dims = config.dims()?;
    let params = config.params()?;
    let scent = config.scent.build(dims.height())?;
    let space = enumerate_omega(dims, params.cap_n())?;
    if space.len() > experiment::max_states() {
        return Err(CliError::Config(format!(
            "{} states exceed BRIDGESIM_MAX_STATES = {}",
            space.len(),
            experiment::max_states()
        )));
    }
    let pi = exact_distribution(&space, &params, &scent)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ENUMERATION_HEADER)?;
    for r in state_records(&space, &params, &scent, &pi)? {
        w.write_record([
            r.index.to_string(),
            r.mask.to_string(),
            r.boundary.to_string(),
            r.scent.to_string(),
            r.hamiltonian.to_string(),
            r.probability.to_string(),
        ])?;
    }
    w.flush().map_err(error::CliError::io("enumeration output"))?;
    Ok(space.len())
}
