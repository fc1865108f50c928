//! Scenario runner for the mean-force library: equilibrium sweeps, dynamics
//! comparisons, H_MF inspection, the validation battery and SVG plots.

pub mod config;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod hmf;
pub mod output;
pub mod plot;
pub mod validate;

pub use error::CliError;

/// Runs `f` on a pool of `jobs` workers (all cores when `None`). With more
/// than one worker BLAS is kept single-threaded so the two don't compete.
pub fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    if jobs == Some(0) {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    if pool.current_num_threads() > 1 {
        meanforce::operators::set_blas_threads(1);
    }
    Ok(pool.install(f))
}
