//! Relaxation of the excited state under a Drude-Lorentz bath: HEOM against
//! bare and refined Bloch-Redfield generators.

use std::path::{Path, PathBuf};

use meanforce::bath::DrudeLorentzBath;
use meanforce::heom::{build_hierarchy, converge_depth, heom_steady_state};
use meanforce::master_eq::{build_refined, propagate, steady_state, Trajectory};
use meanforce::ode::OdeOptions;
use meanforce::operators::{c, gibbs_state, sigma_x, sigma_z, CMatrix, DensityMatrix, HermitianOperator};
use rayon::prelude::*;

use crate::config::{DynamicsMethod, DynamicsScenario};
use crate::error::CliError;
use crate::output::{fmt, output_path, write_csv};

pub const TRAJECTORY_HEADER: [&str; 7] = ["method", "reorg", "beta", "t", "population", "abs_coherence", "error"];

pub const SUMMARY_HEADER: [&str; 13] = [
    "method",
    "reorg",
    "beta",
    "steady_population",
    "steady_abs_coherence",
    "target_population",
    "target_abs_coherence",
    "steady_trace_distance_to_target",
    "integrated_trace_distance_to_heom",
    "max_trace_distance_to_heom",
    "min_eigenvalue",
    "heom_depth",
    "error",
];

/// `(eps/2) sigma_z` and `(sigma_z - sigma_x)/sqrt 2`.
pub fn qubit(eps: f64) -> (HermitianOperator, CMatrix) {
    let hs = HermitianOperator::from_real_diagonal(&[-0.5 * eps, 0.5 * eps]);
    let a = (sigma_z() - sigma_x()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    (hs, a)
}

#[derive(Clone, Debug)]
pub struct MethodRun {
    pub method: DynamicsMethod,
    pub reorg: f64,
    pub beta: f64,
    pub result: Result<MethodResult, String>,
}

#[derive(Clone, Debug)]
pub struct MethodResult {
    pub trajectory: Trajectory,
    pub steady: DensityMatrix,
    /// Stationary state the generator is designed to reach; none for HEOM.
    pub target: Option<DensityMatrix>,
    pub heom_depth: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct SummaryRow {
    pub method: DynamicsMethod,
    pub reorg: f64,
    pub beta: f64,
    pub steady_population: f64,
    pub steady_abs_coherence: f64,
    pub target_population: f64,
    pub target_abs_coherence: f64,
    pub steady_trace_distance_to_target: f64,
    pub integrated_trace_distance_to_heom: f64,
    pub max_trace_distance_to_heom: f64,
    pub min_eigenvalue: f64,
    pub heom_depth: Option<usize>,
    pub error: Option<String>,
}

fn run_heom(s: &DynamicsScenario, reorg: f64, beta: f64, opts: OdeOptions) -> Result<MethodResult, CliError> {
    let (hs, a) = qubit(s.eps);
    let v = HermitianOperator::new(a)?;
    let bath = DrudeLorentzBath::new(reorg, s.gamma)?;
    let rho0 = DensityMatrix::basis_state(2, 1);
    let (depth, trajectory) = converge_depth(
        |k| build_hierarchy(&hs, &v, &bath, beta, k),
        &rho0,
        &s.times,
        s.heom_tol,
        s.heom_max_depth,
        opts,
    )?;
    let steady = heom_steady_state(&build_hierarchy(&hs, &v, &bath, beta, depth)?)?;
    Ok(MethodResult {
        trajectory,
        steady,
        target: None,
        heom_depth: Some(depth),
    })
}

fn run_redfield(
    s: &DynamicsScenario,
    method: DynamicsMethod,
    reorg: f64,
    beta: f64,
    opts: OdeOptions,
) -> Result<MethodResult, CliError> {
    let DynamicsMethod::Redfield(mode, refinement) = method else {
        unreachable!("HEOM is handled separately")
    };
    let (hs, a) = qubit(s.eps);
    let bath = DrudeLorentzBath::new(reorg, s.gamma)?;
    let gen = build_refined(&hs, &[a], &bath, beta, mode, refinement)?;
    let trajectory = propagate(&gen, &DensityMatrix::basis_state(2, 1), &s.times, opts)?;
    Ok(MethodResult {
        trajectory,
        steady: steady_state(&gen)?,
        target: Some(gibbs_state(&gen.h_ref, beta)?),
        heom_depth: None,
    })
}

/// Every configured method at one `(reorg, beta)` point.
pub fn evaluate_point(s: &DynamicsScenario, reorg: f64, beta: f64) -> Vec<MethodRun> {
    let opts = OdeOptions::default();
    s.methods
        .iter()
        .map(|&method| {
            let result = match method {
                DynamicsMethod::Heom => run_heom(s, reorg, beta, opts),
                _ => run_redfield(s, method, reorg, beta, opts),
            };
            MethodRun {
                method,
                reorg,
                beta,
                result: result.map_err(|e| e.to_string()),
            }
        })
        .collect()
}

/// Runs in grid order: `reorg`, then `beta`, then method.
pub fn run(s: &DynamicsScenario) -> Vec<MethodRun> {
    let mut grid = Vec::new();
    for &reorg in &s.reorgs {
        for &beta in &s.betas {
            grid.push((reorg, beta));
        }
    }
    grid.par_iter()
        .map(|&(reorg, beta)| evaluate_point(s, reorg, beta))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn pop_coh(rho: &DensityMatrix) -> (f64, f64) {
    (rho.population(1), rho.coherence(0, 1).norm())
}

pub fn summarize(runs: &[MethodRun]) -> Vec<SummaryRow> {
    runs.iter()
        .map(|r| {
            let heom = runs
                .iter()
                .find(|h| h.method == DynamicsMethod::Heom && h.reorg == r.reorg && h.beta == r.beta)
                .and_then(|h| h.result.as_ref().ok());
            let mut row = SummaryRow {
                method: r.method,
                reorg: r.reorg,
                beta: r.beta,
                steady_population: f64::NAN,
                steady_abs_coherence: f64::NAN,
                target_population: f64::NAN,
                target_abs_coherence: f64::NAN,
                steady_trace_distance_to_target: f64::NAN,
                integrated_trace_distance_to_heom: f64::NAN,
                max_trace_distance_to_heom: f64::NAN,
                min_eigenvalue: f64::NAN,
                heom_depth: None,
                error: None,
            };
            match &r.result {
                Err(e) => row.error = Some(e.clone()),
                Ok(m) => {
                    (row.steady_population, row.steady_abs_coherence) = pop_coh(&m.steady);
                    if let Some(t) = &m.target {
                        (row.target_population, row.target_abs_coherence) = pop_coh(t);
                        row.steady_trace_distance_to_target = m.steady.trace_distance(t);
                    }
                    if let Some(h) = heom {
                        if let (Ok(i), Ok(x)) = (
                            m.trajectory.integrated_trace_distance(&h.trajectory),
                            m.trajectory.max_trace_distance(&h.trajectory),
                        ) {
                            row.integrated_trace_distance_to_heom = i;
                            row.max_trace_distance_to_heom = x;
                        }
                    }
                    row.min_eigenvalue = m.trajectory.min_eigenvalue();
                    row.heom_depth = m.heom_depth;
                    let lo = row.min_eigenvalue;
                    if lo < -1e-9 {
                        row.error = Some(format!("trajectory leaves the state space (eigenvalue {lo:.3e})"));
                    }
                }
            }
            row
        })
        .collect()
}

fn trajectory_records(runs: &[MethodRun]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for r in runs {
        let head = |t: f64, p: f64, q: f64, e: &str| {
            vec![r.method.name(), fmt(r.reorg), fmt(r.beta), fmt(t), fmt(p), fmt(q), e.to_string()]
        };
        match &r.result {
            Err(e) => out.push(head(f64::NAN, f64::NAN, f64::NAN, e)),
            Ok(m) => {
                let tr = &m.trajectory;
                for (t, rho) in tr.times.iter().zip(&tr.states) {
                    let (p, q) = pop_coh(rho);
                    out.push(head(*t, p, q, ""));
                }
            }
        }
    }
    out
}

fn summary_record(s: &SummaryRow) -> Vec<String> {
    vec![
        s.method.name(),
        fmt(s.reorg),
        fmt(s.beta),
        fmt(s.steady_population),
        fmt(s.steady_abs_coherence),
        fmt(s.target_population),
        fmt(s.target_abs_coherence),
        fmt(s.steady_trace_distance_to_target),
        fmt(s.integrated_trace_distance_to_heom),
        fmt(s.max_trace_distance_to_heom),
        fmt(s.min_eigenvalue),
        s.heom_depth.map(|k| k.to_string()).unwrap_or_default(),
        s.error.clone().unwrap_or_default(),
    ]
}

/// Writes `<name>_dynamics.csv` and `<name>_summary.csv`.
pub fn run_to_files(s: &DynamicsScenario, out: &Path) -> Result<(PathBuf, PathBuf, Vec<SummaryRow>), CliError> {
    let runs = run(s);
    let summary = summarize(&runs);
    let traj_path = output_path(out, &s.name, "dynamics.csv");
    let sum_path = output_path(out, &s.name, "summary.csv");
    write_csv(&traj_path, &TRAJECTORY_HEADER, trajectory_records(&runs))?;
    write_csv(&sum_path, &SUMMARY_HEADER, summary.iter().map(summary_record))?;
    Ok((traj_path, sum_path, summary))
}
