//! Equilibrium sweeps over the single-oscillator model.

use meanforce::bath::{DiscreteBath, ReorgMoments, ThermalBath};
use meanforce::exact::{exact_solve, ExactOptions, SingleOscillatorModel};
use meanforce::mean_force::{
    hmf_exponential, hmf_from_reduced_numerator, hmf_high_temperature, hmf_weak_operator, mfg_weak,
    mfg_weak_numerator, state_from_hmf, HighTVariant, Normalization,
};
use meanforce::operators::{c, gibbs_state, CMatrix, DensityMatrix, HermitianOperator};
use rayon::prelude::*;

use crate::config::{EquilibriumMethod, EquilibriumScenario};
use crate::error::CliError;
use crate::output::{fmt, output_path, write_csv};

pub const HEADER: [&str; 8] = [
    "method",
    "lambda",
    "beta",
    "omega",
    "population",
    "abs_coherence",
    "trace_distance_to_exact",
    "error",
];

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumRow {
    pub method: EquilibriumMethod,
    pub lambda: f64,
    pub beta: f64,
    pub omega: f64,
    pub population: f64,
    pub abs_coherence: f64,
    pub trace_distance_to_exact: f64,
    pub error: Option<String>,
}

impl EquilibriumRow {
    fn record(&self) -> Vec<String> {
        vec![
            self.method.name().to_string(),
            fmt(self.lambda),
            fmt(self.beta),
            fmt(self.omega),
            fmt(self.population),
            fmt(self.abs_coherence),
            fmt(self.trace_distance_to_exact),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// One `(omega, beta, lambda)` grid point.
#[derive(Clone, Copy, Debug)]
pub struct Point {
    pub eps: f64,
    pub g: f64,
    pub omega: f64,
    pub beta: f64,
    pub lambda: f64,
}

impl Point {
    pub fn model(&self) -> Result<SingleOscillatorModel, CliError> {
        Ok(SingleOscillatorModel::new(self.eps, self.omega, self.g, self.lambda, 2)?)
    }

    fn pieces(&self) -> Result<(SingleOscillatorModel, HermitianOperator, Vec<CMatrix>, DiscreteBath), CliError> {
        let m = self.model()?;
        Ok((m, m.system_hamiltonian(), vec![m.coupling_operator()], m.bath()?))
    }
}

/// Bath moments of `lambda * g` coupling. Scaling the moments rather than
/// the coupling operator keeps the operator spectrum intact at `lambda = 0`.
fn scaled_moments(bath: &DiscreteBath, lambda: f64) -> ReorgMoments {
    let m = bath.reorg_moments();
    let s = c(lambda * lambda, 0.0);
    ReorgMoments {
        reorg: m.reorg * s,
        first_moment: m.first_moment * s,
    }
}

/// Hamiltonian of mean force for an approximation. `mfg_weak` is
/// represented by `-log` of its normalised state; `exact` needs `opts`.
pub fn hmf(method: EquilibriumMethod, p: &Point, opts: ExactOptions) -> Result<HermitianOperator, CliError> {
    let (m, hs, a, bath) = p.pieces()?;
    let h = match method {
        EquilibriumMethod::Exact => exact_solve(&m, p.beta, opts)?.hmf,
        EquilibriumMethod::MfgWeak => {
            let num = mfg_weak_numerator(&hs, &a, &bath, p.beta, p.lambda)?;
            hmf_from_reduced_numerator(num.matrix(), p.beta)?
        }
        EquilibriumMethod::HmfWeak => hmf_weak_operator(&hs, &a, &bath, p.beta, p.lambda)?,
        EquilibriumMethod::HmfExponential => hmf_exponential(&hs, &a, &bath, p.beta, p.lambda)?.h_mf,
        EquilibriumMethod::HmfHighT => {
            let moments = scaled_moments(&bath, p.lambda);
            hmf_high_temperature(&hs, &a, &moments, p.beta, HighTVariant::SingleCoupling)?.h_mf
        }
        EquilibriumMethod::BareGibbs => hs,
    };
    Ok(h)
}

/// Reduced state predicted by an approximation.
pub fn state(method: EquilibriumMethod, p: &Point, opts: ExactOptions) -> Result<DensityMatrix, CliError> {
    let (m, hs, a, bath) = p.pieces()?;
    match method {
        EquilibriumMethod::Exact => Ok(exact_solve(&m, p.beta, opts)?.rho),
        EquilibriumMethod::MfgWeak => Ok(mfg_weak(&hs, &a, &bath, p.beta, p.lambda, Normalization::Trace)?),
        EquilibriumMethod::BareGibbs => Ok(gibbs_state(&hs, p.beta)?),
        other => Ok(state_from_hmf(&hmf(other, p, opts)?, p.beta)?),
    }
}

fn row(method: EquilibriumMethod, p: &Point, rho: &Result<DensityMatrix, CliError>, exact: Option<&DensityMatrix>) -> EquilibriumRow {
    let mut r = EquilibriumRow {
        method,
        lambda: p.lambda,
        beta: p.beta,
        omega: p.omega,
        population: f64::NAN,
        abs_coherence: f64::NAN,
        trace_distance_to_exact: f64::NAN,
        error: None,
    };
    match rho {
        Ok(rho) => {
            r.population = rho.population(1);
            r.abs_coherence = rho.coherence(0, 1).norm();
            if let Some(e) = exact {
                r.trace_distance_to_exact = rho.trace_distance(e);
            }
        }
        Err(e) => r.error = Some(e.to_string()),
    }
    r
}

/// Every method at one grid point, in the configured method order.
pub fn evaluate_point(p: &Point, methods: &[EquilibriumMethod], opts: ExactOptions) -> Vec<EquilibriumRow> {
    let exact = state(EquilibriumMethod::Exact, p, opts);
    let exact_ok = exact.as_ref().ok();
    methods
        .iter()
        .map(|&m| {
            if m == EquilibriumMethod::Exact {
                row(m, p, &exact, exact_ok)
            } else {
                row(m, p, &state(m, p, opts), exact_ok)
            }
        })
        .collect()
}

/// Grid points in emission order: `omega`, then `beta`, then `lambda`.
pub fn points(s: &EquilibriumScenario) -> Vec<Point> {
    let mut out = Vec::new();
    for &omega in &s.omegas {
        for &beta in &s.betas {
            for &lambda in &s.lambdas {
                out.push(Point {
                    eps: s.eps,
                    g: s.g,
                    omega,
                    beta,
                    lambda,
                });
            }
        }
    }
    out
}

pub fn exact_options(s: &EquilibriumScenario) -> ExactOptions {
    ExactOptions {
        tol: s.exact_tol,
        n_max: s.exact_max_levels,
    }
}

/// Rows in grid order regardless of which worker finished first.
pub fn run(s: &EquilibriumScenario) -> Vec<EquilibriumRow> {
    let opts = exact_options(s);
    points(s)
        .par_iter()
        .map(|p| evaluate_point(p, &s.methods, opts))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn write(rows: &[EquilibriumRow], path: &std::path::Path) -> Result<(), CliError> {
    write_csv(path, &HEADER, rows.iter().map(EquilibriumRow::record))
}

/// Runs the sweep and writes `<out>/<name>_equilibrium.csv`.
pub fn run_to_file(s: &EquilibriumScenario, out: &std::path::Path) -> Result<(std::path::PathBuf, Vec<EquilibriumRow>), CliError> {
    let rows = run(s);
    let path = output_path(out, &s.name, "equilibrium.csv");
    write(&rows, &path)?;
    Ok((path, rows))
}
