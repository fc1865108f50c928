//! Invariant battery run by `validate`.

use meanforce::bath::{DrudeLorentzBath, ThermalBath};
use meanforce::exact::{exact_solve, ExactOptions, SingleOscillatorModel};
use meanforce::heom::{build_hierarchy, propagate_heom};
use meanforce::master_eq::{
    build_refined, steady_state, Mode, Refinement, RedfieldGenerator, DETAILED_BALANCE_TOL,
};
use meanforce::mean_force::{hmf_exponential, hmf_high_temperature, mfg_weak, HighTVariant, Normalization};
use meanforce::ode::OdeOptions;
use meanforce::operators::{c, gibbs_state, trace, DensityMatrix, HermitianOperator};
use serde::Serialize;

use crate::dynamics::qubit;
use crate::error::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub passed: bool,
    pub failures: usize,
    pub checks: Vec<Check>,
}

type Outcome = Result<String, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn kms_detailed_balance() -> Outcome {
    let bath = DrudeLorentzBath::new(0.1, 0.5).map_err(err)?;
    let mut worst = 0.0f64;
    for beta in [0.5, 1.0] {
        for w in [0.5, 1.0, 2.0] {
            let up = bath.gamma(beta, w).map_err(err)?.re;
            let down = bath.gamma(beta, -w).map_err(err)?.re;
            worst = worst.max((down / up / (-beta * w).exp() - 1.0).abs());
        }
    }
    if worst < 1e-8 {
        Ok(format!("worst relative deviation {worst:.3e}"))
    } else {
        Err(format!("relative deviation {worst:.3e} exceeds 1e-8"))
    }
}

fn generator(mode: Mode, refinement: Refinement) -> Result<RedfieldGenerator, String> {
    let (hs, a) = qubit(1.0);
    let bath = DrudeLorentzBath::new(0.1, 0.5).map_err(err)?;
    build_refined(&hs, &[a], &bath, 1.0, mode, refinement).map_err(err)
}

fn redfield_invariants() -> Outcome {
    let mut n = 0;
    for mode in [Mode::Full, Mode::Secular] {
        for r in Refinement::ALL {
            generator(mode, r)?.check_invariants().map_err(|e| format!("{:?}/{}: {e}", mode, r.name()))?;
            n += 1;
        }
    }
    Ok(format!("{n} generators pass rate positivity, detailed balance and trace preservation"))
}

/// Perturbs one upward rate by 1% and expects detailed balance to flag it.
pub fn mutated_rate_is_detected(relative: f64) -> Outcome {
    let mut gen = generator(Mode::Secular, Refinement::Bare)?;
    let k = gen
        .bohr
        .frequencies
        .iter()
        .position(|&w| w > 0.0)
        .ok_or("no positive Bohr frequency")?;
    gen.rates[k][k] *= c(1.0 + relative, 0.0);
    let db = gen.detailed_balance_violation();
    match gen.check_invariants() {
        Err(_) if db > DETAILED_BALANCE_TOL => Ok(format!("violation {db:.3e} detected")),
        _ => Err(format!("mutation of {relative} went unnoticed (violation {db:.3e})")),
    }
}

fn secular_steady_states() -> Outcome {
    let mut worst = 0.0f64;
    for r in Refinement::ALL {
        let gen = generator(Mode::Secular, r)?;
        let ss = steady_state(&gen).map_err(err)?;
        let target = gibbs_state(&gen.h_ref, gen.beta).map_err(err)?;
        worst = worst.max(ss.trace_distance(&target));
    }
    if worst < 1e-8 {
        Ok(format!("worst trace distance to exp(-beta H)/Z {worst:.3e}"))
    } else {
        Err(format!("steady state off its target by {worst:.3e}"))
    }
}

fn weak_coupling_limit() -> Outcome {
    let lambda = 1e-2;
    let m = SingleOscillatorModel::new(1.0, 1.5, 1.0, lambda, 2).map_err(err)?;
    let exact = exact_solve(&m, 1.0, ExactOptions::default()).map_err(err)?;
    let bath = m.bath().map_err(err)?;
    let weak = mfg_weak(
        &m.system_hamiltonian(),
        &[m.coupling_operator()],
        &bath,
        1.0,
        lambda,
        Normalization::Trace,
    )
    .map_err(err)?;
    let d = weak.trace_distance(&exact.rho);
    if d < 1e-6 {
        Ok(format!("trace distance {d:.3e} at lambda = {lambda}"))
    } else {
        Err(format!("trace distance {d:.3e} at lambda = {lambda}"))
    }
}

fn exponential_spectrum() -> Outcome {
    let m = SingleOscillatorModel::new(1.0, 1.5, 1.0, 0.3, 2).map_err(err)?;
    let f = hmf_exponential(&m.system_hamiltonian(), &[m.coupling_operator()], &m.bath().map_err(err)?, 1.0, 0.3)
        .map_err(err)?;
    let dev = f
        .h_mf
        .eigenvalues()
        .iter()
        .zip(f.hs_prime.eigenvalues())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if dev < 1e-12 {
        Ok(format!("eigenvalue deviation {dev:.3e}"))
    } else {
        Err(format!("eigenvalue deviation {dev:.3e}"))
    }
}

fn ultrastrong_pointer_basis() -> Outcome {
    let (hs, a) = qubit(1.0);
    let bath = DrudeLorentzBath::new(30.0, 0.5).map_err(err)?;
    let h = hmf_high_temperature(&hs, std::slice::from_ref(&a), &bath.reorg_moments(), 1.0, HighTVariant::SingleCoupling)
        .map_err(err)?
        .h_mf;
    let pointer = meanforce::operators::Eigh::new(&a);
    let rotated = pointer.to_eigenbasis(h.matrix());
    let off = rotated[(0, 1)].norm();
    let bound = 1e-8 * hs.spectral_norm();
    if off < bound {
        Ok(format!("off-diagonal {off:.3e} in the pointer basis"))
    } else {
        Err(format!("off-diagonal {off:.3e} exceeds {bound:.1e}"))
    }
}

fn heom_trace() -> Outcome {
    let (hs, a) = qubit(1.0);
    let v = HermitianOperator::new(a).map_err(err)?;
    let bath = DrudeLorentzBath::new(0.1, 0.5).map_err(err)?;
    let h = build_hierarchy(&hs, &v, &bath, 1.0, 6).map_err(err)?;
    let times: Vec<f64> = (0..=20).map(|k| k as f64).collect();
    let traj = propagate_heom(&h, &DensityMatrix::basis_state(2, 1), &times, OdeOptions::default()).map_err(err)?;
    let dev = traj
        .states
        .iter()
        .map(|s| (trace(s.matrix()) - c(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    if dev < 1e-8 {
        Ok(format!("trace deviation {dev:.3e}"))
    } else {
        Err(format!("trace deviation {dev:.3e}"))
    }
}

pub fn run_checks() -> Report {
    let table: [(&'static str, fn() -> Outcome); 8] = [
        ("kms_detailed_balance", kms_detailed_balance),
        ("redfield_invariants", redfield_invariants),
        ("injected_rate_mutation_detected", || mutated_rate_is_detected(0.01)),
        ("secular_steady_states", secular_steady_states),
        ("weak_coupling_limit", weak_coupling_limit),
        ("exponential_spectrum", exponential_spectrum),
        ("ultrastrong_pointer_basis", ultrastrong_pointer_basis),
        ("heom_trace", heom_trace),
    ];
    let checks: Vec<Check> = table
        .iter()
        .map(|&(name, f)| {
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            Check { name, passed, detail }
        })
        .collect();
    let failures = checks.iter().filter(|c| !c.passed).count();
    Report {
        passed: failures == 0,
        failures,
        checks,
    }
}

/// Writes the report and fails with the number of failed checks.
pub fn run_to_file(path: &std::path::Path) -> Result<Report, CliError> {
    let report = run_checks();
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(path, json)?;
    Ok(report)
}
