//! Hamiltonians of mean force per approximation, as JSON.

use meanforce::bath::DrudeLorentzBath;
use meanforce::master_eq::{reference_hamiltonian, Refinement};
use meanforce::operators::HermitianOperator;
use serde::Serialize;

use crate::config::{ModelConfig, ScenarioConfig};
use crate::dynamics::qubit;
use crate::equilibrium::{self, Point};
use crate::error::CliError;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&HermitianOperator> for MatrixJson {
    fn from(h: &HermitianOperator) -> Self {
        let m = h.matrix();
        let grab = |f: fn(&meanforce::operators::C64) -> f64| {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        MatrixJson {
            re: grab(|z| z.re),
            im: grab(|z| z.im),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HmfEntry {
    pub method: String,
    /// Grid coordinates of the entry; `omega`/`lambda` for the oscillator,
    /// `reorg` for Drude-Lorentz.
    pub parameters: std::collections::BTreeMap<&'static str, f64>,
    pub h_mf: Option<MatrixJson>,
    pub eigenvalues: Option<Vec<f64>>,
    pub error: Option<String>,
}

fn entry(method: String, parameters: Vec<(&'static str, f64)>, h: Result<HermitianOperator, CliError>) -> HmfEntry {
    let (h_mf, eigenvalues, error) = match h {
        Ok(h) => (Some(MatrixJson::from(&h)), Some(h.eigenvalues()), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    HmfEntry {
        method,
        parameters: parameters.into_iter().collect(),
        h_mf,
        eigenvalues,
        error,
    }
}

pub fn run(cfg: &ScenarioConfig, tol: Option<f64>) -> Result<Vec<HmfEntry>, CliError> {
    match cfg.model {
        ModelConfig::SingleOscillator { .. } => {
            let s = cfg.equilibrium(tol)?;
            let opts = equilibrium::exact_options(&s);
            let mut out = Vec::new();
            for p in equilibrium::points(&s) {
                let Point { omega, beta, lambda, .. } = p;
                for &m in &s.methods {
                    let params = vec![("omega", omega), ("beta", beta), ("lambda", lambda)];
                    out.push(entry(m.name().to_string(), params, equilibrium::hmf(m, &p, opts)));
                }
            }
            Ok(out)
        }
        ModelConfig::DrudeLorentz { eps, gamma, ref reorg } => {
            if cfg.dynamics.is_none() {
                return Err(CliError::Config("missing [dynamics] section".into()));
            }
            let s = cfg.dynamics(tol)?;
            let (hs, a) = qubit(eps);
            let mut out = Vec::new();
            for r in reorg.values() {
                for &beta in &s.betas {
                    for refinement in Refinement::ALL {
                        let h = DrudeLorentzBath::new(r, gamma)
                            .and_then(|bath| reference_hamiltonian(&hs, std::slice::from_ref(&a), &bath, beta, refinement))
                            .map_err(CliError::from);
                        out.push(entry(refinement.name().to_string(), vec![("reorg", r), ("beta", beta)], h));
                    }
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_entry_is_system_hamiltonian() {
        let cfg = ScenarioConfig::parse(
            r#"
            name = "h"
            [model]
            kind = "single_oscillator"
            omega = [1.5]
            [equilibrium]
            lambda = [0.0, 0.3]
            beta = [1.0]
            methods = ["bare_gibbs", "hmf_weak", "hmf_exponential"]
            "#,
        )
        .unwrap();
        let entries = run(&cfg, None).unwrap();
        assert_eq!(entries.len(), 6);
        let bare = &entries[0];
        assert_eq!(bare.method, "bare_gibbs");
        assert_eq!(bare.h_mf.as_ref().unwrap().re, vec![vec![-0.5, 0.0], vec![0.0, 0.5]]);
        // weak and exponential forms share their spectrum only to second order
        let (w, x) = (&entries[4], &entries[5]);
        let dw = w.eigenvalues.as_ref().unwrap()[1] - w.eigenvalues.as_ref().unwrap()[0];
        let dx = x.eigenvalues.as_ref().unwrap()[1] - x.eigenvalues.as_ref().unwrap()[0];
        assert!((dw - dx).abs() < 0.3f64.powi(4) * 10.0);
    }

    #[test]
    fn drude_lorentz_lists_every_refinement() {
        let cfg = ScenarioConfig::parse(
            r#"
            name = "h"
            [model]
            kind = "drude_lorentz"
            reorg = [0.1]
            [dynamics]
            beta = [1.0]
            t_max = 1.0
            dt = 1.0
            "#,
        )
        .unwrap();
        let entries = run(&cfg, None).unwrap();
        assert_eq!(entries.len(), Refinement::ALL.len());
        assert!(entries.iter().all(|e| e.error.is_none()));
        assert_eq!(entries[0].parameters["reorg"], 0.1);
    }
}
