//! TOML scenario files. All physical quantities are in units of the qubit
//! splitting `eps`.

use std::path::Path;
use std::str::FromStr;

use meanforce::master_eq::{Mode, Refinement};
use serde::Deserialize;

use crate::error::CliError;

/// Either an explicit list or an evenly spaced range (linear or logarithmic).
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        num: usize,
        #[serde(default)]
        log: bool,
    },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::Values(ref v) => v.clone(),
            Grid::Range { start, stop, num, log } => {
                if num == 1 {
                    return vec![start];
                }
                (0..num)
                    .map(|k| {
                        let s = k as f64 / (num - 1) as f64;
                        if log {
                            (start.ln() + s * (stop.ln() - start.ln())).exp()
                        } else {
                            start + s * (stop - start)
                        }
                    })
                    .collect()
            }
        }
    }

    fn validated(&self, what: &str, positive: bool) -> Result<Vec<f64>, CliError> {
        if let Grid::Range { start, stop, log: true, .. } = *self {
            if !(start > 0.0 && stop > 0.0) {
                return Err(CliError::Config(format!("{what}: logarithmic range needs positive ends")));
            }
        }
        let v = self.values();
        if v.is_empty() {
            return Err(CliError::Config(format!("{what}: grid is empty")));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config(format!("{what}: grid has non-finite values")));
        }
        if v.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(CliError::Config(format!("{what}: grid must be strictly increasing")));
        }
        if positive && v[0] <= 0.0 {
            return Err(CliError::Config(format!("{what}: values must be positive")));
        }
        if !positive && v[0] < 0.0 {
            return Err(CliError::Config(format!("{what}: values must be non-negative")));
        }
        Ok(v)
    }
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    /// Qubit `(eps/2) sigma_z` coupled through `(sigma_z - sigma_x)/sqrt 2`
    /// to one oscillator of frequency `omega` with coupling `lambda * g`.
    SingleOscillator {
        #[serde(default = "one")]
        eps: f64,
        omega: Grid,
        #[serde(default = "one")]
        g: f64,
    },
    /// Same qubit and coupling operator, Drude-Lorentz bath.
    DrudeLorentz {
        #[serde(default = "one")]
        eps: f64,
        #[serde(default = "half")]
        gamma: f64,
        reorg: Grid,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumMethod {
    Exact,
    MfgWeak,
    HmfWeak,
    HmfExponential,
    HmfHighT,
    BareGibbs,
}

impl EquilibriumMethod {
    pub const ALL: [EquilibriumMethod; 6] = [
        EquilibriumMethod::Exact,
        EquilibriumMethod::MfgWeak,
        EquilibriumMethod::HmfWeak,
        EquilibriumMethod::HmfExponential,
        EquilibriumMethod::HmfHighT,
        EquilibriumMethod::BareGibbs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EquilibriumMethod::Exact => "exact",
            EquilibriumMethod::MfgWeak => "mfg_weak",
            EquilibriumMethod::HmfWeak => "hmf_weak",
            EquilibriumMethod::HmfExponential => "hmf_exponential",
            EquilibriumMethod::HmfHighT => "hmf_high_t",
            EquilibriumMethod::BareGibbs => "bare_gibbs",
        }
    }
}

/// `heom` or `br_{full|secular}_{bare|refined_<refinement>}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(try_from = "String")]
pub enum DynamicsMethod {
    Heom,
    Redfield(Mode, Refinement),
}

impl DynamicsMethod {
    pub fn all() -> Vec<DynamicsMethod> {
        let mut v = vec![DynamicsMethod::Heom];
        for r in [Refinement::Bare, Refinement::MfgNumerator, Refinement::Weak, Refinement::HighT] {
            for m in [Mode::Full, Mode::Secular] {
                v.push(DynamicsMethod::Redfield(m, r));
            }
        }
        v
    }

    pub fn name(self) -> String {
        match self {
            DynamicsMethod::Heom => "heom".to_string(),
            DynamicsMethod::Redfield(mode, r) => {
                let m = match mode {
                    Mode::Full => "full",
                    Mode::Secular => "secular",
                };
                match r {
                    Refinement::Bare => format!("br_{m}_bare"),
                    other => format!("br_{m}_refined_{}", other.name()),
                }
            }
        }
    }
}

impl FromStr for DynamicsMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "heom" {
            return Ok(DynamicsMethod::Heom);
        }
        let rest = s.strip_prefix("br_").ok_or_else(|| format!("unknown dynamics method {s:?}"))?;
        let (mode, rest) = if let Some(r) = rest.strip_prefix("full_") {
            (Mode::Full, r)
        } else if let Some(r) = rest.strip_prefix("secular_") {
            (Mode::Secular, r)
        } else {
            return Err(format!("unknown dynamics method {s:?}"));
        };
        let refinement = if rest == "bare" {
            Refinement::Bare
        } else {
            let name = rest.strip_prefix("refined_").ok_or_else(|| format!("unknown dynamics method {s:?}"))?;
            Refinement::ALL
                .into_iter()
                .find(|r| *r != Refinement::Bare && r.name() == name)
                .ok_or_else(|| format!("unknown refinement {name:?} in {s:?}"))?
        };
        Ok(DynamicsMethod::Redfield(mode, refinement))
    }
}

impl TryFrom<String> for DynamicsMethod {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

fn default_equilibrium_methods() -> Vec<EquilibriumMethod> {
    EquilibriumMethod::ALL.to_vec()
}

fn default_dynamics_methods() -> Vec<DynamicsMethod> {
    DynamicsMethod::all()
}

fn default_exact_tol() -> f64 {
    1e-10
}

fn default_exact_max_levels() -> usize {
    400
}

fn default_heom_tol() -> f64 {
    1e-6
}

fn default_heom_max_depth() -> usize {
    meanforce::heom::DEFAULT_MAX_DEPTH
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumConfig {
    pub lambda: Grid,
    pub beta: Grid,
    #[serde(default = "default_equilibrium_methods")]
    pub methods: Vec<EquilibriumMethod>,
    /// Convergence tolerance of the exact reference (trace distance between
    /// successive truncations).
    #[serde(default = "default_exact_tol")]
    pub exact_tol: f64,
    #[serde(default = "default_exact_max_levels")]
    pub exact_max_levels: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    pub beta: Grid,
    pub t_max: f64,
    pub dt: f64,
    #[serde(default = "default_dynamics_methods")]
    pub methods: Vec<DynamicsMethod>,
    /// Largest trace distance allowed between depth `K` and `K + 2`.
    #[serde(default = "default_heom_tol")]
    pub heom_tol: f64,
    #[serde(default = "default_heom_max_depth")]
    pub heom_max_depth: usize,
}

impl DynamicsConfig {
    pub fn times(&self) -> Vec<f64> {
        let n = (self.t_max / self.dt).round() as usize;
        (0..=n).map(|k| k as f64 * self.dt).collect()
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub model: ModelConfig,
    pub equilibrium: Option<EquilibriumConfig>,
    pub dynamics: Option<DynamicsConfig>,
}

/// Fully expanded single-oscillator sweep.
#[derive(Clone, Debug)]
pub struct EquilibriumScenario {
    pub name: String,
    pub eps: f64,
    pub g: f64,
    pub omegas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub betas: Vec<f64>,
    pub methods: Vec<EquilibriumMethod>,
    pub exact_tol: f64,
    pub exact_max_levels: usize,
}

#[derive(Clone, Debug)]
pub struct DynamicsScenario {
    pub name: String,
    pub eps: f64,
    pub gamma: f64,
    pub reorgs: Vec<f64>,
    pub betas: Vec<f64>,
    pub times: Vec<f64>,
    pub methods: Vec<DynamicsMethod>,
    pub heom_tol: f64,
    pub heom_max_depth: usize,
}

fn positive(what: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{what} must be positive and finite, got {x}")))
    }
}

fn check_name(name: &str) -> Result<(), CliError> {
    if name.is_empty() || !name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-') {
        return Err(CliError::Config(format!("name {name:?} must be non-empty [A-Za-z0-9_-]")));
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim().is_empty() {
            return Err(CliError::Config("configuration is empty".into()));
        }
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn equilibrium(&self, tol: Option<f64>) -> Result<EquilibriumScenario, CliError> {
        check_name(&self.name)?;
        let ModelConfig::SingleOscillator { eps, ref omega, g } = self.model else {
            return Err(CliError::Config("equilibrium sweeps need model.kind = \"single_oscillator\"".into()));
        };
        let eq = self
            .equilibrium
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [equilibrium] section".into()))?;
        positive("model.eps", eps)?;
        if !g.is_finite() {
            return Err(CliError::Config("model.g must be finite".into()));
        }
        if eq.methods.is_empty() {
            return Err(CliError::Config("equilibrium.methods is empty".into()));
        }
        let exact_tol = tol.unwrap_or(eq.exact_tol);
        positive("exact tolerance", exact_tol)?;
        Ok(EquilibriumScenario {
            name: self.name.clone(),
            eps,
            g,
            omegas: omega.validated("model.omega", true)?,
            lambdas: eq.lambda.validated("equilibrium.lambda", false)?,
            betas: eq.beta.validated("equilibrium.beta", true)?,
            methods: eq.methods.clone(),
            exact_tol,
            exact_max_levels: eq.exact_max_levels,
        })
    }

    pub fn dynamics(&self, tol: Option<f64>) -> Result<DynamicsScenario, CliError> {
        check_name(&self.name)?;
        let ModelConfig::DrudeLorentz { eps, gamma, ref reorg } = self.model else {
            return Err(CliError::Config("dynamics runs need model.kind = \"drude_lorentz\"".into()));
        };
        let dy = self
            .dynamics
            .as_ref()
            .ok_or_else(|| CliError::Config("missing [dynamics] section".into()))?;
        positive("model.eps", eps)?;
        positive("model.gamma", gamma)?;
        positive("dynamics.t_max", dy.t_max)?;
        positive("dynamics.dt", dy.dt)?;
        if dy.methods.is_empty() {
            return Err(CliError::Config("dynamics.methods is empty".into()));
        }
        let heom_tol = tol.unwrap_or(dy.heom_tol);
        positive("HEOM tolerance", heom_tol)?;
        let betas = dy.beta.validated("dynamics.beta", true)?;
        if dy.methods.contains(&DynamicsMethod::Heom) {
            if let Some(b) = betas.iter().find(|&&b| b * gamma >= 1.0) {
                return Err(CliError::Gate(format!(
                    "beta*gamma = {} >= 1 at beta = {b}; the high-temperature hierarchy needs beta*gamma < 1",
                    b * gamma
                )));
            }
        }
        Ok(DynamicsScenario {
            name: self.name.clone(),
            eps,
            gamma,
            reorgs: reorg.validated("model.reorg", false)?,
            betas,
            times: dy.times(),
            methods: dy.methods.clone(),
            heom_tol,
            heom_max_depth: dy.heom_max_depth,
        })
    }
}
