//! Numerically exact reduced equilibrium state of a qubit coupled to one
//! harmonic oscillator.
//!
//! `H = (eps/2) sigma_z (x) 1 + 1 (x) Omega a^dag a + lambda A (x) g (a + a^dag)`
//! with `A = (sigma_z - sigma_x)/sqrt(2)`, the oscillator truncated to `N`
//! levels and the total space ordered system-major (index `s * N + b`).

use nalgebra::DMatrix;

use crate::bath::DiscreteBath;
use crate::error::{Error, Result};
use crate::operators::{
    c, gibbs_state, hermitian_part, sigma_x, sigma_z, CMatrix, DensityMatrix, Eigh, HermitianOperator,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleOscillatorModel {
    pub eps: f64,
    pub omega_osc: f64,
    pub g: f64,
    pub lambda: f64,
    pub n_levels: usize,
}

impl SingleOscillatorModel {
    pub fn new(eps: f64, omega_osc: f64, g: f64, lambda: f64, n_levels: usize) -> Result<Self> {
        let m = Self {
            eps,
            omega_osc,
            g,
            lambda,
            n_levels,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if !(self.omega_osc > 0.0) || !self.omega_osc.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "oscillator frequency must be > 0, got {}",
                self.omega_osc
            )));
        }
        if !self.eps.is_finite() || !self.g.is_finite() || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter("model parameters must be finite".into()));
        }
        if self.n_levels < 2 {
            return Err(Error::InvalidParameter(format!(
                "oscillator truncation must be >= 2 levels, got {}",
                self.n_levels
            )));
        }
        Ok(())
    }

    pub fn with_levels(mut self, n_levels: usize) -> Self {
        self.n_levels = n_levels;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn system_hamiltonian(&self) -> HermitianOperator {
        HermitianOperator::from_real_diagonal(&[-0.5 * self.eps, 0.5 * self.eps])
    }

    /// `(sigma_z - sigma_x) / sqrt(2)`.
    pub fn coupling_operator(&self) -> CMatrix {
        (sigma_z() - sigma_x()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    }

    /// The oscillator as a one-mode bath, for the perturbative methods.
    pub fn bath(&self) -> Result<DiscreteBath> {
        DiscreteBath::single_mode(self.omega_osc, self.g)
    }
}

fn real_total_hamiltonian(model: &SingleOscillatorModel) -> DMatrix<f64> {
    let n = model.n_levels;
    let a = model.coupling_operator().map(|z| z.re);
    let hs = [-0.5 * model.eps, 0.5 * model.eps];
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for s in 0..2 {
        for b in 0..n {
            h[(s * n + b, s * n + b)] = hs[s] + model.omega_osc * b as f64;
        }
    }
    let lg = model.lambda * model.g;
    for s in 0..2 {
        for t in 0..2 {
            let coef = lg * a[(s, t)];
            if coef == 0.0 {
                continue;
            }
            // <b+1| (a + a^dag) |b> = sqrt(b+1)
            for b in 0..n - 1 {
                let x = coef * ((b + 1) as f64).sqrt();
                h[(s * n + b + 1, t * n + b)] += x;
                h[(s * n + b, t * n + b + 1)] += x;
            }
        }
    }
    h
}

pub fn build_total_hamiltonian(model: &SingleOscillatorModel) -> Result<HermitianOperator> {
    model.validate()?;
    HermitianOperator::new(real_total_hamiltonian(model).map(|x| c(x, 0.0)))
}

/// Reduced state and Hamiltonian of mean force at a fixed truncation.
#[derive(Clone, Debug)]
pub struct TruncatedSolution {
    pub rho: DensityMatrix,
    pub hmf: HermitianOperator,
    pub n_levels: usize,
}

pub fn solve_truncated(model: &SingleOscillatorModel, beta: f64) -> Result<TruncatedSolution> {
    model.validate()?;
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
    }
    let n = model.n_levels;
    let h = real_total_hamiltonian(model);
    let eig = Eigh::new(&h.map(|x| c(x, 0.0)));
    let e0 = eig.values[0];
    // Tr_B e^{-beta (H - E0)}, accumulated from the eigenvectors
    let mut red = CMatrix::zeros(2, 2);
    for k in 0..2 * n {
        let w = (-beta * (eig.values[k] - e0)).exp();
        if w < 1e-300 {
            break;
        }
        let v = eig.vectors.column(k);
        for s in 0..2 {
            for t in 0..2 {
                let mut acc = c(0.0, 0.0);
                for b in 0..n {
                    acc += v[s * n + b] * v[t * n + b].conj();
                }
                red[(s, t)] += acc * w;
            }
        }
    }
    let red = hermitian_part(&red);
    let z_b: f64 = (0..n).map(|k| (-beta * model.omega_osc * k as f64).exp()).sum();
    // H_MF = -(1/beta) ln(Tr_B e^{-beta H} / Z_B) = E0 - (1/beta) ln(red / Z_B)
    let log = Eigh::new(&red).map(|x| c((x / z_b).ln(), 0.0));
    if red.iter().any(|z| !z.re.is_finite()) {
        return Err(Error::InvalidParameter("reduced numerator is not finite".into()));
    }
    let hmf = HermitianOperator::with_tolerance(
        CMatrix::identity(2, 2) * c(e0, 0.0) - log * c(1.0 / beta, 0.0),
        crate::operators::COMPUTED_HERMITIAN_TOL,
    )?;
    let rho = DensityMatrix::normalized(red)?;
    Ok(TruncatedSolution {
        rho,
        hmf,
        n_levels: n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactOptions {
    /// Largest accepted trace distance between truncations `N` and `1.5 N`.
    pub tol: f64,
    pub n_max: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self { tol: 1e-10, n_max: 400 }
    }
}

/// `max(20, 4 ceil(10 / (beta Omega)))`.
pub fn default_start_levels(beta: f64, omega_osc: f64) -> usize {
    let x = (10.0 / (beta * omega_osc)).ceil();
    if x.is_finite() && x < 1e6 {
        20usize.max(4 * x as usize)
    } else {
        usize::MAX
    }
}

fn grow(n: usize) -> usize {
    (n * 3).div_ceil(2).max(n + 1)
}

/// Converged exact solution together with the truncation certificate.
#[derive(Clone, Debug)]
pub struct ExactSolution {
    pub rho: DensityMatrix,
    pub hmf: HermitianOperator,
    pub n_levels: usize,
    /// Trace distance between the last two truncations.
    pub last_change: f64,
}

/// Grows the truncation by 50% until the reduced state changes by less than
/// `opts.tol`. The starting truncation is capped so that at least one
/// comparison fits below `opts.n_max`; `model.n_levels` is ignored.
pub fn exact_solve(model: &SingleOscillatorModel, beta: f64, opts: ExactOptions) -> Result<ExactSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be > 0, got {}", opts.tol)));
    }
    if opts.n_max < 3 {
        return Err(Error::InvalidParameter(format!("n_max must be >= 3, got {}", opts.n_max)));
    }
    let cap = (opts.n_max * 2 / 3).max(2);
    let mut n = default_start_levels(beta, model.omega_osc).min(cap);
    let mut prev = solve_truncated(&model.with_levels(n), beta)?;
    let mut change = f64::INFINITY;
    while n < opts.n_max {
        n = grow(n).min(opts.n_max);
        let next = solve_truncated(&model.with_levels(n), beta)?;
        change = next.rho.trace_distance(&prev.rho);
        prev = next;
        if change < opts.tol {
            return Ok(ExactSolution {
                rho: prev.rho,
                hmf: prev.hmf,
                n_levels: n,
                last_change: change,
            });
        }
    }
    Err(Error::TruncationNotConverged {
        n_max: opts.n_max,
        change,
    })
}

pub fn exact_mean_force_state(model: &SingleOscillatorModel, beta: f64, opts: ExactOptions) -> Result<DensityMatrix> {
    Ok(exact_solve(model, beta, opts)?.rho)
}

pub fn exact_hmf(model: &SingleOscillatorModel, beta: f64, opts: ExactOptions) -> Result<HermitianOperator> {
    Ok(exact_solve(model, beta, opts)?.hmf)
}

/// Bare Gibbs state of the qubit, for comparisons at `lambda = 0`.
pub fn bare_state(model: &SingleOscillatorModel, beta: f64) -> Result<DensityMatrix> {
    gibbs_state(&model.system_hamiltonian(), beta)
}
