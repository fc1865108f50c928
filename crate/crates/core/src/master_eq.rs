//! Bloch-Redfield generators, full and secular, built on an arbitrary
//! reference Hamiltonian.
//!
//! Superoperators act on column-stacked density matrices:
//! `vec(A X B) = (B^T (x) A) vec(X)`.

use nalgebra::DVector;

use crate::bath::{gamma_half_fourier, Bath, DrudeLorentzBath, ThermalBath};
use crate::error::{Error, Result};
use crate::mean_force::{
    hmf_exponential, hmf_from_reduced_numerator, hmf_high_temperature, hmf_weak_operator, mfg_weak_numerator,
    HighTVariant,
};
use crate::ode::{integrate_linear, CVector, OdeOptions};
use crate::operators::{
    bohr_decompose_matrices, c, check_dim, hermiticity_deviation, max_abs, spectral_decompose, BohrDecomposition,
    CMatrix, DensityMatrix, Eigh, HermitianOperator, C64,
};

/// Tolerance of the superoperator identities checked at build time,
/// relative to the largest Liouvillian entry.
pub const SUPEROPERATOR_TOL: f64 = 1e-10;
/// Relative tolerance of the detailed-balance check on the rates.
pub const DETAILED_BALANCE_TOL: f64 = 1e-8;
/// Singular values below this fraction of the largest count as zero.
pub const NULL_SPACE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Full,
    Secular,
}

/// Which Hamiltonian the generator was built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Refinement {
    Bare,
    Weak,
    Exponential,
    HighT,
    MfgNumerator,
}

impl Refinement {
    pub const ALL: [Refinement; 5] = [
        Refinement::Bare,
        Refinement::Weak,
        Refinement::Exponential,
        Refinement::HighT,
        Refinement::MfgNumerator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Refinement::Bare => "bare",
            Refinement::Weak => "weak",
            Refinement::Exponential => "exponential",
            Refinement::HighT => "high_t",
            Refinement::MfgNumerator => "mfg_numerator",
        }
    }
}

/// Reference Hamiltonian for a refined generator. Coupling strength is
/// carried entirely by the bath, so every second-order form is evaluated at
/// `lambda = 1`.
pub fn reference_hamiltonian(
    hs: &HermitianOperator,
    couplings: &[CMatrix],
    bath: &DrudeLorentzBath,
    beta: f64,
    refinement: Refinement,
) -> Result<HermitianOperator> {
    match refinement {
        Refinement::Bare => Ok(hs.clone()),
        Refinement::Weak => hmf_weak_operator(hs, couplings, bath, beta, 1.0),
        Refinement::Exponential => Ok(hmf_exponential(hs, couplings, bath, beta, 1.0)?.h_mf),
        Refinement::HighT => {
            let variant = if couplings.len() == 1 {
                HighTVariant::SingleCoupling
            } else {
                HighTVariant::Semigroup
            };
            Ok(hmf_high_temperature(hs, couplings, &bath.reorg_moments(), beta, variant)?.h_mf)
        }
        Refinement::MfgNumerator => {
            let num = mfg_weak_numerator(hs, couplings, bath, beta, 1.0)?;
            hmf_from_reduced_numerator(num.matrix(), beta)
        }
    }
}

#[derive(Clone, Debug)]
pub struct RedfieldGenerator {
    pub h_ref: HermitianOperator,
    pub h_ls: HermitianOperator,
    pub bohr: BohrDecomposition,
    /// `Gamma_{mu nu}(w_k)` on the Bohr grid of `h_ref`.
    pub gamma: Vec<CMatrix>,
    /// `rates[k][l][(mu, nu)] = gamma_{mu nu}(w_k, w_l)`; zero off the
    /// diagonal in secular mode.
    pub rates: Vec<Vec<CMatrix>>,
    pub mode: Mode,
    pub refined_with: Refinement,
    pub beta: f64,
    liouvillian: CMatrix,
}

fn dissipator_rates(gamma: &[CMatrix], mode: Mode) -> Vec<Vec<CMatrix>> {
    let nf = gamma.len();
    (0..nf)
        .map(|k| {
            (0..nf)
                .map(|l| {
                    if mode == Mode::Secular && k != l {
                        CMatrix::zeros(gamma[k].nrows(), gamma[k].ncols())
                    } else {
                        &gamma[k] + gamma[l].adjoint()
                    }
                })
                .collect()
        })
        .collect()
}

/// `H_LS = sum S_{mu nu}(w, w') A_{mu w'}^dag A_{nu w}` with
/// `S(w, w') = (Gamma(w) - Gamma(w')^dag) / 2i`.
fn lamb_shift(bohr: &BohrDecomposition, gamma: &[CMatrix], mode: Mode, dim: usize) -> CMatrix {
    let nf = gamma.len();
    let m = bohr.coupling_count();
    let mut out = CMatrix::zeros(dim, dim);
    for k in 0..nf {
        for l in 0..nf {
            if mode == Mode::Secular && k != l {
                continue;
            }
            let s = (&gamma[k] - gamma[l].adjoint()) / c(0.0, 2.0);
            for mu in 0..m {
                let a_dag = bohr.block(mu, l).adjoint();
                for nu in 0..m {
                    if s[(mu, nu)] != c(0.0, 0.0) {
                        out += (&a_dag * bohr.block(nu, k)) * s[(mu, nu)];
                    }
                }
            }
        }
    }
    out
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn assemble(h: &CMatrix, bohr: &BohrDecomposition, rates: &[Vec<CMatrix>]) -> CMatrix {
    let n = h.nrows();
    let id = CMatrix::identity(n, n);
    let mut l = (kron(&id, h) - kron(&h.transpose(), &id)) * c(0.0, -1.0);
    let m = bohr.coupling_count();
    let mut k_total = CMatrix::zeros(n, n);
    for (k, row) in rates.iter().enumerate() {
        for (lidx, g) in row.iter().enumerate() {
            for mu in 0..m {
                let b = bohr.block(mu, lidx);
                for nu in 0..m {
                    let rate = g[(mu, nu)];
                    if rate == c(0.0, 0.0) {
                        continue;
                    }
                    let a = bohr.block(nu, k);
                    l += kron(&b.conjugate(), a) * rate;
                    k_total += (b.adjoint() * a) * rate;
                }
            }
        }
    }
    l -= (kron(&id, &k_total) + kron(&k_total.transpose(), &id)) * c(0.5, 0.0);
    l
}

fn unvec(v: &[C64], n: usize) -> CMatrix {
    CMatrix::from_column_slice(n, n, v)
}

/// Largest `|Tr L(X)|` and `|L(X^dag) - L(X)^dag|` over matrix units `X`,
/// relative to the largest Liouvillian entry.
pub fn superoperator_deviation(l: &CMatrix, n: usize) -> (f64, f64) {
    let scale = max_abs(l).max(f64::MIN_POSITIVE);
    let mut tr_dev = 0.0f64;
    for col in 0..n * n {
        let t: C64 = (0..n).map(|r| l[(r * n + r, col)]).sum();
        tr_dev = tr_dev.max(t.norm());
    }
    let mut herm_dev = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            let lij = unvec(l.column(j * n + i).as_slice(), n);
            let lji = unvec(l.column(i * n + j).as_slice(), n);
            herm_dev = herm_dev.max(max_abs(&(lji - lij.adjoint())));
        }
    }
    (tr_dev / scale, herm_dev / scale)
}

impl RedfieldGenerator {
    pub fn dim(&self) -> usize {
        self.h_ref.dim()
    }

    /// Matrix of the generator on column-stacked density matrices.
    pub fn liouvillian(&self) -> &CMatrix {
        &self.liouvillian
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let n = self.dim();
        let v = &self.liouvillian * CVector::from_column_slice(rho.as_slice());
        unvec(v.as_slice(), n)
    }

    /// Largest relative violation of `gamma(-w,-w) = e^{-beta w} gamma(w,w)^T`.
    pub fn detailed_balance_violation(&self) -> f64 {
        let f = &self.bohr.frequencies;
        let tol = 1e-9 * f.iter().fold(1.0f64, |a, w| a.max(w.abs()));
        let mut worst = 0.0f64;
        for (k, &w) in f.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            let Some(kn) = self.bohr.frequency_index(-w, tol) else { continue };
            let up = &self.rates[kn][kn];
            let down = self.rates[k][k].transpose() * c((-self.beta * w).exp(), 0.0);
            let scale = max_abs(up).max(max_abs(&down));
            if scale > 0.0 {
                worst = worst.max(max_abs(&(up - down)) / scale);
            }
        }
        worst
    }

    /// Smallest eigenvalue over the Hermitian parts of the `gamma(w,w)` matrices.
    pub fn min_rate_eigenvalue(&self) -> f64 {
        (0..self.rates.len())
            .map(|k| {
                let g = &self.rates[k][k];
                Eigh::new(&((g + g.adjoint()) * c(0.5, 0.0))).values[0]
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Runs every invariant check and returns the first violation.
    pub fn check_invariants(&self) -> Result<()> {
        let scale = self.rates.iter().flatten().map(max_abs).fold(0.0, f64::max);
        let min_ev = self.min_rate_eigenvalue();
        if min_ev < -1e-10 * scale.max(1.0) {
            return Err(Error::InvariantViolation(format!("gamma(w,w) has eigenvalue {min_ev:.3e}")));
        }
        let db = self.detailed_balance_violation();
        if db > DETAILED_BALANCE_TOL {
            return Err(Error::InvariantViolation(format!("detailed balance violated by {db:.3e}")));
        }
        let ls_dev = hermiticity_deviation(self.h_ls.matrix());
        if ls_dev > SUPEROPERATOR_TOL {
            return Err(Error::InvariantViolation(format!("Lamb shift Hermiticity deviation {ls_dev:.3e}")));
        }
        let (tr_dev, herm_dev) = superoperator_deviation(&self.liouvillian, self.dim());
        if tr_dev > SUPEROPERATOR_TOL || herm_dev > SUPEROPERATOR_TOL {
            return Err(Error::InvariantViolation(format!(
                "trace deviation {tr_dev:.3e}, Hermiticity deviation {herm_dev:.3e}"
            )));
        }
        Ok(())
    }

    fn from_parts(
        h_ref: HermitianOperator,
        bohr: BohrDecomposition,
        gamma: Vec<CMatrix>,
        mode: Mode,
        refined_with: Refinement,
        beta: f64,
    ) -> Result<Self> {
        let n = h_ref.dim();
        let ls = lamb_shift(&bohr, &gamma, mode, n);
        let dev = hermiticity_deviation(&ls);
        if dev > SUPEROPERATOR_TOL {
            return Err(Error::InvariantViolation(format!("Lamb shift Hermiticity deviation {dev:.3e}")));
        }
        let h_ls = HermitianOperator::with_tolerance(ls, SUPEROPERATOR_TOL)?;
        let rates = dissipator_rates(&gamma, mode);
        let liouvillian = assemble(&(h_ref.matrix() + h_ls.matrix()), &bohr, &rates);
        let generator = Self {
            h_ref,
            h_ls,
            bohr,
            gamma,
            rates,
            mode,
            refined_with,
            beta,
            liouvillian,
        };
        generator.check_invariants()?;
        Ok(generator)
    }
}

/// Bloch-Redfield generator for the reference Hamiltonian `h_ref`. The
/// half-Fourier transform of the bath correlation must exist, so discrete
/// baths are rejected.
pub fn build_redfield(
    h_ref: &HermitianOperator,
    couplings: &[CMatrix],
    bath: &Bath,
    beta: f64,
    mode: Mode,
    refined_with: Refinement,
) -> Result<RedfieldGenerator> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
    }
    if let Bath::Discrete(_) = bath {
        return Err(Error::DiscreteBath);
    }
    if couplings.len() != bath.coupling_count() {
        return Err(Error::DimensionMismatch {
            expected: bath.coupling_count(),
            found: couplings.len(),
        });
    }
    for a in couplings {
        check_dim(h_ref.dim(), a.nrows())?;
        check_dim(h_ref.dim(), a.ncols())?;
    }
    let spec = spectral_decompose(h_ref, None)?;
    let bohr = bohr_decompose_matrices(&spec, couplings)?;
    let gamma = bohr
        .frequencies
        .iter()
        .map(|&w| Ok(CMatrix::from_element(1, 1, gamma_half_fourier(bath, beta, w)?)))
        .collect::<Result<Vec<_>>>()?;
    RedfieldGenerator::from_parts(h_ref.clone(), bohr, gamma, mode, refined_with, beta)
}

/// Builds the reference Hamiltonian for `refinement` and the generator on it.
pub fn build_refined(
    hs: &HermitianOperator,
    couplings: &[CMatrix],
    bath: &DrudeLorentzBath,
    beta: f64,
    mode: Mode,
    refinement: Refinement,
) -> Result<RedfieldGenerator> {
    let h_ref = reference_hamiltonian(hs, couplings, bath, beta, refinement)?;
    build_redfield(&h_ref, couplings, &Bath::DrudeLorentz(bath.clone()), beta, mode, refinement)
}

/// Drops every `w != w'` term from the dissipator and the Lamb shift.
pub fn secularize(gen: &RedfieldGenerator) -> Result<RedfieldGenerator> {
    if gen.mode == Mode::Secular {
        return Ok(gen.clone());
    }
    RedfieldGenerator::from_parts(
        gen.h_ref.clone(),
        gen.bohr.clone(),
        gen.gamma.clone(),
        Mode::Secular,
        gen.refined_with,
        gen.beta,
    )
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    /// Trace must stay within this of one along a trajectory.
    pub const TRACE_TOL: f64 = 1e-8;
    pub const HERMITIAN_TOL: f64 = 1e-9;

    pub(crate) fn from_vectors(times: &[f64], vectors: Vec<CVector>, n: usize) -> Result<Self> {
        let states = vectors
            .into_iter()
            .zip(times)
            .map(|(v, t)| {
                DensityMatrix::relaxed(unvec(v.as_slice(), n), Self::HERMITIAN_TOL, Self::TRACE_TOL)
                    .map_err(|e| Error::Integrator(format!("at t = {t}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            times: times.to_vec(),
            states,
        })
    }

    pub fn populations(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.population(i)).collect()
    }

    pub fn abs_coherences(&self, i: usize, j: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.coherence(i, j).norm()).collect()
    }

    /// Most negative eigenvalue along the trajectory. Generators that are not
    /// completely positive may dip below zero; this is reported, not clipped.
    pub fn min_eigenvalue(&self) -> f64 {
        self.states.iter().map(|s| s.min_eigenvalue()).fold(f64::INFINITY, f64::min)
    }

    pub fn trace_distances(&self, other: &Trajectory) -> Result<Vec<f64>> {
        if self.times.len() != other.times.len() {
            return Err(Error::DimensionMismatch {
                expected: self.times.len(),
                found: other.times.len(),
            });
        }
        Ok(self.states.iter().zip(&other.states).map(|(a, b)| a.trace_distance(b)).collect())
    }

    pub fn max_trace_distance(&self, other: &Trajectory) -> Result<f64> {
        Ok(self.trace_distances(other)?.into_iter().fold(0.0, f64::max))
    }

    /// Trapezoidal integral of the trace distance over the shared time grid.
    pub fn integrated_trace_distance(&self, other: &Trajectory) -> Result<f64> {
        let d = self.trace_distances(other)?;
        Ok(self.times.windows(2).zip(d.windows(2)).map(|(t, d)| 0.5 * (t[1] - t[0]) * (d[0] + d[1])).sum())
    }
}

pub fn propagate(gen: &RedfieldGenerator, rho0: &DensityMatrix, times: &[f64], opts: OdeOptions) -> Result<Trajectory> {
    let n = gen.dim();
    check_dim(n, rho0.dim())?;
    let y0 = CVector::from_column_slice(rho0.matrix().as_slice());
    let ys = integrate_linear(&gen.liouvillian, &y0, times, opts)?;
    Trajectory::from_vectors(times, ys, n)
}

/// Unique stationary state of the generator. The null-space dimension is
/// read off the singular values; the null vector itself is obtained from
/// the Liouvillian with one diagonal row replaced by the trace condition.
pub fn steady_state(gen: &RedfieldGenerator) -> Result<DensityMatrix> {
    let n = gen.dim();
    let l = &gen.liouvillian;
    let sv = l.clone().singular_values();
    let smax = sv.max();
    let nullity = sv.iter().filter(|&&s| s <= NULL_SPACE_TOL * smax.max(f64::MIN_POSITIVE)).count();
    if nullity != 1 {
        return Err(Error::DegenerateNullSpace(nullity));
    }

    let mut a = l.clone();
    let mut rhs = CVector::zeros(n * n);
    for col in 0..n * n {
        a[(0, col)] = c(0.0, 0.0);
    }
    for r in 0..n {
        a[(0, r * n + r)] = c(1.0, 0.0);
    }
    rhs[0] = c(1.0, 0.0);
    let lu = a.clone().lu();
    let mut x = lu.solve(&rhs).ok_or(Error::DegenerateNullSpace(nullity))?;
    // one step of iterative refinement
    let resid = &rhs - &a * &x;
    if let Some(dx) = lu.solve(&resid) {
        x += dx;
    }
    let rho = unvec(x.as_slice(), n);
    DensityMatrix::normalized(rho)
}

/// `|| L(rho) ||` as the largest entry.
pub fn stationarity_residual(gen: &RedfieldGenerator, rho: &DensityMatrix) -> f64 {
    max_abs(&gen.apply(rho.matrix()))
}

pub fn column_stack(m: &CMatrix) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mean_force::{mfg_weak, state_from_hmf, Normalization};
    use crate::operators::{gibbs_state, sigma_x, sigma_z, unitary_exp};
    use proptest::prelude::*;

    fn qubit() -> (HermitianOperator, Vec<CMatrix>) {
        let hs = HermitianOperator::new(sigma_z() * c(0.5, 0.0)).unwrap();
        let a = (sigma_z() - sigma_x()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        (hs, vec![a])
    }

    fn dl(reorg: f64) -> DrudeLorentzBath {
        DrudeLorentzBath::new(reorg, 0.5).unwrap()
    }

    fn bare(reorg: f64, beta: f64, mode: Mode) -> RedfieldGenerator {
        let (hs, a) = qubit();
        build_refined(&hs, &a, &dl(reorg), beta, mode, Refinement::Bare).unwrap()
    }

    // Independent superoperator action: L(rho) written with explicit sums.
    fn direct_action(gen: &RedfieldGenerator, rho: &CMatrix) -> CMatrix {
        let h = gen.h_ref.matrix() + gen.h_ls.matrix();
        let mut out = (&h * rho - rho * &h) * c(0.0, -1.0);
        let nf = gen.bohr.frequencies.len();
        for k in 0..nf {
            for l in 0..nf {
                let g = gen.rates[k][l][(0, 0)];
                let a = gen.bohr.block(0, k);
                let b = gen.bohr.block(0, l);
                let bd = b.adjoint();
                out += (a * rho * &bd - (&bd * a * rho + rho * &bd * a) * c(0.5, 0.0)) * g;
            }
        }
        out
    }

    #[test]
    fn liouvillian_matches_direct_action() {
        let gen = bare(0.1, 0.7, Mode::Full);
        let rho = CMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.1, -0.2), c(0.1, 0.2), c(0.7, 0.0)]);
        assert!(max_abs(&(gen.apply(&rho) - direct_action(&gen, &rho))) < 1e-14);
    }

    #[test]
    fn rates_and_lamb_shift_follow_gamma() {
        let bath = dl(0.2);
        let beta = 0.8;
        let gen = bare(0.2, beta, Mode::Full);
        let f = &gen.bohr.frequencies;
        for k in 0..f.len() {
            for l in 0..f.len() {
                let gk = bath.gamma(beta, f[k]).unwrap();
                let gl = bath.gamma(beta, f[l]).unwrap();
                assert!((gen.rates[k][l][(0, 0)] - (gk + gl.conj())).norm() < 1e-14);
            }
        }
        // secular Lamb shift is sum_w S(w) A_w^dag A_w
        let sec = secularize(&gen).unwrap();
        let mut ls = CMatrix::zeros(2, 2);
        for (k, &w) in f.iter().enumerate() {
            let a = sec.bohr.block(0, k);
            ls += a.adjoint() * a * c(bath.gamma(beta, w).unwrap().im, 0.0);
        }
        assert!(max_abs(&(ls - sec.h_ls.matrix())) < 1e-14);
    }

    #[test]
    fn detailed_balance_on_rates() {
        for &beta in &[0.5, 1.0] {
            let gen = bare(0.3, beta, Mode::Full);
            assert!(gen.detailed_balance_violation() < 1e-12);
        }
    }

    #[test]
    fn mutated_rate_fails_detailed_balance() {
        let mut gen = bare(0.3, 1.0, Mode::Full);
        let k = gen.bohr.frequencies.iter().position(|&w| w > 0.0).unwrap();
        gen.rates[k][k] *= c(1.01, 0.0);
        assert!(gen.check_invariants().is_err());
    }

    #[test]
    fn secular_bare_steady_state_is_gibbs() {
        let (hs, _) = qubit();
        for &(reorg, beta) in &[(0.01, 0.5), (0.1, 1.0), (0.4, 1.0)] {
            let gen = bare(reorg, beta, Mode::Secular);
            let ss = steady_state(&gen).unwrap();
            assert!(stationarity_residual(&gen, &ss) < 1e-10);
            let gibbs = gibbs_state(&hs, beta).unwrap();
            assert!(ss.trace_distance(&gibbs) < 1e-10, "{}", ss.trace_distance(&gibbs));
        }
    }

    #[test]
    fn secular_refined_steady_state_is_hmf_gibbs() {
        let (hs, a) = qubit();
        let bath = dl(0.1);
        let beta = 1.0;
        for r in Refinement::ALL {
            let gen = build_refined(&hs, &a, &bath, beta, Mode::Secular, r).unwrap();
            let ss = steady_state(&gen).unwrap();
            let target = state_from_hmf(&gen.h_ref, beta).unwrap();
            assert!(ss.trace_distance(&target) < 1e-10, "{r:?}");
        }
    }

    #[test]
    fn full_steady_state_coherence_matches_equilibrium_at_leading_order() {
        let (hs, a) = qubit();
        let beta = 1.0;
        let gibbs = gibbs_state(&hs, beta).unwrap();
        let mut rels = Vec::new();
        for &reorg in &[1e-3, 1e-4] {
            let ss = steady_state(&bare(reorg, beta, Mode::Full)).unwrap();
            let sec = steady_state(&bare(reorg, beta, Mode::Secular)).unwrap();
            let coh = ss.coherence(0, 1).norm();
            assert!(coh > 0.0 && sec.coherence(0, 1).norm() < 1e-12);
            assert!(ss.trace_distance(&gibbs) < 10.0 * reorg);
            let mfg = mfg_weak(&hs, &a, &dl(reorg), beta, 1.0, Normalization::Trace).unwrap();
            rels.push((coh - mfg.coherence(0, 1).norm()).abs() / coh);
        }
        // relative mismatch is itself first order in the coupling
        assert!(rels[1] < 2e-3 && rels[0] / rels[1] > 8.0, "{rels:?}");
    }

    #[test]
    fn zero_reorg_is_unitary() {
        let (hs, _) = qubit();
        let gen = bare(0.0, 1.0, Mode::Full);
        assert!(max_abs(gen.h_ls.matrix()) == 0.0);
        let psi = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)]);
        let rho0 = DensityMatrix::new(psi).unwrap();
        let times = [0.0, 0.5, 3.0, 10.0];
        let traj = propagate(&gen, &rho0, &times, OdeOptions::default()).unwrap();
        for (t, s) in times.iter().zip(&traj.states) {
            let u = unitary_exp(&hs, -t);
            let expect = &u * rho0.matrix() * u.adjoint();
            assert!(max_abs(&(s.matrix() - expect)) < 1e-7);
            assert!((s.population(1) - 0.5).abs() < 1e-9);
        }
        assert!(matches!(steady_state(&gen), Err(Error::DegenerateNullSpace(2))));
    }

    #[test]
    fn steady_state_is_a_fixed_point_and_an_attractor() {
        let gen = bare(0.1, 1.0, Mode::Full);
        let ss = steady_state(&gen).unwrap();
        let times: Vec<f64> = (0..=10).map(|k| k as f64 * 5.0).collect();
        let traj = propagate(&gen, &ss, &times, OdeOptions::default()).unwrap();
        for s in &traj.states {
            assert!(max_abs(&(s.matrix() - ss.matrix())) < 1e-7);
        }
        let excited = DensityMatrix::basis_state(2, 1);
        let long = propagate(&gen, &excited, &[0.0, 400.0], OdeOptions::default()).unwrap();
        assert!(long.states[1].trace_distance(&ss) < 1e-6);
    }

    #[test]
    fn secularize_is_idempotent() {
        let sec = secularize(&bare(0.2, 1.0, Mode::Full)).unwrap();
        let again = secularize(&sec).unwrap();
        assert_eq!(sec.liouvillian(), again.liouvillian());
        let direct = bare(0.2, 1.0, Mode::Secular);
        assert!(max_abs(&(sec.liouvillian() - direct.liouvillian())) < 1e-15);
    }

    #[test]
    fn discrete_bath_is_rejected() {
        let (hs, a) = qubit();
        let bath = Bath::Discrete(crate::bath::DiscreteBath::single_mode(1.5, 0.1).unwrap());
        assert!(matches!(
            build_redfield(&hs, &a, &bath, 1.0, Mode::Full, Refinement::Bare),
            Err(Error::DiscreteBath)
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn superoperator_identities_hold(
            reorg in 0.0f64..0.6,
            beta in 0.1f64..3.0,
            eps in 0.2f64..2.0,
            theta in 0.0f64..3.1,
            re in proptest::collection::vec(-1.0f64..1.0, 4),
            secular in any::<bool>(),
        ) {
            let hs = HermitianOperator::new(sigma_z() * c(0.5 * eps, 0.0)).unwrap();
            let a = sigma_z() * c(theta.cos(), 0.0) + sigma_x() * c(theta.sin(), 0.0);
            let mode = if secular { Mode::Secular } else { Mode::Full };
            let gen = build_redfield(&hs, &[a], &Bath::DrudeLorentz(dl(reorg)), beta, mode, Refinement::Bare).unwrap();
            let x = CMatrix::from_row_slice(2, 2, &[c(re[0], 0.0), c(re[1], re[2]), c(re[1], -re[2]), c(re[3], 0.0)]);
            let lx = gen.apply(&x);
            let scale = max_abs(gen.liouvillian());
            prop_assert!(crate::operators::trace(&lx).norm() < 1e-10 * scale.max(1.0));
            prop_assert!(max_abs(&(&lx - lx.adjoint())) < 1e-10 * scale.max(1.0));
            prop_assert!(gen.min_rate_eigenvalue() >= -1e-10);
            prop_assert!(gen.detailed_balance_violation() < 1e-8);
        }
    }
}
