//! Approximations to the reduced equilibrium state and the Hamiltonian of
//! mean force.
//!
//! Coupling operators `A_mu` are passed as plain matrices so non-Hermitian
//! couplings (paired with `B_mu^dag` on the bath side) are allowed; the
//! interaction is `sum_mu A_mu (x) B_mu`. The dimensionless coupling `lambda`
//! multiplies the interaction, so second-order corrections scale as
//! `lambda^2`.

use crate::bath::{thermal_factor, CoefficientTable, ReorgMoments, ThermalBath};
use crate::error::{Error, Result};
use crate::operators::{
    anticommutator, bohr_decompose_matrices, c, check_dim, gibbs_state, hermiticity_deviation, matrix_log_hermitian,
    trace, unitary_exp, BohrDecomposition, CMatrix, DensityMatrix, Eigh, HermitianOperator, SpectralDecomposition,
    COMPUTED_HERMITIAN_TOL,
};
use crate::operators::{spectral_decompose, tensor_product};

/// Bohr decomposition of the couplings with respect to a system Hamiltonian
/// together with the bath coefficients on its frequency grid.
#[derive(Clone, Debug)]
pub struct SecondOrderExpansion {
    pub spectrum: SpectralDecomposition,
    pub bohr: BohrDecomposition,
    pub table: CoefficientTable,
}

impl SecondOrderExpansion {
    pub fn new<B: ThermalBath + ?Sized>(
        h: &HermitianOperator,
        couplings: &[CMatrix],
        bath: &B,
        beta: f64,
    ) -> Result<Self> {
        if couplings.len() != bath.coupling_count() {
            return Err(Error::DimensionMismatch {
                expected: bath.coupling_count(),
                found: couplings.len(),
            });
        }
        let spectrum = spectral_decompose(h, None)?;
        let bohr = bohr_decompose_matrices(&spectrum, couplings)?;
        let table = CoefficientTable::build(bath, beta, &bohr.frequencies)?;
        Ok(Self { spectrum, bohr, table })
    }

    pub fn beta(&self) -> f64 {
        self.table.beta
    }

    /// `sum_{mu nu} sum_{k, l} weight(k, l) G_{mu nu}(w_k, w_l) A_{mu w_l}^dag A_{nu w_k}`;
    /// pairs with `weight == None` are skipped.
    pub fn weighted_sum<F: Fn(usize, usize) -> Option<f64>>(&self, weight: F) -> CMatrix {
        let n = self.spectrum.dim();
        let nf = self.bohr.frequencies.len();
        let m = self.bohr.coupling_count();
        let mut out = CMatrix::zeros(n, n);
        for k in 0..nf {
            for l in 0..nf {
                let Some(w) = weight(k, l) else { continue };
                let g = &self.table.g[k][l];
                for mu in 0..m {
                    let a_dag = self.bohr.block(mu, l).adjoint();
                    for nu in 0..m {
                        let coeff = g[(mu, nu)] * w;
                        if coeff == c(0.0, 0.0) {
                            continue;
                        }
                        out += (&a_dag * self.bohr.block(nu, k)) * coeff;
                    }
                }
            }
        }
        out
    }

    /// `sum G(w, w') A_{w'}^dag A_w` over all frequency pairs.
    pub fn correction(&self) -> CMatrix {
        self.weighted_sum(|_, _| Some(1.0))
    }

    /// Second-order Hamiltonian correction,
    /// `-sum (w - w')/(1 - e^{-beta (w - w')}) G(w, w') A_{w'}^dag A_w`.
    pub fn hmf_correction(&self) -> CMatrix {
        let beta = self.beta();
        let f = &self.bohr.frequencies;
        -self.weighted_sum(|k, l| Some(if k == l { 1.0 / beta } else { thermal_factor(beta, f[k] - f[l]) }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Divide the assembled operator by its trace.
    #[default]
    Trace,
    /// Expand `Z_MF^{-1}` to second order as well.
    Expanded,
}

#[derive(Clone, Debug)]
pub struct WeakCouplingResult {
    pub rho: DensityMatrix,
    pub h_mf: HermitianOperator,
    /// Second-order estimate of `Z_SB / (Z_S Z_B)`.
    pub z_mf: f64,
    pub lambda: f64,
    pub beta: f64,
}

fn check_system(hs: &HermitianOperator, couplings: &[CMatrix]) -> Result<()> {
    for a in couplings {
        check_dim(hs.dim(), a.nrows())?;
        check_dim(hs.dim(), a.ncols())?;
    }
    Ok(())
}

fn bare_gibbs_matrix(hs: &HermitianOperator, beta: f64) -> Result<CMatrix> {
    Ok(gibbs_state(hs, beta)?.into_matrix())
}

/// `rho_S^(0) [1 + lambda^2 X]`, i.e. `Tr_B e^{-beta H} / (Z_S Z_B)` to
/// second order.
pub fn mfg_weak_numerator<B: ThermalBath + ?Sized>(
    hs: &HermitianOperator,
    couplings: &[CMatrix],
    bath: &B,
    beta: f64,
    lambda: f64,
) -> Result<HermitianOperator> {
    check_system(hs, couplings)?;
    let exp = SecondOrderExpansion::new(hs, couplings, bath, beta)?;
    numerator_from_expansion(hs, &exp, lambda)
}

fn numerator_from_expansion(hs: &HermitianOperator, exp: &SecondOrderExpansion, lambda: f64) -> Result<HermitianOperator> {
    let rho0 = bare_gibbs_matrix(hs, exp.beta())?;
    let corr = &rho0 * exp.correction();
    let dev = hermiticity_deviation(&corr);
    if dev > COMPUTED_HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            deviation: dev,
            tol: COMPUTED_HERMITIAN_TOL,
        });
    }
    HermitianOperator::with_tolerance(rho0 + corr * c(lambda * lambda, 0.0), COMPUTED_HERMITIAN_TOL)
}

fn mfg_from_expansion(
    hs: &HermitianOperator,
    exp: &SecondOrderExpansion,
    lambda: f64,
    normalization: Normalization,
) -> Result<(DensityMatrix, f64)> {
    let numerator = numerator_from_expansion(hs, exp, lambda)?;
    let z_mf = trace(numerator.matrix()).re;
    let rho = match normalization {
        Normalization::Trace => DensityMatrix::normalized(numerator.into_matrix()),
        Normalization::Expanded => {
            let rho0 = bare_gibbs_matrix(hs, exp.beta())?;
            // the off-diagonal terms are traceless, so z_mf - 1 is the whole shift
            let shifted = numerator.into_matrix() - &rho0 * c(z_mf - 1.0, 0.0);
            DensityMatrix::new(shifted)
        }
    };
    let rho = rho.map_err(|e| match e {
        Error::InvalidState(msg) => Error::InvalidState(format!(
            "second-order state is not a density matrix ({msg}); lambda = {lambda} is beyond the weak-coupling range"
        )),
        other => other,
    })?;
    Ok((rho, z_mf))
}

/// Second-order mean-force Gibbs state.
pub fn mfg_weak<B: ThermalBath + ?Sized>(
    hs: &HermitianOperator,
    couplings: &[CMatrix],
    bath: &B,
    beta: f64,
    lambda: f64,
    normalization: Normalization,
) -> Result<DensityMatrix> {
    check_system(hs, couplings)?;
    let exp = SecondOrderExpansion::new(hs, couplings, bath, beta)?;
    Ok(mfg_from_expansion(hs, &exp, lambda, normalization)?.0)
}

/// Second-order Hamiltonian of mean force together with the matching state.
pub fn hmf_weak<B: ThermalBath + ?Sized>(
    hs: &HermitianOperator,
    couplings: &[CMatrix],
    bath: &B,
    beta: f64,
    lambda: f64,
) -> Result<WeakCouplingResult> {
    check_system(hs, couplings)?;
    let exp = SecondOrderExpansion::new(hs, couplings, bath, beta)?;
    let (rho, z_mf) = mfg_from_expansion(hs, &exp, lambda, Normalization::Trace)?;
    let h2 = exp.hmf_correction();
    let h_mf = HermitianOperator::with_tolerance(hs.matrix() + h2 * c(lambda * lambda, 0.0), COMPUTED_HERMITIAN_TOL)?;
    Ok(WeakCouplingResult {
        rho,
        h_mf,
        z_mf,
        lambda,
        beta,
    })
}

/// `H_S + lambda^2 H^(2)` alone, without building the matching state.
pub fn hmf_weak_operator<B: ThermalBath + ?Sized>(
    hs: &HermitianOperator,
    couplings: &[CMatrix],
    bath: &B,
    beta: f64,
    lambda: f64,
) -> Result<HermitianOperator> {
    check_system(hs, couplings)?;
    let exp = SecondOrderExpansion::new(hs, couplings, bath, beta)?;
    HermitianOperator::with_tolerance(
        hs.matrix() + exp.hmf_correction() * c(lambda * lambda, 0.0),
        COMPUTED_HERMITIAN_TOL,
    )
}

/// Exponential representation `e^{i lambda^2 R} H_S' e^{-i lambda^2 R}`.
#[derive(Clone, Debug)]
pub struct ExponentialForm {
    /// System Hamiltonian with the frequency-diagonal correction.
    pub hs_prime: HermitianOperator,
    /// Rotation generator.
    pub r: HermitianOperator,
    pub h_mf: HermitianOperator,
}

pub fn hmf_exponential<B: ThermalBath + ?Sized>(
    hs: &HermitianOperator,
    couplings: &[CMatrix],
    bath: &B,
    beta: f64,
    lambda: f64,
) -> Result<ExponentialForm> {
    check_system(hs, couplings)?;
    let exp = SecondOrderExpansion::new(hs, couplings, bath, beta)?;
    let diag = exp.weighted_sum(|k, l| (k == l).then_some(1.0 / beta));
    let hs_prime = HermitianOperator::with_tolerance(hs.matrix() - diag * c(lambda * lambda, 0.0), COMPUTED_HERMITIAN_TOL)?;

    let before = exp.spectrum.eigenvalues.len();
    let after = spectral_decompose(&hs_prime, Some(exp.spectrum.group_tol))?.eigenvalues.len();
    if before != after {
        return Err(Error::MultiplicityChanged { before, after });
    }

    // Bohr frequencies and G of the corrected Hamiltonian
    let exp_prime = SecondOrderExpansion::new(&hs_prime, couplings, bath, beta)?;
    let f = &exp_prime.bohr.frequencies;
    let r = exp_prime.weighted_sum(|k, l| (k != l).then(|| 1.0 / -(-beta * (f[k] - f[l])).exp_m1())) * c(0.0, 1.0);
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        let spread = f.last().copied().unwrap_or(0.0) - f.first().copied().unwrap_or(0.0);
        return Err(Error::InvalidParameter(format!(
            "rotation generator overflows: corrected Bohr frequencies span {spread:.3e} at beta = {beta}, beyond the weak-coupling range"
        )));
    }
    let r = HermitianOperator::with_tolerance(r, COMPUTED_HERMITIAN_TOL)?;

    let u = unitary_exp(&r, lambda * lambda);
    let h_mf = HermitianOperator::with_tolerance(&u * hs_prime.matrix() * u.adjoint(), COMPUTED_HERMITIAN_TOL)?;
    Ok(ExponentialForm { hs_prime, r, h_mf })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HighTVariant {
    /// Expansion through first order in `beta` with the generator applied
    /// additively.
    General,
    /// Generator term replaced by the semigroup `Phi_{beta/3}` acting on `H_S`.
    Semigroup,
    /// One Hermitian coupling with non-degenerate spectrum.
    SingleCoupling,
    /// Couplings are orthonormal rank-one projectors and `Lambda` is diagonal.
    PointerBasis,
}

#[derive(Clone, Debug)]
pub struct HighTResult {
    pub h_mf: HermitianOperator,
    pub variant: HighTVariant,
    pub beta: f64,
}

fn re_part(m: &CMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect()).collect()
}

/// `sum_{mu nu} coeff_{mu nu} A_mu^dag A_nu`.
fn bilinear(couplings: &[CMatrix], coeff: &[Vec<f64>], scale: crate::operators::C64) -> CMatrix {
    let n = couplings[0].nrows();
    let mut out = CMatrix::zeros(n, n);
    for (mu, a_mu) in couplings.iter().enumerate() {
        let a_dag = a_mu.adjoint();
        for (nu, a_nu) in couplings.iter().enumerate() {
            if coeff[mu][nu] != 0.0 {
                out += (&a_dag * a_nu) * (scale * coeff[mu][nu]);
            }
        }
    }
    out
}

/// Generator `L(X) = sum Re Lambda_{mu nu} (A_mu^dag X A_nu - {X, A_mu^dag A_nu}/2)`
/// as a superoperator on column-stacked vectors.
pub fn reorganization_generator(couplings: &[CMatrix], reorg: &CMatrix) -> Result<CMatrix> {
    let n = couplings.first().map(|a| a.nrows()).ok_or_else(|| Error::InvalidParameter("no couplings".into()))?;
    check_dim(couplings.len(), reorg.nrows())?;
    check_dim(couplings.len(), reorg.ncols())?;
    let id = CMatrix::identity(n, n);
    let mut l = CMatrix::zeros(n * n, n * n);
    for (mu, a_mu) in couplings.iter().enumerate() {
        let a_dag = a_mu.adjoint();
        for (nu, a_nu) in couplings.iter().enumerate() {
            let lam = reorg[(mu, nu)].re;
            if lam == 0.0 {
                continue;
            }
            let k = &a_dag * a_nu;
            // vec(A X B) = (B^T (x) A) vec X
            let sandwich = tensor_product(&a_nu.transpose(), &a_dag);
            let left = tensor_product(&id, &k);
            let right = tensor_product(&k.transpose(), &id);
            l += (sandwich - (left + right) * c(0.5, 0.0)) * c(lam, 0.0);
        }
    }
    Ok(l)
}

/// `Phi_t(X) = exp(t L)(X)` for the reorganization generator.
pub fn apply_semigroup(couplings: &[CMatrix], reorg: &CMatrix, t: f64, x: &CMatrix) -> Result<CMatrix> {
    let n = x.nrows();
    let l = reorganization_generator(couplings, reorg)?;
    check_dim(l.nrows(), n * n)?;
    let prop = (l * c(t, 0.0)).exp();
    let v = prop * CMatrix::from_column_slice(n * n, 1, x.as_slice());
    Ok(CMatrix::from_column_slice(n, n, v.as_slice()))
}

/// Terms of order `beta` that do not involve `H_S`: the imaginary part of
/// the first moment and the products of two reorganization matrices.
fn high_t_quartic_terms(couplings: &[CMatrix], moments: &ReorgMoments, beta: f64) -> CMatrix {
    let lam = re_part(&moments.reorg);
    let im_m: Vec<Vec<f64>> = (0..couplings.len())
        .map(|i| (0..couplings.len()).map(|j| moments.first_moment[(i, j)].im).collect())
        .collect();
    let q = bilinear(couplings, &lam, c(1.0, 0.0));
    let mut out = bilinear(couplings, &im_m, c(0.0, -beta / 6.0));
    out += (&q * &q) * c(beta / 3.0, 0.0);
    let n = couplings[0].nrows();
    let mut sym = CMatrix::zeros(n, n);
    for (m1, a_m1) in couplings.iter().enumerate() {
        for (n1, a_n1) in couplings.iter().enumerate() {
            let l1 = lam[m1][n1];
            if l1 == 0.0 {
                continue;
            }
            for (m2, a_m2) in couplings.iter().enumerate() {
                for (n2, a_n2) in couplings.iter().enumerate() {
                    let l2 = lam[m2][n2];
                    if l2 == 0.0 {
                        continue;
                    }
                    sym += (a_m1.adjoint() * a_m2.adjoint() * anticommutator(a_n1, a_n2)) * c(l1 * l2, 0.0);
                }
            }
        }
    }
    out - sym * c(beta / 6.0, 0.0)
}

/// Relative size below which an off-diagonal entry counts as zero in the
/// structure checks of the special-case variants.
const STRUCTURE_TOL: f64 = 1e-12;

pub fn hmf_high_temperature(
    hs: &HermitianOperator,
    couplings: &[CMatrix],
    moments: &ReorgMoments,
    beta: f64,
    variant: HighTVariant,
) -> Result<HighTResult> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
    }
    if couplings.is_empty() {
        return Err(Error::InvalidParameter("at least one coupling operator is required".into()));
    }
    check_system(hs, couplings)?;
    check_dim(couplings.len(), moments.reorg.nrows())?;
    check_dim(couplings.len(), moments.reorg.ncols())?;
    let h = hs.matrix();
    let lam = re_part(&moments.reorg);

    let m = match variant {
        HighTVariant::General => {
            let mut out = h - bilinear(couplings, &lam, c(1.0, 0.0));
            let mut gen = CMatrix::zeros(h.nrows(), h.nrows());
            for (mu, a_mu) in couplings.iter().enumerate() {
                for (nu, a_nu) in couplings.iter().enumerate() {
                    if lam[mu][nu] == 0.0 {
                        continue;
                    }
                    let k = a_mu.adjoint() * a_nu;
                    gen += (a_mu.adjoint() * h * a_nu - anticommutator(h, &k) * c(0.5, 0.0)) * c(lam[mu][nu], 0.0);
                }
            }
            out += gen * c(beta / 3.0, 0.0);
            out + high_t_quartic_terms(couplings, moments, beta)
        }
        HighTVariant::Semigroup => {
            apply_semigroup(couplings, &moments.reorg, beta / 3.0, h)? - bilinear(couplings, &lam, c(1.0, 0.0))
                + high_t_quartic_terms(couplings, moments, beta)
        }
        HighTVariant::PointerBasis => pointer_basis_hmf(h, couplings, moments, beta)?,
        HighTVariant::SingleCoupling => single_coupling_hmf(hs, couplings, moments, beta)?,
    };
    let h_mf = HermitianOperator::with_tolerance(m, COMPUTED_HERMITIAN_TOL)?;
    Ok(HighTResult { h_mf, variant, beta })
}

fn pointer_basis_hmf(h: &CMatrix, couplings: &[CMatrix], moments: &ReorgMoments, beta: f64) -> Result<CMatrix> {
    let n = h.nrows();
    if couplings.len() != n {
        return Err(Error::NotPointerBasis(format!(
            "{} couplings for a {n}-dimensional system",
            couplings.len()
        )));
    }
    let mut total = CMatrix::zeros(n, n);
    for (mu, p) in couplings.iter().enumerate() {
        if (p * p - p).norm() > 1e-10 || (trace(p) - c(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::NotPointerBasis(format!("coupling {mu} is not a rank-one projector")));
        }
        for (nu, q) in couplings.iter().enumerate().skip(mu + 1) {
            if (p * q).norm() > 1e-10 {
                return Err(Error::NotPointerBasis(format!("couplings {mu} and {nu} are not orthogonal")));
            }
        }
        total += p;
    }
    if (total - CMatrix::identity(n, n)).norm() > 1e-10 {
        return Err(Error::NotPointerBasis("projectors do not resolve the identity".into()));
    }
    let scale = moments.reorg.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for mu in 0..n {
        for nu in 0..n {
            if mu != nu && moments.reorg[(mu, nu)].norm() > STRUCTURE_TOL * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::NotPointerBasis(format!("Lambda[{mu}][{nu}] is nonzero")));
            }
        }
    }
    let mut h_diag = CMatrix::zeros(n, n);
    let mut lam_hat = CMatrix::zeros(n, n);
    let mut damp = CMatrix::zeros(n, n);
    for (mu, p) in couplings.iter().enumerate() {
        let l = moments.reorg[(mu, mu)].re;
        h_diag += p * h * p;
        lam_hat += p * c(l, 0.0);
        damp += p * c((-beta * l / 6.0).exp(), 0.0);
    }
    let h_off = h - &h_diag;
    Ok(h_diag - lam_hat + &damp * h_off * &damp)
}

fn single_coupling_hmf(hs: &HermitianOperator, couplings: &[CMatrix], moments: &ReorgMoments, beta: f64) -> Result<CMatrix> {
    if couplings.len() != 1 {
        return Err(Error::InvalidParameter(format!(
            "single-coupling variant needs exactly one coupling, got {}",
            couplings.len()
        )));
    }
    let a = HermitianOperator::with_tolerance(couplings[0].clone(), COMPUTED_HERMITIAN_TOL)?;
    let eig: Eigh = a.eigh();
    let values = &eig.values;
    let range = values[values.len() - 1] - values[0];
    let min_gap = values
        .as_slice()
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    if min_gap <= 1e-9 * range.max(1.0) {
        return Err(Error::DegenerateCoupling(min_gap));
    }
    let lam = moments.reorg[(0, 0)].re;
    let j = eig.to_eigenbasis(hs.matrix());
    let n = j.nrows();
    let out = CMatrix::from_fn(n, n, |r, s| {
        if r == s {
            j[(r, r)] - c(lam * values[r] * values[r], 0.0)
        } else {
            let d = values[r] - values[s];
            j[(r, s)] * (-beta * lam * d * d / 6.0).exp()
        }
    });
    Ok(eig.from_eigenbasis(&out))
}

/// Normalized `e^{-beta H_MF}`.
pub fn state_from_hmf(h_mf: &HermitianOperator, beta: f64) -> Result<DensityMatrix> {
    gibbs_state(h_mf, beta)
}

/// `-(1/beta) ln(numerator)` for a positive-definite reduced numerator.
pub fn hmf_from_reduced_numerator(numerator: &CMatrix, beta: f64) -> Result<HermitianOperator> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
    }
    let m = HermitianOperator::with_tolerance(numerator.clone(), COMPUTED_HERMITIAN_TOL)?;
    Ok(matrix_log_hermitian(&m)?.scale(-1.0 / beta))
}
