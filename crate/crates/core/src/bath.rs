//! Harmonic baths and their thermal coefficient functions.
//!
//! A bath enters through `C_{mu nu}(beta')`, the imaginary-time correlation
//! function of the coupling operators `B_mu`. Everything downstream only needs
//! the functions `S_{mu nu}(w)` and `S'_{mu nu}(w)`: the integrated correlation
//! `C_hat`, its derivative and the lineshape coefficients `G` are assembled
//! from them. Matrices over the coupling indices `(mu, nu)` are returned as
//! `CMatrix` of size `coupling_count() x coupling_count()`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{c, CMatrix, C64};

/// Relative width around `|w'-w| = 0` in which `G(w, w')` uses the
/// coincident-frequency formula.
pub const G_DIAGONAL_SWITCH: f64 = 1e-7;

pub const DEFAULT_MATSUBARA_TERMS: usize = 1000;

/// `1 / (e^{beta w} - 1)`.
pub fn bose_einstein(beta: f64, omega: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
    }
    let x = beta * omega;
    if x == 0.0 {
        return Err(Error::InvalidParameter("Bose-Einstein pole at beta*omega = 0".into()));
    }
    Ok(1.0 / x.exp_m1())
}

/// `x / (1 - e^{-beta x})`, continuous through `x = 0` where it equals `1/beta`.
pub fn thermal_factor(beta: f64, x: f64) -> f64 {
    let y = beta * x;
    if y.abs() < 1e-6 {
        (1.0 + 0.5 * y + y * y / 12.0) / beta
    } else {
        x / -(-y).exp_m1()
    }
}

/// Reorganization matrix `Lambda_{mu nu} = int J_{mu nu}(w)/w dw` and first
/// moment `M_{mu nu} = int J_{mu nu}(w) dw`.
#[derive(Clone, Debug)]
pub struct ReorgMoments {
    pub reorg: CMatrix,
    /// Diverges for the Drude-Lorentz density; stored as `+inf` real parts
    /// with zero imaginary parts there. Only `Im M` enters the
    /// high-temperature expansion.
    pub first_moment: CMatrix,
}

/// Coefficient functions shared by every harmonic bath.
pub trait ThermalBath {
    fn coupling_count(&self) -> usize;

    /// `S_{mu nu}(w)`, a principal-value integral for continuum baths.
    fn s_function(&self, beta: f64, omega: f64) -> Result<CMatrix>;

    fn s_derivative(&self, beta: f64, omega: f64) -> Result<CMatrix>;

    fn reorg_moments(&self) -> ReorgMoments;

    /// `C_hat_{mu nu}(w) = -[S_{mu nu}(w) + e^{beta w} S_{nu mu}(-w)]`.
    fn c_hat(&self, beta: f64, omega: f64) -> Result<CMatrix> {
        let s = self.s_function(beta, omega)?;
        let s_neg = self.s_function(beta, -omega)?;
        Ok(-(s + s_neg.transpose() * c((beta * omega).exp(), 0.0)))
    }

    /// `d C_hat / dw = -S'(w) - beta e^{beta w} S^T(-w) + e^{beta w} S'^T(-w)`.
    fn c_hat_derivative(&self, beta: f64, omega: f64) -> Result<CMatrix> {
        let sp = self.s_derivative(beta, omega)?;
        let s_neg = self.s_function(beta, -omega)?.transpose();
        let sp_neg = self.s_derivative(beta, -omega)?.transpose();
        let e = c((beta * omega).exp(), 0.0);
        Ok(-sp - s_neg * (e * beta) + sp_neg * e)
    }

    /// Lineshape coefficient `G_{mu nu}(w, w')`.
    fn g_coeff(&self, beta: f64, omega: f64, omega_prime: f64) -> Result<CMatrix> {
        let chat = self.c_hat(beta, omega)?;
        if near_diagonal(omega, omega_prime) {
            let dchat = self.c_hat_derivative(beta, omega)?;
            Ok(g_diagonal(beta, &chat, &dchat))
        } else {
            let chat_p = self.c_hat(beta, omega_prime)?;
            Ok(g_off_diagonal(beta, omega, omega_prime, &chat, &chat_p))
        }
    }
}

pub(crate) fn near_diagonal(omega: f64, omega_prime: f64) -> bool {
    (omega_prime - omega).abs() < G_DIAGONAL_SWITCH * 1f64.max(omega.abs()).max(omega_prime.abs())
}

/// `G(w, w) = beta C_hat(w) - C_hat'(w)`, the limit of the off-diagonal form.
pub(crate) fn g_diagonal(beta: f64, chat: &CMatrix, dchat: &CMatrix) -> CMatrix {
    chat * c(beta, 0.0) - dchat
}

/// `G(w, w') = [e^{beta (w'-w)} C_hat(w) - C_hat(w')] / (w' - w)`.
pub(crate) fn g_off_diagonal(beta: f64, omega: f64, omega_prime: f64, chat: &CMatrix, chat_p: &CMatrix) -> CMatrix {
    let d = omega_prime - omega;
    (chat * c((beta * d).exp(), 0.0) - chat_p) / c(d, 0.0)
}

/// One harmonic mode with couplings `g_{mu xi}` to every coupling channel.
#[derive(Clone, Debug, PartialEq)]
pub struct BathMode {
    pub frequency: f64,
    pub couplings: Vec<C64>,
}

/// Finite set of harmonic modes, `J_{mu nu}(w) = sum_xi conj(g_{mu xi}) g_{nu xi} delta(w - w_xi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteBath {
    modes: Vec<BathMode>,
    channels: usize,
}

impl DiscreteBath {
    pub fn new(modes: Vec<BathMode>) -> Result<Self> {
        let first = modes
            .first()
            .ok_or_else(|| Error::InvalidParameter("a discrete bath needs at least one mode".into()))?;
        let channels = first.couplings.len();
        if channels == 0 {
            return Err(Error::InvalidParameter("bath modes need at least one coupling channel".into()));
        }
        for m in &modes {
            if !(m.frequency > 0.0) || !m.frequency.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "mode frequencies must be > 0, got {}",
                    m.frequency
                )));
            }
            if m.couplings.len() != channels {
                return Err(Error::DimensionMismatch {
                    expected: channels,
                    found: m.couplings.len(),
                });
            }
        }
        Ok(Self { modes, channels })
    }

    /// One mode with a real coupling to a single channel.
    pub fn single_mode(frequency: f64, g: f64) -> Result<Self> {
        Self::new(vec![BathMode {
            frequency,
            couplings: vec![c(g, 0.0)],
        }])
    }

    pub fn modes(&self) -> &[BathMode] {
        &self.modes
    }

    /// `J_{mu nu}` weight of one mode.
    fn weight(&self, mode: &BathMode) -> CMatrix {
        let n = self.channels;
        CMatrix::from_fn(n, n, |mu, nu| mode.couplings[mu].conj() * mode.couplings[nu])
    }

    fn check_resonance(&self, omega: f64) -> Result<()> {
        for (i, m) in self.modes.iter().enumerate() {
            if (m.frequency - omega.abs()).abs() <= 1e-12 * m.frequency.max(1.0) {
                return Err(Error::Resonance {
                    omega,
                    mode: i,
                    mode_frequency: m.frequency,
                });
            }
        }
        Ok(())
    }

    /// Imaginary-time correlation function `C_{mu nu}(beta')` for
    /// `0 <= beta' <= beta`.
    pub fn corr_imag_time(&self, beta: f64, beta_prime: f64) -> Result<CMatrix> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
        }
        if !(0.0..=beta).contains(&beta_prime) {
            return Err(Error::InvalidParameter(format!(
                "beta' = {beta_prime} outside [0, {beta}]"
            )));
        }
        let n = self.channels;
        let mut out = CMatrix::zeros(n, n);
        for m in &self.modes {
            let occ = bose_einstein(beta, m.frequency)?;
            let j = self.weight(m);
            let down = (occ + 1.0) * (-beta_prime * m.frequency).exp();
            let up = occ * (beta_prime * m.frequency).exp();
            out += &j * c(down, 0.0) + j.transpose() * c(up, 0.0);
        }
        Ok(out)
    }
}

impl ThermalBath for DiscreteBath {
    fn coupling_count(&self) -> usize {
        self.channels
    }

    fn s_function(&self, beta: f64, omega: f64) -> Result<CMatrix> {
        self.check_resonance(omega)?;
        let n = self.channels;
        let mut out = CMatrix::zeros(n, n);
        for m in &self.modes {
            let occ = bose_einstein(beta, m.frequency)?;
            let j = self.weight(m);
            out += j.map(|z| z.conj()) * c(occ / (m.frequency + omega), 0.0)
                - j * c((occ + 1.0) / (m.frequency - omega), 0.0);
        }
        Ok(out)
    }

    fn s_derivative(&self, beta: f64, omega: f64) -> Result<CMatrix> {
        self.check_resonance(omega)?;
        let n = self.channels;
        let mut out = CMatrix::zeros(n, n);
        for m in &self.modes {
            let occ = bose_einstein(beta, m.frequency)?;
            let j = self.weight(m);
            let up = m.frequency + omega;
            let down = m.frequency - omega;
            out -= j.map(|z| z.conj()) * c(occ / (up * up), 0.0) + j * c((occ + 1.0) / (down * down), 0.0);
        }
        Ok(out)
    }

    fn reorg_moments(&self) -> ReorgMoments {
        let n = self.channels;
        let mut reorg = CMatrix::zeros(n, n);
        let mut first_moment = CMatrix::zeros(n, n);
        for m in &self.modes {
            let j = self.weight(m);
            reorg += &j / c(m.frequency, 0.0);
            first_moment += j;
        }
        ReorgMoments { reorg, first_moment }
    }
}

/// Overdamped-oscillator continuum `J(w) = (Lambda/pi) 2 w gamma / (w^2 + gamma^2)`
/// attached to a single coupling channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DrudeLorentzBath {
    pub reorg: f64,
    pub cutoff: f64,
    pub matsubara_terms: usize,
}

impl DrudeLorentzBath {
    pub fn new(reorg: f64, cutoff: f64) -> Result<Self> {
        if !(reorg >= 0.0) || !reorg.is_finite() {
            return Err(Error::InvalidParameter(format!("reorganization energy must be >= 0, got {reorg}")));
        }
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(Error::InvalidParameter(format!("cutoff must be > 0, got {cutoff}")));
        }
        Ok(Self {
            reorg,
            cutoff,
            matsubara_terms: DEFAULT_MATSUBARA_TERMS,
        })
    }

    pub fn with_matsubara_terms(mut self, terms: usize) -> Self {
        self.matsubara_terms = terms.max(1);
        self
    }

    /// Spectral density, odd in `w`.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        let g = self.cutoff;
        self.reorg / PI * 2.0 * omega * g / (omega * omega + g * g)
    }

    fn check_matsubara_pole(&self, beta: f64) -> Result<()> {
        let x = beta * self.cutoff / (2.0 * PI);
        if x.round() >= 1.0 && (x - x.round()).abs() < 1e-9 {
            return Err(Error::MatsubaraPole(beta * self.cutoff));
        }
        Ok(())
    }

    fn check_beta(beta: f64) -> Result<()> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
        }
        Ok(())
    }

    /// Leading Matsubara amplitude `c_0 = Lambda gamma (cot(beta gamma / 2) - i)`.
    fn c0(&self, beta: f64) -> C64 {
        let g = self.cutoff;
        let cot = 1.0 / (0.5 * beta * g).tan();
        c(self.reorg * g * cot, -self.reorg * g)
    }

    /// Amplitude of the k-th Matsubara exponential, `nu_k = 2 pi k / beta`.
    fn ck(&self, beta: f64, nu: f64) -> f64 {
        let g = self.cutoff;
        4.0 * self.reorg * g / beta * nu / (nu * nu - g * g)
    }

    /// Truncated Matsubara sums for `(Re Gamma, Im Gamma, d Im Gamma / dw)`.
    /// The tail beyond `K` terms is replaced by the integral of the summand
    /// from `K + 1/2` to infinity, evaluated in closed form.
    fn matsubara_sums(&self, beta: f64, omega: f64) -> (f64, f64, f64) {
        let g = self.cutoff;
        let w = omega;
        let c0 = self.c0(beta);
        let denom = c(g, -w);
        let t0 = c0 / denom;
        let dt0 = c0 * c(0.0, 1.0) / (denom * denom);
        let (mut re, mut im, mut dim) = (t0.re, t0.im, dt0.im);
        let k_max = self.matsubara_terms;
        for k in 1..=k_max {
            let nu = 2.0 * PI * k as f64 / beta;
            let ck = self.ck(beta, nu);
            let d = nu * nu + w * w;
            re += ck * nu / d;
            im += ck * w / d;
            dim += ck * (nu * nu - w * w) / (d * d);
        }
        let nu_star = 2.0 * PI * (k_max as f64 + 0.5) / beta;
        let u = nu_star * nu_star;
        let g2 = g * g;
        let w2 = w * w;
        // sum_k -> (beta / 2 pi) int d nu; c_k = pref * nu / (nu^2 - g^2)
        let pref = 4.0 * self.reorg * g / beta * beta / (2.0 * PI);
        let log_ratio = ((u - g2) / (u + w2)).ln();
        re += pref / (g2 + w2) * (0.5 * g * ((nu_star + g) / (nu_star - g)).ln() + w * (w / nu_star).atan());
        im += pref * w / (g2 + w2) * (-0.5 * log_ratio);
        let a = (g2 - w2) / ((g2 + w2) * (g2 + w2));
        let cc = 2.0 * w2 / (g2 + w2);
        dim += pref * 0.5 * (-a * log_ratio + cc / (u + w2));
        (re, im, dim)
    }

    /// `Gamma(w) = int_0^inf C(t) e^{i w t} dt` with both parts taken from the
    /// Matsubara expansion. The real part converges only like `1/K`; prefer
    /// [`DrudeLorentzBath::gamma`].
    pub fn gamma_matsubara(&self, beta: f64, omega: f64) -> Result<C64> {
        Self::check_beta(beta)?;
        self.check_matsubara_pole(beta)?;
        let (re, im, _) = self.matsubara_sums(beta, omega);
        Ok(c(re, im))
    }

    /// `Gamma(w)`: real part `pi J(w) (n(w) + 1)` in closed form, imaginary
    /// part (the Lamb-shift function `S(w)`) from the Matsubara expansion.
    pub fn gamma(&self, beta: f64, omega: f64) -> Result<C64> {
        Self::check_beta(beta)?;
        if self.reorg == 0.0 {
            return Ok(c(0.0, 0.0));
        }
        self.check_matsubara_pole(beta)?;
        let g = self.cutoff;
        let re = self.reorg * 2.0 * g / (omega * omega + g * g) * thermal_factor(beta, omega);
        let (_, im, _) = self.matsubara_sums(beta, omega);
        Ok(c(re, im))
    }
}

impl ThermalBath for DrudeLorentzBath {
    fn coupling_count(&self) -> usize {
        1
    }

    fn s_function(&self, beta: f64, omega: f64) -> Result<CMatrix> {
        Ok(CMatrix::from_element(1, 1, c(self.gamma(beta, omega)?.im, 0.0)))
    }

    fn s_derivative(&self, beta: f64, omega: f64) -> Result<CMatrix> {
        Self::check_beta(beta)?;
        if self.reorg == 0.0 {
            return Ok(CMatrix::zeros(1, 1));
        }
        self.check_matsubara_pole(beta)?;
        let (_, _, dim) = self.matsubara_sums(beta, omega);
        Ok(CMatrix::from_element(1, 1, c(dim, 0.0)))
    }

    fn reorg_moments(&self) -> ReorgMoments {
        ReorgMoments {
            reorg: CMatrix::from_element(1, 1, c(self.reorg, 0.0)),
            first_moment: CMatrix::from_element(
                1,
                1,
                if self.reorg == 0.0 { c(0.0, 0.0) } else { c(f64::INFINITY, 0.0) },
            ),
        }
    }
}

/// Either bath description.
#[derive(Clone, Debug, PartialEq)]
pub enum Bath {
    Discrete(DiscreteBath),
    DrudeLorentz(DrudeLorentzBath),
}

impl Bath {
    fn inner(&self) -> &dyn ThermalBath {
        match self {
            Bath::Discrete(b) => b,
            Bath::DrudeLorentz(b) => b,
        }
    }
}

impl ThermalBath for Bath {
    fn coupling_count(&self) -> usize {
        self.inner().coupling_count()
    }

    fn s_function(&self, beta: f64, omega: f64) -> Result<CMatrix> {
        self.inner().s_function(beta, omega)
    }

    fn s_derivative(&self, beta: f64, omega: f64) -> Result<CMatrix> {
        self.inner().s_derivative(beta, omega)
    }

    fn reorg_moments(&self) -> ReorgMoments {
        self.inner().reorg_moments()
    }
}

/// Half-Fourier transform of the real-time correlation function. Only a
/// continuum bath has a convergent transform.
pub fn gamma_half_fourier(bath: &Bath, beta: f64, omega: f64) -> Result<Complex64> {
    match bath {
        Bath::Discrete(_) => Err(Error::DiscreteBath),
        Bath::DrudeLorentz(b) => b.gamma(beta, omega),
    }
}

/// `C_hat`, `C_hat'` and `G` on the Bohr-frequency grid of one system.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    pub beta: f64,
    pub frequencies: Vec<f64>,
    pub c_hat: Vec<CMatrix>,
    pub c_hat_derivative: Vec<CMatrix>,
    /// `g[k][l] = G(frequencies[k], frequencies[l])`.
    pub g: Vec<Vec<CMatrix>>,
}

impl CoefficientTable {
    pub fn build<B: ThermalBath + ?Sized>(bath: &B, beta: f64, frequencies: &[f64]) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
        }
        let c_hat = frequencies
            .iter()
            .map(|&w| bath.c_hat(beta, w))
            .collect::<Result<Vec<_>>>()?;
        let c_hat_derivative = frequencies
            .iter()
            .map(|&w| bath.c_hat_derivative(beta, w))
            .collect::<Result<Vec<_>>>()?;
        let g = frequencies
            .iter()
            .enumerate()
            .map(|(k, &w)| {
                frequencies
                    .iter()
                    .enumerate()
                    .map(|(l, &wp)| {
                        if near_diagonal(w, wp) {
                            g_diagonal(beta, &c_hat[k], &c_hat_derivative[k])
                        } else {
                            g_off_diagonal(beta, w, wp, &c_hat[k], &c_hat[l])
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            beta,
            frequencies: frequencies.to_vec(),
            c_hat,
            c_hat_derivative,
            g,
        })
    }
}
