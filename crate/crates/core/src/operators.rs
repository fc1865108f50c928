//! Dense Hermitian operator algebra.
//!
//! Everything here works on dense complex matrices. Functions of Hermitian
//! operators (exponential, logarithm, imaginary-time conjugation) go through
//! the spectral decomposition, which is exact to machine precision for this
//! class of matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Relative Hermiticity tolerance for operators supplied by callers.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Hermiticity tolerance for operators assembled from perturbative sums.
pub const COMPUTED_HERMITIAN_TOL: f64 = 1e-9;

/// Blocks with a Frobenius norm below this (relative to the coupling norm)
/// are dropped from a Bohr decomposition.
pub const BLOCK_DROP_TOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `m - m†`, relative to the largest entry of `m`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    let n = m.nrows();
    let mut dev = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev / scale
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Pauli x in the basis (|0>, |1>).
pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

/// Pauli z with the convention `sigma_z = |1><1| - |0><0|`, so that |1> is the
/// upper level of `(eps/2) sigma_z`.
pub fn sigma_z() -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_vec(vec![c(-1.0, 0.0), c(1.0, 0.0)]))
}

pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    /// The input is assumed Hermitian; only its Hermitian part is used.
    pub fn new(m: &CMatrix) -> Self {
        let n = m.nrows();
        let (values, vectors) = if m.iter().all(|z| z.im == 0.0) {
            let re = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
            let (w, v) = lapack::syevd(re);
            (w, v.map(|x| c(x, 0.0)))
        } else {
            lapack::heevd(hermitian_part(m))
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted_values = DVector::from_iterator(n, order.iter().map(|&k| values[k]));
        let mut sorted_vectors = CMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            sorted_vectors.set_column(dst, &vectors.column(src));
        }
        Self {
            values: sorted_values,
            vectors: sorted_vectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V f(D) V†`.
    pub fn map<F: Fn(f64) -> C64>(&self, f: F) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fj = f(lam);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }

    pub fn to_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        self.vectors.adjoint() * x * &self.vectors
    }

    pub fn from_eigenbasis(&self, x: &CMatrix) -> CMatrix {
        &self.vectors * x * self.vectors.adjoint()
    }
}

/// A dense Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Validates squareness and Hermiticity (relative tolerance
    /// [`HERMITIAN_TOL`]), then stores the exact Hermitian part.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, HERMITIAN_TOL)
    }

    pub fn with_tolerance(matrix: CMatrix, tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::InvalidParameter("operator dimension must be >= 1".into()));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("operator has non-finite entries".into()));
        }
        let deviation = hermiticity_deviation(&matrix);
        if deviation > tol {
            return Err(Error::NotHermitian { deviation, tol });
        }
        Ok(Self {
            matrix: hermitian_part(&matrix),
        })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| c(x, 0.0)));
        Self {
            matrix: CMatrix::from_diagonal(&d),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn eigh(&self) -> Eigh {
        Eigh::new(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh().values.iter().copied().collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: &self.matrix * c(s, 0.0),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        self.eigh().values.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Trace-one, Hermitian, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-10;
    pub const PSD_TOL: f64 = 1e-10;

    pub fn new(matrix: CMatrix) -> Result<Self> {
        let state = Self::relaxed(matrix, HERMITIAN_TOL, Self::TRACE_TOL)?;
        let min = state.min_eigenvalue();
        if min < -Self::PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(state)
    }

    /// Checks Hermiticity and trace only. Used for propagated states of
    /// generators that are not guaranteed to be completely positive; callers
    /// inspect [`DensityMatrix::min_eigenvalue`] to report violations.
    pub fn relaxed(matrix: CMatrix, hermitian_tol: f64, trace_tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::InvalidState(format!(
                "shape {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let deviation = hermiticity_deviation(&matrix);
        if deviation > hermitian_tol {
            return Err(Error::InvalidState(format!(
                "Hermiticity deviation {deviation:.3e}"
            )));
        }
        let tr = trace(&matrix);
        if (tr - c(1.0, 0.0)).norm() > trace_tol {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        Ok(Self {
            matrix: hermitian_part(&matrix),
        })
    }

    /// Divides by the trace, symmetrizes the roundoff, then validates.
    pub fn normalized(matrix: CMatrix) -> Result<Self> {
        let tr = trace(&matrix);
        if !(tr.re.is_finite()) || tr.re <= 0.0 {
            return Err(Error::InvalidState(format!("trace {tr} cannot be normalized")));
        }
        let deviation = hermiticity_deviation(&matrix);
        if deviation > COMPUTED_HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                deviation,
                tol: COMPUTED_HERMITIAN_TOL,
            });
        }
        Self::new(hermitian_part(&matrix) / tr)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim) / c(dim as f64, 0.0),
        }
    }

    /// `|i><i|` in the computational basis.
    pub fn basis_state(dim: usize, i: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(i, i)] = c(1.0, 0.0);
        Self { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn population(&self, i: usize) -> f64 {
        self.matrix[(i, i)].re
    }

    pub fn coherence(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        Eigh::new(&self.matrix).values[0]
    }

    pub fn trace_distance(&self, other: &Self) -> f64 {
        trace_distance(&self.matrix, &other.matrix)
    }
}

/// `(1/2) ||a - b||_1` for Hermitian `a`, `b`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * Eigh::new(&(a - b)).values.iter().map(|x| x.abs()).sum::<f64>()
}

/// Eigenvalues grouped into degenerate eigenspaces.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    /// Distinct eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthogonal projector onto each eigenspace.
    pub projectors: Vec<CMatrix>,
    pub group_tol: f64,
    /// Group index of every eigenvector column of `eigh`.
    pub groups: Vec<usize>,
    pub eigh: Eigh,
}

/// `1e-9` times the spectral range, floored at the roundoff scale of the
/// largest eigenvalue.
pub fn default_group_tol(values: &DVector<f64>) -> f64 {
    let lo = values[0];
    let hi = values[values.len() - 1];
    let scale = lo.abs().max(hi.abs());
    (1e-9 * (hi - lo)).max(1e-13 * scale).max(f64::MIN_POSITIVE)
}

pub fn spectral_decompose(h: &HermitianOperator, group_tol: Option<f64>) -> Result<SpectralDecomposition> {
    let eigh = h.eigh();
    let range = eigh.values[eigh.dim() - 1] - eigh.values[0];
    let tol = match group_tol {
        Some(t) => {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter(format!("group_tol must be > 0, got {t}")));
            }
            if range > 0.0 && t > 0.5 * range {
                return Err(Error::GroupTolerance { tol: t, range });
            }
            t
        }
        None => default_group_tol(&eigh.values),
    };

    let n = eigh.dim();
    let mut groups = vec![0usize; n];
    let mut members: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..n {
        if eigh.values[k] - eigh.values[k - 1] > tol {
            members.push(Vec::new());
        }
        let g = members.len() - 1;
        groups[k] = g;
        members[g].push(k);
    }

    let mut eigenvalues = Vec::with_capacity(members.len());
    let mut projectors = Vec::with_capacity(members.len());
    for m in &members {
        eigenvalues.push(m.iter().map(|&k| eigh.values[k]).sum::<f64>() / m.len() as f64);
        let mut p = CMatrix::zeros(n, n);
        for &k in m {
            let v = eigh.vectors.column(k);
            p += &v * v.adjoint();
        }
        projectors.push(p);
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        projectors,
        group_tol: tol,
        groups,
        eigh,
    })
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigh.dim()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(CMatrix::zeros(n, n), |acc, (&e, p)| acc + p * c(e, 0.0))
    }
}

/// Eigenoperator decomposition `A_mu = sum_w A_{mu,w}` with
/// `[H, A_{mu,w}] = -w A_{mu,w}`.
#[derive(Clone, Debug)]
pub struct BohrDecomposition {
    /// Bohr frequencies carrying at least one nonzero block, ascending.
    pub frequencies: Vec<f64>,
    /// `blocks[mu][k]` is the block of coupling `mu` at `frequencies[k]`.
    pub blocks: Vec<Vec<CMatrix>>,
}

impl BohrDecomposition {
    pub fn coupling_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, mu: usize, k: usize) -> &CMatrix {
        &self.blocks[mu][k]
    }

    pub fn frequency_index(&self, omega: f64, tol: f64) -> Option<usize> {
        self.frequencies.iter().position(|&w| (w - omega).abs() <= tol)
    }
}

pub fn bohr_decompose(spec: &SpectralDecomposition, couplings: &[HermitianOperator]) -> Result<BohrDecomposition> {
    let mats: Vec<CMatrix> = couplings.iter().map(|a| a.matrix().clone()).collect();
    bohr_decompose_matrices(spec, &mats)
}

/// Same as [`bohr_decompose`] for arbitrary (not necessarily Hermitian)
/// coupling matrices.
pub fn bohr_decompose_matrices(spec: &SpectralDecomposition, couplings: &[CMatrix]) -> Result<BohrDecomposition> {
    let n = spec.dim();
    for a in couplings {
        check_dim(n, a.nrows())?;
        check_dim(n, a.ncols())?;
    }
    let ng = spec.eigenvalues.len();

    // Candidate frequencies E[col] - E[row] for every pair of eigenspaces.
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(ng * ng);
    for r in 0..ng {
        for cidx in 0..ng {
            pairs.push((spec.eigenvalues[cidx] - spec.eigenvalues[r], r, cidx));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let freq_tol = 2.0 * spec.group_tol;
    let mut cluster_of = vec![vec![0usize; ng]; ng];
    let mut cluster_freqs: Vec<Vec<f64>> = Vec::new();
    for (i, &(w, r, cidx)) in pairs.iter().enumerate() {
        if i == 0 || w - pairs[i - 1].0 > freq_tol {
            cluster_freqs.push(Vec::new());
        }
        let k = cluster_freqs.len() - 1;
        cluster_freqs[k].push(w);
        cluster_of[r][cidx] = k;
    }
    // Exact zero for the diagonal cluster.
    let nclusters = cluster_freqs.len();
    let mut freqs: Vec<f64> = cluster_freqs
        .iter()
        .map(|ws| ws.iter().sum::<f64>() / ws.len() as f64)
        .collect();
    let zero_cluster = cluster_of[0][0];
    freqs[zero_cluster] = 0.0;

    let transformed: Vec<CMatrix> = couplings.iter().map(|a| spec.eigh.to_eigenbasis(a)).collect();
    let mut raw_blocks: Vec<Vec<CMatrix>> = vec![vec![CMatrix::zeros(n, n); nclusters]; couplings.len()];
    for (mu, at) in transformed.iter().enumerate() {
        for j in 0..n {
            for i in 0..n {
                let k = cluster_of[spec.groups[i]][spec.groups[j]];
                raw_blocks[mu][k][(i, j)] = at[(i, j)];
            }
        }
    }

    let mut frequencies = Vec::new();
    let mut blocks: Vec<Vec<CMatrix>> = vec![Vec::new(); couplings.len()];
    for k in 0..nclusters {
        let keep = couplings.iter().enumerate().any(|(mu, a)| {
            let scale = a.norm().max(1.0);
            raw_blocks[mu][k].norm() >= BLOCK_DROP_TOL * scale
        });
        if !keep {
            continue;
        }
        frequencies.push(freqs[k]);
        for mu in 0..couplings.len() {
            blocks[mu].push(spec.eigh.from_eigenbasis(&raw_blocks[mu][k]));
        }
    }

    Ok(BohrDecomposition { frequencies, blocks })
}

/// `e^{-beta H} / Tr e^{-beta H}`.
pub fn gibbs_state(h: &HermitianOperator, beta: f64) -> Result<DensityMatrix> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
    }
    let eigh = h.eigh();
    let e0 = eigh.values[0];
    let z: f64 = eigh.values.iter().map(|&e| (-beta * (e - e0)).exp()).sum();
    let rho = eigh.map(|e| c((-beta * (e - e0)).exp() / z, 0.0));
    DensityMatrix::new(hermitian_part(&rho))
}

/// `e^{beta' H0} V e^{-beta' H0}`.
pub fn imaginary_time_conjugate(h0: &HermitianOperator, v: &CMatrix, beta_prime: f64) -> Result<CMatrix> {
    check_dim(h0.dim(), v.nrows())?;
    check_dim(h0.dim(), v.ncols())?;
    let eigh = h0.eigh();
    let mut vt = eigh.to_eigenbasis(v);
    let n = h0.dim();
    for j in 0..n {
        for i in 0..n {
            vt[(i, j)] *= (beta_prime * (eigh.values[i] - eigh.values[j])).exp();
        }
    }
    Ok(eigh.from_eigenbasis(&vt))
}

/// Trace over the second tensor factor of a `dim_sys * dim_bath` matrix
/// ordered as `system (x) bath`.
pub fn partial_trace_second(m: &CMatrix, dim_sys: usize, dim_bath: usize) -> Result<CMatrix> {
    check_dim(dim_sys * dim_bath, m.nrows())?;
    check_dim(dim_sys * dim_bath, m.ncols())?;
    Ok(CMatrix::from_fn(dim_sys, dim_sys, |s, t| {
        (0..dim_bath).map(|b| m[(s * dim_bath + b, t * dim_bath + b)]).sum()
    }))
}

pub fn partial_trace_bath(rho_total: &DensityMatrix, dim_sys: usize, dim_bath: usize) -> Result<DensityMatrix> {
    if dim_sys == 0 || dim_bath == 0 || dim_sys * dim_bath != rho_total.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho_total.dim(),
            found: dim_sys * dim_bath,
        });
    }
    DensityMatrix::new(partial_trace_second(rho_total.matrix(), dim_sys, dim_bath)?)
}

/// Logarithm of a positive-definite Hermitian matrix.
pub fn matrix_log_hermitian(m: &HermitianOperator) -> Result<HermitianOperator> {
    let eigh = m.eigh();
    let min = eigh.values[0];
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite(min));
    }
    Ok(HermitianOperator {
        matrix: hermitian_part(&eigh.map(|x| c(x.ln(), 0.0))),
    })
}

/// `e^{t H}` for real `t`.
pub fn matrix_exp_hermitian(h: &HermitianOperator, t: f64) -> CMatrix {
    h.eigh().map(|x| c((t * x).exp(), 0.0))
}

/// The unitary `e^{i theta H}`.
pub fn unitary_exp(h: &HermitianOperator, theta: f64) -> CMatrix {
    h.eigh().map(|x| C64::from_polar(1.0, theta * x))
}

extern "C" {
    fn openblas_set_num_threads(n: std::ffi::c_int);
}

/// Caps the worker threads of the linked BLAS. Callers that parallelize
/// over independent problems set this to one.
pub fn set_blas_threads(n: usize) {
    let n = n.clamp(1, i32::MAX as usize) as std::ffi::c_int;
    // SAFETY: plain setter exported by OpenBLAS, linked by the build script
    unsafe { openblas_set_num_threads(n) }
}

/// Symmetric and Hermitian eigensolvers from the system LAPACK.
mod lapack {
    use super::{CMatrix, C64};
    use nalgebra::{DMatrix, DVector};

    fn dim(n: usize) -> i32 {
        i32::try_from(n).expect("matrix dimension exceeds LAPACK index range")
    }

    pub fn syevd(mut a: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let n = dim(a.nrows());
        let mut w = vec![0.0f64; a.nrows()];
        if n == 0 {
            return (DVector::from_vec(w), a);
        }
        let mut info = 0;
        let mut wq = [0.0f64];
        let mut iq = [0i32];
        // SAFETY: column-major n x n buffer, workspace sizes from the query call
        unsafe {
            lapack_sys::dsyevd_(
                c"V".as_ptr(), c"L".as_ptr(), &n, a.as_mut_ptr(), &n, w.as_mut_ptr(),
                wq.as_mut_ptr(), &-1, iq.as_mut_ptr(), &-1, &mut info,
            );
        }
        let lwork = wq[0] as i32;
        let liwork = iq[0];
        let mut work = vec![0.0f64; lwork.max(1) as usize];
        let mut iwork = vec![0i32; liwork.max(1) as usize];
        unsafe {
            lapack_sys::dsyevd_(
                c"V".as_ptr(), c"L".as_ptr(), &n, a.as_mut_ptr(), &n, w.as_mut_ptr(),
                work.as_mut_ptr(), &lwork, iwork.as_mut_ptr(), &liwork, &mut info,
            );
        }
        assert_eq!(info, 0, "dsyevd failed with info = {info}");
        (DVector::from_vec(w), a)
    }

    pub fn heevd(mut a: CMatrix) -> (DVector<f64>, CMatrix) {
        let n = dim(a.nrows());
        let mut w = vec![0.0f64; a.nrows()];
        if n == 0 {
            return (DVector::from_vec(w), a);
        }
        let mut info = 0;
        let mut wq = [C64::new(0.0, 0.0)];
        let mut rq = [0.0f64];
        let mut iq = [0i32];
        // SAFETY: Complex64 is #[repr(C)] (re, im), layout-compatible with the
        // LAPACK complex type; column-major n x n buffer.
        unsafe {
            lapack_sys::zheevd_(
                c"V".as_ptr(), c"L".as_ptr(), &n, a.as_mut_ptr().cast(), &n, w.as_mut_ptr(),
                wq.as_mut_ptr().cast(), &-1, rq.as_mut_ptr(), &-1, iq.as_mut_ptr(), &-1, &mut info,
            );
        }
        let lwork = wq[0].re as i32;
        let lrwork = rq[0] as i32;
        let liwork = iq[0];
        let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
        let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
        let mut iwork = vec![0i32; liwork.max(1) as usize];
        unsafe {
            lapack_sys::zheevd_(
                c"V".as_ptr(), c"L".as_ptr(), &n, a.as_mut_ptr().cast(), &n, w.as_mut_ptr(),
                work.as_mut_ptr().cast(), &lwork, rwork.as_mut_ptr(), &lrwork, iwork.as_mut_ptr(), &liwork,
                &mut info,
            );
        }
        assert_eq!(info, 0, "zheevd failed with info = {info}");
        (DVector::from_vec(w), a)
    }
}
