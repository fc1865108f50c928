//! High-temperature hierarchical equations of motion for a Drude-Lorentz
//! bath. The correlation function is approximated by a single exponential
//! `C(t) = (c_R + i c_I) e^{-gamma t}` with `c_R = 2 Lambda / beta` and
//! `c_I = -Lambda gamma`; auxiliary operators are rescaled by
//! `sqrt(n! |c|^n)`.

use crate::bath::DrudeLorentzBath;
use crate::error::{Error, Result};
use crate::master_eq::Trajectory;
use crate::ode::{integrate_linear, CVector, OdeOptions};
use crate::operators::{c, check_dim, CMatrix, DensityMatrix, HermitianOperator};

pub const DEFAULT_MAX_DEPTH: usize = 40;

#[derive(Clone, Debug)]
pub struct Hierarchy {
    pub depth: usize,
    pub hs: HermitianOperator,
    pub v: HermitianOperator,
    pub bath: DrudeLorentzBath,
    pub beta: f64,
    generator: CMatrix,
}

impl Hierarchy {
    pub fn dim(&self) -> usize {
        self.hs.dim()
    }

    /// `(c_R, c_I)`.
    pub fn coefficients(&self) -> (f64, f64) {
        kernel(&self.bath, self.beta)
    }

    /// Generator on the stacked, column-vectorized tiers `0..=depth`.
    pub fn generator(&self) -> &CMatrix {
        &self.generator
    }
}

fn kernel(bath: &DrudeLorentzBath, beta: f64) -> (f64, f64) {
    (2.0 * bath.reorg / beta, -bath.reorg * bath.cutoff)
}

pub fn build_hierarchy(
    hs: &HermitianOperator,
    v: &HermitianOperator,
    bath: &DrudeLorentzBath,
    beta: f64,
    depth: usize,
) -> Result<Hierarchy> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
    }
    if depth < 1 {
        return Err(Error::InvalidParameter("hierarchy depth must be at least 1".into()));
    }
    let bg = beta * bath.cutoff;
    if bg >= 1.0 {
        return Err(Error::ValidityGate(format!(
            "beta*gamma = {bg} >= 1 is outside the high-temperature hierarchy"
        )));
    }
    check_dim(hs.dim(), v.dim())?;

    let (c_r, c_i) = kernel(bath, beta);
    let generator = assemble(hs.matrix(), v.matrix(), c_r, c_i, bath.cutoff, depth);

    Ok(Hierarchy {
        depth,
        hs: hs.clone(),
        v: v.clone(),
        bath: bath.clone(),
        beta,
        generator,
    })
}

/// Generator for the kernel `(c_r + i c_i) e^{-gamma t}` on tiers `0..=depth`.
fn assemble(h: &CMatrix, vm: &CMatrix, c_r: f64, c_i: f64, gamma: f64, depth: usize) -> CMatrix {
    let n = h.nrows();
    let d = n * n;
    let id = CMatrix::identity(n, n);
    let h_cross = (id.kronecker(h) - h.transpose().kronecker(&id)) * c(0.0, -1.0);
    let v_cross = id.kronecker(vm) - vm.transpose().kronecker(&id);
    let v_circ = id.kronecker(vm) + vm.transpose().kronecker(&id);
    let c_abs = c_r.hypot(c_i);
    let down = &v_cross * c(c_r, 0.0) + &v_circ * c(0.0, c_i);

    let mut gen = CMatrix::zeros((depth + 1) * d, (depth + 1) * d);
    for tier in 0..=depth {
        let diag = &h_cross - CMatrix::identity(d, d) * c(tier as f64 * gamma, 0.0);
        gen.view_mut((tier * d, tier * d), (d, d)).copy_from(&diag);
        if c_abs == 0.0 {
            continue;
        }
        if tier < depth {
            let up = &v_cross * c(0.0, -((tier + 1) as f64 * c_abs).sqrt());
            gen.view_mut((tier * d, (tier + 1) * d), (d, d)).copy_from(&up);
        }
        if tier > 0 {
            let dn = &down * c(0.0, -(tier as f64 / c_abs).sqrt());
            gen.view_mut((tier * d, (tier - 1) * d), (d, d)).copy_from(&dn);
        }
    }
    gen
}

/// Propagates from the product initial condition: every auxiliary operator
/// starts at zero.
pub fn propagate_heom(h: &Hierarchy, rho0: &DensityMatrix, times: &[f64], opts: OdeOptions) -> Result<Trajectory> {
    let n = h.dim();
    check_dim(n, rho0.dim())?;
    let d = n * n;
    let mut y0 = CVector::zeros((h.depth + 1) * d);
    y0.rows_mut(0, d).copy_from_slice(rho0.matrix().as_slice());
    let ys = integrate_linear(&h.generator, &y0, times, opts)?;
    let physical = ys.into_iter().map(|y| y.rows(0, d).into_owned()).collect();
    Trajectory::from_vectors(times, physical, n)
}

/// Stationary state of the full hierarchy: the generator with one tier-0
/// diagonal row replaced by the trace condition.
pub fn heom_steady_state(h: &Hierarchy) -> Result<DensityMatrix> {
    let n = h.dim();
    let d = n * n;
    let mut a = h.generator.clone();
    let mut rhs = CVector::zeros(a.nrows());
    a.row_mut(0).fill(c(0.0, 0.0));
    for r in 0..n {
        a[(0, r * n + r)] = c(1.0, 0.0);
    }
    rhs[0] = c(1.0, 0.0);
    let lu = a.clone().lu();
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Integrator("singular hierarchy generator".into()))?;
    let resid = &rhs - &a * &x;
    if let Some(dx) = lu.solve(&resid) {
        x += dx;
    }
    let rho = CMatrix::from_column_slice(n, n, &x.as_slice()[..d]);
    DensityMatrix::normalized(rho)
}

/// Smallest depth `K` whose trajectory differs from depth `K + 2` by less
/// than `tol` in trace distance at every time.
pub fn converge_depth<F>(
    mut builder: F,
    rho0: &DensityMatrix,
    times: &[f64],
    tol: f64,
    max_depth: usize,
    opts: OdeOptions,
) -> Result<(usize, Trajectory)>
where
    F: FnMut(usize) -> Result<Hierarchy>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be > 0, got {tol}")));
    }
    let mut run = |k: usize| -> Result<Trajectory> { propagate_heom(&builder(k)?, rho0, times, opts) };
    let mut trajs: Vec<Trajectory> = vec![run(1)?, run(2)?];
    let mut change = f64::INFINITY;
    for k in 1..=max_depth.saturating_sub(2) {
        trajs.push(run(k + 2)?);
        change = trajs[k - 1].max_trace_distance(&trajs[k + 1])?;
        if change < tol {
            return Ok((k, trajs.swap_remove(k - 1)));
        }
    }
    Err(Error::DepthNotConverged {
        k_max: max_depth,
        change,
    })
}
