//! Adaptive Gauss-Kronrod (7/15) quadrature for complex-valued integrands.
//!
//! Used as an independent oracle for the closed-form bath coefficients; none
//! of the production code paths integrate numerically.

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_intervals: 200_000,
        }
    }
}

fn kronrod<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kron += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    (kron, (kron - gauss).norm())
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Complex64 {
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    let (first, first_err) = kronrod(&mut f, a, b);
    let mut intervals = vec![(a, b, first, first_err)];
    let mut total = first;
    let mut total_err = first_err;
    while total_err > opts.abs_tol.max(opts.rel_tol * total.norm()) && intervals.len() < opts.max_intervals {
        // bisect the interval with the largest error
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, val, err) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval can no longer be split in floating point
            intervals.push((lo, hi, val, 0.0));
            total_err -= err;
            continue;
        }
        let (v1, e1) = kronrod(&mut f, lo, mid);
        let (v2, e2) = kronrod(&mut f, mid, hi);
        total += v1 + v2 - val;
        total_err += e1 + e2 - err;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
    // re-sum to shed accumulated cancellation
    intervals.iter().map(|iv| iv.2).sum()
}

/// Integrates `f` over `[a, inf)` through the map `x = a + t / (1 - t)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, opts: QuadOptions) -> Complex64 {
    integrate(
        |t| {
            if t >= 1.0 {
                return Complex64::new(0.0, 0.0);
            }
            let x = a + t / (1.0 - t);
            let jac = 1.0 / ((1.0 - t) * (1.0 - t));
            let v = f(x) * jac;
            if v.re.is_finite() && v.im.is_finite() {
                v
            } else {
                Complex64::new(0.0, 0.0)
            }
        },
        0.0,
        1.0,
        opts,
    )
}

/// Iterated integral over the triangle `a <= y <= x <= b` of `f(x, y)`.
pub fn integrate_triangle<F: FnMut(f64, f64) -> Complex64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Complex64 {
    integrate(|x| integrate(|y| f(x, y), a, x, opts), a, b, opts)
}
