//! Adaptive Runge–Kutta–Fehlberg 7(8) integrator with dense sampling by step clamping.

use nalgebra::DVector;

use crate::error::{Error, Result};

const STAGES: usize = 13;

const C: [f64; STAGES] = [
    0.0,
    2.0 / 27.0,
    1.0 / 9.0,
    1.0 / 6.0,
    5.0 / 12.0,
    1.0 / 2.0,
    5.0 / 6.0,
    1.0 / 6.0,
    2.0 / 3.0,
    1.0 / 3.0,
    1.0,
    0.0,
    1.0,
];

#[rustfmt::skip]
const A: [[f64; 12]; STAGES] = [
    [0.0; 12],
    [2.0 / 27.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 36.0, 1.0 / 12.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 24.0, 0.0, 1.0 / 8.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-25.0 / 108.0, 0.0, 0.0, 125.0 / 108.0, -65.0 / 27.0, 125.0 / 54.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [31.0 / 300.0, 0.0, 0.0, 0.0, 61.0 / 225.0, -2.0 / 9.0, 13.0 / 900.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.0, 0.0, 0.0, -53.0 / 6.0, 704.0 / 45.0, -107.0 / 9.0, 67.0 / 90.0, 3.0, 0.0, 0.0, 0.0, 0.0],
    [-91.0 / 108.0, 0.0, 0.0, 23.0 / 108.0, -976.0 / 135.0, 311.0 / 54.0, -19.0 / 60.0, 17.0 / 6.0, -1.0 / 12.0, 0.0, 0.0, 0.0],
    [2383.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -301.0 / 82.0, 2133.0 / 4100.0, 45.0 / 82.0, 45.0 / 164.0, 18.0 / 41.0, 0.0, 0.0],
    [3.0 / 205.0, 0.0, 0.0, 0.0, 0.0, -6.0 / 41.0, -3.0 / 205.0, -3.0 / 41.0, 3.0 / 41.0, 6.0 / 41.0, 0.0, 0.0],
    [-1777.0 / 4100.0, 0.0, 0.0, -341.0 / 164.0, 4496.0 / 1025.0, -289.0 / 82.0, 2193.0 / 4100.0, 51.0 / 82.0, 33.0 / 164.0, 12.0 / 41.0, 0.0, 1.0],
];

// Eighth order weights; the seventh order solution differs only through stages 0, 10, 11, 12.
const B8: [f64; STAGES] = [
    0.0,
    0.0,
    0.0,
    0.0,
    0.0,
    34.0 / 105.0,
    9.0 / 35.0,
    9.0 / 35.0,
    9.0 / 280.0,
    9.0 / 280.0,
    0.0,
    41.0 / 840.0,
    41.0 / 840.0,
];
const ERR_COEF: f64 = 41.0 / 840.0;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-13, atol: 1e-13, h_init: 1e-3, h_min: 1e-12, max_steps: 2_000_000 }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions { rtol: tol, atol: tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates `y' = f(t, y)` from `t0` and returns the state at every time in
/// `times` (ascending, all `>= t0`).
pub fn integrate<F>(
    mut f: F,
    t0: f64,
    y0: &DVector<f64>,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<(Vec<DVector<f64>>, OdeStats)>
where
    F: FnMut(f64, &DVector<f64>) -> DVector<f64>,
{
    let mut out = Vec::with_capacity(times.len());
    let mut stats = OdeStats::default();
    let mut t = t0;
    let mut y = y0.clone();
    let mut h = opts.h_init;
    let mut k: Vec<DVector<f64>> = vec![DVector::zeros(y.len()); STAGES];

    for &target in times {
        if target < t {
            return Err(Error::IntegratorFailure(format!("sample time {target} precedes {t}")));
        }
        while target - t > 1e-15 * target.abs().max(1.0) {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::IntegratorFailure(format!("step budget exhausted at t = {t}")));
            }
            let last = h >= target - t;
            let step = if last { target - t } else { h };

            for s in 0..STAGES {
                let mut ys = y.clone();
                for (j, kj) in k.iter().enumerate().take(s) {
                    if A[s][j] != 0.0 {
                        ys.axpy(step * A[s][j], kj, 1.0);
                    }
                }
                k[s] = f(t + C[s] * step, &ys);
            }
            let mut y_new = y.clone();
            for (s, ks) in k.iter().enumerate() {
                if B8[s] != 0.0 {
                    y_new.axpy(step * B8[s], ks, 1.0);
                }
            }
            let err_vec = (&k[0] + &k[10] - &k[11] - &k[12]) * (step * ERR_COEF);
            let err = err_vec
                .iter()
                .zip(y_new.iter().zip(y.iter()))
                .map(|(e, (a, b))| e.abs() / (opts.atol + opts.rtol * a.abs().max(b.abs())))
                .fold(0.0, f64::max);

            if err <= 1.0 || step <= opts.h_min {
                if !err.is_finite() {
                    return Err(Error::StepSizeUnderflow { t });
                }
                t = if last { target } else { t + step };
                y = y_new;
                stats.accepted += 1;
            } else {
                stats.rejected += 1;
            }
            let factor = if err == 0.0 { 4.0 } else { (0.9 * err.powf(-1.0 / 8.0)).clamp(0.2, 4.0) };
            let proposed = step * factor;
            if !last || err > 1.0 {
                h = proposed;
            } else {
                h = h.max(proposed);
            }
            if h < opts.h_min && err > 1.0 {
                return Err(Error::StepSizeUnderflow { t });
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableau_rows_sum_to_nodes() {
        for s in 0..STAGES {
            let sum: f64 = A[s].iter().sum();
            assert!((sum - C[s]).abs() < 1e-14, "row {s}");
        }
        assert!((B8.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn harmonic_oscillator_period() {
        let f = |_t: f64, y: &DVector<f64>| DVector::from_vec(vec![y[1], -y[0]]);
        let y0 = DVector::from_vec(vec![1.0, 0.0]);
        let times = [std::f64::consts::PI, 2.0 * std::f64::consts::PI, 10.0];
        let (ys, _) = integrate(f, 0.0, &y0, &times, &OdeOptions::with_tol(1e-13)).unwrap();
        assert!((ys[0][0] + 1.0).abs() < 1e-11);
        assert!((ys[1][0] - 1.0).abs() < 1e-11);
        assert!((ys[2][0] - 10f64.cos()).abs() < 1e-11);
        assert!((ys[2][1] + 10f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn eighth_order_convergence_on_fixed_steps() {
        // y' = y cos t, y = exp(sin t). Compare errors with 8 and 16 clamped steps.
        let f = |t: f64, y: &DVector<f64>| y * t.cos();
        let exact = 2f64.sin().exp();
        let mut errs = Vec::new();
        for n in [8usize, 16] {
            let times: Vec<f64> = (1..=n).map(|i| 2.0 * i as f64 / n as f64).collect();
            let opts = OdeOptions { rtol: 1.0, atol: 1.0, h_init: 10.0, ..Default::default() };
            let (ys, _) = integrate(f, 0.0, &DVector::from_vec(vec![1.0]), &times, &opts).unwrap();
            errs.push((ys.last().unwrap()[0] - exact).abs());
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 7.0, "observed order {order}");
    }
}
