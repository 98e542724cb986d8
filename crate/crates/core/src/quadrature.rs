//! Adaptive Gauss–Kronrod (7/15) quadrature for vector-valued integrands.

use nalgebra::DVector;

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
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_DEPTH: u32 = 30;
/// Errors below this multiple of machine epsilon times the piece's size are roundoff.
const ROUNDOFF_FACTOR: f64 = 50.0;
const MAX_PIECES: usize = 1 << 14;

fn gk15<F>(f: &F, a: f64, b: f64, dim: usize) -> (DVector<f64>, f64)
where
    F: Fn(f64) -> DVector<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = DVector::zeros(dim);
    let mut gauss = DVector::zeros(dim);
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let nodes: &[f64] = if x == 0.0 { &[0.0] } else { &[x, -x] };
        for &s in nodes {
            let fx = f(center + half * s);
            kronrod.axpy(w, &fx, 1.0);
            if i % 2 == 1 {
                gauss.axpy(WG[i / 2], &fx, 1.0);
            }
        }
    }
    kronrod *= half;
    gauss *= half;
    let err = (&kronrod - &gauss).amax();
    (kronrod, err)
}

/// Integrates `f` over `[a, b]`, bisecting until each piece meets its share of `abs_tol`.
///
/// A piece is also accepted once its error estimate is at roundoff level relative
/// to its own magnitude, so rapidly growing integrands terminate.
pub fn integrate<F>(f: F, a: f64, b: f64, dim: usize, abs_tol: f64) -> DVector<f64>
where
    F: Fn(f64) -> DVector<f64>,
{
    if a == b {
        return DVector::zeros(dim);
    }
    let mut total = DVector::zeros(dim);
    let mut stack = vec![(a, b, 0u32)];
    let width = (b - a).abs();
    let mut pieces = 0usize;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = gk15(&f, lo, hi, dim);
        pieces += 1;
        let budget = (abs_tol * (hi - lo).abs() / width).max(ROUNDOFF_FACTOR * f64::EPSILON * value.amax());
        if err <= budget || depth >= MAX_DEPTH || pieces >= MAX_PIECES {
            total += value;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_and_trig() {
        let v = integrate(|s| DVector::from_vec(vec![s * s, s.sin(), (3.0 * s).exp()]), 0.0, 2.0, 3, 1e-13);
        assert!((v[0] - 8.0 / 3.0).abs() < 1e-13);
        assert!((v[1] - (1.0 - 2.0f64.cos())).abs() < 1e-13);
        assert!((v[2] - ((6.0f64).exp() - 1.0) / 3.0).abs() < 1e-10);
    }

    #[test]
    fn growing_integrand_terminates() {
        let v = integrate(|s| DVector::from_vec(vec![(3.0 * s).exp()]), 0.0, 10.0, 1, 1e-12);
        let exact = ((30.0f64).exp() - 1.0) / 3.0;
        assert!((v[0] - exact).abs() < 1e-13 * exact);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let v = integrate(|s| DVector::from_vec(vec![s]), 1.0, 0.0, 1, 1e-14);
        assert!((v[0] + 0.5).abs() < 1e-14);
    }
}
