//! Dense linear algebra over [`Scalar`]: row reduction, kernels and solves that are
//! exact for rationals, plus float-only helpers (SVD kernel, matrix exponential).

use nalgebra::{DMatrix, DVector};

use crate::scalar::Scalar;

/// Relative pivot threshold used by float row reduction.
const FLOAT_PIVOT_TOL: f64 = 1e-12;

/// Reduced row echelon form and the pivot columns.
pub fn rref<S: Scalar>(m: &DMatrix<S>) -> (DMatrix<S>, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let scale = a.iter().map(|x| x.magnitude()).fold(0.0, f64::max);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let pivot_row = if S::EXACT {
            (r..rows).find(|&i| !a[(i, c)].is_zero())
        } else {
            (r..rows)
                .max_by(|&i, &j| a[(i, c)].magnitude().total_cmp(&a[(j, c)].magnitude()))
                .filter(|&i| a[(i, c)].magnitude() > FLOAT_PIVOT_TOL * scale)
        };
        let Some(p) = pivot_row else {
            if !S::EXACT {
                for i in r..rows {
                    a[(i, c)] = S::zero();
                }
            }
            continue;
        };
        a.swap_rows(r, p);
        let inv = S::one() / a[(r, c)].clone();
        for j in c..cols {
            let v = a[(r, j)].clone() * inv.clone();
            a[(r, j)] = v;
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..cols {
                let v = a[(r, j)].clone() * f.clone();
                a[(i, j)] -= v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank<S: Scalar>(m: &DMatrix<S>) -> usize {
    rref(m).1.len()
}

/// Right kernel basis from the RREF: one vector per free column, with a 1 in that column.
pub fn kernel<S: Scalar>(m: &DMatrix<S>) -> Vec<DVector<S>> {
    let cols = m.ncols();
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = DVector::<S>::zeros(cols);
            v[f] = S::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[(row, f)].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `a x = b`, or `None` when the system is inconsistent.
pub fn solve<S: Scalar>(a: &DMatrix<S>, b: &DVector<S>) -> Option<DVector<S>> {
    let (rows, cols) = a.shape();
    let mut aug = DMatrix::<S>::zeros(rows, cols + 1);
    aug.view_mut((0, 0), (rows, cols)).copy_from(a);
    aug.set_column(cols, b);
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = DVector::<S>::zeros(cols);
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r[(row, cols)].clone();
    }
    Some(x)
}

pub fn inverse<S: Scalar>(a: &DMatrix<S>) -> Option<DMatrix<S>> {
    let n = a.nrows();
    if a.ncols() != n {
        return None;
    }
    if n == 0 {
        return Some(a.clone());
    }
    let mut aug = DMatrix::<S>::zeros(n, 2 * n);
    aug.view_mut((0, 0), (n, n)).copy_from(a);
    for i in 0..n {
        aug[(i, n + i)] = S::one();
    }
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.view((0, n), (n, n)).into_owned())
}

/// Minimum Euclidean-norm solution of a consistent system `a x = b`.
///
/// Redundant rows are dropped first, then `x = Aᵀ (A Aᵀ)⁻¹ b`; exact for rationals.
pub fn min_norm_solve<S: Scalar>(a: &DMatrix<S>, b: &DVector<S>) -> Option<DVector<S>> {
    solve(a, b)?;
    let rows = independent_rows(a);
    if rows.is_empty() {
        return Some(DVector::zeros(a.ncols()));
    }
    let ar = a.select_rows(rows.iter());
    let br = DVector::from_iterator(rows.len(), rows.iter().map(|&i| b[i].clone()));
    let gram = &ar * ar.transpose();
    let y = inverse(&gram)? * br;
    Some(ar.transpose() * y)
}

/// Indices of a maximal set of linearly independent rows, chosen greedily in order.
pub fn independent_rows<S: Scalar>(a: &DMatrix<S>) -> Vec<usize> {
    pivot_columns(&a.transpose())
}

/// Indices of columns that increase the rank when scanned left to right.
pub fn pivot_columns<S: Scalar>(a: &DMatrix<S>) -> Vec<usize> {
    rref(a).1
}

pub fn columns_to_matrix<S: Scalar>(n: usize, cols: &[DVector<S>]) -> DMatrix<S> {
    let mut m = DMatrix::<S>::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

pub fn bilinear<S: Scalar>(g: &DMatrix<S>, x: &DVector<S>, y: &DVector<S>) -> S {
    let gy = g * y;
    x.dot(&gy)
}

/// Kernel of a float matrix from its SVD. Rows are zero padded so the full right
/// singular basis is available.
pub fn svd_kernel(m: &DMatrix<f64>, rank_tol: f64) -> Vec<DVector<f64>> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Vec::new();
    }
    let mut padded = DMatrix::<f64>::zeros(rows.max(cols), cols);
    padded.view_mut((0, 0), (rows, cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let sigma_max = svd.singular_values.max();
    let cutoff = rank_tol * sigma_max;
    (0..cols)
        .filter(|&i| sigma_max == 0.0 || svd.singular_values[i] <= cutoff)
        .map(|i| v_t.row(i).transpose())
        .collect()
}

/// `[e^{tA}, tφ₁(tA), t²φ₂(tA), …, tᵏφₖ(tA)]` from one exponential of an
/// augmented block matrix, with `φ₀ = exp` and `φⱼ(z) = Σ zⁱ/(i + j)!`.
///
/// No inverse of `A` is formed, so the result stays accurate when `A` is
/// singular or nearly so.
pub fn phi_blocks(a: &DMatrix<f64>, t: f64, k: usize) -> Vec<DMatrix<f64>> {
    let q = a.nrows();
    let mut m = DMatrix::zeros(q * (k + 1), q * (k + 1));
    m.view_mut((0, 0), (q, q)).copy_from(&(a * t));
    for j in 0..k {
        m.view_mut((j * q, (j + 1) * q), (q, q)).fill_with_identity();
        m.view_mut((j * q, (j + 1) * q), (q, q)).scale_mut(t);
    }
    let e = expm(&m);
    (0..=k).map(|j| e.view((0, j * q), (q, q)).into_owned()).collect()
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA_13: f64 = 5.371920351148152;

    let n = a.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let norm1 = (0..n).map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let s = if norm1 > THETA_13 { (norm1 / THETA_13).log2().ceil() as i32 } else { 0 };
    let a = a / 2f64.powi(s);
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * B[13] + &a4 * B[11] + &a2 * B[9]) + &a6 * B[7] + &a4 * B[5] + &a2 * B[3] + &id * B[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * B[12] + &a4 * B[10] + &a2 * B[8]) + &a6 * B[6] + &a4 * B[4] + &a2 * B[2] + &id * B[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is nonsingular after scaling");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}
