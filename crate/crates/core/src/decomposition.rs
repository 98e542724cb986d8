//! Witt-adapted splitting `n = U ⊕ Z ⊕ V ⊕ E`, the involution ι and the
//! operators `j`, 𝒥, 𝒮 and `J` built on it.
//!
//! `U` is the null radical of the center, `Z` a nondegenerate complement of
//! `U` in the center, `V` a null space dual to `U`, and `E` the orthogonal
//! complement of `U ⊕ Z ⊕ V`.

use nalgebra::{DMatrix, DVector};

use crate::algebra::MetricAlgebra;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

/// Relative singular value cutoff for float kernels of `J`.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Adapted frame. `z` and `e` are mutually orthogonal; they are unit vectors
/// whenever the square root of `|<w, w>|` is representable (always for `f64`).
#[derive(Debug, Clone, PartialEq)]
pub struct WittFrame<S: Scalar> {
    pub u: Vec<DVector<S>>,
    pub z: Vec<DVector<S>>,
    pub v: Vec<DVector<S>>,
    pub e: Vec<DVector<S>>,
    pub z_signs: Vec<i8>,
    pub e_signs: Vec<i8>,
    /// `<z_a, z_a>`; equal to the signs when normalized.
    pub z_norms: Vec<S>,
    pub e_norms: Vec<S>,
    basis: DMatrix<S>,
    basis_inv: DMatrix<S>,
}

/// Ambient-coordinate projections of a vector onto the four summands.
#[derive(Debug, Clone, PartialEq)]
pub struct Parts<S: Scalar> {
    pub u: DVector<S>,
    pub z: DVector<S>,
    pub v: DVector<S>,
    pub e: DVector<S>,
}

/// Which summand a block of adapted coordinates belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    U,
    Z,
    V,
    E,
}

impl<S: Scalar> WittFrame<S> {
    /// Assembles a frame from its bases, checking that together they form a basis.
    pub fn from_parts(
        u: Vec<DVector<S>>,
        z: Vec<DVector<S>>,
        v: Vec<DVector<S>>,
        e: Vec<DVector<S>>,
        z_norms: Vec<S>,
        e_norms: Vec<S>,
    ) -> Result<Self> {
        let n = u.iter().chain(&z).chain(&v).chain(&e).map(|c| c.len()).next().unwrap_or(0);
        if u.len() != v.len() || z.len() != z_norms.len() || e.len() != e_norms.len() {
            return Err(Error::NotABasis);
        }
        let cols: Vec<DVector<S>> = u.iter().chain(&z).chain(&v).chain(&e).cloned().collect();
        if cols.len() != n || cols.iter().any(|c| c.len() != n) {
            return Err(Error::NotABasis);
        }
        let basis = linalg::columns_to_matrix(n, &cols);
        let basis_inv = if S::EXACT {
            linalg::inverse(&basis).ok_or(Error::NotABasis)?
        } else {
            basis.map(|c| c.to_f64()).try_inverse().ok_or(Error::NotABasis)?.map(S::from_f64_lossy)
        };
        let z_signs = z_norms.iter().map(|s| s.sign(0.0)).collect();
        let e_signs = e_norms.iter().map(|s| s.sign(0.0)).collect();
        Ok(WittFrame { u, z, v, e, z_signs, e_signs, z_norms, e_norms, basis, basis_inv })
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim_u(&self) -> usize {
        self.u.len()
    }

    pub fn dim_z(&self) -> usize {
        self.z.len()
    }

    pub fn dim_e(&self) -> usize {
        self.e.len()
    }

    /// Columns are the adapted basis in the order `U, Z, V, E`.
    pub fn basis_matrix(&self) -> &DMatrix<S> {
        &self.basis
    }

    /// Ambient to adapted coordinates.
    pub fn change_of_basis(&self) -> &DMatrix<S> {
        &self.basis_inv
    }

    /// Half-open index range of a block within adapted coordinates.
    pub fn range(&self, block: Block) -> std::ops::Range<usize> {
        let (r, s, q) = (self.u.len(), self.z.len(), self.e.len());
        match block {
            Block::U => 0..r,
            Block::Z => r..r + s,
            Block::V => r + s..2 * r + s,
            Block::E => 2 * r + s..2 * r + s + q,
        }
    }

    pub fn coords(&self, x: &DVector<S>) -> DVector<S> {
        &self.basis_inv * x
    }

    pub fn from_coords(&self, c: &DVector<S>) -> DVector<S> {
        &self.basis * c
    }

    /// Coordinates of `x` in one block.
    pub fn block_coords(&self, x: &DVector<S>, block: Block) -> DVector<S> {
        let c = self.coords(x);
        let r = self.range(block);
        c.rows(r.start, r.len()).into_owned()
    }

    /// Ambient vector from coordinates in one block.
    pub fn from_block(&self, block: Block, c: &DVector<S>) -> DVector<S> {
        let r = self.range(block);
        let mut out = DVector::zeros(self.dim());
        for (k, i) in r.enumerate() {
            out += self.basis.column(i) * c[k].clone();
        }
        out
    }

    pub fn parts(&self, x: &DVector<S>) -> Parts<S> {
        let c = self.coords(x);
        let pick = |block: Block| {
            let r = self.range(block);
            let mut out = DVector::zeros(self.dim());
            for i in r {
                out += self.basis.column(i) * c[i].clone();
            }
            out
        };
        Parts { u: pick(Block::U), z: pick(Block::Z), v: pick(Block::V), e: pick(Block::E) }
    }

    /// Projection onto one summand along the others.
    pub fn project(&self, x: &DVector<S>, block: Block) -> DVector<S> {
        self.from_block(block, &self.block_coords(x, block))
    }

    /// True when `x` has no component in the given block.
    pub fn vanishes_on(&self, x: &DVector<S>, block: Block, tol: f64) -> bool {
        self.block_coords(x, block).iter().all(|c| c.is_zero_tol(tol))
    }

    /// Matrix of ι in ambient coordinates.
    pub fn involution_matrix(&self) -> DMatrix<S> {
        let n = self.dim();
        let mut d = DMatrix::<S>::zeros(n, n);
        let (ru, rv) = (self.range(Block::U), self.range(Block::V));
        for (i, j) in ru.zip(rv) {
            d[(i, j)] = S::one();
            d[(j, i)] = S::one();
        }
        for (k, i) in self.range(Block::Z).enumerate() {
            d[(i, i)] = S::from_i64(self.z_signs[k] as i64);
        }
        for (k, i) in self.range(Block::E).enumerate() {
            d[(i, i)] = S::from_i64(self.e_signs[k] as i64);
        }
        &self.basis * d * &self.basis_inv
    }

    /// `ι(u_i) = v_i`, `ι(v_i) = u_i`, `ι(z_a) = ε_a z_a`, `ι(e_a) = ε̄_a e_a`.
    pub fn involution(&self, x: &DVector<S>) -> DVector<S> {
        let mut c = self.coords(x);
        let (ru, rv) = (self.range(Block::U), self.range(Block::V));
        for (i, j) in ru.zip(rv) {
            c.swap_rows(i, j);
        }
        for (k, i) in self.range(Block::Z).enumerate() {
            if self.z_signs[k] < 0 {
                c[i] = -c[i].clone();
            }
        }
        for (k, i) in self.range(Block::E).enumerate() {
            if self.e_signs[k] < 0 {
                c[i] = -c[i].clone();
            }
        }
        self.from_coords(&c)
    }

    /// Inner product restricted to `E`, in `E` coordinates.
    pub fn e_gram(&self) -> DMatrix<S> {
        DMatrix::from_diagonal(&DVector::from_vec(self.e_norms.clone()))
    }

    /// Float copy with `Z` and `E` normalized.
    pub fn to_float(&self) -> WittFrame<f64> {
        let fl = |v: &DVector<S>| v.map(|c| c.to_f64());
        let unit = |vs: &[DVector<S>], norms: &[S]| -> Vec<DVector<f64>> {
            vs.iter().zip(norms).map(|(v, n)| fl(v) / n.to_f64().abs().sqrt()).collect()
        };
        let signs = |s: &[i8]| s.iter().map(|&x| x as f64).collect::<Vec<_>>();
        let u: Vec<_> = self.u.iter().map(fl).collect();
        let v: Vec<_> = self.v.iter().map(fl).collect();
        let z = unit(&self.z, &self.z_norms);
        let e = unit(&self.e, &self.e_norms);
        let n = self.dim();
        let cols: Vec<DVector<f64>> = u.iter().chain(&z).chain(&v).chain(&e).cloned().collect();
        let basis = linalg::columns_to_matrix(n, &cols);
        // Rescale the exact inverse instead of inverting in floating point.
        let mut basis_inv = self.basis_inv.map(|c| c.to_f64());
        for (k, i) in self.range(Block::Z).enumerate() {
            let s = self.z_norms[k].to_f64().abs().sqrt();
            basis_inv.row_mut(i).scale_mut(s);
        }
        for (k, i) in self.range(Block::E).enumerate() {
            let s = self.e_norms[k].to_f64().abs().sqrt();
            basis_inv.row_mut(i).scale_mut(s);
        }
        WittFrame {
            u,
            z,
            v,
            e,
            z_signs: self.z_signs.clone(),
            e_signs: self.e_signs.clone(),
            z_norms: signs(&self.z_signs),
            e_norms: signs(&self.e_signs),
            basis,
            basis_inv,
        }
    }

    /// Checks every frame invariant, returning a description of the first failure.
    pub fn check(&self, alg: &MetricAlgebra<S>, tol: f64) -> std::result::Result<(), String> {
        let ip = |x: &DVector<S>, y: &DVector<S>| alg.ip(x, y);
        let zero = |s: S| s.is_zero_tol(tol);
        let delta = |i: usize, j: usize, s: S| if i == j { (s - S::one()).is_zero_tol(tol) } else { s.is_zero_tol(tol) };
        for (i, a) in self.u.iter().enumerate() {
            if !alg.is_central(a) && S::EXACT {
                return Err(format!("u{i} is not central"));
            }
            for (j, b) in self.u.iter().enumerate() {
                if !zero(ip(a, b)) {
                    return Err(format!("<u{i}, u{j}> != 0"));
                }
                if !zero(ip(&self.v[i], &self.v[j])) {
                    return Err(format!("<v{i}, v{j}> != 0"));
                }
                if !delta(i, j, ip(a, &self.v[j])) {
                    return Err(format!("<u{i}, v{j}> != δ"));
                }
            }
        }
        for (name, vs, norms) in [("z", &self.z, &self.z_norms), ("e", &self.e, &self.e_norms)] {
            for (i, a) in vs.iter().enumerate() {
                for (j, b) in vs.iter().enumerate() {
                    let want = if i == j { norms[i].clone() } else { S::zero() };
                    if !zero(ip(a, b) - want) {
                        return Err(format!("<{name}{i}, {name}{j}> is wrong"));
                    }
                }
                if norms[i].is_zero_tol(tol) {
                    return Err(format!("{name}{i} is null"));
                }
            }
        }
        let pairs: [(&str, &Vec<DVector<S>>, &str, &Vec<DVector<S>>); 5] = [
            ("u", &self.u, "z", &self.z),
            ("u", &self.u, "e", &self.e),
            ("v", &self.v, "z", &self.z),
            ("v", &self.v, "e", &self.e),
            ("z", &self.z, "e", &self.e),
        ];
        for (na, a, nb, b) in pairs {
            for x in a {
                for y in b {
                    if !zero(ip(x, y)) {
                        return Err(format!("{na} not orthogonal to {nb}"));
                    }
                }
            }
        }
        if S::EXACT {
            let center = alg.center();
            let uz: Vec<DVector<S>> = self.u.iter().chain(&self.z).cloned().collect();
            if uz.len() != center.len() || uz.iter().any(|x| !alg.is_central(x)) {
                return Err("U ⊕ Z is not the center".into());
            }
        }
        Ok(())
    }
}

/// Indefinite Gram–Schmidt with largest-|<w, w>| pivoting (ties to the lower index).
///
/// Returns mutually orthogonal vectors and their squares. Fails if the form on
/// the span is degenerate.
pub fn orthogonalize<S: Scalar>(
    alg: &MetricAlgebra<S>,
    vectors: Vec<DVector<S>>,
    what: &'static str,
) -> Result<(Vec<DVector<S>>, Vec<S>)> {
    let mut rest = vectors;
    let mut out = Vec::new();
    let mut norms = Vec::new();
    while !rest.is_empty() {
        let squares: Vec<S> = rest.iter().map(|w| alg.ip(w, w)).collect();
        let mut best = 0;
        for k in 1..rest.len() {
            if squares[k].abs_val() > squares[best].abs_val() {
                best = k;
            }
        }
        if squares[best].is_zero_tol(0.0) {
            // All remaining vectors are null; pair two with nonzero product.
            let mut fixed = false;
            'outer: for i in 0..rest.len() {
                for j in i + 1..rest.len() {
                    if !alg.ip(&rest[i], &rest[j]).is_zero_tol(0.0) {
                        let w = rest[j].clone();
                        rest[i] += w;
                        fixed = true;
                        break 'outer;
                    }
                }
            }
            if !fixed {
                return Err(Error::DegenerateForm(what));
            }
            continue;
        }
        let p = rest.remove(best);
        let pp = squares[best].clone();
        for w in rest.iter_mut() {
            let c = alg.ip(w, &p) / pp.clone();
            *w -= &p * c;
        }
        match pp.abs_val().try_sqrt() {
            Some(s) => {
                norms.push(S::from_i64(pp.sign(0.0) as i64));
                out.push(p * (S::one() / s));
            }
            None => {
                norms.push(pp);
                out.push(p);
            }
        }
    }
    Ok((out, norms))
}

/// Computes the adapted frame with deterministic choices.
///
/// The center comes from an exact kernel. `U` is the radical of the form on the
/// center; `Z` is spanned by the first center vectors (in index order) that are
/// independent of `U`. Dual vectors are seeded from the leftmost ambient basis
/// vectors pairing nondegenerately with `U`, projected off `Z`, then made null.
pub fn witt_decompose<S: Scalar>(alg: &MetricAlgebra<S>) -> Result<WittFrame<S>> {
    if !S::EXACT {
        return Err(Error::ExactModeRequired);
    }
    let n = alg.dim();
    let g = alg.gram();
    let center = alg.center();
    let k = center.len();
    let c_mat = linalg::columns_to_matrix(n, &center);

    let center_gram = c_mat.transpose() * g * &c_mat;
    let u: Vec<DVector<S>> = linalg::kernel(&center_gram).iter().map(|w| &c_mat * w).collect();
    let r = u.len();

    let mut z_seed = Vec::new();
    let mut current: Vec<DVector<S>> = u.clone();
    for c in &center {
        current.push(c.clone());
        if linalg::rank(&linalg::columns_to_matrix(n, &current)) == current.len() {
            z_seed.push(c.clone());
        } else {
            current.pop();
        }
    }
    debug_assert_eq!(z_seed.len() + r, k);
    let (z, z_norms) = orthogonalize(alg, z_seed, "center modulo its radical")?;

    let mut v = Vec::with_capacity(r);
    if r > 0 {
        let u_mat = linalg::columns_to_matrix(n, &u);
        let pairing = u_mat.transpose() * g; // rows: <u_i, b_l>
        let cols = linalg::pivot_columns(&pairing);
        if cols.len() != r {
            return Err(Error::DegenerateForm("null radical pairing"));
        }
        let sub = pairing.select_columns(cols.iter());
        let sub_inv = linalg::inverse(&sub).ok_or(Error::DegenerateForm("null radical pairing"))?;
        let mut w: Vec<DVector<S>> = (0..r)
            .map(|j| {
                let mut x = DVector::zeros(n);
                for (row, &l) in cols.iter().enumerate() {
                    x[l] = sub_inv[(row, j)].clone();
                }
                x
            })
            .collect();
        for x in w.iter_mut() {
            for (za, na) in z.iter().zip(&z_norms) {
                let c = alg.ip(x, za) / na.clone();
                *x -= za * c;
            }
        }
        for j in 0..r {
            let mut x = w[j].clone();
            for i in 0..r {
                let c = alg.ip(&w[j], &w[i]) * S::half();
                x -= &u[i] * c;
            }
            v.push(x);
        }
    }

    let constraints: Vec<DVector<S>> = u.iter().chain(&v).chain(&z).map(|x| g * x).collect();
    let e_seed = if constraints.is_empty() {
        alg.basis()
    } else {
        linalg::kernel(&linalg::columns_to_matrix(n, &constraints).transpose())
    };
    let (e, e_norms) = orthogonalize(alg, e_seed, "orthogonal complement")?;

    WittFrame::from_parts(u, z, v, e, z_norms, e_norms)
}

/// `j(a) x = ι ad†_x(ι a)` as a matrix on `V ⊕ E` in adapted coordinates
/// (columns and rows ordered `v_1.., e_1..`).
pub fn j_op<S: Scalar>(alg: &MetricAlgebra<S>, frame: &WittFrame<S>, a: &DVector<S>) -> Result<DMatrix<S>> {
    if a.len() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: a.len() });
    }
    if !frame.vanishes_on(a, Block::V, 1e-12) || !frame.vanishes_on(a, Block::E, 1e-12) {
        return Err(Error::ForbiddenComponent("j is defined on U ⊕ Z only"));
    }
    let ia = frame.involution(a);
    let domain: Vec<DVector<S>> = frame.v.iter().chain(&frame.e).cloned().collect();
    let (rv, re) = (frame.range(Block::V), frame.range(Block::E));
    let m = domain.len();
    let mut out = DMatrix::zeros(m, m);
    for (col, x) in domain.iter().enumerate() {
        let image = frame.coords(&frame.involution(&alg.adj(x, &ia)));
        for (row, i) in rv.clone().chain(re.clone()).enumerate() {
            out[(row, col)] = image[i].clone();
        }
    }
    Ok(out)
}

/// Applies `j(a)` to an ambient vector of `V ⊕ E`, returning an ambient vector.
pub fn j_apply<S: Scalar>(alg: &MetricAlgebra<S>, frame: &WittFrame<S>, a: &DVector<S>, x: &DVector<S>) -> DVector<S> {
    frame.involution(&alg.adj(x, &frame.involution(a)))
}

/// Operators attached to fixed `z0 ∈ Z`, `v0 ∈ V`:
/// 𝒥y = (ad†_y(z0 + v0))^E, 𝒮y = (ad†_y(z0 + v0))^U and `J = 𝒥|_E`.
///
/// Matrices act on adapted coordinates; `E1 = ker J` and `E2` is its
/// orthogonal complement in `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct JData<S: Scalar> {
    pub z0: DVector<S>,
    pub v0: DVector<S>,
    /// `(dim V + dim E) × ... → E` coordinates.
    pub script_j: DMatrix<S>,
    /// `(dim V + dim E) → U` coordinates.
    pub script_s: DMatrix<S>,
    /// `E → E` coordinates.
    pub j: DMatrix<S>,
    /// Columns in `E` coordinates.
    pub e1_basis: Vec<DVector<S>>,
    pub e2_basis: Vec<DVector<S>>,
    pub orthogonal_split: bool,
    /// Projections onto `E1` and `E2` along each other, in `E` coordinates.
    pub proj_e1: DMatrix<S>,
    pub proj_e2: DMatrix<S>,
    /// `J⁻¹` on `E2`, zero on `E1`.
    pub j_inv: DMatrix<S>,
}

impl<S: Scalar> JData<S> {
    /// Applies 𝒥 to an ambient vector of `V ⊕ E`, returning `E` coordinates.
    pub fn apply_script_j(&self, frame: &WittFrame<S>, y: &DVector<S>) -> DVector<S> {
        &self.script_j * ve_coords(frame, y)
    }

    /// Applies 𝒮 to an ambient vector of `V ⊕ E`, returning `U` coordinates.
    pub fn apply_script_s(&self, frame: &WittFrame<S>, y: &DVector<S>) -> DVector<S> {
        &self.script_s * ve_coords(frame, y)
    }
}

impl JData<f64> {
    /// Eigenvalues of `J`. A zero `J` is handled directly since the Schur
    /// iteration does not terminate on it; the matrix is rescaled otherwise.
    pub fn eigenvalues(&self) -> Result<Vec<nalgebra::Complex<f64>>> {
        let n = self.j.nrows();
        let scale = self.j.amax();
        if scale == 0.0 {
            return Ok(vec![nalgebra::Complex::new(0.0, 0.0); n]);
        }
        let schur = (&self.j / scale).try_schur(f64::EPSILON, 10_000).ok_or_else(|| Error::IntegratorFailure("Schur form of J did not converge".into()))?;
        Ok(schur.complex_eigenvalues().iter().map(|c| c * scale).collect())
    }

    /// Largest rotation rate of `J`, the maximum `|Im λ|`.
    pub fn max_rotation_rate(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().map(|c| c.im.abs()).fold(0.0, f64::max))
    }
}

/// Stacked `V` and `E` coordinates of an ambient vector.
pub fn ve_coords<S: Scalar>(frame: &WittFrame<S>, y: &DVector<S>) -> DVector<S> {
    let c = frame.coords(y);
    let idx: Vec<usize> = frame.range(Block::V).chain(frame.range(Block::E)).collect();
    DVector::from_iterator(idx.len(), idx.iter().map(|&i| c[i].clone()))
}

/// Builds 𝒥, 𝒮, `J` and the kernel split. Floats use `rank_tol` for `ker J`.
pub fn build_jdata<S: Scalar>(
    alg: &MetricAlgebra<S>,
    frame: &WittFrame<S>,
    z0: &DVector<S>,
    v0: &DVector<S>,
    rank_tol: f64,
) -> Result<JData<S>> {
    let tol = if S::EXACT { 0.0 } else { 1e-9 * (1.0 + z0.amax_f64() + v0.amax_f64()) };
    for (x, allowed) in [(z0, Block::Z), (v0, Block::V)] {
        if x.len() != alg.dim() {
            return Err(Error::DimensionMismatch { expected: alg.dim(), found: x.len() });
        }
        for b in [Block::U, Block::Z, Block::V, Block::E] {
            if b != allowed && !frame.vanishes_on(x, b, tol) {
                return Err(Error::ForbiddenComponent(if allowed == Block::Z { "z0 must lie in Z" } else { "v0 must lie in V" }));
            }
        }
    }
    let a = z0 + v0;
    let domain: Vec<DVector<S>> = frame.v.iter().chain(&frame.e).cloned().collect();
    let (r, q) = (frame.dim_u(), frame.dim_e());
    let m = domain.len();
    let mut script_j = DMatrix::zeros(q, m);
    let mut script_s = DMatrix::zeros(r, m);
    for (col, y) in domain.iter().enumerate() {
        let c = frame.coords(&alg.adj(y, &a));
        for (row, i) in frame.range(Block::E).enumerate() {
            script_j[(row, col)] = c[i].clone();
        }
        for (row, i) in frame.range(Block::U).enumerate() {
            script_s[(row, col)] = c[i].clone();
        }
    }
    let j = script_j.columns(r, q).into_owned();
    let e_gram = frame.e_gram();

    let e1_basis = if q == 0 { Vec::new() } else { S::nullspace(&j, rank_tol) };
    let k1 = e1_basis.len();
    let e1_mat = linalg::columns_to_matrix(q, &e1_basis);
    let restricted = e1_mat.transpose() * &e_gram * &e1_mat;
    let e1_nondegenerate = if S::EXACT {
        linalg::inverse(&restricted).is_some()
    } else if k1 == 0 {
        true
    } else {
        let sv = restricted.map(|c| c.to_f64()).singular_values();
        sv.min() > 1e-9
    };
    if !e1_nondegenerate {
        return Err(Error::NonOrthogonalKernelSplit);
    }
    let e2_basis: Vec<DVector<S>> = if k1 == 0 {
        (0..q).map(|i| unit::<S>(q, i)).collect()
    } else {
        S::nullspace(&(e1_mat.transpose() * &e_gram), rank_tol)
    };
    if e2_basis.len() + k1 != q {
        return Err(Error::NonOrthogonalKernelSplit);
    }
    let all: Vec<DVector<S>> = e1_basis.iter().chain(&e2_basis).cloned().collect();
    let b = linalg::columns_to_matrix(q, &all);
    let b_inv = invert(&b).ok_or(Error::NonOrthogonalKernelSplit)?;
    let mut sel1 = DMatrix::<S>::zeros(q, q);
    for i in 0..k1 {
        sel1[(i, i)] = S::one();
    }
    let mut sel2 = DMatrix::<S>::zeros(q, q);
    for i in k1..q {
        sel2[(i, i)] = S::one();
    }
    let proj_e1 = &b * &sel1 * &b_inv;
    let proj_e2 = &b * &sel2 * &b_inv;

    let in_basis = &b_inv * &j * &b;
    let q2 = q - k1;
    let j22 = in_basis.view((k1, k1), (q2, q2)).into_owned();
    let j22_inv = invert(&j22).ok_or(Error::SingularJOnE2)?;
    let mut block = DMatrix::<S>::zeros(q, q);
    block.view_mut((k1, k1), (q2, q2)).copy_from(&j22_inv);
    let j_inv = &b * block * &b_inv;

    Ok(JData {
        z0: z0.clone(),
        v0: v0.clone(),
        script_j,
        script_s,
        j,
        e1_basis,
        e2_basis,
        orthogonal_split: true,
        proj_e1,
        proj_e2,
        j_inv,
    })
}

fn unit<S: Scalar>(n: usize, i: usize) -> DVector<S> {
    let mut v = DVector::zeros(n);
    v[i] = S::one();
    v
}

fn invert<S: Scalar>(m: &DMatrix<S>) -> Option<DMatrix<S>> {
    if m.nrows() == 0 {
        return Some(m.clone());
    }
    if S::EXACT {
        linalg::inverse(m)
    } else {
        let f = m.map(|c| c.to_f64());
        let sv = f.clone().singular_values();
        if sv.min() <= 1e-12 * sv.max() {
            return None;
        }
        f.try_inverse().map(|inv| inv.map(S::from_f64_lossy))
    }
}

trait AmaxF64 {
    fn amax_f64(&self) -> f64;
}

impl<S: Scalar> AmaxF64 for DVector<S> {
    fn amax_f64(&self) -> f64 {
        self.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
    }
}
