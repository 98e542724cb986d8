//! Levi-Civita connection and curvature of the left-invariant metric.
//!
//! Convention: `R(x,y)z = ∇_x∇_y z − ∇_y∇_x z − ∇_[x,y] z`, and the sectional
//! curvature numerator is `<R(x,y)y, x>`.

use nalgebra::DVector;
use serde::Serialize;

use crate::algebra::MetricAlgebra;
use crate::decomposition::{j_apply, Block, WittFrame};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `∇_x y = ½[x,y] − ½(ad†_x y + ad†_y x)`.
pub fn nabla<S: Scalar>(alg: &MetricAlgebra<S>, x: &DVector<S>, y: &DVector<S>) -> DVector<S> {
    (alg.br(x, y) - alg.adj(x, y) - alg.adj(y, x)) * S::half()
}

pub fn riemann<S: Scalar>(alg: &MetricAlgebra<S>, x: &DVector<S>, y: &DVector<S>, z: &DVector<S>) -> DVector<S> {
    nabla(alg, x, &nabla(alg, y, z)) - nabla(alg, y, &nabla(alg, x, z)) - nabla(alg, &alg.br(x, y), z)
}

/// `<R(x,y)y, x>`.
pub fn sec_numerator<S: Scalar>(alg: &MetricAlgebra<S>, x: &DVector<S>, y: &DVector<S>) -> S {
    alg.ip(&riemann(alg, x, y, y), x)
}

/// `<x,x><y,y> − <x,y>²`.
pub fn plane_denominator<S: Scalar>(alg: &MetricAlgebra<S>, x: &DVector<S>, y: &DVector<S>) -> S {
    let xy = alg.ip(x, y);
    alg.ip(x, x) * alg.ip(y, y) - xy.clone() * xy
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport<S: Scalar> {
    #[serde(skip)]
    pub plane: (DVector<S>, DVector<S>),
    pub numerator: S,
    pub denominator: S,
    /// Present only for nondegenerate planes.
    pub sectional: Option<S>,
    pub homaloidal: bool,
}

/// Numerator, denominator and (for nondegenerate planes) the sectional curvature.
/// `tol` only matters for floats.
pub fn sectional<S: Scalar>(alg: &MetricAlgebra<S>, x: &DVector<S>, y: &DVector<S>, tol: f64) -> CurvatureReport<S> {
    let numerator = sec_numerator(alg, x, y);
    let denominator = plane_denominator(alg, x, y);
    let sectional = (!denominator.is_zero_tol(tol)).then(|| numerator.clone() / denominator.clone());
    let homaloidal = numerator.is_zero_tol(tol);
    CurvatureReport { plane: (x.clone(), y.clone()), numerator, denominator, sectional, homaloidal }
}

/// True when `R` vanishes on every triple of basis vectors.
pub fn is_flat<S: Scalar>(alg: &MetricAlgebra<S>, tol: f64) -> bool {
    let b = alg.basis();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            for k in 0..b.len() {
                if riemann(alg, &b[i], &b[j], &b[k]).iter().any(|c| !c.is_zero_tol(tol)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Sufficient condition for flatness: `[n,n] ⊆ U` and `E = 0`.
pub fn brackets_in_null_center<S: Scalar>(alg: &MetricAlgebra<S>, frame: &WittFrame<S>, tol: f64) -> bool {
    if frame.dim_e() != 0 {
        return false;
    }
    let n = alg.dim();
    (0..n).all(|i| {
        (i + 1..n).all(|j| {
            let c = alg.structure_constant(i, j);
            [Block::Z, Block::V, Block::E].iter().all(|&b| frame.vanishes_on(&c, b, tol))
        })
    })
}

fn require_ve<S: Scalar>(frame: &WittFrame<S>, x: &DVector<S>, tol: f64) -> Result<()> {
    if frame.vanishes_on(x, Block::U, tol) && frame.vanishes_on(x, Block::Z, tol) {
        Ok(())
    } else {
        Err(Error::ForbiddenComponent("argument must lie in V ⊕ E"))
    }
}

/// Base-torus numerator `<R(x,y)y,x> + ¾<[x,y],[x,y]>` for `x, y ∈ V ⊕ E`.
pub fn tb_numerator<S: Scalar>(alg: &MetricAlgebra<S>, frame: &WittFrame<S>, x: &DVector<S>, y: &DVector<S>, tol: f64) -> Result<S> {
    require_ve(frame, x, tol)?;
    require_ve(frame, y, tol)?;
    let b = alg.br(x, y);
    Ok(sec_numerator(alg, x, y) + S::from_i64(3) / S::from_i64(4) * alg.ip(&b, &b))
}

/// Closed-form sectional curvature of an orthogonal, non-null pair in `E`:
/// `−¾<[e,e'],[e,e']> / (<e,e><e',e'>)`. On orthonormal pairs this is
/// `−¾ ε̄ε̄' <[e,e'],[e,e']>`.
pub fn e_plane_sectional<S: Scalar>(alg: &MetricAlgebra<S>, frame: &WittFrame<S>, e: &DVector<S>, f: &DVector<S>, tol: f64) -> Result<S> {
    for x in [e, f] {
        for b in [Block::U, Block::Z, Block::V] {
            if !frame.vanishes_on(x, b, tol) {
                return Err(Error::ForbiddenComponent("arguments must lie in E"));
            }
        }
    }
    let (ee, ff) = (alg.ip(e, e), alg.ip(f, f));
    if !alg.ip(e, f).is_zero_tol(tol) || ee.is_zero_tol(tol) || ff.is_zero_tol(tol) {
        return Err(Error::DegenerateForm("E-plane pair must be orthogonal and non-null"));
    }
    let b = alg.br(e, f);
    Ok(-(S::from_i64(3) / S::from_i64(4)) * alg.ip(&b, &b) / (ee * ff))
}

fn quarter<S: Scalar>() -> S {
    S::one() / S::from_i64(4)
}

fn three_quarters<S: Scalar>() -> S {
    S::from_i64(3) / S::from_i64(4)
}

/// `<R(z,v)v,z> = ¼<j(ιz)v, j(ιz)v>` for `z ∈ Z`, `v ∈ V`.
pub fn numerator_center_v<S: Scalar>(alg: &MetricAlgebra<S>, frame: &WittFrame<S>, z: &DVector<S>, v: &DVector<S>) -> S {
    let jv = j_apply(alg, frame, &frame.involution(z), v);
    quarter::<S>() * alg.ip(&jv, &jv)
}

/// `<R(v,e)e,v> = −¾<[v,e],[v,e]> + ¼<j(ιv)e, j(ιv)e>` for `v ∈ V`, `e ∈ E`.
pub fn numerator_v_e<S: Scalar>(alg: &MetricAlgebra<S>, frame: &WittFrame<S>, v: &DVector<S>, e: &DVector<S>) -> S {
    let b = alg.br(v, e);
    let je = j_apply(alg, frame, &frame.involution(v), e);
    -three_quarters::<S>() * alg.ip(&b, &b) + quarter::<S>() * alg.ip(&je, &je)
}

/// `<R(v,v')v',v>` for `v, v' ∈ V`:
/// `−¾<[v,v'],[v,v']> + ½<j(ιv)v', j(ιv')v> + ¼(<j(ιv')v, j(ιv')v> + <j(ιv)v', j(ιv)v'>) − <j(ιv)v, j(ιv')v'>`.
pub fn numerator_v_v<S: Scalar>(alg: &MetricAlgebra<S>, frame: &WittFrame<S>, v: &DVector<S>, w: &DVector<S>) -> S {
    let (iv, iw) = (frame.involution(v), frame.involution(w));
    let j_v_w = j_apply(alg, frame, &iv, w);
    let j_w_v = j_apply(alg, frame, &iw, v);
    let j_v_v = j_apply(alg, frame, &iv, v);
    let j_w_w = j_apply(alg, frame, &iw, w);
    let b = alg.br(v, w);
    -three_quarters::<S>() * alg.ip(&b, &b)
        + S::half() * alg.ip(&j_v_w, &j_w_v)
        + quarter::<S>() * (alg.ip(&j_w_v, &j_w_v) + alg.ip(&j_v_w, &j_v_w))
        - alg.ip(&j_v_v, &j_w_w)
}

/// Basis-pair curvature table.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub i: usize,
    pub j: usize,
    pub label_i: String,
    pub label_j: String,
    pub numerator: String,
    pub numerator_f64: f64,
    pub sectional: Option<String>,
    pub sectional_f64: Option<f64>,
    pub homaloidal: bool,
}

/// Curvature of every plane spanned by two vectors of `vectors`.
pub fn pair_table<S: Scalar>(alg: &MetricAlgebra<S>, vectors: &[DVector<S>], labels: &[String], tol: f64) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let r = sectional(alg, &vectors[i], &vectors[j], tol);
            rows.push(TableRow {
                i,
                j,
                label_i: labels[i].clone(),
                label_j: labels[j].clone(),
                numerator: r.numerator.to_string(),
                numerator_f64: r.numerator.to_f64(),
                sectional: r.sectional.as_ref().map(|s| s.to_string()),
                sectional_f64: r.sectional.as_ref().map(|s| s.to_f64()),
                homaloidal: r.homaloidal,
            });
        }
    }
    rows
}
