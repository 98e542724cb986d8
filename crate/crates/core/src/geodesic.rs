//! Geodesics of the left-invariant metric.
//!
//! [`ClosedForm`] evaluates the explicit solution in the adapted frame.
//! [`ode_oracle`] integrates the geodesic equation numerically without using
//! the frame, `J` or the kernel split, and serves as an independent check.
//!
//! Write `γ(t) = exp(u + z + v + e)` with `x = v + e`. Given `z0`, `v0`, let
//! `J`, 𝒥, 𝒮 be as in [`JData`], split `e0 = e1 + e2` and `𝒥v0 = y1 + y2`
//! along `E1 = ker J ⊕ E2`, and put `x1 = e1 + v0 − J⁻¹y2`, `x2 = e2 + J⁻¹y2`.
//! Then
//!
//! ```text
//! x(t) = t x1 + (e^{tJ} − I) J⁻¹x2 + ½t² y1
//! z(t) = t z0 + I(t)^Z
//! u(t) = t u0 + I(t)^U + 𝒮 ∫₀ᵗ x
//! ```
//!
//! with `I(t) = −½ ∫₀ᵗ [ẋ, x]`, evaluated by [`ClosedForm::bracket_integral`].
//!
//! Numerically the split is only used for reporting. Evaluation uses the
//! equivalent `x_E(t) = tφ₁(tJ)e0 + t²φ₂(tJ)𝒥v0`, which avoids `J⁻¹` and
//! so stays accurate when `J` has eigenvalues close to zero.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::{CausalCharacter, GroupElement, MetricAlgebra};
use crate::decomposition::{build_jdata, Block, JData, WittFrame};
use crate::error::{Error, Result};
use crate::linalg::{expm, phi_blocks};
use crate::ode::{self, OdeOptions};
use crate::quadrature;

/// Absolute tolerance for the residual integral in `I(t)`.
pub const QUADRATURE_TOL: f64 = 1e-12;

/// Initial data. Velocities are left-trivialized: `γ̇(0) = L_{base*}(u0 + z0 + v0 + e0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicIvp {
    pub base: GroupElement<f64>,
    pub u0: DVector<f64>,
    pub z0: DVector<f64>,
    pub v0: DVector<f64>,
    pub e0: DVector<f64>,
}

impl GeodesicIvp {
    /// Splits an initial velocity along the frame.
    pub fn from_velocity(frame: &WittFrame<f64>, base: GroupElement<f64>, velocity: &DVector<f64>) -> Self {
        let p = frame.parts(velocity);
        GeodesicIvp { base, u0: p.u, z0: p.z, v0: p.v, e0: p.e }
    }

    pub fn at_identity(frame: &WittFrame<f64>, velocity: &DVector<f64>) -> Self {
        Self::from_velocity(frame, GroupElement::identity(frame.dim()), velocity)
    }

    pub fn velocity(&self) -> DVector<f64> {
        &self.u0 + &self.z0 + &self.v0 + &self.e0
    }

    pub fn dim(&self) -> usize {
        self.u0.len()
    }

    /// Same initial velocity from another base point.
    pub fn with_base(&self, base: GroupElement<f64>) -> Self {
        GeodesicIvp { base, ..self.clone() }
    }
}

/// Point and velocity on a geodesic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicState {
    pub t: f64,
    /// Exponential coordinates of `γ(t)`.
    pub log: Vec<f64>,
    /// Left-trivialized velocity `L_{γ(t)⁻¹*} γ̇(t)`.
    pub velocity: Vec<f64>,
}

impl GeodesicState {
    pub fn log_vector(&self) -> DVector<f64> {
        DVector::from_vec(self.log.clone())
    }

    pub fn velocity_vector(&self) -> DVector<f64> {
        DVector::from_vec(self.velocity.clone())
    }
}

/// Precomputed closed-form solution of one initial value problem.
#[derive(Debug, Clone)]
pub struct ClosedForm<'a> {
    alg: &'a MetricAlgebra<f64>,
    frame: &'a WittFrame<f64>,
    jdata: JData<f64>,
    ivp: GeodesicIvp,
    /// `x1` as an ambient vector of `V ⊕ E`.
    x1: DVector<f64>,
    /// `E` coordinates.
    x2: DVector<f64>,
    y1: DVector<f64>,
    /// `E` coordinates of `e0` and `𝒥v0`.
    e0: DVector<f64>,
    y: DVector<f64>,
}

impl<'a> ClosedForm<'a> {
    /// Builds `J` from the IVP and checks the kernel split.
    pub fn new(alg: &'a MetricAlgebra<f64>, frame: &'a WittFrame<f64>, ivp: &GeodesicIvp, rank_tol: f64) -> Result<Self> {
        let jdata = build_jdata(alg, frame, &ivp.z0, &ivp.v0, rank_tol)?;
        Self::with_jdata(alg, frame, jdata, ivp)
    }

    pub fn with_jdata(alg: &'a MetricAlgebra<f64>, frame: &'a WittFrame<f64>, jdata: JData<f64>, ivp: &GeodesicIvp) -> Result<Self> {
        if ivp.dim() != alg.dim() || ivp.base.log.len() != alg.dim() {
            return Err(Error::DimensionMismatch { expected: alg.dim(), found: ivp.dim() });
        }
        if !jdata.orthogonal_split {
            return Err(Error::NonOrthogonalKernelSplit);
        }
        let q = frame.dim_e();
        let e0 = frame.block_coords(&ivp.e0, Block::E);
        let e1 = &jdata.proj_e1 * &e0;
        let e2 = &jdata.proj_e2 * &e0;
        let jv0 = jdata.apply_script_j(frame, &ivp.v0);
        let y1 = &jdata.proj_e1 * &jv0;
        let y2 = &jdata.proj_e2 * &jv0;
        let jy2 = &jdata.j_inv * &y2;
        let x1 = &ivp.v0 + frame.from_block(Block::E, &(&e1 - &jy2));
        let x2 = e2 + jy2;
        let k1 = &jdata.j_inv * &x2;
        if q > 0 {
            let back = &jdata.j * &k1;
            let scale = 1.0 + x2.amax();
            if (back - &x2).amax() > 1e-9 * scale {
                return Err(Error::SingularJOnE2);
            }
        }
        Ok(ClosedForm { alg, frame, jdata, ivp: ivp.clone(), x1, x2, y1, e0, y: jv0 })
    }

    pub fn jdata(&self) -> &JData<f64> {
        &self.jdata
    }

    pub fn ivp(&self) -> &GeodesicIvp {
        &self.ivp
    }

    /// `x1` (ambient), `x2` and `y1` (as ambient vectors of `E`).
    pub fn split(&self) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        (self.x1.clone(), self.e_vec(&self.x2), self.e_vec(&self.y1))
    }

    fn e_vec(&self, c: &DVector<f64>) -> DVector<f64> {
        self.frame.from_block(Block::E, c)
    }

    /// `e^{tJ}`, `tφ₁(tJ)`, … up to `tᵏφₖ(tJ)`.
    fn phis(&self, t: f64, k: usize) -> Vec<DMatrix<f64>> {
        phi_blocks(&self.jdata.j, t, k)
    }

    /// `E` parts of `ẋ` and `x`: `F = e^{tJ}e0 + tφ₁(tJ)y`, `G = tφ₁(tJ)e0 + t²φ₂(tJ)y`.
    fn e_rate_and_position(&self, t: f64) -> (DVector<f64>, DVector<f64>) {
        let ph = self.phis(t, 2);
        let f = &ph[0] * &self.e0 + &ph[1] * &self.y;
        let g = &ph[1] * &self.e0 + &ph[2] * &self.y;
        (self.e_vec(&f), self.e_vec(&g))
    }

    /// `x(t)` and `ẋ(t)`.
    pub fn x_and_rate(&self, t: f64) -> (DVector<f64>, DVector<f64>) {
        let (f, g) = self.e_rate_and_position(t);
        (&self.ivp.v0 * t + g, &self.ivp.v0 + f)
    }

    /// `∫₀ᵗ x(s) ds = ½t² v0 + t²φ₂(tJ)e0 + t³φ₃(tJ)y`.
    pub fn x_integral(&self, t: f64) -> DVector<f64> {
        let ph = self.phis(t, 3);
        &self.ivp.v0 * (0.5 * t * t) + self.e_vec(&(&ph[2] * &self.e0 + &ph[3] * &self.y))
    }

    /// `I(t) = −½∫₀ᵗ [ẋ, x]`. With `ẋ = v0 + F`, `x = s v0 + G` and `H = ∫₀ᵗ G`,
    ///
    /// ```text
    /// ∫₀ᵗ [ẋ, x] = [v0, H] + [tG(t) − H, v0] + ∫₀ᵗ [F, G] ds
    /// ```
    ///
    /// leaving one quadrature over bounded, inverse-free terms.
    pub fn bracket_integral(&self, t: f64) -> DVector<f64> {
        let v0 = &self.ivp.v0;
        let (_, g) = self.e_rate_and_position(t);
        let h = self.x_integral(t) - v0 * (0.5 * t * t);
        let closed = self.alg.br(v0, &h) + self.alg.br(&(g * t - &h), v0);
        (closed + self.residual_integral(t)) * -0.5
    }

    /// `∫₀ᵗ [F, G] ds` by adaptive Gauss–Kronrod.
    ///
    /// The tolerance is raised to the rounding level of the integrand, which can
    /// be far above its value when `e^{sJ}` grows and the bracket cancels.
    pub fn residual_integral(&self, t: f64) -> DVector<f64> {
        let n = self.alg.dim();
        if self.frame.dim_e() == 0 || t == 0.0 {
            return DVector::zeros(n);
        }
        let noise = [0.0, 0.5 * t, t]
            .iter()
            .map(|&s| {
                let (f, g) = self.e_rate_and_position(s);
                self.alg.bracket_bound(&f, &g)
            })
            .fold(0.0, f64::max);
        let tol = QUADRATURE_TOL.max(64.0 * f64::EPSILON * noise * t.abs());
        quadrature::integrate(
            |s| {
                let (f, g) = self.e_rate_and_position(s);
                self.alg.br(&f, &g)
            },
            0.0,
            t,
            n,
            tol,
        )
    }

    /// `I(t)` by direct quadrature of `−½[ẋ, x]`; used for cross-checks.
    pub fn bracket_integral_quadrature(&self, t: f64) -> DVector<f64> {
        quadrature::integrate(
            |s| {
                let (x, xd) = self.x_and_rate(s);
                self.alg.br(&xd, &x) * -0.5
            },
            0.0,
            t,
            self.alg.dim(),
            QUADRATURE_TOL,
        )
    }

    /// `∫₀ᵗ∫₀ˢ 𝒮ẋ = 𝒮 ∫₀ᵗ x`, as an ambient vector of `U`.
    pub fn double_integral(&self, t: f64) -> DVector<f64> {
        let c = self.jdata.apply_script_s(self.frame, &self.x_integral(t));
        self.frame.from_block(Block::U, &c)
    }

    /// `∫₀ᵗ (t − σ) 𝒮ẋ(σ) dσ` by quadrature; used for cross-checks.
    pub fn double_integral_quadrature(&self, t: f64) -> DVector<f64> {
        let n = self.alg.dim();
        quadrature::integrate(
            |s| {
                let (_, xd) = self.x_and_rate(s);
                let c = self.jdata.apply_script_s(self.frame, &xd);
                self.frame.from_block(Block::U, &c) * (t - s)
            },
            0.0,
            t,
            n,
            QUADRATURE_TOL,
        )
    }

    /// Exponential coordinates and body velocity of the geodesic from the identity.
    pub fn state_at_identity(&self, t: f64) -> (DVector<f64>, DVector<f64>) {
        let (x, xdot) = self.x_and_rate(t);
        let i = self.bracket_integral(t);
        let parts = self.frame.parts(&i);
        let z = &self.ivp.z0 * t + parts.z;
        let u = &self.ivp.u0 * t + parts.u + self.double_integral(t);
        let s_x = self.frame.from_block(Block::U, &self.jdata.apply_script_s(self.frame, &x));
        let velocity = &self.ivp.u0 + &self.ivp.z0 + s_x + xdot;
        (u + z + x, velocity)
    }

    /// `γ(t)` and its body velocity, left-translated to the IVP's base point.
    pub fn state(&self, t: f64) -> GeodesicState {
        let (log, velocity) = self.state_at_identity(t);
        let log = &self.ivp.base.log + &log + self.alg.br(&self.ivp.base.log, &log) * 0.5;
        GeodesicState { t, log: log.iter().copied().collect(), velocity: velocity.iter().copied().collect() }
    }

    pub fn sample(&self, times: &[f64]) -> Vec<GeodesicState> {
        times.iter().map(|&t| self.state(t)).collect()
    }
}

/// Closed-form state at `t`; builds `J` from the IVP.
pub fn solve_closed_form(alg: &MetricAlgebra<f64>, frame: &WittFrame<f64>, ivp: &GeodesicIvp, t: f64, rank_tol: f64) -> Result<GeodesicState> {
    Ok(ClosedForm::new(alg, frame, ivp, rank_tol)?.state(t))
}

/// Nondegenerate-center specialization (`U = V = 0`):
/// `e(t) = t e1 + (P − I)J⁻¹e2`, `z(t) = t z1 + z2 + z3` with
///
/// ```text
/// z1 = z0 + ½[e1, (P + I)J⁻¹e2]
/// z2 = [e1, (I − P)J⁻²e2] + ½[P J⁻¹e2, J⁻¹e2]
/// z3 = ½∫₀ᵗ [e^{sJ}J⁻¹e2, e^{sJ}e2] ds
/// ```
pub fn solve_nondegenerate(alg: &MetricAlgebra<f64>, frame: &WittFrame<f64>, jdata: &JData<f64>, ivp: &GeodesicIvp, t: f64) -> Result<GeodesicState> {
    if frame.dim_u() != 0 {
        return Err(Error::DegenerateCenter);
    }
    if !jdata.orthogonal_split {
        return Err(Error::NonOrthogonalKernelSplit);
    }
    let e_vec = |c: &DVector<f64>| frame.from_block(Block::E, c);
    let br = |a: &DVector<f64>, b: &DVector<f64>| alg.br(a, b);
    let e0 = frame.block_coords(&ivp.e0, Block::E);
    let e1c = &jdata.proj_e1 * &e0;
    let e2c = &jdata.proj_e2 * &e0;
    let k = &jdata.j_inv * &e2c;
    let k2 = &jdata.j_inv * &k;
    let flow = |s: f64| expm(&(&jdata.j * s));
    let p = flow(t);
    let e1 = e_vec(&e1c);
    let e = &e1 * t + e_vec(&(&p * &k - &k));
    let edot = &e1 + e_vec(&(&p * &e2c));
    let z1 = &ivp.z0 + br(&e1, &e_vec(&(&p * &k + &k))) * 0.5;
    let z2 = br(&e1, &e_vec(&(&k2 - &p * &k2))) + br(&e_vec(&(&p * &k)), &e_vec(&k)) * 0.5;
    let z3 = if frame.dim_e() == 0 || t == 0.0 {
        DVector::zeros(alg.dim())
    } else {
        let noise = [0.0, 0.5 * t, t]
            .iter()
            .map(|&s| {
                let ps = flow(s);
                alg.bracket_bound(&e_vec(&(&ps * &k)), &e_vec(&(&ps * &e2c)))
            })
            .fold(0.0, f64::max);
        let tol = QUADRATURE_TOL.max(64.0 * f64::EPSILON * noise * t.abs());
        quadrature::integrate(
            |s| {
                let ps = flow(s);
                br(&e_vec(&(&ps * &k)), &e_vec(&(&ps * &e2c)))
            },
            0.0,
            t,
            alg.dim(),
            tol,
        ) * 0.5
    };
    let z = &z1 * t + z2 + z3;
    let velocity = &ivp.z0 + edot;
    let local = z + e;
    let log = &ivp.base.log + &local + alg.br(&ivp.base.log, &local) * 0.5;
    Ok(GeodesicState { t, log: log.iter().copied().collect(), velocity: velocity.iter().copied().collect() })
}

/// Numerical geodesic from the left-invariant form of the geodesic equation.
///
/// State `(p, W)` with `p = log γ` and `W` the body velocity:
/// `ṗ = W − ½[W, p]`, `Ẇ = ad†_W W`. Uses neither the frame nor `J`.
pub fn ode_oracle(alg: &MetricAlgebra<f64>, base: &GroupElement<f64>, velocity: &DVector<f64>, times: &[f64], opts: &OdeOptions) -> Result<Vec<GeodesicState>> {
    let n = alg.dim();
    if velocity.len() != n || base.log.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: velocity.len() });
    }
    if alg.gram_inverse().is_none() {
        return Err(Error::SingularGram);
    }
    let mut y0 = DVector::zeros(2 * n);
    y0.rows_mut(0, n).copy_from(&base.log);
    y0.rows_mut(n, n).copy_from(velocity);
    let rhs = |_t: f64, y: &DVector<f64>| {
        let p = y.rows(0, n).into_owned();
        let w = y.rows(n, n).into_owned();
        let mut out = DVector::zeros(2 * n);
        out.rows_mut(0, n).copy_from(&(&w - alg.br(&w, &p) * 0.5));
        out.rows_mut(n, n).copy_from(&alg.adj(&w, &w));
        out
    };
    let (ys, _) = ode::integrate(rhs, 0.0, &y0, times, opts)?;
    Ok(times
        .iter()
        .zip(ys)
        .map(|(&t, y)| GeodesicState { t, log: y.rows(0, n).iter().copied().collect(), velocity: y.rows(n, n).iter().copied().collect() })
        .collect())
}

/// `d/dt log γ(t)` recovered from the body velocity: `W − ½[W, log γ]`.
pub fn log_rate(alg: &MetricAlgebra<f64>, state: &GeodesicState) -> DVector<f64> {
    let w = state.velocity_vector();
    let p = state.log_vector();
    &w - alg.br(&w, &p) * 0.5
}

/// Causal character of `γ̇`, required to be the same at every sample.
///
/// `null_tol` is relative to `1 + max |W|²`.
pub fn causal_character_along(alg: &MetricAlgebra<f64>, states: &[GeodesicState], null_tol: f64) -> Result<CausalCharacter> {
    let mut found: Option<CausalCharacter> = None;
    for s in states {
        let w = s.velocity_vector();
        let scale = 1.0 + w.amax().powi(2);
        let ch = if w.amax() == 0.0 {
            CausalCharacter::Zero
        } else {
            CausalCharacter::from_square(&alg.ip(&w, &w), false, null_tol * scale)
        };
        match found {
            None => found = Some(ch),
            Some(prev) if prev != ch => {
                return Err(Error::IntegratorFailure(format!("causal character changes from {prev:?} to {ch:?} at t = {}", s.t)));
            }
            _ => {}
        }
    }
    found.ok_or_else(|| Error::IntegratorFailure("no samples".into()))
}

/// `n` Chebyshev–Lobatto points on `[a, b]`, increasing.
pub fn chebyshev_times(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|k| {
            let c = (std::f64::consts::PI * k as f64 / (n - 1) as f64).cos();
            a + (b - a) * 0.5 * (1.0 - c)
        })
        .collect()
}

/// Default invariant-check grid: 33 Chebyshev points on `[0, 10]`.
pub fn default_times() -> Vec<f64> {
    chebyshev_times(0.0, 10.0, 33)
}

/// Closed form against the numerical oracle, plus conservation checks on the oracle path.
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    /// Largest componentwise `|Δ log γ|` and `|Δ W|`.
    pub max_position_deviation: f64,
    pub max_velocity_deviation: f64,
    /// Largest `|Δ|/(1 + |value|)` over both.
    pub max_scaled_deviation: f64,
    /// Largest magnitude among compared components.
    pub max_magnitude: f64,
    pub speed_drift: f64,
    /// Oracle speed drift over the rounding scale `1 + Σ|w_i g_ij w_j|` of `<W,W>`.
    pub scaled_speed_drift: f64,
    pub closed_form_speed_drift: f64,
    /// `|ż + ½[ẋ, x]^Z − z0|` on the oracle path.
    pub center_integral_drift: f64,
    /// `|v̇ − v0|` on the oracle path.
    pub v_rate_drift: f64,
    pub samples: usize,
}

impl Comparison {
    pub fn worst(&self) -> f64 {
        self.max_position_deviation.max(self.max_velocity_deviation)
    }
}

/// Runs both solvers for one IVP based at the identity-translated base point.
pub fn compare(alg: &MetricAlgebra<f64>, frame: &WittFrame<f64>, ivp: &GeodesicIvp, times: &[f64], rank_tol: f64, opts: &OdeOptions) -> Result<Comparison> {
    let cf = ClosedForm::new(alg, frame, ivp, rank_tol)?;
    let closed = cf.sample(times);
    let oracle = ode_oracle(alg, &ivp.base, &ivp.velocity(), times, opts)?;
    Ok(compare_paths(alg, frame, ivp, &closed, &oracle))
}

/// Deviations between two sampled paths and invariant drifts on the second one.
pub fn compare_paths(alg: &MetricAlgebra<f64>, frame: &WittFrame<f64>, ivp: &GeodesicIvp, closed: &[GeodesicState], oracle: &[GeodesicState]) -> Comparison {
    let v = ivp.velocity();
    let speed0 = alg.ip(&v, &v);
    let mut c = Comparison {
        max_position_deviation: 0.0,
        max_velocity_deviation: 0.0,
        max_scaled_deviation: 0.0,
        max_magnitude: 0.0,
        speed_drift: 0.0,
        scaled_speed_drift: 0.0,
        closed_form_speed_drift: 0.0,
        center_integral_drift: 0.0,
        v_rate_drift: 0.0,
        samples: closed.len(),
    };
    for (a, b) in closed.iter().zip(oracle) {
        for (pa, pb) in a.log.iter().zip(&b.log) {
            c.max_position_deviation = c.max_position_deviation.max((pa - pb).abs());
            c.max_scaled_deviation = c.max_scaled_deviation.max((pa - pb).abs() / (1.0 + pb.abs()));
            c.max_magnitude = c.max_magnitude.max(pb.abs());
        }
        for (wa, wb) in a.velocity.iter().zip(&b.velocity) {
            c.max_velocity_deviation = c.max_velocity_deviation.max((wa - wb).abs());
            c.max_scaled_deviation = c.max_scaled_deviation.max((wa - wb).abs() / (1.0 + wb.abs()));
            c.max_magnitude = c.max_magnitude.max(wb.abs());
        }
        let wb = b.velocity_vector();
        let drift = (alg.ip(&wb, &wb) - speed0).abs();
        let abs_w = wb.abs();
        let scale = 1.0 + abs_w.dot(&(alg.gram().abs() * &abs_w));
        c.speed_drift = c.speed_drift.max(drift);
        c.scaled_speed_drift = c.scaled_speed_drift.max(drift / scale);
        let wa = a.velocity_vector();
        c.closed_form_speed_drift = c.closed_form_speed_drift.max((alg.ip(&wa, &wa) - speed0).abs());

        // First integrals in coordinates relative to the base point.
        let base_inv = ivp.base.inverse();
        let p = b.log_vector();
        let local = &base_inv.log + &p + alg.br(&base_inv.log, &p) * 0.5;
        let local_state = GeodesicState { t: b.t, log: local.iter().copied().collect(), velocity: b.velocity.clone() };
        let rate = log_rate(alg, &local_state);
        let rp = frame.parts(&rate);
        let lp = frame.parts(&local);
        let x = &lp.v + &lp.e;
        let xdot = &rp.v + &rp.e;
        let bz = frame.parts(&alg.br(&xdot, &x)).z;
        c.center_integral_drift = c.center_integral_drift.max((&rp.z + bz * 0.5 - &ivp.z0).amax());
        c.v_rate_drift = c.v_rate_drift.max((&rp.v - &ivp.v0).amax());
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::decomposition::{witt_decompose, DEFAULT_RANK_TOL};

    fn setup(alg: crate::MetricAlgebra<crate::Rational>) -> (MetricAlgebra<f64>, WittFrame<f64>) {
        let f = witt_decompose(&alg).unwrap();
        (alg.to_float(), f.to_float())
    }

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    #[test]
    fn chebyshev_grid() {
        let t = default_times();
        assert_eq!(t.len(), 33);
        assert_eq!(t[0], 0.0);
        assert!((t[32] - 10.0).abs() < 1e-12);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn heisenberg_helix_matches_oracle() {
        let (alg, frame) = setup(bundled::heisenberg3_riemannian());
        let ivp = GeodesicIvp::at_identity(&frame, &v(&[0.3, -0.7, 1.2]));
        let cmp = compare(&alg, &frame, &ivp, &default_times(), DEFAULT_RANK_TOL, &OdeOptions::default()).unwrap();
        assert!(cmp.worst() < 1e-9, "{cmp:?}");
        assert!(cmp.speed_drift < 1e-10);
    }

    #[test]
    fn quaternionic_matches_oracle_at_short_times() {
        let (alg, frame) = setup(bundled::quaternionic7(1, 1, 1));
        let ivp = GeodesicIvp::at_identity(&frame, &v(&[0.2, -0.4, 0.5, 0.3, -0.6, 0.7, 0.1]));
        let cmp = compare(&alg, &frame, &ivp, &[0.5, 1.0, 2.0], DEFAULT_RANK_TOL, &OdeOptions::default()).unwrap();
        assert!(cmp.worst() < 1e-10, "{cmp:?}");
    }

    #[test]
    fn closed_form_pieces_match_quadrature() {
        let (alg, frame) = setup(bundled::quaternionic7(-1, 1, 1));
        let ivp = GeodesicIvp::at_identity(&frame, &v(&[0.2, -0.4, 0.5, 0.3, -0.6, 0.7, 0.1]));
        let cf = ClosedForm::new(&alg, &frame, &ivp, DEFAULT_RANK_TOL).unwrap();
        for t in [0.3, 1.7, 4.0] {
            assert!((cf.bracket_integral(t) - cf.bracket_integral_quadrature(t)).amax() < 1e-9);
            assert!((cf.double_integral(t) - cf.double_integral_quadrature(t)).amax() < 1e-9);
        }
    }

    #[test]
    fn flat_group_closed_form() {
        let (alg, frame) = setup(bundled::flat_u_group());
        let vel = v(&[0.1, -0.3, 0.4, 0.8, -0.5]);
        let ivp = GeodesicIvp::at_identity(&frame, &vel);
        let cf = ClosedForm::new(&alg, &frame, &ivp, DEFAULT_RANK_TOL).unwrap();
        let s_v0 = frame.from_block(Block::U, &cf.jdata().apply_script_s(&frame, &ivp.v0));
        for t in [0.5, 2.0, 7.0] {
            let (log, _) = cf.state_at_identity(t);
            let expect = &ivp.u0 * t + &ivp.z0 * t + &ivp.v0 * t + &s_v0 * (0.5 * t * t);
            assert!((log - expect).amax() < 1e-12);
        }
    }

    #[test]
    fn one_parameter_subgroups() {
        let (alg, frame) = setup(bundled::quaternionic7(1, -1, 1));
        for vel in [v(&[0.0, 0.0, 0.7, 0.0, 0.0, 0.0, 0.0]), v(&[0.4, -0.1, 0.0, 0.0, 0.0, 0.9, 0.3])] {
            let ivp = GeodesicIvp::at_identity(&frame, &vel);
            let cf = ClosedForm::new(&alg, &frame, &ivp, DEFAULT_RANK_TOL).unwrap();
            for t in [1.0, 3.5] {
                let (log, w) = cf.state_at_identity(t);
                assert!((log - &vel * t).amax() < 1e-12);
                assert!((w - &vel).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn nondegenerate_specialization_agrees() {
        for alg in [bundled::heisenberg3_riemannian(), bundled::heisenberg3_lorentzian(), bundled::heisenberg3x3()] {
            let (alg, frame) = setup(alg);
            let n = alg.dim();
            let vel = DVector::from_fn(n, |i, _| 0.3 + 0.17 * i as f64 - 0.05 * (i * i) as f64);
            let ivp = GeodesicIvp::at_identity(&frame, &vel);
            let cf = ClosedForm::new(&alg, &frame, &ivp, DEFAULT_RANK_TOL).unwrap();
            for t in [0.5, 2.5, 9.0] {
                let a = cf.state(t);
                let b = solve_nondegenerate(&alg, &frame, cf.jdata(), &ivp, t).unwrap();
                let d = (a.log_vector() - b.log_vector()).amax().max((a.velocity_vector() - b.velocity_vector()).amax());
                assert!(d < 1e-10, "t = {t}: {d}");
            }
        }
        let (alg, frame) = setup(bundled::flat_u_group());
        let ivp = GeodesicIvp::at_identity(&frame, &DVector::from_element(5, 0.1));
        let jd = build_jdata(&alg, &frame, &ivp.z0, &ivp.v0, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(solve_nondegenerate(&alg, &frame, &jd, &ivp, 1.0).unwrap_err(), Error::DegenerateCenter);
    }

    #[test]
    fn left_translation() {
        let (alg, frame) = setup(bundled::quaternionic7(1, 1, -1));
        let vel = v(&[0.1, 0.2, -0.3, 0.4, 0.1, -0.2, 0.5]);
        let base = GroupElement::from_log(v(&[1.0, -2.0, 0.5, 0.3, 0.0, 1.5, -0.7]));
        let ivp = GeodesicIvp::from_velocity(&frame, base.clone(), &vel);
        let cf = ClosedForm::new(&alg, &frame, &ivp.with_base(GroupElement::identity(7)), DEFAULT_RANK_TOL).unwrap();
        let moved = ClosedForm::new(&alg, &frame, &ivp, DEFAULT_RANK_TOL).unwrap();
        let oracle = ode_oracle(&alg, &base, &vel, &[2.0], &OdeOptions::default()).unwrap();
        let id_state = cf.state(2.0);
        let translated = alg.mul(&base, &GroupElement::from_log(id_state.log_vector())).log;
        assert!((moved.state(2.0).log_vector() - &translated).amax() < 1e-12);
        assert!((oracle[0].log_vector() - translated).amax() < 1e-9);
    }

    #[test]
    fn causal_character_is_constant() {
        let (alg, frame) = setup(bundled::quaternionic7(1, 1, 1));
        let null = v(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let cf = ClosedForm::new(&alg, &frame, &GeodesicIvp::at_identity(&frame, &null), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(causal_character_along(&alg, &cf.sample(&default_times()), 1e-9).unwrap(), CausalCharacter::Null);
        let timelike = v(&[0.0, 0.0, 1.0, 0.2, 0.0, 0.3, 0.0]);
        let cf = ClosedForm::new(&alg, &frame, &GeodesicIvp::at_identity(&frame, &timelike), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(causal_character_along(&alg, &cf.sample(&default_times()), 1e-9).unwrap(), CausalCharacter::Timelike);
    }

    #[test]
    fn zero_velocity_is_constant() {
        let (alg, _) = setup(bundled::heisenberg3_riemannian());
        let base = GroupElement::from_log(v(&[1.0, 2.0, 3.0]));
        let out = ode_oracle(&alg, &base, &DVector::zeros(3), &[0.0, 5.0], &OdeOptions::default()).unwrap();
        assert_eq!(out[1].log, vec![1.0, 2.0, 3.0]);
    }
}
