//! Translated geodesics and periods.
//!
//! `φ` translates `γ` by `ω` when `φγ(t) = γ(t + ω)` for all `t`; for unit-speed
//! `γ` the number `ω` is a period of `φ`. Null geodesics get no period.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num::Zero;
use serde::Serialize;

use crate::algebra::{CausalCharacter, GroupElement, MetricAlgebra};
use crate::curvature::brackets_in_null_center;
use crate::decomposition::{Block, WittFrame};
use crate::error::{Error, Result};
use crate::geodesic::{ClosedForm, GeodesicIvp};
use crate::lattice::{conjugacy_key, project_v, ExponentVectors, LatticeSpec};
use crate::linalg::{self, expm, min_norm_solve};
use crate::scalar::{to_float_vector, Rational, Scalar};

/// Tolerance for `e^{ωJ}` fixing a vector and the other algebraic translation conditions.
pub const TAU_FIX: f64 = 1e-9;
/// Tolerance of the sampled check `φγ(t) = γ(t + ω)`.
pub const DIRECT_TOL: f64 = 1e-8;
/// Number of sample times in the direct check.
pub const DIRECT_SAMPLES: usize = 10;

/// Caveat attached to every spectrum partition.
pub const EXCLUSION_CAVEAT: &str = "periods arising only from unit-speed geodesics that project to null geodesics \
in both tori are not removed; the partition is unsubtracted";

/// A period `ω` of the lattice element `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodRecord {
    pub omega: f64,
    /// `ω²`, exactly.
    pub omega_squared: Rational,
    pub phi: GroupElement<Rational>,
    /// Exponents `n_i` with `φ = Π exp(g_i)^{n_i}`.
    pub exponents: Vec<i64>,
    pub causal: CausalCharacter,
    /// `ω` equals the distinguished period `ω*` of `φ`.
    pub distinguished: bool,
    /// `φ ∈ Z(Γ)`.
    pub central: bool,
}

/// Records from an enumeration of lattice words with exponents bounded by `bound`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlatSpectrum {
    /// Sorted by `ω`, then by `log φ`.
    pub records: Vec<PeriodRecord>,
    pub bound: u32,
    /// Elements whose only translated geodesics are null.
    pub null_translations: usize,
    /// Elements with `<v*, [v*, n]> ≠ 0`, which translate no geodesic.
    pub non_translating: usize,
}

/// Period spectrum of `Γ\N` when `[n,n] ⊆ U` and `E = 0`.
///
/// For `φ = exp(u* + z* + v*)` translating a unit-speed geodesic from the
/// identity, `±ω² = 2<u*,v*> + <z*,z*>`. Translation forces `𝒮v* = 0`, which
/// here means `<v*, [v*, n]> = 0`; elements failing it are counted and skipped.
pub fn flat_group_spectrum(alg: &MetricAlgebra<Rational>, frame: &WittFrame<Rational>, lattice: &LatticeSpec, bound: u32) -> Result<FlatSpectrum> {
    if !brackets_in_null_center(alg, frame, 0.0) {
        return Err(Error::FlatCaseOnly);
    }
    let mut out = FlatSpectrum { bound, ..Default::default() };
    let basis = alg.basis();
    for exponents in ExponentVectors::new(lattice.rank(), bound) {
        if exponents.iter().all(|&k| k == 0) {
            continue;
        }
        let phi = lattice.word(alg, &exponents);
        let p = frame.parts(&phi.log);
        if basis.iter().any(|b| !alg.ip(&p.v, &alg.br(&p.v, b)).is_zero()) {
            out.non_translating += 1;
            continue;
        }
        let q = Rational::from_i64(2) * alg.ip(&p.u, &p.v) + alg.ip(&p.z, &p.z);
        let causal = CausalCharacter::from_square(&q, false, 0.0);
        if causal == CausalCharacter::Null {
            out.null_translations += 1;
            continue;
        }
        let omega_squared = num::Signed::abs(&q);
        let star = translated_geodesic(alg, frame, &phi, 0.0)?;
        let distinguished = !star.null && num::Signed::abs(&star.square) == omega_squared;
        out.records.push(PeriodRecord {
            omega: omega_squared.to_f64().sqrt(),
            omega_squared,
            central: lattice.is_central(alg, &phi),
            phi,
            exponents,
            causal,
            distinguished,
        });
    }
    sort_records(&mut out.records);
    Ok(out)
}

/// Periods `ω*` of the translated geodesics of lattice elements, for any algebra.
///
/// Each nonidentity `φ` with `x* ⊥ [x*, n]` translates `exp(ξ) exp(t(a'+x*)/ω*)`
/// by `ω* = |a' + x*|`. This is a subset of the period spectrum, not all of it.
pub fn translated_spectrum(alg: &MetricAlgebra<Rational>, frame: &WittFrame<Rational>, lattice: &LatticeSpec, bound: u32) -> Result<FlatSpectrum> {
    let mut out = FlatSpectrum { bound, ..Default::default() };
    for exponents in ExponentVectors::new(lattice.rank(), bound) {
        if exponents.iter().all(|&k| k == 0) {
            continue;
        }
        let phi = lattice.word(alg, &exponents);
        let star = match translated_geodesic(alg, frame, &phi, 0.0) {
            Ok(s) => s,
            Err(Error::PerpConditionFailed) => {
                out.non_translating += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        if star.null {
            out.null_translations += 1;
            continue;
        }
        let omega_squared = num::Signed::abs(&star.square);
        out.records.push(PeriodRecord {
            omega: omega_squared.to_f64().sqrt(),
            omega_squared,
            central: lattice.is_central(alg, &phi),
            causal: CausalCharacter::from_square(&star.square, false, 0.0),
            phi,
            exponents,
            distinguished: true,
        });
    }
    sort_records(&mut out.records);
    Ok(out)
}

pub fn sort_records(records: &mut [PeriodRecord]) {
    records.sort_by(|a, b| a.omega_squared.cmp(&b.omega_squared).then_with(|| a.phi.log.iter().cmp(b.phi.log.iter())));
}

/// Unit-speed geodesic from the identity translated by a flat-case record:
/// `γ(t) = exp(t log φ / ω)`.
pub fn flat_record_ivp(frame: &WittFrame<f64>, record: &PeriodRecord) -> GeodesicIvp {
    let v = to_float_vector(&record.phi.log) / record.omega;
    GeodesicIvp::at_identity(frame, &v)
}

/// `ω` with `v* = ω v0`, when `v* ≠ 0`. Every nonzero component must give the same ratio.
pub fn simple_period_v<S: Scalar>(frame: &WittFrame<S>, phi: &GroupElement<S>, v0: &DVector<S>, tol: f64) -> Result<Option<f64>> {
    let v_star = frame.block_coords(&phi.log, Block::V);
    let v0 = frame.block_coords(v0, Block::V);
    if v_star.iter().all(|c| c.is_zero_tol(tol)) {
        return Ok(None);
    }
    let Some(k) = (0..v0.len()).max_by(|&a, &b| v0[a].magnitude().total_cmp(&v0[b].magnitude())) else {
        return Err(Error::InconsistentPeriodRatio);
    };
    if v0[k].is_zero_tol(tol) {
        return Err(Error::InconsistentPeriodRatio);
    }
    let omega = v_star[k].clone() / v0[k].clone();
    let residual = v_star - v0 * omega.clone();
    if residual.iter().any(|c| !c.is_zero_tol(tol)) || omega.sign(tol) <= 0 {
        return Err(Error::InconsistentPeriodRatio);
    }
    Ok(Some(omega.to_f64()))
}

/// Splits `a = a' + w` with `w` in the span of `vectors` and `a'` orthogonal to it.
/// On a degenerate span the minimum-norm `w` is used.
fn orthogonal_component<S: Scalar>(alg: &MetricAlgebra<S>, a: &DVector<S>, vectors: &[DVector<S>]) -> Result<(DVector<S>, DVector<S>)> {
    let n = alg.dim();
    if vectors.is_empty() {
        return Ok((a.clone(), DVector::zeros(n)));
    }
    let g = DMatrix::from_fn(vectors.len(), vectors.len(), |i, j| alg.ip(&vectors[i], &vectors[j]));
    let b = DVector::from_iterator(vectors.len(), vectors.iter().map(|s| alg.ip(a, s)));
    let c = min_norm_solve(&g, &b).ok_or(Error::DegenerateForm("bracket orbit"))?;
    let w = vectors.iter().zip(c.iter()).fold(DVector::zeros(n), |acc, (s, k)| acc + s * k.clone());
    Ok((a - &w, w))
}

/// Float components below roundoff relative to `scale` are set to zero, so that
/// a vanishing part of `log φ` does not contribute spurious bracket directions.
fn clean<S: Scalar>(v: DVector<S>, scale: f64) -> DVector<S> {
    if S::EXACT {
        return v;
    }
    v.map(|c| if c.magnitude() <= 1e-13 * (1.0 + scale) { S::zero() } else { c })
}

fn amax<S: Scalar>(v: &DVector<S>) -> f64 {
    v.iter().map(|c| c.magnitude()).fold(0.0, f64::max)
}

/// Basis of `[x, n]`.
fn bracket_image<S: Scalar>(alg: &MetricAlgebra<S>, x: &DVector<S>) -> Vec<DVector<S>> {
    let ad = alg.ad_matrix(x);
    linalg::pivot_columns(&ad).into_iter().map(|k| ad.column(k).into_owned()).collect()
}

/// The geodesic `γ(t) = exp(ξ) exp(t (a' + x*)/ω*)` translated by `φ` by `ω*`.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslatedGeodesic<S: Scalar> {
    pub a_star: DVector<S>,
    pub x_star: DVector<S>,
    /// Component of `a*` orthogonal to `[x*, n]`.
    pub a_prime: DVector<S>,
    pub xi: DVector<S>,
    /// `<a' + x*, a' + x*>`.
    pub square: S,
    /// `|a' + x*|`, or 1 when `a' + x*` is null.
    pub omega_star: f64,
    pub null: bool,
    /// `a*` and `a'` have the same `U` component.
    pub u_preserved: bool,
}

impl<S: Scalar> TranslatedGeodesic<S> {
    pub fn direction(&self) -> DVector<S> {
        &self.a_prime + &self.x_star
    }

    pub fn ivp(&self, frame: &WittFrame<f64>) -> GeodesicIvp {
        let base = GroupElement::from_log(to_float_vector(&self.xi));
        GeodesicIvp::from_velocity(frame, base, &(to_float_vector(&self.direction()) / self.omega_star))
    }
}

/// Builds the translated geodesic of `φ = exp(a* + x*)`, assuming `x* ⊥ [x*, n]`.
pub fn translated_geodesic<S: Scalar>(alg: &MetricAlgebra<S>, frame: &WittFrame<S>, phi: &GroupElement<S>, tol: f64) -> Result<TranslatedGeodesic<S>> {
    if phi.log.len() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: phi.log.len() });
    }
    if phi.log.iter().all(|c| c.is_zero_tol(tol)) {
        return Err(Error::IdentityElement);
    }
    let size = amax(&phi.log);
    let x_star = clean(project_v(frame, &phi.log), size);
    let a_star = clean(&phi.log - &x_star, size);
    let image = bracket_image(alg, &x_star);
    let scale = 1.0 + amax(&x_star).powi(2);
    if image.iter().any(|s| !alg.ip(&x_star, s).is_zero_tol(tol * scale)) {
        return Err(Error::PerpConditionFailed);
    }
    let (a_prime, w) = orthogonal_component(alg, &a_star, &image)?;
    let xi = min_norm_solve(&alg.ad_matrix(&x_star), &(-&w)).ok_or(Error::NoXiSolution)?;
    let d = &a_prime + &x_star;
    let square = alg.ip(&d, &d);
    let null = square.is_zero_tol(tol);
    let omega_star = if null { 1.0 } else { square.magnitude().sqrt() };
    let u_preserved = frame.vanishes_on(&w, Block::U, tol);
    Ok(TranslatedGeodesic { a_star, x_star, a_prime, xi, square, omega_star, null, u_preserved })
}

/// Translation criterion and direct check for one `(φ, γ, ω)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationCheck {
    /// `|log γ(ω) − log(φ γ(0))|`, scaled.
    pub endpoint_residual: f64,
    /// `|e^{ωJ} w − w|` for `w = e1 + y1 + x2`, scaled.
    pub fix_residual: f64,
    /// `|x* − (ω x1 + ½ω² y1)|`, scaled.
    pub lemma_residual: f64,
    pub y1_norm: f64,
    /// `|𝒮 x*|`.
    pub s_x_star_norm: f64,
    /// Endpoint, fixed vector and the relation for `x*`.
    pub fixed_point_criterion: bool,
    /// The above together with `y1 = 0` and `𝒮x* = 0`.
    pub criterion: bool,
    pub direct_residual: f64,
    pub direct: bool,
}

impl TranslationCheck {
    pub fn agrees(&self) -> bool {
        self.criterion == self.direct
    }
}

fn scaled(residual: f64, magnitude: f64) -> f64 {
    residual / (1.0 + magnitude)
}

/// Sample times of the direct check.
pub fn direct_times() -> Vec<f64> {
    (0..DIRECT_SAMPLES).map(|k| 0.5 * k as f64).collect()
}

/// Decides whether `φ` translates the closed-form geodesic `γ` by `ω`.
///
/// The criterion requires `γ(ω) = φγ(0)`, that `e^{ωJ}` fix `e1 + y1 + x2` and
/// `x* = ωx1 + ½ω²y1`. Those alone miss two obstructions: `x(t + ω) − x(t)`
/// contains `tω y1`, and `u(t + ω) − u(t)` contains `𝒮x*`, so both must vanish
/// as well. The direct check samples `φγ(t) = γ(t + ω)`.
pub fn translation_check(alg: &MetricAlgebra<f64>, frame: &WittFrame<f64>, cf: &ClosedForm<'_>, phi: &GroupElement<f64>, omega: f64) -> TranslationCheck {
    translation_check_with(alg, frame, cf, phi, omega, TAU_FIX, DIRECT_TOL)
}

/// [`translation_check`] with explicit tolerances for the criterion and the direct check.
pub fn translation_check_with(
    alg: &MetricAlgebra<f64>,
    frame: &WittFrame<f64>,
    cf: &ClosedForm<'_>,
    phi: &GroupElement<f64>,
    omega: f64,
    tau_fix: f64,
    direct_tol: f64,
) -> TranslationCheck {
    let jd = cf.jdata();
    let ivp = cf.ivp();
    let start = cf.state(0.0).log_vector();
    let end = cf.state(omega).log_vector();
    let shifted = alg.mul(phi, &GroupElement::from_log(start));
    let endpoint_residual = scaled((&end - &shifted.log).amax(), end.amax().max(shifted.log.amax()));

    let (x1, x2, y1) = cf.split();
    let e0 = frame.block_coords(&ivp.e0, Block::E);
    let e1 = &jd.proj_e1 * e0;
    let w = e1 + frame.block_coords(&y1, Block::E) + frame.block_coords(&x2, Block::E);
    let fix_residual = if w.is_empty() { 0.0 } else { scaled((expm(&(&jd.j * omega)) * &w - &w).amax(), w.amax()) };

    let x_star = project_v(frame, &phi.log);
    let predicted = &x1 * omega + &y1 * (0.5 * omega * omega);
    let lemma_residual = scaled((&x_star - &predicted).amax(), x_star.amax().max(predicted.amax()));
    let y1_norm = y1.amax();
    let s_x_star_norm = jd.apply_script_s(frame, &x_star).amax();

    let fixed_point_criterion = endpoint_residual <= tau_fix && fix_residual <= tau_fix && lemma_residual <= tau_fix;
    let criterion = fixed_point_criterion && y1_norm <= tau_fix && s_x_star_norm <= tau_fix * (1.0 + x_star.amax());

    let direct_residual = direct_translation_residual(alg, cf, phi, omega, &direct_times());
    TranslationCheck {
        endpoint_residual,
        fix_residual,
        lemma_residual,
        y1_norm,
        s_x_star_norm,
        fixed_point_criterion,
        criterion,
        direct_residual,
        direct: direct_residual <= direct_tol,
    }
}

/// Largest scaled `|log(φγ(t)) − log γ(t + ω)|` over the given times.
pub fn direct_translation_residual(alg: &MetricAlgebra<f64>, cf: &ClosedForm<'_>, phi: &GroupElement<f64>, omega: f64, times: &[f64]) -> f64 {
    times
        .iter()
        .map(|&t| {
            let lhs = alg.mul(phi, &GroupElement::from_log(cf.state(t).log_vector())).log;
            let rhs = cf.state(t + omega).log_vector();
            scaled((&lhs - &rhs).amax(), lhs.amax().max(rhs.amax()))
        })
        .fold(0.0, f64::max)
}

/// `ω* = |z' + e*|` for `φ = exp(z* + e*)` with nondegenerate center.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinguishedPeriod<S: Scalar> {
    pub z_star: DVector<S>,
    pub e_star: DVector<S>,
    /// Component of `z*` orthogonal to `[e*, n]`.
    pub z_prime: DVector<S>,
    /// `<z' + e*, z' + e*>`.
    pub square: S,
    pub omega_star: f64,
    pub null: bool,
}

/// `ω` against `ω*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    Less,
    Equal,
    Greater,
}

/// How a concrete period compares with the distinguished one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodComparison {
    pub omega: f64,
    pub omega_star: f64,
    pub e_star_norm: f64,
    /// `|e*| ≤ ω`.
    pub e_star_bounded: bool,
    /// `<ωz0 − z', ωz0 − z'>`.
    pub deviation_square: f64,
    pub deviation: CausalCharacter,
    /// Sign of `<γ̇, γ̇>`.
    pub geodesic_sign: i8,
    /// Ordering of `ω` against `ω*` implied by `deviation` and `geodesic_sign`.
    pub predicted: Ordering,
    pub observed: Ordering,
    pub consistent: bool,
    /// `<z' + e*, z' + e*>`.
    pub star_square: f64,
    /// `z' + e*` has the geodesic's causal character, or `ωz0 − z'` is null.
    /// The predicted ordering is only forced in this case.
    pub prediction_applies: bool,
    /// Scaled defect of `<z'+e*, z'+e*> − εω² = <ωz0 − z', ωz0 − z'>`.
    pub identity_residual: f64,
}

/// Distinguished period of `φ`; requires `U = 0`.
pub fn distinguished_period<S: Scalar>(alg: &MetricAlgebra<S>, frame: &WittFrame<S>, phi: &GroupElement<S>, tol: f64) -> Result<DistinguishedPeriod<S>> {
    if frame.dim_u() != 0 {
        return Err(Error::DegenerateCenter);
    }
    if phi.log.len() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: phi.log.len() });
    }
    let size = amax(&phi.log);
    let e_star = clean(frame.project(&phi.log, Block::E), size);
    let z_star = clean(frame.project(&phi.log, Block::Z), size);
    let (z_prime, _) = orthogonal_component(alg, &z_star, &bracket_image(alg, &e_star))?;
    let d = &z_prime + &e_star;
    let square = alg.ip(&d, &d);
    let null = square.is_zero_tol(tol);
    let omega_star = if null { 1.0 } else { square.magnitude().sqrt() };
    Ok(DistinguishedPeriod { z_star, e_star, z_prime, square, omega_star, null })
}

impl DistinguishedPeriod<f64> {
    /// Compares a period `ω` of a unit-speed geodesic with left-trivialized
    /// initial center component `z0` and `<γ̇,γ̇> = geodesic_sign`.
    ///
    /// Null `ωz0 − z'` predicts `ω = ω*`; a deviation of the geodesic's own
    /// causal character predicts `ω < ω*`, the opposite one `ω > ω*`.
    pub fn compare(&self, alg: &MetricAlgebra<f64>, omega: f64, z0: &DVector<f64>, geodesic_sign: i8, tol: f64) -> PeriodComparison {
        let dev = z0 * omega - &self.z_prime;
        let deviation_square = alg.ip(&dev, &dev);
        let scale = 1.0 + (omega * z0.amax()).max(self.z_prime.amax()).powi(2);
        let deviation = CausalCharacter::from_square(&deviation_square, false, tol * scale);
        let predicted = match deviation.signum() {
            0 => Ordering::Equal,
            s if s == geodesic_sign => Ordering::Less,
            _ => Ordering::Greater,
        };
        let observed = if (omega - self.omega_star).abs() <= tol * (1.0 + omega) {
            Ordering::Equal
        } else if omega < self.omega_star {
            Ordering::Less
        } else {
            Ordering::Greater
        };
        let e_star_norm = alg.ip(&self.e_star, &self.e_star).abs().sqrt();
        PeriodComparison {
            omega,
            omega_star: self.omega_star,
            e_star_norm,
            e_star_bounded: e_star_norm <= omega * (1.0 + tol),
            deviation_square,
            deviation,
            geodesic_sign,
            predicted,
            observed,
            consistent: predicted == observed,
            star_square: self.square,
            prediction_applies: predicted == Ordering::Equal || self.square.signum() as i8 == geodesic_sign,
            identity_residual: (self.square - f64::from(geodesic_sign) * omega * omega - deviation_square).abs()
                / (1.0 + omega * omega + self.square.abs() + deviation_square.abs()),
        }
    }
}

/// Periods collected for one `Γ`-conjugacy class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPeriods {
    pub key: Vec<Rational>,
    pub central: bool,
    pub periods: Vec<f64>,
    pub distinguished: Vec<f64>,
}

/// Records split by whether their class meets the center of `Γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Central classes: periods seen by the fiber torus.
    pub fiber: Vec<PeriodRecord>,
    /// Noncentral classes: periods seen by the base torus.
    pub base: Vec<PeriodRecord>,
    pub classes: Vec<ClassPeriods>,
    pub caveat: &'static str,
}

impl Partition {
    pub fn fiber_spectrum(&self) -> Vec<f64> {
        distinct(self.fiber.iter().map(|r| r.omega))
    }

    pub fn base_spectrum(&self) -> Vec<f64> {
        distinct(self.base.iter().map(|r| r.omega))
    }

    pub fn distinguished_fiber_spectrum(&self) -> Vec<f64> {
        distinct(self.fiber.iter().filter(|r| r.distinguished).map(|r| r.omega))
    }
}

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    v
}

/// Partitions records by centrality in `Γ` and buckets them into conjugacy classes.
///
/// A class is central exactly when its elements are, since conjugation fixes central elements.
pub fn spectrum_partition(alg: &MetricAlgebra<Rational>, lattice: &LatticeSpec, records: &[PeriodRecord]) -> Partition {
    let mut classes: BTreeMap<Vec<Rational>, ClassPeriods> = BTreeMap::new();
    let (mut fiber, mut base) = (Vec::new(), Vec::new());
    for r in records {
        let central = lattice.is_central(alg, &r.phi);
        let key = conjugacy_key(alg, lattice, &r.phi);
        let entry = classes.entry(key.clone()).or_insert_with(|| ClassPeriods { key, central, periods: Vec::new(), distinguished: Vec::new() });
        entry.periods.push(r.omega);
        if r.distinguished {
            entry.distinguished.push(r.omega);
        }
        if central {
            fiber.push(r.clone());
        } else {
            base.push(r.clone());
        }
    }
    Partition { fiber, base, classes: classes.into_values().collect(), caveat: EXCLUSION_CAVEAT }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::decomposition::{witt_decompose, DEFAULT_RANK_TOL};
    use crate::lattice::{build_lattice, standard_generators, torus_data};
    use crate::scalar::vector_from_i64;

    fn f(xs: &[f64]) -> DVector<f64> {
        DVector::from_vec(xs.to_vec())
    }

    fn flat_setup() -> (MetricAlgebra<Rational>, WittFrame<Rational>, LatticeSpec) {
        let alg = bundled::flat_u_group();
        let (exact, lat) = build_lattice(&alg, &standard_generators(&alg)).unwrap();
        let frame = witt_decompose(&exact).unwrap();
        (exact, frame, lat)
    }

    #[test]
    fn flat_spectrum_records_translate() {
        let (alg, frame, lat) = flat_setup();
        let spec = flat_group_spectrum(&alg, &frame, &lat, 1).unwrap();
        assert_eq!(spec.records.len() + spec.null_translations + spec.non_translating, 3usize.pow(5) - 1);
        assert!(spec.non_translating > 0);
        let (af, ff) = (alg.to_float(), frame.to_float());
        for r in &spec.records {
            let p = frame.parts(&r.phi.log);
            let q = Rational::from_i64(2) * alg.ip(&p.u, &p.v) + alg.ip(&p.z, &p.z);
            assert_eq!(num::Signed::abs(&q), r.omega_squared);
            assert!(r.distinguished);
            let ivp = flat_record_ivp(&ff, r);
            let cf = ClosedForm::new(&af, &ff, &ivp, DEFAULT_RANK_TOL).unwrap();
            let check = translation_check(&af, &ff, &cf, &r.phi.to_float(), r.omega);
            assert!(check.direct && check.criterion, "{:?} {check:?}", r.exponents);
        }
        let ws: Vec<f64> = spec.records.iter().map(|r| r.omega).collect();
        assert!(ws.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn central_flat_record_is_torus_period() {
        let (alg, frame, lat) = flat_setup();
        let spec = flat_group_spectrum(&alg, &frame, &lat, 1).unwrap();
        // exp(z) alone: ω² = <z,z> = 1.
        let z = spec.records.iter().find(|r| r.exponents == [0, 0, 1, 0, 0]).unwrap();
        assert_eq!(z.omega_squared, Rational::from_i64(1));
        assert!(z.central);
        assert_eq!(z.causal, CausalCharacter::Timelike);
        // u2 + v2 pairs to q = 2.
        let uv = spec.records.iter().find(|r| r.exponents == [0, 1, 0, 0, 1]).unwrap();
        assert_eq!(uv.omega_squared, Rational::from_i64(2));
        assert!(!uv.central);
    }

    #[test]
    fn non_flat_groups_are_rejected() {
        let alg = bundled::heisenberg3_riemannian();
        let (exact, lat) = build_lattice(&alg, &standard_generators(&alg)).unwrap();
        let frame = witt_decompose(&exact).unwrap();
        assert_eq!(flat_group_spectrum(&exact, &frame, &lat, 1).unwrap_err(), Error::FlatCaseOnly);
    }

    #[test]
    fn simple_period_from_v() {
        let alg = bundled::flat_u_group();
        let frame = witt_decompose(&alg).unwrap();
        let v0 = vector_from_i64(&[0, 0, 0, 1, -1]);
        let phi = GroupElement::from_log(vector_from_i64(&[3, 0, 1, 2, -2]));
        assert_eq!(simple_period_v(&frame, &phi, &v0, 0.0).unwrap(), Some(2.0));
        let central = GroupElement::from_log(vector_from_i64(&[3, 0, 1, 0, 0]));
        assert_eq!(simple_period_v(&frame, &central, &v0, 0.0).unwrap(), None);
        let skew = GroupElement::from_log(vector_from_i64(&[0, 0, 0, 2, -1]));
        assert_eq!(simple_period_v(&frame, &skew, &v0, 0.0).unwrap_err(), Error::InconsistentPeriodRatio);
    }

    #[test]
    fn translated_geodesics() {
        let alg = bundled::heisenberg3_riemannian();
        let frame = witt_decompose(&alg).unwrap();
        let z = GroupElement::from_log(vector_from_i64(&[0, 0, 2]));
        let t = translated_geodesic(&alg, &frame, &z, 0.0).unwrap();
        assert_eq!(t.a_prime, z.log);
        assert_eq!(t.omega_star, 2.0);
        assert!(t.xi.iter().all(|c| num::Zero::is_zero(c)));

        // Nonsingular: a' = 0 and ξ absorbs the center.
        let phi = GroupElement::from_log(vector_from_i64(&[1, 0, 3]));
        let t = translated_geodesic(&alg, &frame, &phi, 0.0).unwrap();
        assert!(t.a_prime.iter().all(|c| num::Zero::is_zero(c)));
        assert_eq!(t.omega_star, 1.0);
        assert_eq!(alg.br(&t.x_star, &t.xi), &t.a_prime - &t.a_star);

        let af = alg.to_float();
        let ff = frame.to_float();
        let cf = ClosedForm::new(&af, &ff, &t.ivp(&ff), DEFAULT_RANK_TOL).unwrap();
        let res = direct_translation_residual(&af, &cf, &phi.to_float(), t.omega_star, &direct_times());
        assert!(res < 1e-10, "{res}");

        let e1 = GroupElement::from_log(f(&[1.0, 0.0, 0.0]));
        let t = translated_geodesic(&af, &ff, &e1, 1e-12).unwrap();
        let cf = ClosedForm::new(&af, &ff, &t.ivp(&ff), DEFAULT_RANK_TOL).unwrap();
        assert!(direct_translation_residual(&af, &cf, &e1, t.omega_star, &direct_times()) < 1e-10);

        assert_eq!(translated_geodesic(&alg, &frame, &GroupElement::identity(3), 0.0).unwrap_err(), Error::IdentityElement);
    }

    #[test]
    fn perp_condition_is_enforced() {
        let alg = bundled::flat_u_group();
        let frame = witt_decompose(&alg).unwrap();
        let phi = GroupElement::from_log(vector_from_i64(&[0, 0, 0, 1, 1]));
        assert_eq!(translated_geodesic(&alg, &frame, &phi, 0.0).unwrap_err(), Error::PerpConditionFailed);
        let ok = GroupElement::from_log(vector_from_i64(&[1, 0, 0, 0, 1]));
        let t = translated_geodesic(&alg, &frame, &ok, 0.0).unwrap();
        assert!(t.u_preserved);
        assert_eq!(t.square, Rational::from_i64(0));
        assert!(t.null);
        assert_eq!(t.omega_star, 1.0);
    }

    #[test]
    fn helix_translation_and_criterion() {
        let alg = bundled::heisenberg3_riemannian().to_float();
        let frame = witt_decompose(&bundled::heisenberg3_riemannian()).unwrap().to_float();
        let ivp = GeodesicIvp::at_identity(&frame, &f(&[0.6, 0.0, 0.8]));
        let cf = ClosedForm::new(&alg, &frame, &ivp, DEFAULT_RANK_TOL).unwrap();
        let lambda = cf.jdata().max_rotation_rate().unwrap();
        let omega = 2.0 * std::f64::consts::PI / lambda;
        let phi = GroupElement::from_log(cf.state(omega).log_vector());
        let check = translation_check(&alg, &frame, &cf, &phi, omega);
        assert!(check.criterion && check.direct, "{check:?}");
        // Half a turn ends elsewhere.
        let half = GroupElement::from_log(cf.state(omega / 2.0).log_vector());
        let check = translation_check(&alg, &frame, &cf, &half, omega / 2.0);
        assert!(!check.fixed_point_criterion && !check.direct);
        assert!(check.endpoint_residual < 1e-12);
    }

    #[test]
    fn fixed_point_criterion_misses_the_u_drift() {
        let alg = bundled::flat_u_group().to_float();
        let frame = witt_decompose(&bundled::flat_u_group()).unwrap().to_float();
        let ivp = GeodesicIvp::at_identity(&frame, &f(&[0.3, 0.0, 0.5, 1.0, 1.0]));
        let cf = ClosedForm::new(&alg, &frame, &ivp, DEFAULT_RANK_TOL).unwrap();
        let omega = 1.3;
        let phi = GroupElement::from_log(cf.state(omega).log_vector());
        let check = translation_check(&alg, &frame, &cf, &phi, omega);
        assert!(check.fixed_point_criterion);
        assert!(!check.criterion);
        assert!(!check.direct);
    }

    #[test]
    fn distinguished_period_of_central_and_straight_elements() {
        let alg = bundled::heisenberg3_riemannian();
        let frame = witt_decompose(&alg).unwrap();
        let z = GroupElement::from_log(vector_from_i64(&[0, 0, 3]));
        let d = distinguished_period(&alg, &frame, &z, 0.0).unwrap();
        assert_eq!(d.omega_star, 3.0);
        let phi = GroupElement::from_log(vector_from_i64(&[1, 0, 3]));
        let d = distinguished_period(&alg, &frame, &phi, 0.0).unwrap();
        assert!(d.z_prime.iter().all(|c| num::Zero::is_zero(c)));
        assert_eq!(d.omega_star, 1.0);

        // γ(t) = exp(t e*/|e*|) has ω = |e*| = ω*, with ωz0 − z' = 0.
        let (af, ff) = (alg.to_float(), frame.to_float());
        let df = distinguished_period(&af, &ff, &phi.to_float(), 1e-12).unwrap();
        let cmp = df.compare(&af, 1.0, &DVector::zeros(3), 1, 1e-9);
        assert_eq!(cmp.predicted, Ordering::Equal);
        assert!(cmp.consistent && cmp.e_star_bounded);

        let u = bundled::flat_u_group();
        let uf = witt_decompose(&u).unwrap();
        assert_eq!(distinguished_period(&u, &uf, &GroupElement::from_log(vector_from_i64(&[0, 0, 1, 0, 0])), 0.0).unwrap_err(), Error::DegenerateCenter);
    }

    // Timelike helices b x + a z in the Lorentzian Heisenberg group close up
    // centrally with z* = ω(a² − 1)/(2a) z, so ω* = ω|a² − 1|/(2|a|).
    fn lorentzian_turn(a: f64) -> (PeriodComparison, f64) {
        let alg = bundled::heisenberg3_lorentzian();
        let frame = witt_decompose(&alg).unwrap();
        let (af, ff) = (alg.to_float(), frame.to_float());
        let ivp = GeodesicIvp::at_identity(&ff, &f(&[(1.0 + a * a).sqrt(), 0.0, a]));
        let cf = ClosedForm::new(&af, &ff, &ivp, DEFAULT_RANK_TOL).unwrap();
        let omega = 2.0 * std::f64::consts::PI / cf.jdata().max_rotation_rate().unwrap();
        let phi = GroupElement::from_log(cf.state(omega).log_vector());
        assert!(translation_check(&af, &ff, &cf, &phi, omega).direct);
        let d = distinguished_period(&af, &ff, &phi, 1e-12).unwrap();
        (d.compare(&af, omega, &ivp.z0, 1, 1e-9), omega)
    }

    #[test]
    fn definite_center_does_not_bound_opposite_geodesics() {
        let (c, omega) = lorentzian_turn(2.0);
        assert!((c.omega_star - 0.75 * omega).abs() < 1e-9);
        assert_eq!(c.observed, Ordering::Greater);
        assert!(c.consistent && !c.prediction_applies);
        assert!(c.identity_residual < 1e-14);
    }

    #[test]
    fn ordering_flips_when_star_vector_changes_character() {
        let (c, omega) = lorentzian_turn(3.0);
        assert!((c.omega_star - 4.0 / 3.0 * omega).abs() < 1e-9);
        assert!(c.star_square < 0.0);
        assert_eq!(c.deviation, CausalCharacter::Spacelike);
        assert_eq!((c.predicted, c.observed), (Ordering::Greater, Ordering::Less));
        assert!(!c.prediction_applies);
        assert!(c.identity_residual < 1e-14);
    }

    #[test]
    fn translated_spectrum_records_translate() {
        for alg in [bundled::heisenberg3_riemannian(), bundled::quaternionic7(1, -1, 1)] {
            let (exact, lat) = build_lattice(&alg, &standard_generators(&alg)).unwrap();
            let frame = witt_decompose(&exact).unwrap();
            let spec = translated_spectrum(&exact, &frame, &lat, 1).unwrap();
            assert!(!spec.records.is_empty());
            let (af, ff) = (exact.to_float(), frame.to_float());
            for r in &spec.records {
                assert!(r.omega > 0.0 && r.distinguished);
                let star = translated_geodesic(&exact, &frame, &r.phi, 0.0).unwrap();
                let cf = ClosedForm::new(&af, &ff, &star.ivp(&ff), DEFAULT_RANK_TOL).unwrap();
                let res = direct_translation_residual(&af, &cf, &r.phi.to_float(), r.omega, &direct_times());
                assert!(res < DIRECT_TOL, "{:?} {res}", r.exponents);
            }
        }
    }

    #[test]
    fn partition_of_flat_spectrum() {
        let (alg, frame, lat) = flat_setup();
        let spec = flat_group_spectrum(&alg, &frame, &lat, 1).unwrap();
        let part = spectrum_partition(&alg, &lat, &spec.records);
        assert_eq!(part.fiber.len() + part.base.len(), spec.records.len());
        assert!(part.fiber.iter().all(|r| r.exponents[3] == 0 && r.exponents[4] == 0));
        assert!(part.base.iter().all(|r| r.exponents[3] != 0 || r.exponents[4] != 0));
        assert!(!part.fiber_spectrum().is_empty() && !part.base_spectrum().is_empty());
        assert!(part.classes.len() <= spec.records.len());
        let t = torus_data(&alg, &frame, &lat).unwrap();
        assert_eq!(t.dim_fiber, 3);
        assert!(part.fiber.iter().all(|r| r.phi.log.iter().skip(t.dim_fiber).all(|c| num::Zero::is_zero(c))));
    }

    #[test]
    fn heisenberg_partition() {
        let alg = bundled::heisenberg3_riemannian();
        let (exact, lat) = build_lattice(&alg, &standard_generators(&alg)).unwrap();
        let mk = |v: &[i64], omega: f64| PeriodRecord {
            omega,
            omega_squared: Rational::from_i64(1),
            phi: GroupElement::from_log(vector_from_i64(v)),
            exponents: v.to_vec(),
            causal: CausalCharacter::Timelike,
            distinguished: true,
            central: false,
        };
        let records = vec![mk(&[0, 0, 1], 1.0), mk(&[0, 0, 2], 2.0), mk(&[1, 0, 0], 1.0), mk(&[1, 0, 5], 1.0)];
        let part = spectrum_partition(&exact, &lat, &records);
        assert_eq!(part.fiber.len(), 2);
        assert_eq!(part.base.len(), 2);
        // exp(x) and exp(x + 5z) are conjugate: [y, x] = -z generates the center.
        assert_eq!(part.classes.len(), 3);
        assert_eq!(part.fiber_spectrum(), vec![1.0, 2.0]);
    }
}
