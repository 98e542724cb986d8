//! JSON formats for algebras, frames, initial data, lattices and period records.
//!
//! Scalars may be JSON numbers or strings holding `"p/q"`, an integer or a
//! decimal; both are read exactly. Exact values are always written as strings.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{CausalCharacter, GroupElement, MetricAlgebra};
use crate::decomposition::WittFrame;
use crate::error::{Error, Result};
use crate::geodesic::GeodesicIvp;
use crate::lattice::{build_lattice, LatticeSpec, TorusData, TorusSpectrum};
use crate::scalar::{parse_rational, Rational, Scalar};
use crate::spectrum::{Partition, PeriodRecord};

/// Largest dimension accepted from input files.
pub const MAX_DIM: usize = 64;

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn scalar(v: &Value) -> Result<Rational> {
    match v {
        // serde_json prints the shortest round-trip form, which parses exactly.
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(perr(format!("expected a number, found {other}"))),
    }
}

fn vector(v: &Value, n: usize) -> Result<DVector<Rational>> {
    let arr = v.as_array().ok_or_else(|| perr("expected an array"))?;
    if arr.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: arr.len() });
    }
    Ok(DVector::from_vec(arr.iter().map(scalar).collect::<Result<_>>()?))
}

fn vectors(v: &Value, n: usize) -> Result<Vec<DVector<Rational>>> {
    v.as_array().ok_or_else(|| perr("expected an array of vectors"))?.iter().map(|x| vector(x, n)).collect()
}

fn float_vector(v: &Value, n: usize) -> Result<DVector<f64>> {
    Ok(vector(v, n)?.map(|c| c.to_f64()))
}

fn square(v: &Value, n: usize) -> Result<DMatrix<Rational>> {
    let rows = v.as_array().ok_or_else(|| perr("expected a matrix"))?;
    if rows.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rows.len() });
    }
    let rows: Vec<DVector<Rational>> = rows.iter().map(|r| vector(r, n)).collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j].clone()))
}

fn index(v: &Value, n: usize) -> Result<usize> {
    let i = v.as_u64().ok_or_else(|| perr("bracket index must be a nonnegative integer"))?;
    usize::try_from(i).ok().filter(|&i| i < n).ok_or_else(|| perr(format!("bracket index {i} out of range")))
}

fn field<'a>(obj: &'a Value, name: &str) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| perr(format!("missing field {name:?}")))
}

fn dim(obj: &Value) -> Result<usize> {
    let n = field(obj, "dim")?.as_u64().ok_or_else(|| perr("dim must be a positive integer"))?;
    if n == 0 || n > MAX_DIM as u64 {
        return Err(perr(format!("dim must lie in 1..={MAX_DIM}")));
    }
    Ok(n as usize)
}

fn document(text: &str) -> Result<Value> {
    let v: Value = serde_json::from_str(text).map_err(|e| perr(e.to_string()))?;
    if !v.is_object() {
        return Err(perr("expected a JSON object"));
    }
    Ok(v)
}

pub fn scalar_string<S: Scalar>(x: &S) -> String {
    x.to_string()
}

fn strings<S: Scalar>(v: &DVector<S>) -> Vec<String> {
    v.iter().map(scalar_string).collect()
}

/// Reads an algebra. Structural problems (antisymmetry, Jacobi, degenerate
/// gram) are left to [`MetricAlgebra::validate`].
pub fn parse_algebra(text: &str) -> Result<MetricAlgebra<Rational>> {
    algebra_from_value(&document(text)?)
}

pub fn algebra_from_value(obj: &Value) -> Result<MetricAlgebra<Rational>> {
    let n = dim(obj)?;
    let mut brackets = Vec::new();
    for b in field(obj, "brackets")?.as_array().ok_or_else(|| perr("brackets must be an array"))? {
        let t = b.as_array().filter(|t| t.len() == 3).ok_or_else(|| perr("bracket entries are [i, j, [c...]]"))?;
        brackets.push((index(&t[0], n)?, index(&t[1], n)?, vector(&t[2], n)?));
    }
    let gram = square(field(obj, "gram")?, n)?;
    let alg = MetricAlgebra::new(n, brackets, gram)?;
    match obj.get("labels") {
        None | Some(Value::Null) => Ok(alg),
        Some(l) => {
            let labels = l
                .as_array()
                .ok_or_else(|| perr("labels must be an array of strings"))?
                .iter()
                .map(|s| s.as_str().map(str::to_string).ok_or_else(|| perr("labels must be strings")))
                .collect::<Result<Vec<_>>>()?;
            alg.with_labels(labels)
        }
    }
}

#[derive(Serialize)]
struct AlgebraOut {
    dim: usize,
    brackets: Vec<(usize, usize, Vec<String>)>,
    gram: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

pub fn algebra_to_value<S: Scalar>(alg: &MetricAlgebra<S>) -> Value {
    let n = alg.dim();
    let out = AlgebraOut {
        dim: n,
        brackets: alg.bracket_triples().iter().map(|(i, j, c)| (*i, *j, strings(c))).collect(),
        gram: (0..n).map(|i| (0..n).map(|j| scalar_string(&alg.gram()[(i, j)])).collect()).collect(),
        labels: alg.has_labels().then(|| alg.labels()),
    };
    serde_json::to_value(out).expect("algebra serializes")
}

pub fn algebra_to_json<S: Scalar>(alg: &MetricAlgebra<S>) -> String {
    serde_json::to_string_pretty(&algebra_to_value(alg)).expect("algebra serializes")
}

#[derive(Serialize)]
struct FrameOut {
    dim: usize,
    u: Vec<Vec<String>>,
    z: Vec<Vec<String>>,
    v: Vec<Vec<String>>,
    e: Vec<Vec<String>>,
    z_norms: Vec<String>,
    e_norms: Vec<String>,
    z_signs: Vec<i8>,
    e_signs: Vec<i8>,
}

pub fn frame_to_value<S: Scalar>(frame: &WittFrame<S>) -> Value {
    let vs = |b: &[DVector<S>]| b.iter().map(strings).collect::<Vec<_>>();
    let out = FrameOut {
        dim: frame.dim(),
        u: vs(&frame.u),
        z: vs(&frame.z),
        v: vs(&frame.v),
        e: vs(&frame.e),
        z_norms: frame.z_norms.iter().map(scalar_string).collect(),
        e_norms: frame.e_norms.iter().map(scalar_string).collect(),
        z_signs: frame.z_signs.clone(),
        e_signs: frame.e_signs.clone(),
    };
    serde_json::to_value(out).expect("frame serializes")
}

pub fn frame_to_json<S: Scalar>(frame: &WittFrame<S>) -> String {
    serde_json::to_string_pretty(&frame_to_value(frame)).expect("frame serializes")
}

/// Reads a saved frame and checks it against `alg` (orthogonality, duality of
/// `U` and `V`, and the stored norms).
pub fn parse_frame(text: &str, alg: &MetricAlgebra<Rational>) -> Result<WittFrame<Rational>> {
    let obj = document(text)?;
    let n = dim(&obj)?;
    if n != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), found: n });
    }
    let block = |name: &str| vectors(field(&obj, name)?, n);
    let norms = |name: &str| -> Result<Vec<Rational>> {
        field(&obj, name)?.as_array().ok_or_else(|| perr(format!("{name} must be an array")))?.iter().map(scalar).collect()
    };
    let (u, z, v, e) = (block("u")?, block("z")?, block("v")?, block("e")?);
    if u.len() + z.len() + v.len() + e.len() != n {
        return Err(Error::NotABasis);
    }
    let frame = WittFrame::from_parts(u, z, v, e, norms("z_norms")?, norms("e_norms")?)?;
    frame.check(alg, 0.0).map_err(|m| perr(format!("frame does not fit the algebra: {m}")))?;
    Ok(frame)
}

/// Initial data plus optional sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct IvpFile {
    pub ivp: GeodesicIvp,
    pub times: Option<Vec<f64>>,
}

/// Reads initial data. Either `"velocity"` (ambient coordinates) or any of
/// `"u0"`, `"z0"`, `"v0"`, `"e0"` (coordinates in the frame's blocks) may be
/// given; `"base"` is the log of the base point and defaults to the identity.
pub fn parse_ivp(text: &str, frame: &WittFrame<f64>) -> Result<IvpFile> {
    use crate::decomposition::Block;
    let obj = document(text)?;
    let n = frame.dim();
    let base = match obj.get("base") {
        None | Some(Value::Null) => GroupElement::identity(n),
        Some(b) => GroupElement::from_log(float_vector(b, n)?),
    };
    let blocks = ["u0", "z0", "v0", "e0"];
    let has_blocks = blocks.iter().any(|b| obj.get(b).is_some());
    let velocity = match (obj.get("velocity"), has_blocks) {
        (Some(_), true) => return Err(perr("give either velocity or block coordinates, not both")),
        (Some(v), false) => float_vector(v, n)?,
        (None, false) => return Err(perr("missing velocity")),
        (None, true) => {
            let mut w = DVector::zeros(n);
            for (name, b) in blocks.iter().zip([Block::U, Block::Z, Block::V, Block::E]) {
                if let Some(c) = obj.get(*name) {
                    w += frame.from_block(b, &float_vector(c, frame.range(b).len())?);
                }
            }
            w
        }
    };
    if velocity.iter().chain(base.log.iter()).any(|c| !c.is_finite()) {
        return Err(perr("initial data must be finite"));
    }
    let times = match obj.get("times") {
        None | Some(Value::Null) => None,
        Some(t) => {
            let arr = t.as_array().ok_or_else(|| perr("times must be an array"))?;
            let ts: Vec<f64> = arr.iter().map(|x| scalar(x).map(|r| r.to_f64())).collect::<Result<_>>()?;
            if ts.iter().any(|t| !t.is_finite()) {
                return Err(perr("times must be finite"));
            }
            Some(ts)
        }
    };
    Ok(IvpFile { ivp: GeodesicIvp::from_velocity(frame, base, &velocity), times })
}

pub fn ivp_to_value(ivp: &GeodesicIvp, times: Option<&[f64]>) -> Value {
    let mut out = serde_json::json!({
        "base": ivp.base.log.as_slice(),
        "velocity": ivp.velocity().as_slice(),
    });
    if let Some(t) = times {
        out["times"] = serde_json::json!(t);
    }
    out
}

/// Reads `{"generators": [[...], ...]}` and builds the lattice over `alg`.
pub fn parse_lattice(text: &str, alg: &MetricAlgebra<Rational>) -> Result<(MetricAlgebra<Rational>, LatticeSpec)> {
    let obj = document(text)?;
    let logs = vectors(field(&obj, "generators")?, alg.dim())?;
    build_lattice(alg, &logs)
}

pub fn lattice_to_value(lattice: &LatticeSpec) -> Value {
    serde_json::json!({
        "generators": lattice.generator_logs().iter().map(strings).collect::<Vec<_>>(),
        "central_rank": lattice.central_rank(),
    })
}

pub fn lattice_to_json(lattice: &LatticeSpec) -> String {
    serde_json::to_string_pretty(&lattice_to_value(lattice)).expect("lattice serializes")
}

#[derive(Serialize, Deserialize)]
struct RecordDto {
    omega: f64,
    omega_squared: String,
    phi: Vec<String>,
    exponents: Vec<i64>,
    causal: CausalCharacter,
    distinguished: bool,
    central: bool,
}

pub fn record_to_value(r: &PeriodRecord) -> Value {
    let dto = RecordDto {
        omega: r.omega,
        omega_squared: scalar_string(&r.omega_squared),
        phi: strings(&r.phi.log),
        exponents: r.exponents.clone(),
        causal: r.causal,
        distinguished: r.distinguished,
        central: r.central,
    };
    serde_json::to_value(dto).expect("record serializes")
}

pub fn records_to_json(records: &[PeriodRecord]) -> String {
    serde_json::to_string_pretty(&records.iter().map(record_to_value).collect::<Vec<_>>()).expect("records serialize")
}

/// Reads a list of period records. `omega` must be the square root of
/// `omega_squared` to within float rounding.
pub fn parse_records(text: &str) -> Result<Vec<PeriodRecord>> {
    let dtos: Vec<RecordDto> = serde_json::from_str(text).map_err(|e| perr(e.to_string()))?;
    dtos.into_iter()
        .map(|d| {
            let omega_squared = parse_rational(&d.omega_squared)?;
            let phi: Vec<Rational> = d.phi.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?;
            if phi.len() > MAX_DIM || phi.len() != d.exponents.len() {
                return Err(perr("phi and exponents must have the algebra's dimension"));
            }
            let expected = omega_squared.to_f64().sqrt();
            if !(d.omega.is_finite() && (d.omega - expected).abs() <= 1e-9 * (1.0 + expected)) {
                return Err(perr(format!("omega {} is not the root of omega_squared {}", d.omega, d.omega_squared)));
            }
            Ok(PeriodRecord {
                omega: d.omega,
                omega_squared,
                phi: GroupElement::from_log(DVector::from_vec(phi)),
                exponents: d.exponents,
                causal: d.causal,
                distinguished: d.distinguished,
                central: d.central,
            })
        })
        .collect()
}

fn matrix_strings<S: Scalar>(m: &DMatrix<S>) -> Vec<Vec<String>> {
    m.row_iter().map(|r| r.iter().map(scalar_string).collect()).collect()
}

pub fn torus_to_value(t: &TorusData) -> Value {
    serde_json::json!({
        "dim_fiber": t.dim_fiber,
        "dim_base": t.dim_base,
        "central_basis": t.central_basis.iter().map(strings).collect::<Vec<_>>(),
        "projected_basis": t.projected_basis.iter().map(strings).collect::<Vec<_>>(),
        "fiber_gram": matrix_strings(&t.fiber_gram),
        "base_gram": matrix_strings(&t.base_gram),
        "fiber_degenerate": t.fiber_degenerate,
        "base_degenerate": t.base_degenerate,
        "base_flat": t.base_flat,
        "submersion": t.submersion,
    })
}

pub fn torus_spectrum_to_value(s: &TorusSpectrum) -> Value {
    let periods: Vec<Value> = s
        .periods
        .iter()
        .map(|p| {
            serde_json::json!({
                "coefficients": p.coefficients,
                "square": scalar_string(&p.square),
                "omega": p.omega,
                "causal": p.causal,
            })
        })
        .collect();
    serde_json::json!({ "bound": s.bound, "null_vectors": s.null_vectors, "periods": periods })
}

pub fn partition_to_value(p: &Partition) -> Value {
    let classes: Vec<Value> = p
        .classes
        .iter()
        .map(|c| {
            serde_json::json!({
                "key": c.key.iter().map(scalar_string).collect::<Vec<_>>(),
                "central": c.central,
                "periods": c.periods,
                "distinguished": c.distinguished,
            })
        })
        .collect();
    serde_json::json!({
        "fiber_spectrum": p.fiber_spectrum(),
        "base_spectrum": p.base_spectrum(),
        "distinguished_fiber_spectrum": p.distinguished_fiber_spectrum(),
        "classes": classes,
        "caveat": p.caveat,
    })
}
