//! Lattices `Γ ⊂ N` given by canonical generating sets, and the flat tori
//! they induce on the center and on its complement.
//!
//! A generating set `exp(g_1), …, exp(g_n)` is canonical when the logs form a
//! basis of `n`, the first `m = dim z` of them span the center, and every
//! bracket `[g_i, g_j]` is an integer combination of those central generators.
//! Then `log Γ ∩ z` is the integer span of `g_1, …, g_m` and `π(log Γ)` is the
//! integer span of the projections of the rest.

use nalgebra::{DMatrix, DVector};
use num::{Signed, Zero};

use crate::algebra::{CausalCharacter, GroupElement, MetricAlgebra};
use crate::curvature::tb_numerator;
use crate::decomposition::{witt_decompose, Block, WittFrame};
use crate::error::{Error, Result};
use crate::linalg::{self, bilinear, columns_to_matrix};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    generators: Vec<GroupElement<Rational>>,
    central_rank: usize,
    /// `[g_i, g_j] = Σ_k c_ijk g_k` over the central generators, `i < j`.
    structure: Vec<(usize, usize, Vec<Rational>)>,
    projected: Vec<DVector<Rational>>,
}

impl LatticeSpec {
    pub fn generators(&self) -> &[GroupElement<Rational>] {
        &self.generators
    }

    pub fn generator_logs(&self) -> Vec<DVector<Rational>> {
        self.generators.iter().map(|g| g.log.clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn central_rank(&self) -> usize {
        self.central_rank
    }

    /// Basis of `log Γ ∩ z`.
    pub fn central_basis(&self) -> Vec<DVector<Rational>> {
        self.generators[..self.central_rank].iter().map(|g| g.log.clone()).collect()
    }

    /// Basis of `π(log Γ)` in the frame used to build the lattice.
    pub fn projected_basis(&self) -> &[DVector<Rational>] {
        &self.projected
    }

    /// Nonzero structure constants in the generator basis.
    pub fn structure_constants(&self) -> &[(usize, usize, Vec<Rational>)] {
        &self.structure
    }

    /// `Π exp(g_i)^{n_i}` in generator order.
    pub fn word(&self, alg: &MetricAlgebra<Rational>, exponents: &[i64]) -> GroupElement<Rational> {
        let mut phi = GroupElement::identity(alg.dim());
        for (g, &k) in self.generators.iter().zip(exponents) {
            if k != 0 {
                phi = alg.mul(&phi, &alg.power(g, k));
            }
        }
        phi
    }

    /// Whether `log φ` commutes with every generator, i.e. `φ ∈ Z(Γ)`.
    pub fn is_central(&self, alg: &MetricAlgebra<Rational>, phi: &GroupElement<Rational>) -> bool {
        self.generators.iter().all(|g| alg.br(&phi.log, &g.log).iter().all(|c| c.is_zero()))
    }
}

/// Checks that the logs form a canonical generating set and derives the
/// central and projected lattices. Float input must be recognizably rational.
pub fn build_lattice<S: Scalar>(alg: &MetricAlgebra<S>, generator_logs: &[DVector<S>]) -> Result<(MetricAlgebra<Rational>, LatticeSpec)> {
    let exact = to_exact_algebra(alg)?;
    let n = exact.dim();
    if generator_logs.len() != n {
        return Err(Error::NotABasis);
    }
    let logs: Vec<DVector<Rational>> = generator_logs
        .iter()
        .map(|g| {
            if g.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: g.len() });
            }
            g.iter()
                .map(|c| c.to_rational().ok_or(Error::NotRational(c.to_f64())))
                .collect::<Result<Vec<_>>>()
                .map(DVector::from_vec)
        })
        .collect::<Result<_>>()?;
    let p = columns_to_matrix(n, &logs);
    let p_inv = linalg::inverse(&p).ok_or(Error::NotABasis)?;

    let m = exact.center().len();
    for (i, g) in logs.iter().enumerate() {
        let central = exact.is_central(g);
        if central != (i < m) {
            return Err(Error::NotCanonical(format!(
                "expected the first {m} generators to be central and the rest not; generator {i} is {}",
                if central { "central" } else { "not central" }
            )));
        }
    }

    let mut structure = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let b = exact.br(&logs[i], &logs[j]);
            if b.iter().all(|c| c.is_zero()) {
                continue;
            }
            let c = &p_inv * b;
            if c.iter().skip(m).any(|x| !x.is_zero()) {
                return Err(Error::InvalidAlgebra(format!("[g{i}, g{j}] is not central")));
            }
            if let Some(x) = c.iter().take(m).find(|x| !x.is_integer()) {
                return Err(Error::NotCanonical(format!(
                    "[g{i}, g{j}] has coefficient {x} on the central generators, so they do not generate Γ ∩ Z"
                )));
            }
            structure.push((i, j, c.iter().take(m).cloned().collect()));
        }
    }

    let frame = witt_decompose(&exact)?;
    let projected = logs[m..].iter().map(|g| project_v(&frame, g)).collect();
    let generators = logs.into_iter().map(GroupElement::from_log).collect();
    Ok((exact, LatticeSpec { generators, central_rank: m, structure, projected }))
}

fn to_exact_algebra<S: Scalar>(alg: &MetricAlgebra<S>) -> Result<MetricAlgebra<Rational>> {
    let bad = std::cell::Cell::new(None);
    let exact = alg.map_scalar(|c| {
        c.to_rational().unwrap_or_else(|| {
            bad.set(bad.get().or(Some(c.to_f64())));
            Rational::zero()
        })
    });
    match bad.get() {
        Some(x) => Err(Error::NotRational(x)),
        None => Ok(exact),
    }
}

/// `π : n → V ⊕ E`, the projection along `U ⊕ Z`.
pub fn project_v<S: Scalar>(frame: &WittFrame<S>, x: &DVector<S>) -> DVector<S> {
    frame.project(x, Block::V) + frame.project(x, Block::E)
}

/// Fiber torus `T_F` over `z` and base torus `T_B` over `V ⊕ E`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusData {
    pub dim_fiber: usize,
    pub dim_base: usize,
    pub central_basis: Vec<DVector<Rational>>,
    pub projected_basis: Vec<DVector<Rational>>,
    /// Inner products of the lattice bases.
    pub fiber_gram: DMatrix<Rational>,
    pub base_gram: DMatrix<Rational>,
    /// The fiber metric degenerates exactly when `U ≠ 0`.
    pub fiber_degenerate: bool,
    pub base_degenerate: bool,
    /// Every base curvature numerator vanishes.
    pub base_flat: bool,
    /// `p_B` is an ordinary pseudoriemannian submersion (`U = V = 0`).
    pub submersion: bool,
}

/// Torus dimensions, lattice Gram matrices and a flatness scan of `T_B`.
///
/// The base numerator `<R(x,y)y,x> + ¾|[x,y]|²` is biquadratic, so it vanishes
/// identically once it vanishes on all pairs drawn from `b_i` and `b_i + b_j`.
pub fn torus_data(alg: &MetricAlgebra<Rational>, frame: &WittFrame<Rational>, lattice: &LatticeSpec) -> Result<TorusData> {
    let central_basis = lattice.central_basis();
    let projected_basis: Vec<DVector<Rational>> =
        lattice.generators[lattice.central_rank..].iter().map(|g| project_v(frame, &g.log)).collect();
    let gram_of = |vs: &[DVector<Rational>]| DMatrix::from_fn(vs.len(), vs.len(), |i, j| alg.ip(&vs[i], &vs[j]));
    let fiber_gram = gram_of(&central_basis);
    let base_gram = gram_of(&projected_basis);

    let basis: Vec<DVector<Rational>> = frame.v.iter().chain(&frame.e).cloned().collect();
    let mut probes = basis.clone();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            probes.push(&basis[i] + &basis[j]);
        }
    }
    let mut base_flat = true;
    'scan: for x in &probes {
        for y in &probes {
            if !tb_numerator(alg, frame, x, y, 0.0)?.is_zero() {
                base_flat = false;
                break 'scan;
            }
        }
    }

    Ok(TorusData {
        dim_fiber: central_basis.len(),
        dim_base: projected_basis.len(),
        fiber_degenerate: linalg::rank(&fiber_gram) < central_basis.len(),
        base_degenerate: linalg::rank(&base_gram) < projected_basis.len(),
        central_basis,
        projected_basis,
        fiber_gram,
        base_gram,
        base_flat,
        submersion: frame.dim_u() == 0 && frame.v.is_empty(),
    })
}

/// One nonzero vector of a flat torus lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPeriod {
    pub coefficients: Vec<i64>,
    /// `<g, g>`, exactly.
    pub square: Rational,
    pub omega: f64,
    pub causal: CausalCharacter,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TorusSpectrum {
    pub periods: Vec<TorusPeriod>,
    /// Nonzero lattice vectors that are null and so carry no period.
    pub null_vectors: usize,
    pub bound: u32,
}

impl TorusSpectrum {
    /// Exact squared periods `|<g,g>|`, sorted.
    pub fn squares(&self) -> Vec<Rational> {
        let mut s: Vec<Rational> = self.periods.iter().map(|p| p.square.abs()).collect();
        s.sort();
        s
    }

    pub fn omegas(&self) -> Vec<f64> {
        let mut w: Vec<f64> = self.periods.iter().map(|p| p.omega).collect();
        w.sort_by(f64::total_cmp);
        w
    }
}

/// Periods `|g| = |<g,g>|^{1/2}` of the nonzero vectors `g = Σ c_i b_i` with
/// `|c_i| ≤ bound`, where `gram` is the inner product on the coordinates of the `b_i`.
pub fn flat_torus_spectrum(vectors: &[DVector<Rational>], gram: &DMatrix<Rational>, bound: u32) -> Result<TorusSpectrum> {
    let d = gram.nrows();
    if gram.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: gram.ncols() });
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: v.len() });
    }
    let mut out = TorusSpectrum { bound, ..Default::default() };
    for c in ExponentVectors::new(vectors.len(), bound) {
        if c.iter().all(|&x| x == 0) {
            continue;
        }
        let g = vectors.iter().zip(&c).fold(DVector::zeros(d), |acc, (b, &k)| acc + b * Rational::from_i64(k));
        let square = bilinear(gram, &g, &g);
        let causal = CausalCharacter::from_square(&square, false, 0.0);
        if causal == CausalCharacter::Null {
            out.null_vectors += 1;
            continue;
        }
        out.periods.push(TorusPeriod { coefficients: c, omega: square.abs().to_f64().sqrt(), square, causal });
    }
    Ok(out)
}

/// All integer vectors in `[-bound, bound]^n`, in lexicographic order.
#[derive(Debug, Clone)]
pub struct ExponentVectors {
    current: Option<Vec<i64>>,
    bound: i64,
}

impl ExponentVectors {
    pub fn new(n: usize, bound: u32) -> Self {
        let b = bound as i64;
        ExponentVectors { current: Some(vec![-b; n]), bound: b }
    }
}

impl Iterator for ExponentVectors {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        for i in (0..next.len()).rev() {
            if next[i] < self.bound {
                next[i] += 1;
                self.current = Some(next);
                return Some(out);
            }
            next[i] = -self.bound;
        }
        Some(out)
    }
}

/// Row Hermite normal form of the integer span of rational vectors: echelon
/// rows with positive pivots and entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_basis(vectors: &[DVector<Rational>]) -> Vec<DVector<Rational>> {
    let Some(d) = vectors.first().map(|v| v.len()) else {
        return Vec::new();
    };
    let mut rows: Vec<DVector<Rational>> = vectors.iter().filter(|v| v.iter().any(|c| !c.is_zero())).cloned().collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut top = 0;
    for col in 0..d {
        loop {
            let nonzero: Vec<usize> = (top..rows.len()).filter(|&r| !rows[r][col].is_zero()).collect();
            let Some(&best) = nonzero.iter().min_by(|&&a, &&b| rows[a][col].abs().cmp(&rows[b][col].abs())) else {
                break;
            };
            rows.swap(top, best);
            if nonzero.len() == 1 {
                break;
            }
            let pivot = rows[top][col].clone();
            for r in top + 1..rows.len() {
                if !rows[r][col].is_zero() {
                    let q = (&rows[r][col] / &pivot).floor();
                    let sub = &rows[top] * q;
                    rows[r] -= sub;
                }
            }
        }
        if top < rows.len() && !rows[top][col].is_zero() {
            if rows[top][col].is_negative() {
                rows[top] = -rows[top].clone();
            }
            pivots.push((top, col));
            top += 1;
        }
    }
    rows.truncate(top);
    for &(r, c) in &pivots {
        for above in 0..r {
            let q = (&rows[above][c] / &rows[r][c]).floor();
            if !q.is_zero() {
                let sub = &rows[r] * q;
                rows[above] -= sub;
            }
        }
    }
    rows
}

/// Canonical representative of `v` modulo the lattice with the given Hermite basis.
pub fn reduce_modulo(hermite: &[DVector<Rational>], v: &DVector<Rational>) -> DVector<Rational> {
    let mut out = v.clone();
    for row in hermite {
        let Some(c) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        let q = (&out[c] / &row[c]).floor();
        if !q.is_zero() {
            out -= row * q;
        }
    }
    out
}

pub fn in_integer_span(vectors: &[DVector<Rational>], v: &DVector<Rational>) -> bool {
    reduce_modulo(&hermite_basis(vectors), v).iter().all(|c| c.is_zero())
}

/// Key identifying the `Γ`-conjugacy class of `φ`: conjugates of `φ` by `Γ`
/// are `log φ + [log n, log φ]`, so the class is `log φ` modulo the integer
/// span of the `[g_i, log φ]`.
pub fn conjugacy_key(alg: &MetricAlgebra<Rational>, lattice: &LatticeSpec, phi: &GroupElement<Rational>) -> Vec<Rational> {
    let shifts: Vec<DVector<Rational>> = lattice.generators.iter().map(|g| alg.br(&g.log, &phi.log)).collect();
    reduce_modulo(&hermite_basis(&shifts), &phi.log).iter().cloned().collect()
}

/// Generator logs of the standard lattice of a bundled algebra whose basis is
/// already canonical up to order: central basis vectors first.
pub fn standard_generators(alg: &MetricAlgebra<Rational>) -> Vec<DVector<Rational>> {
    let n = alg.dim();
    let (central, rest): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| alg.is_central(&alg.basis_vector(i)));
    central.into_iter().chain(rest).map(|i| alg.basis_vector(i)).collect()
}
