//! Metric 2-step nilpotent Lie algebras: brackets, inner products, the metric
//! adjoint of `ad`, and the group law in exponential coordinates.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{rationalize, Rational, Scalar, RATIONAL_MAX_DEN, RATIONAL_TOL};

/// Default tolerance for deciding that a float inner product is zero.
pub const DEFAULT_NULL_TOL: f64 = 1e-9;

/// Sign convention: timelike vectors have positive square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalCharacter {
    Timelike,
    Null,
    Spacelike,
    Zero,
}

impl CausalCharacter {
    pub fn from_square<S: Scalar>(square: &S, is_zero_vector: bool, tol: f64) -> Self {
        if is_zero_vector {
            return CausalCharacter::Zero;
        }
        match square.sign(tol) {
            1 => CausalCharacter::Timelike,
            -1 => CausalCharacter::Spacelike,
            _ => CausalCharacter::Null,
        }
    }

    /// +1 for timelike, -1 for spacelike, 0 otherwise.
    pub fn signum(self) -> i8 {
        match self {
            CausalCharacter::Timelike => 1,
            CausalCharacter::Spacelike => -1,
            _ => 0,
        }
    }
}

/// An element of the simply connected group, stored by its logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement<S: Scalar> {
    pub log: DVector<S>,
}

impl<S: Scalar> GroupElement<S> {
    pub fn from_log(log: DVector<S>) -> Self {
        GroupElement { log }
    }

    pub fn identity(dim: usize) -> Self {
        GroupElement { log: DVector::zeros(dim) }
    }

    pub fn inverse(&self) -> Self {
        GroupElement { log: -self.log.clone() }
    }

    pub fn is_identity(&self) -> bool {
        self.log.iter().all(|c| c.is_zero())
    }

    pub fn to_float(&self) -> GroupElement<f64> {
        GroupElement { log: self.log.map(|c| c.to_f64()) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub antisymmetric: bool,
    pub jacobi: bool,
    pub two_step: bool,
    pub nonabelian: bool,
    pub gram_symmetric: bool,
    pub gram_nondegenerate: bool,
    pub rational: bool,
    pub failures: Vec<String>,
}

impl ValidationReport {
    /// All structural checks hold. Abelian algebras are valid; `nonabelian` is informational.
    pub fn is_valid(&self) -> bool {
        self.antisymmetric
            && self.jacobi
            && self.two_step
            && self.gram_symmetric
            && self.gram_nondegenerate
            && self.rational
    }
}

/// A Lie algebra on a fixed basis `b_0..b_{n-1}` together with an inner product.
///
/// Structure constants are kept sparse: `terms` lists every nonzero `[b_i, b_j]`
/// with both orderings filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricAlgebra<S: Scalar> {
    dim: usize,
    brackets: Vec<(usize, usize, DVector<S>)>,
    terms: Vec<(usize, usize, DVector<S>)>,
    gram: DMatrix<S>,
    gram_inv: Option<DMatrix<S>>,
    labels: Vec<String>,
}

impl<S: Scalar> MetricAlgebra<S> {
    /// Builds the algebra from bracket triples `(i, j, [b_i, b_j])`.
    ///
    /// Triples with `i < j` imply `[b_j, b_i] = -[b_i, b_j]` unless the reverse
    /// pair is given explicitly; whatever is given is stored as is so that
    /// [`validate`](Self::validate) can report inconsistent input.
    pub fn new(dim: usize, brackets: Vec<(usize, usize, DVector<S>)>, gram: DMatrix<S>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be positive".into()));
        }
        if gram.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: gram.nrows().max(gram.ncols()) });
        }
        let mut table: Vec<Vec<Option<DVector<S>>>> = vec![vec![None; dim]; dim];
        let mut explicit = vec![vec![false; dim]; dim];
        for (i, j, c) in &brackets {
            if *i >= dim || *j >= dim {
                return Err(Error::InvalidAlgebra(format!("bracket index ({i}, {j}) out of range")));
            }
            if c.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: c.len() });
            }
            if explicit[*i][*j] {
                return Err(Error::InvalidAlgebra(format!("bracket ({i}, {j}) given twice")));
            }
            explicit[*i][*j] = true;
            table[*i][*j] = Some(c.clone());
            if !explicit[*j][*i] && i != j {
                table[*j][*i] = Some(-c.clone());
            }
        }
        let mut terms = Vec::new();
        for (i, row) in table.into_iter().enumerate() {
            for (j, entry) in row.into_iter().enumerate() {
                if let Some(c) = entry {
                    if c.iter().any(|x| !x.is_zero()) {
                        terms.push((i, j, c));
                    }
                }
            }
        }
        let gram_inv = linalg::inverse(&gram);
        Ok(MetricAlgebra { dim, brackets, terms, gram, gram_inv, labels: Vec::new() })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &DMatrix<S> {
        &self.gram
    }

    pub fn gram_inverse(&self) -> Option<&DMatrix<S>> {
        self.gram_inv.as_ref()
    }

    /// Basis labels, `b0, b1, ...` when none were supplied.
    pub fn labels(&self) -> Vec<String> {
        if self.labels.is_empty() {
            (0..self.dim).map(|i| format!("b{i}")).collect()
        } else {
            self.labels.clone()
        }
    }

    pub fn has_labels(&self) -> bool {
        !self.labels.is_empty()
    }

    /// Bracket triples exactly as supplied.
    pub fn bracket_triples(&self) -> &[(usize, usize, DVector<S>)] {
        &self.brackets
    }

    pub fn basis_vector(&self, i: usize) -> DVector<S> {
        let mut v = DVector::zeros(self.dim);
        v[i] = S::one();
        v
    }

    pub fn basis(&self) -> Vec<DVector<S>> {
        (0..self.dim).map(|i| self.basis_vector(i)).collect()
    }

    /// `[b_i, b_j]` from the stored table.
    pub fn structure_constant(&self, i: usize, j: usize) -> DVector<S> {
        self.terms
            .iter()
            .find(|(a, b, _)| *a == i && *b == j)
            .map(|(_, _, c)| c.clone())
            .unwrap_or_else(|| DVector::zeros(self.dim))
    }

    pub fn is_abelian(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_dim(&self, x: &DVector<S>) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        Ok(())
    }

    pub fn bracket(&self, x: &DVector<S>, y: &DVector<S>) -> Result<DVector<S>> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self.br(x, y))
    }

    pub(crate) fn br(&self, x: &DVector<S>, y: &DVector<S>) -> DVector<S> {
        let mut out = DVector::zeros(self.dim);
        for (i, j, c) in &self.terms {
            if x[*i].is_zero() || y[*j].is_zero() {
                continue;
            }
            let coeff = x[*i].clone() * y[*j].clone();
            out += c * coeff;
        }
        out
    }

    /// Upper bound on the sup-norm of `[x, y]` from absolute values of all terms;
    /// the scale of rounding error in a float bracket.
    pub fn bracket_bound(&self, x: &DVector<S>, y: &DVector<S>) -> f64 {
        self.terms
            .iter()
            .map(|(i, j, c)| x[*i].magnitude() * y[*j].magnitude() * c.iter().map(|v| v.magnitude()).fold(0.0, f64::max))
            .sum()
    }

    pub fn inner(&self, x: &DVector<S>, y: &DVector<S>) -> Result<S> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self.ip(x, y))
    }

    pub(crate) fn ip(&self, x: &DVector<S>, y: &DVector<S>) -> S {
        linalg::bilinear(&self.gram, x, y)
    }

    /// Matrix of `y -> [x, y]`.
    pub fn ad_matrix(&self, x: &DVector<S>) -> DMatrix<S> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for k in 0..self.dim {
            m.set_column(k, &self.br(x, &self.basis_vector(k)));
        }
        m
    }

    /// `ad†_x y`, the metric adjoint of `ad_x` applied to `y`:
    /// `<ad†_x y, w> = <y, [x, w]>` for all `w`.
    pub fn ad_star(&self, x: &DVector<S>, y: &DVector<S>) -> Result<DVector<S>> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        if self.gram_inv.is_none() {
            return Err(Error::SingularGram);
        }
        Ok(self.adj(x, y))
    }

    pub(crate) fn adj(&self, x: &DVector<S>, y: &DVector<S>) -> DVector<S> {
        // c_w = <y, [x, b_w]> = (G y) . [x, b_w]
        let gy = &self.gram * y;
        let mut c = DVector::zeros(self.dim);
        for (i, j, v) in &self.terms {
            if x[*i].is_zero() {
                continue;
            }
            c[*j] += x[*i].clone() * v.dot(&gy);
        }
        let inv = self.gram_inv.as_ref().expect("nondegenerate inner product");
        inv * c
    }

    /// Basis of the center, the common kernel of all `ad_{b_j}`.
    pub fn center(&self) -> Vec<DVector<S>> {
        let n = self.dim;
        let mut stacked = DMatrix::zeros(n * n, n);
        for (i, j, c) in &self.terms {
            // column of x_j in [b_i, x]
            for k in 0..n {
                stacked[(i * n + k, *j)] = c[k].clone();
            }
        }
        linalg::kernel(&stacked)
    }

    pub fn is_central(&self, x: &DVector<S>) -> bool {
        (0..self.dim).all(|k| self.br(x, &self.basis_vector(k)).iter().all(|c| c.is_zero()))
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim;
        let mut failures = Vec::new();
        let zero = |v: &DVector<S>| v.iter().all(|c| c.is_zero());
        let label = self.labels();

        let mut antisymmetric = true;
        for i in 0..n {
            for j in i..n {
                let sum = self.structure_constant(i, j) + self.structure_constant(j, i);
                if !zero(&sum) {
                    antisymmetric = false;
                    failures.push(format!("[{}, {}] + [{}, {}] != 0", label[i], label[j], label[j], label[i]));
                }
            }
        }

        let mut two_step = true;
        let mut jacobi = true;
        for i in 0..n {
            for j in 0..n {
                let bij = self.structure_constant(i, j);
                for k in 0..n {
                    let triple = self.br(&bij, &self.basis_vector(k));
                    if two_step && !zero(&triple) {
                        two_step = false;
                        failures.push(format!("[[{}, {}], {}] != 0", label[i], label[j], label[k]));
                    }
                    if i < j && j < k && jacobi {
                        let cyc = triple
                            + self.br(&self.structure_constant(j, k), &self.basis_vector(i))
                            + self.br(&self.structure_constant(k, i), &self.basis_vector(j));
                        if !zero(&cyc) {
                            jacobi = false;
                            failures.push(format!("Jacobi fails on ({}, {}, {})", label[i], label[j], label[k]));
                        }
                    }
                }
            }
        }

        let gram_symmetric = self.gram == self.gram.transpose();
        if !gram_symmetric {
            failures.push("inner product matrix is not symmetric".into());
        }
        let gram_nondegenerate = if S::EXACT {
            self.gram_inv.is_some()
        } else {
            let g = self.gram.map(|c| c.to_f64());
            let sv = g.singular_values();
            sv.min() > 1e-12 * sv.max()
        };
        if !gram_nondegenerate {
            failures.push("inner product is degenerate".into());
        }

        let rational = S::EXACT
            || self
                .terms
                .iter()
                .flat_map(|(_, _, c)| c.iter())
                .chain(self.gram.iter())
                .all(|x| x.to_rational().is_some());
        if !rational {
            failures.push("structure constants or inner products are not rational on this basis".into());
        }

        ValidationReport {
            antisymmetric,
            jacobi,
            two_step,
            nonabelian: !self.is_abelian(),
            gram_symmetric,
            gram_nondegenerate,
            rational,
            failures,
        }
    }

    pub fn causal_character(&self, x: &DVector<S>, null_tol: f64) -> CausalCharacter {
        let sq = self.ip(x, x);
        CausalCharacter::from_square(&sq, x.iter().all(|c| c.is_zero()), null_tol)
    }

    /// Group product in exponential coordinates: `log(gh) = log g + log h + ½[log g, log h]`.
    pub fn bch_mul(&self, g: &GroupElement<S>, h: &GroupElement<S>) -> Result<GroupElement<S>> {
        self.check_dim(&g.log)?;
        self.check_dim(&h.log)?;
        Ok(self.mul(g, h))
    }

    pub(crate) fn mul(&self, g: &GroupElement<S>, h: &GroupElement<S>) -> GroupElement<S> {
        let corr = self.br(&g.log, &h.log) * S::half();
        GroupElement { log: &g.log + &h.log + corr }
    }

    /// `log(exp(x)^k)` is just `k x`; this multiplies group elements `k` times for `|k|` factors.
    pub fn power(&self, g: &GroupElement<S>, k: i64) -> GroupElement<S> {
        GroupElement { log: &g.log * S::from_i64(k) }
    }

    /// `n g n⁻¹`, which in a 2-step group has log `log g + [log n, log g]`.
    pub fn conjugate(&self, n: &GroupElement<S>, g: &GroupElement<S>) -> GroupElement<S> {
        GroupElement { log: &g.log + self.br(&n.log, &g.log) }
    }

    /// Left-trivialized velocity of `t -> exp(x + t a)` at `t = 0`: `a + ½[a, x]`.
    pub fn dexp(&self, x: &DVector<S>, a: &DVector<S>) -> DVector<S> {
        a + self.br(a, x) * S::half()
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MetricAlgebra<T> {
        let conv = |v: &DVector<S>| v.map(|c| f(&c));
        MetricAlgebra {
            dim: self.dim,
            brackets: self.brackets.iter().map(|(i, j, c)| (*i, *j, conv(c))).collect(),
            terms: self.terms.iter().map(|(i, j, c)| (*i, *j, conv(c))).collect(),
            gram: self.gram.map(|c| f(&c)),
            gram_inv: self.gram_inv.as_ref().map(|m| m.map(|c| f(&c))),
            labels: self.labels.clone(),
        }
    }

    pub fn to_float(&self) -> MetricAlgebra<f64> {
        self.map_scalar(|c| c.to_f64())
    }
}

impl MetricAlgebra<f64> {
    /// Recovers an exact algebra when every constant is a small-denominator rational.
    pub fn rationalize(&self) -> Result<MetricAlgebra<Rational>> {
        let conv = |x: f64| rationalize(x, RATIONAL_MAX_DEN, RATIONAL_TOL).ok_or(Error::NotRational(x));
        let brackets = self
            .brackets
            .iter()
            .map(|(i, j, c)| {
                let v: Result<Vec<_>> = c.iter().map(|&x| conv(x)).collect();
                Ok((*i, *j, DVector::from_vec(v?)))
            })
            .collect::<Result<Vec<_>>>()?;
        let g: Result<Vec<_>> = self.gram.iter().map(|&x| conv(x)).collect();
        let gram = DMatrix::from_vec(self.dim, self.dim, g?);
        let alg = MetricAlgebra::new(self.dim, brackets, gram)?;
        if self.labels.is_empty() {
            Ok(alg)
        } else {
            alg.with_labels(self.labels.clone())
        }
    }
}

/// Re-expresses an algebra on a new basis whose vectors are the columns of `p`
/// (in old coordinates).
pub fn change_basis<S: Scalar>(alg: &MetricAlgebra<S>, p: &DMatrix<S>) -> Result<MetricAlgebra<S>> {
    let n = alg.dim();
    if p.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, found: p.nrows() });
    }
    let p_inv = if S::EXACT {
        linalg::inverse(p).ok_or(Error::NotABasis)?
    } else {
        p.map(|c| c.to_f64()).try_inverse().ok_or(Error::NotABasis)?.map(S::from_f64_lossy)
    };
    let cols: Vec<DVector<S>> = (0..n).map(|i| p.column(i).into_owned()).collect();
    let mut brackets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = &p_inv * alg.br(&cols[i], &cols[j]);
            if c.iter().any(|x| !x.is_zero()) {
                brackets.push((i, j, c));
            }
        }
    }
    let gram = p.transpose() * alg.gram() * p;
    MetricAlgebra::new(n, brackets, gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::scalar::{rat, vector_from_i64};
    use num::Zero;

    #[test]
    fn heisenberg_bracket_and_antisymmetry() {
        let h = bundled::heisenberg3_riemannian();
        let e1 = h.basis_vector(0);
        let e2 = h.basis_vector(1);
        assert_eq!(h.bracket(&e1, &e2).unwrap(), vector_from_i64(&[0, 0, 1]));
        assert_eq!(h.bracket(&e2, &e1).unwrap(), vector_from_i64(&[0, 0, -1]));
        let x = vector_from_i64(&[3, -2, 5]);
        assert!(h.bracket(&x, &x).unwrap().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let h = bundled::heisenberg3_riemannian();
        let short = vector_from_i64::<Rational>(&[1, 0]);
        assert!(matches!(h.bracket(&short, &h.basis_vector(0)), Err(Error::DimensionMismatch { .. })));
        assert!(h.inner(&short, &short).is_err());
    }

    #[test]
    fn quaternionic_brackets_and_pairings() {
        let q = bundled::quaternionic7(1, 1, 1);
        let b = q.basis();
        // basis order u1 u2 z v1 v2 e1 e2
        assert_eq!(q.bracket(&b[5], &b[4]).unwrap(), b[1]);
        assert_eq!(q.inner(&b[0], &b[3]).unwrap(), rat(1, 1));
        assert_eq!(q.inner(&b[0], &DVector::zeros(7)).unwrap(), rat(0, 1));
        let q = bundled::quaternionic7(-1, 1, 1);
        assert_eq!(q.inner(&b[2], &b[2]).unwrap(), rat(-1, 1));
    }

    #[test]
    fn validation_reports() {
        assert!(bundled::quaternionic7(1, -1, 1).validate().is_valid());
        let ab = bundled::abelian(4);
        let r = ab.validate();
        assert!(r.is_valid() && r.two_step && !r.nonabelian);
        let r = bundled::strictly_upper_triangular4().validate();
        assert!(!r.two_step);
        assert!(!r.is_valid());
    }

    #[test]
    fn inconsistent_explicit_reverse_bracket_fails_antisymmetry() {
        let c = vector_from_i64::<Rational>(&[0, 0, 1]);
        let alg = MetricAlgebra::new(3, vec![(0, 1, c.clone()), (1, 0, c)], DMatrix::identity(3, 3)).unwrap();
        assert!(!alg.validate().antisymmetric);
    }

    #[test]
    fn centers_of_examples() {
        assert_eq!(bundled::heisenberg3_riemannian().center(), vec![vector_from_i64(&[0, 0, 1])]);
        assert_eq!(bundled::abelian(3).center().len(), 3);
        let q = bundled::quaternionic7(1, 1, 1);
        let z = q.center();
        assert_eq!(z, vec![q.basis_vector(0), q.basis_vector(1), q.basis_vector(2)]);
    }

    #[test]
    fn ad_star_heisenberg() {
        let h = bundled::heisenberg3_riemannian();
        let b = h.basis();
        assert_eq!(h.ad_star(&b[0], &b[2]).unwrap(), b[1]);
        assert!(h.ad_star(&b[2], &b[0]).unwrap().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn bch_examples() {
        let h = bundled::heisenberg3_riemannian();
        let b = h.basis();
        let g = GroupElement::from_log(b[0].clone());
        let k = GroupElement::from_log(b[1].clone());
        let prod = h.bch_mul(&g, &k).unwrap();
        assert_eq!(prod.log, vector_from_i64::<Rational>(&[1, 1, 0]) + &b[2] * rat(1, 2));
        let comm = h.mul(&h.mul(&h.mul(&g, &k), &g.inverse()), &k.inverse());
        assert_eq!(comm.log, b[2]);
        assert!(h.mul(&g, &g.inverse()).is_identity());
        assert_eq!(h.mul(&g, &GroupElement::identity(3)), g);
    }

    #[test]
    fn causal_characters() {
        let q = bundled::quaternionic7(1, 1, 1);
        let b = q.basis();
        assert_eq!(q.causal_character(&b[2], 0.0), CausalCharacter::Timelike);
        assert_eq!(q.causal_character(&b[0], 0.0), CausalCharacter::Null);
        assert_eq!(q.causal_character(&DVector::zeros(7), 0.0), CausalCharacter::Zero);
        let qf = q.to_float();
        let almost_null = qf.basis_vector(0) + qf.basis_vector(3) * 1e-12;
        assert_eq!(qf.causal_character(&almost_null, DEFAULT_NULL_TOL), CausalCharacter::Null);
    }

    #[test]
    fn rationalize_roundtrip() {
        let q = bundled::quaternionic7(1, -1, 1);
        assert_eq!(q.to_float().rationalize().unwrap(), q);
        let mut c = DVector::zeros(3);
        c[2] = 2f64.sqrt();
        let irr = MetricAlgebra::new(3, vec![(0, 1, c)], DMatrix::identity(3, 3)).unwrap();
        assert!(irr.rationalize().is_err());
        assert!(!irr.validate().rational);
    }
}
