//! Example algebras shipped with the library.

use nalgebra::{DMatrix, DVector};

use crate::algebra::MetricAlgebra;
use crate::scalar::{Rational, Scalar};

/// Names accepted by [`by_name`].
pub const NAMES: &[&str] = &[
    "heisenberg3",
    "heisenberg3-lorentzian",
    "heisenberg3-boost",
    "heisenberg3x3",
    "quaternionic7",
    "flat-u-group",
    "abelian-n",
];

type Term = (usize, usize, &'static [(usize, i64)]);

fn build(labels: &[&str], terms: &[Term], gram: DMatrix<Rational>) -> MetricAlgebra<Rational> {
    let dim = labels.len();
    let brackets = terms
        .iter()
        .map(|&(i, j, coeffs)| {
            let mut c = DVector::<Rational>::zeros(dim);
            for &(k, a) in coeffs {
                c[k] = Rational::from_i64(a);
            }
            if i < j {
                (i, j, c)
            } else {
                (j, i, -c)
            }
        })
        .collect();
    MetricAlgebra::new(dim, brackets, gram)
        .and_then(|a| a.with_labels(labels.iter().map(|s| s.to_string()).collect()))
        .expect("bundled algebra is well formed")
}

fn diagonal(entries: &[i64]) -> DMatrix<Rational> {
    DMatrix::from_diagonal(&DVector::from_iterator(entries.len(), entries.iter().map(|&e| Rational::from_i64(e))))
}

/// Heisenberg algebra `[x, y] = z` with the standard positive definite inner product.
pub fn heisenberg3_riemannian() -> MetricAlgebra<Rational> {
    build(&["x", "y", "z"], &[(0, 1, &[(2, 1)])], diagonal(&[1, 1, 1]))
}

/// Heisenberg algebra with a spacelike center: `<z, z> = -1`.
pub fn heisenberg3_lorentzian() -> MetricAlgebra<Rational> {
    build(&["x", "y", "z"], &[(0, 1, &[(2, 1)])], diagonal(&[1, 1, -1]))
}

/// Heisenberg algebra with a timelike center and a Lorentzian complement.
pub fn heisenberg3_boost() -> MetricAlgebra<Rational> {
    build(&["x", "y", "z"], &[(0, 1, &[(2, 1)])], diagonal(&[1, -1, 1]))
}

/// Product of two Heisenberg algebras; the 2-dimensional center is Lorentzian.
pub fn heisenberg3x3() -> MetricAlgebra<Rational> {
    build(
        &["x1", "y1", "x2", "y2", "z1", "z2"],
        &[(0, 1, &[(4, 1)]), (2, 3, &[(5, 1)])],
        diagonal(&[1, 1, 1, 1, 1, -1]),
    )
}

/// Seven-dimensional quaternionic Heisenberg algebra on the basis
/// `u1 u2 z v1 v2 e1 e2` with `<u_i, v_j> = δ_ij`, `<z, z> = center_sign`
/// and `<e_a, e_a> = e1_sign, e2_sign`.
pub fn quaternionic7(center_sign: i64, e1_sign: i64, e2_sign: i64) -> MetricAlgebra<Rational> {
    assert!([center_sign, e1_sign, e2_sign].iter().all(|s| s.abs() == 1), "signs must be ±1");
    let mut gram = diagonal(&[0, 0, center_sign, 0, 0, e1_sign, e2_sign]);
    for (u, v) in [(0, 3), (1, 4)] {
        gram[(u, v)] = Rational::from_i64(1);
        gram[(v, u)] = Rational::from_i64(1);
    }
    build(
        &["u1", "u2", "z", "v1", "v2", "e1", "e2"],
        &[
            (5, 6, &[(2, 1)]),
            (3, 4, &[(2, 1)]),
            (5, 3, &[(0, 1)]),
            (6, 3, &[(1, 1)]),
            (5, 4, &[(1, 1)]),
            (6, 4, &[(0, -1)]),
        ],
        gram,
    )
}

/// Brackets land in the null part of the center and there is no `E` summand.
/// Basis `u1 u2 z v1 v2` with `[v1, v2] = u1`.
pub fn flat_u_group() -> MetricAlgebra<Rational> {
    let mut gram = diagonal(&[0, 0, 1, 0, 0]);
    for (u, v) in [(0, 3), (1, 4)] {
        gram[(u, v)] = Rational::from_i64(1);
        gram[(v, u)] = Rational::from_i64(1);
    }
    build(&["u1", "u2", "z", "v1", "v2"], &[(3, 4, &[(0, 1)])], gram)
}

/// `R^n` with zero bracket and the Euclidean inner product.
pub fn abelian(n: usize) -> MetricAlgebra<Rational> {
    let labels: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    build(&refs, &[], DMatrix::identity(n, n))
}

/// Strictly upper triangular 4×4 matrices: 3-step, used to exercise validation.
pub fn strictly_upper_triangular4() -> MetricAlgebra<Rational> {
    build(
        &["E12", "E13", "E14", "E23", "E24", "E34"],
        &[(0, 3, &[(1, 1)]), (0, 4, &[(2, 1)]), (1, 5, &[(2, 1)]), (3, 5, &[(4, 1)])],
        DMatrix::identity(6, 6),
    )
}

/// Looks up a bundled algebra. `quaternionic7` takes three signs, `abelian-n` a dimension.
pub fn by_name(name: &str, signs: [i64; 3], abelian_dim: usize) -> Option<MetricAlgebra<Rational>> {
    Some(match name {
        "heisenberg3" => heisenberg3_riemannian(),
        "heisenberg3-lorentzian" => heisenberg3_lorentzian(),
        "heisenberg3-boost" => heisenberg3_boost(),
        "heisenberg3x3" => heisenberg3x3(),
        "quaternionic7" => quaternionic7(signs[0], signs[1], signs[2]),
        "flat-u-group" => flat_u_group(),
        "abelian-n" | "abelian" => abelian(abelian_dim.max(1)),
        _ => return None,
    })
}

/// Looks up a catalogue-style name: `quaternionic7(1,-1,1)` (signs default to
/// `+1`), `abelian-4`, `strictly-upper4`, or any name of [`by_name`].
pub fn lookup(name: &str) -> Option<MetricAlgebra<Rational>> {
    let name = name.trim();
    if let Some(rest) = name.strip_prefix("quaternionic7") {
        let signs = match rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            Some(inner) => {
                let s: Vec<i64> = inner.split(',').map(|t| t.trim().parse().ok()).collect::<Option<_>>()?;
                (s.len() == 3 && s.iter().all(|x| x.abs() == 1)).then(|| [s[0], s[1], s[2]])?
            }
            None if rest.is_empty() => [1, 1, 1],
            None => return None,
        };
        return Some(quaternionic7(signs[0], signs[1], signs[2]));
    }
    if let Some(n) = name.strip_prefix("abelian-").and_then(|n| n.parse::<usize>().ok()) {
        return (1..=crate::io::MAX_DIM).contains(&n).then(|| abelian(n));
    }
    if name == "strictly-upper4" {
        return Some(strictly_upper_triangular4());
    }
    by_name(name, [1, 1, 1], 3)
}

/// Every bundled valid algebra with all sign variants, labelled.
pub fn catalogue() -> Vec<(String, MetricAlgebra<Rational>)> {
    let mut out = vec![
        ("heisenberg3".to_string(), heisenberg3_riemannian()),
        ("heisenberg3-lorentzian".to_string(), heisenberg3_lorentzian()),
        ("heisenberg3-boost".to_string(), heisenberg3_boost()),
        ("heisenberg3x3".to_string(), heisenberg3x3()),
    ];
    for s in signs_cube() {
        out.push((format!("quaternionic7({},{},{})", s[0], s[1], s[2]), quaternionic7(s[0], s[1], s[2])));
    }
    out.push(("flat-u-group".to_string(), flat_u_group()));
    out.push(("abelian-3".to_string(), abelian(3)));
    out
}

/// The eight sign triples in `{±1}^3`.
pub fn signs_cube() -> Vec<[i64; 3]> {
    let mut out = Vec::with_capacity(8);
    for a in [1, -1] {
        for b in [1, -1] {
            for c in [1, -1] {
                out.push([a, b, c]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_accepts_catalogue_names() {
        for (name, alg) in catalogue() {
            assert_eq!(lookup(&name), Some(alg), "{name}");
        }
        assert_eq!(lookup("quaternionic7"), Some(quaternionic7(1, 1, 1)));
        assert_eq!(lookup("abelian-5").map(|a| a.dim()), Some(5));
        for bad in ["quaternionic7(1,2,1)", "quaternionic7(1,1)", "abelian-0", "nope", "quaternionic7x"] {
            assert!(lookup(bad).is_none(), "{bad}");
        }
    }

    #[test]
    fn all_bundled_validate() {
        for (name, alg) in catalogue() {
            let r = alg.validate();
            assert!(r.is_valid(), "{name}: {:?}", r.failures);
        }
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(by_name("quaternionic7", [1, -1, 1], 0).unwrap(), quaternionic7(1, -1, 1));
        assert_eq!(by_name("abelian-n", [1, 1, 1], 4).unwrap().dim(), 4);
        assert!(by_name("nope", [1, 1, 1], 1).is_none());
    }
}
