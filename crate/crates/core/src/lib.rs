//! Geometry of pseudoriemannian 2-step nilpotent Lie groups.
//!
//! Algebras are given by structure constants and an inner product on a fixed
//! basis. Exact rational arithmetic is used for decompositions and curvature;
//! geodesics and period spectra are computed in `f64`.

pub mod algebra;
pub mod bundled;
pub mod curvature;
pub mod decomposition;
pub mod error;
pub mod geodesic;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod ode;
pub mod quadrature;
pub mod sampling;
pub mod scalar;
pub mod spectrum;

pub use algebra::{CausalCharacter, GroupElement, MetricAlgebra, ValidationReport};
pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
