//! Random test data: unit-speed initial conditions and lattice-free group elements.

use nalgebra::DVector;
use rand::Rng;

use crate::algebra::{GroupElement, MetricAlgebra};
use crate::decomposition::{Block, WittFrame};
use crate::geodesic::GeodesicIvp;

/// Velocities with `|<w, w>|` below this are redrawn, so unit-speed scaling stays tame.
pub const MIN_SQUARE: f64 = 0.05;

/// Where a sampled velocity lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityKind {
    Generic,
    /// Only `Z` and `E` components (`u0 = v0 = 0`).
    CenterAndE,
    Central,
    /// Only an `E` component.
    Horizontal,
}

impl VelocityKind {
    pub const ALL: [VelocityKind; 4] = [VelocityKind::Generic, VelocityKind::CenterAndE, VelocityKind::Central, VelocityKind::Horizontal];
}

pub fn uniform_vector<R: Rng>(rng: &mut R, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-scale..=scale))
}

/// A unit-speed velocity of the given kind, or `None` when that kind is
/// unavailable (empty blocks) or the draw is too close to null.
pub fn unit_velocity<R: Rng>(rng: &mut R, alg: &MetricAlgebra<f64>, frame: &WittFrame<f64>, kind: VelocityKind) -> Option<DVector<f64>> {
    let w = uniform_vector(rng, alg.dim(), 1.0);
    let w = match kind {
        VelocityKind::Generic => w,
        VelocityKind::CenterAndE => frame.project(&w, Block::Z) + frame.project(&w, Block::E),
        VelocityKind::Central => frame.project(&w, Block::Z),
        VelocityKind::Horizontal => frame.project(&w, Block::E),
    };
    let sq = alg.ip(&w, &w);
    (sq.abs() >= MIN_SQUARE).then(|| w / sq.abs().sqrt())
}

/// Unit-speed initial data with a random base point in `[-1, 1]^n` log coordinates.
/// Redraws until a non-null generic velocity is found.
pub fn unit_ivp<R: Rng>(rng: &mut R, alg: &MetricAlgebra<f64>, frame: &WittFrame<f64>) -> GeodesicIvp {
    let base = GroupElement::from_log(uniform_vector(rng, alg.dim(), 1.0));
    loop {
        if let Some(w) = unit_velocity(rng, alg, frame, VelocityKind::Generic) {
            return GeodesicIvp::from_velocity(frame, base, &w);
        }
    }
}

/// Initial data with base and velocity uniform in `[-1, 1]^n` (ambient
/// coordinates). Speed is not normalized, which keeps boost-type growth
/// rates bounded.
pub fn box_ivp<R: Rng>(rng: &mut R, frame: &WittFrame<f64>) -> GeodesicIvp {
    let n = frame.dim();
    let base = GroupElement::from_log(uniform_vector(rng, n, 1.0));
    GeodesicIvp::from_velocity(frame, base, &uniform_vector(rng, n, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::decomposition::witt_decompose;
    use rand::SeedableRng;

    #[test]
    fn unit_speed_and_kinds() {
        let alg = bundled::quaternionic7(1, -1, 1);
        let (af, ff) = (alg.to_float(), witt_decompose(&alg).unwrap().to_float());
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..50 {
            let ivp = unit_ivp(&mut rng, &af, &ff);
            let w = ivp.velocity();
            assert!((af.ip(&w, &w).abs() - 1.0).abs() < 1e-12);
            assert!(box_ivp(&mut rng, &ff).velocity().amax() <= 1.0);
            if let Some(h) = unit_velocity(&mut rng, &af, &ff, VelocityKind::Horizontal) {
                assert!(ff.vanishes_on(&h, Block::Z, 1e-12) && ff.vanishes_on(&h, Block::V, 1e-12));
            }
        }
        let flat = bundled::flat_u_group();
        let (af, ff) = (flat.to_float(), witt_decompose(&flat).unwrap().to_float());
        assert!(unit_velocity(&mut rng, &af, &ff, VelocityKind::Horizontal).is_none());
    }
}
