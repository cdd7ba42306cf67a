//! Seeded random generators for curvature operators and frames.

use nalgebra::{Rotation3, Unit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::curvature::CurvatureOperator;
use crate::linalg::{Mat3, Vec3};

/// Independent stream `index` of generator `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, std: f64) -> Mat3 {
    Mat3::from_fn(|_, _| {
        let z: f64 = StandardNormal.sample(rng);
        std * z
    })
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    Vec3::from_fn(|_, _| StandardNormal.sample(rng))
}

pub fn gaussian_symmetric<R: Rng + ?Sized>(rng: &mut R, std: f64) -> Mat3 {
    let g = gaussian_matrix(rng, std);
    (g + g.transpose()) * 0.5
}

pub fn gaussian_traceless<R: Rng + ?Sized>(rng: &mut R, std: f64) -> Mat3 {
    let s = gaussian_symmetric(rng, std);
    s - Mat3::identity() * (s.trace() / 3.0)
}

/// Uniformly distributed rotation.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Mat3 {
    let axis = loop {
        let v = gaussian_vector(rng);
        if v.norm() > 1e-6 {
            break Unit::new_normalize(v);
        }
    };
    let angle = Uniform::new(0.0, std::f64::consts::PI).unwrap().sample(rng);
    *Rotation3::from_axis_angle(&axis, angle).matrix()
}

/// Gaussian `W±` and `B` with entry deviation `std`, scalar curvature uniform
/// in `[-24, 24]`.
pub fn random_bianchi_operator<R: Rng + ?Sized>(rng: &mut R, std: f64) -> CurvatureOperator {
    let wp = gaussian_traceless(rng, std);
    let wm = gaussian_traceless(rng, std);
    let b = gaussian_matrix(rng, std);
    let s = Uniform::new(-24.0, 24.0).unwrap().sample(rng);
    let id = Mat3::identity() * (s / 12.0);
    CurvatureOperator::new(wp + id, b, wm + id, false).expect("finite Bianchi operator")
}

/// Sampler used by the pinching verification: the entry deviation is itself
/// drawn uniformly from `[0.05, 0.5]` so that draws span the pinched regime.
pub fn pinching_sample<R: Rng + ?Sized>(rng: &mut R) -> CurvatureOperator {
    let std = Uniform::new(0.05, 0.5).unwrap().sample(rng);
    random_bianchi_operator(rng, std)
}
