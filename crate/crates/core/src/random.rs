//! Seeded random generators for pulses, operators and scattering weights.
//!
//! Every stochastic routine in the crate draws from [`substream`], a ChaCha
//! stream keyed by a master seed and a stream index, so results do not depend
//! on the order in which independent work items are scheduled.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::bloch_solver::ScatteringQuad;
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::scalar::{lit, Scalar};
use crate::wssus_map::{DensityOperator, ScatteringFunction};

pub type Rng64 = ChaCha8Rng;

/// Independent generator for work item `stream` under master `seed`.
pub fn substream(seed: u64, stream: u64) -> Rng64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Child seed for item `index` of a seeded batch (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn standard_normal<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    let z: f64 = StandardNormal.sample(rng);
    lit(z)
}

/// Circularly-symmetric complex Gaussian with `E|z|^2 = 1`.
pub fn complex_gaussian<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let s = lit::<T>(std::f64::consts::FRAC_1_SQRT_2);
    Complex::new(
        standard_normal::<T, R>(rng) * s,
        standard_normal::<T, R>(rng) * s,
    )
}

/// Uniformly distributed point of the unit sphere in `C^dim`.
pub fn random_unit_vector<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector<T> {
    loop {
        let v = ComplexVector::from_fn(dim, |_| complex_gaussian(rng));
        if let Ok(unit) = v.normalized() {
            return unit;
        }
    }
}

/// Gaussian-unitary-ensemble style hermitian matrix.
pub fn random_hermitian<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = ComplexMatrix::from_fn(dim, |_, _| complex_gaussian(rng));
    g.hermitian_part()
}

/// Random density operator of random rank (normalized Wishart).
pub fn random_density<T: Scalar, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityOperator<T> {
    let rank = rng.random_range(1..=dim);
    let mut m = ComplexMatrix::zeros(dim);
    for _ in 0..rank {
        let v = ComplexVector::from_fn(dim, |_| complex_gaussian(rng));
        m.add_scaled(T::one(), &v.outer(&v));
    }
    let trace = m.trace().re;
    let m = m.scale_real(trace.recip()).hermitian_part();
    DensityOperator::new(m).expect("normalized Wishart matrix is a density operator")
}

/// Flat-Dirichlet weights on `n` points.
pub fn random_simplex<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| lit(x / total)).collect()
}

pub fn random_quad<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> ScatteringQuad<T> {
    let w = random_simplex::<T, R>(4, rng);
    ScatteringQuad::renormalized([w[0], w[1], w[2], w[3]]).expect("simplex sample is a valid quad")
}

pub fn random_scattering<T: Scalar, R: Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> ScatteringFunction<T> {
    ScatteringFunction::renormalized(dim, random_simplex(dim * dim, rng))
        .expect("simplex sample is a valid scattering function")
}

/// Uniform point on the real unit 2-sphere.
pub fn random_sphere_point<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> [T; 3] {
    loop {
        let v: [T; 3] = [
            standard_normal::<T, R>(rng),
            standard_normal::<T, R>(rng),
            standard_normal::<T, R>(rng),
        ];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > T::min_positive_value() {
            return [v[0] / norm, v[1] / norm, v[2] / norm];
        }
    }
}
