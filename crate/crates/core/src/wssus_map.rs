//! Second-order WSSUS channel statistics and the averaged channel map.
//!
//! A channel realization is `H = sum_mu Sigma(mu) S_mu` with uncorrelated
//! zero-mean taps, `E[Sigma(mu) conj(Sigma(nu))] = C(mu) [mu == nu]`. Averaging
//! `|<g, H gamma>|^2` over realizations gives `Tr(A(Gamma) G)` where
//!
//! ```text
//! A(X) = sum_mu C(mu) S_mu X S_mu^*
//! ```
//!
//! is a unital, trace-preserving completely positive map with Kraus
//! operators `sqrt(C(mu)) S_mu`.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heisenberg::{all_shifts, root_of_unity, shift_operator, ShiftIndex};
use crate::linalg::{hermitian_eigensystem, ComplexMatrix, ComplexVector, Pulse};
use crate::multiplex::Scheme;
use crate::random::{complex_gaussian, random_density, random_hermitian, substream};
use crate::scalar::{lit, tol, Scalar};

/// Scattering function `C(mu)` on the `L x L` shift grid, normalized to unit mass.
///
/// Weights are stored row-major: entry `time * L + freq`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringFunction<T> {
    dim: usize,
    weights: Vec<T>,
}

impl<T: Scalar> ScatteringFunction<T> {
    pub fn new(dim: usize, weights: Vec<T>) -> Result<Self> {
        Self::check_shape(dim, &weights)?;
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > tol(1e-9) {
            return Err(Error::InvalidScattering(format!(
                "weights must sum to 1 (sum = {total})"
            )));
        }
        Ok(Self { dim, weights })
    }

    /// Divides nonnegative weights by their total.
    pub fn renormalized(dim: usize, weights: Vec<T>) -> Result<Self> {
        Self::check_shape(dim, &weights)?;
        let total: T = weights.iter().copied().sum();
        if total.is_nan() || total <= T::zero() {
            return Err(Error::InvalidScattering(
                "total weight must be positive".into(),
            ));
        }
        Ok(Self {
            dim,
            weights: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    fn check_shape(dim: usize, weights: &[T]) -> Result<()> {
        if dim == 0 {
            return Err(Error::InvalidScattering(
                "dimension must be positive".into(),
            ));
        }
        if weights.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < T::zero()) {
            return Err(Error::InvalidScattering(format!(
                "weights must be finite and nonnegative (found {w})"
            )));
        }
        Ok(())
    }

    /// All mass on a single shift.
    pub fn point_mass(dim: usize, mu: ShiftIndex) -> Self {
        let mut weights = vec![T::zero(); dim * dim];
        weights[mu.flat(dim)] = T::one();
        Self { dim, weights }
    }

    pub fn uniform(dim: usize) -> Self {
        let w = lit::<T>((dim * dim) as f64).recip();
        Self {
            dim,
            weights: vec![w; dim * dim],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weight(&self, mu: ShiftIndex) -> T {
        self.weights[mu.flat(self.dim)]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Shifts carrying nonzero weight, row-major.
    pub fn support(&self) -> impl Iterator<Item = (ShiftIndex, T)> + '_ {
        all_shifts(self.dim)
            .zip(self.weights.iter().copied())
            .filter(|(_, w)| !w.is_zero())
    }
}

/// Trace-one positive semidefinite hermitian operator (the set `M_1`).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Scalar> DensityOperator<T> {
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        let defect = matrix.hermitian_defect();
        if defect > tol(1e-12) {
            return Err(Error::InvalidDensityOperator(format!(
                "not hermitian (deviation {defect})"
            )));
        }
        let trace = matrix.trace().re;
        if (trace - T::one()).abs() > tol(1e-10) {
            return Err(Error::InvalidDensityOperator(format!("trace {trace} != 1")));
        }
        let min_eig = hermitian_eigensystem(&matrix)
            .map_err(|e| Error::InvalidDensityOperator(e.to_string()))?
            .min_value();
        if min_eig < -tol::<T>(1e-10) {
            return Err(Error::InvalidDensityOperator(format!(
                "negative eigenvalue {min_eig}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Rank-one projector onto a unit pulse.
    pub fn from_pulse(pulse: &Pulse<T>) -> Self {
        Self {
            matrix: pulse.projector(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Membership in the set `Z` of rank-one projectors: `Tr(z^2) = 1`.
    pub fn is_rank_one(&self) -> bool {
        (self.matrix.trace_product(&self.matrix).re - T::one()).abs() <= tol(1e-10)
    }
}

/// AWGN power `sigma^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseLevel<T>(T);

impl<T: Scalar> NoiseLevel<T> {
    pub fn new(sigma2: T) -> Result<Self> {
        if !sigma2.is_finite() || sigma2 < T::zero() {
            return Err(Error::OutOfRange {
                value: sigma2.to_f64().unwrap_or(f64::NAN),
                range: "[0, inf)",
            });
        }
        Ok(Self(sigma2))
    }

    pub fn noiseless() -> Self {
        Self(T::zero())
    }

    pub fn sigma2(self) -> T {
        self.0
    }
}

/// One draw of the spreading coefficients `Sigma(mu)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization<T> {
    dim: usize,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> ChannelRealization<T> {
    pub fn new(dim: usize, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: coeffs.len(),
            });
        }
        Ok(Self { dim, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, mu: ShiftIndex) -> Complex<T> {
        self.coeffs[mu.flat(self.dim)]
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `S_mu X S_mu^*` without forming `S_mu`.
pub fn shift_conjugate<T: Scalar>(x: &ComplexMatrix<T>, mu: ShiftIndex) -> ComplexMatrix<T> {
    let n = x.dim();
    let mu = mu.reduced(n);
    ComplexMatrix::from_fn(n, |i, j| {
        let src = x[((i + n - mu.time) % n, (j + n - mu.time) % n)];
        src * root_of_unity::<T>(mu.freq * i, n) * root_of_unity::<T>(mu.freq * j, n).conj()
    })
}

/// `S_mu^* X S_mu` without forming `S_mu`.
pub fn shift_adjoint_conjugate<T: Scalar>(
    x: &ComplexMatrix<T>,
    mu: ShiftIndex,
) -> ComplexMatrix<T> {
    let n = x.dim();
    let mu = mu.reduced(n);
    ComplexMatrix::from_fn(n, |i, j| {
        let (k, l) = ((i + mu.time) % n, (j + mu.time) % n);
        x[(k, l)] * root_of_unity::<T>(mu.freq * k, n).conj() * root_of_unity::<T>(mu.freq * l, n)
    })
}

/// `A(X) = sum_mu C(mu) S_mu X S_mu^*`.
pub fn apply_a<T: Scalar>(
    c: &ScatteringFunction<T>,
    x: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    check_dim(c.dim(), x.dim())?;
    let mut out = ComplexMatrix::zeros(x.dim());
    for (mu, w) in c.support() {
        out.add_scaled(w, &shift_conjugate(x, mu));
    }
    Ok(out)
}

/// Adjoint map `A^*(Y) = sum_mu C(mu) S_mu^* Y S_mu`, so `Tr(A(X) Y) = Tr(X A^*(Y))`.
pub fn apply_adjoint_a<T: Scalar>(
    c: &ScatteringFunction<T>,
    y: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    check_dim(c.dim(), y.dim())?;
    let mut out = ComplexMatrix::zeros(y.dim());
    for (mu, w) in c.support() {
        out.add_scaled(w, &shift_adjoint_conjugate(y, mu));
    }
    Ok(out)
}

/// Averaged interference operator `sum_{mu in scheme, mu != 0} S_mu A(X) S_mu^*`.
pub fn apply_interference<T: Scalar>(
    c: &ScatteringFunction<T>,
    x: &ComplexMatrix<T>,
    scheme: &Scheme,
) -> Result<ComplexMatrix<T>> {
    check_dim(c.dim(), x.dim())?;
    check_dim(c.dim(), scheme.dim())?;
    if !scheme.contains_origin() {
        return Err(Error::SchemeMissingOrigin);
    }
    let ax = apply_a(c, x)?;
    let mut out = ComplexMatrix::zeros(x.dim());
    for mu in scheme.nonzero_shifts() {
        out.add_scaled(T::one(), &shift_conjugate(&ax, mu));
    }
    Ok(out)
}

/// SINR denominator operator `D(Gamma) = C_scheme(Gamma) + sigma^2 I`, so that
/// `Tr(D(Gamma) G) = E[b] + sigma^2`.
pub fn denominator_operator<T: Scalar>(
    c: &ScatteringFunction<T>,
    gamma: &ComplexMatrix<T>,
    scheme: &Scheme,
    noise: NoiseLevel<T>,
) -> Result<ComplexMatrix<T>> {
    let mut d = apply_interference(c, gamma, scheme)?;
    d.add_scaled(noise.sigma2(), &ComplexMatrix::identity(gamma.dim()));
    Ok(d)
}

/// Averaged gain `E[a] = Tr(A(Gamma) G)`.
pub fn channel_fidelity<T: Scalar>(
    c: &ScatteringFunction<T>,
    gamma: &DensityOperator<T>,
    g: &DensityOperator<T>,
) -> Result<T> {
    check_dim(gamma.dim(), g.dim())?;
    Ok(apply_a(c, gamma.matrix())?.trace_product(g.matrix()).re)
}

/// Averaged gain in inner-product form, `sum_mu C(mu) |<g, S_mu gamma>|^2`.
pub fn pulse_fidelity<T: Scalar>(
    c: &ScatteringFunction<T>,
    gamma: &Pulse<T>,
    g: &Pulse<T>,
) -> Result<T> {
    check_dim(c.dim(), gamma.dim())?;
    check_dim(c.dim(), g.dim())?;
    Ok(c.support()
        .map(|(mu, w)| {
            let shifted = shift_operator::<T>(c.dim(), mu).mul_vec(gamma);
            w * g.inner(&shifted).norm_sqr()
        })
        .sum())
}

/// `Tr(A(Gamma) G) / (sigma^2 + Tr(C_scheme(Gamma) G))`.
///
/// A zero denominator with positive gain (noiseless, interference-free)
/// returns `+inf`; zero over zero is an error.
pub fn sinr<T: Scalar>(
    c: &ScatteringFunction<T>,
    gamma: &DensityOperator<T>,
    g: &DensityOperator<T>,
    scheme: &Scheme,
    noise: NoiseLevel<T>,
) -> Result<T> {
    let gain = channel_fidelity(c, gamma, g)?;
    let interference = apply_interference(c, gamma.matrix(), scheme)?
        .trace_product(g.matrix())
        .re;
    ratio_with_sentinel(gain, noise.sigma2() + interference)
}

pub(crate) fn ratio_with_sentinel<T: Scalar>(gain: T, denominator: T) -> Result<T> {
    let floor = tol::<T>(1e-15);
    if denominator.abs() <= floor {
        if gain > floor {
            return Ok(T::infinity());
        }
        return Err(Error::DegenerateDenominator);
    }
    Ok(gain / denominator)
}

/// Worst-case violations of the map's structural properties.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport<T> {
    pub samples: usize,
    /// `||A(I) - I||_max`
    pub unital: T,
    /// `max |Tr A(X) - Tr X|`
    pub trace_preserving: T,
    /// `max ||A(X^*) - A(X)^*||_max`
    pub hermiticity_preserving: T,
    /// Smallest eigenvalue of `A(X)` over densities `X` (positivity).
    pub min_output_eigenvalue: T,
    /// `min_k (sum_{i<=k} lambda_i(X) - sum_{i<=k} lambda_i(A(X)))`, descending
    /// eigenvalues; nonnegative up to roundoff iff `A(X)` is majorized by `X`.
    pub majorization_margin: T,
}

fn descending_partial_sums<T: Scalar>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    let mut values = hermitian_eigensystem(m)?.values;
    values.reverse();
    Ok(values
        .iter()
        .scan(T::zero(), |acc, v| {
            *acc += *v;
            Some(*acc)
        })
        .collect())
}

/// Samples random operators and records how far `A` strays from being
/// unital, trace preserving, hermiticity preserving, positive and
/// spectrum-flattening.
pub fn verify_cp_properties<T: Scalar>(
    c: &ScatteringFunction<T>,
    samples: usize,
    seed: u64,
) -> Result<PropertyReport<T>> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be at least 1".into()));
    }
    let dim = c.dim();
    let identity = ComplexMatrix::identity(dim);
    let unital = apply_a(c, &identity)?.max_abs_diff(&identity);

    let mut report = PropertyReport {
        samples,
        unital,
        trace_preserving: T::zero(),
        hermiticity_preserving: T::zero(),
        min_output_eigenvalue: T::infinity(),
        majorization_margin: T::infinity(),
    };
    for k in 0..samples {
        let mut rng = substream(seed, k as u64);
        let density = random_density::<T, _>(dim, &mut rng);
        let x = density.matrix();
        let ax = apply_a(c, x)?;

        let h: ComplexMatrix<T> = random_hermitian(dim, &mut rng);
        let ah = apply_a(c, &h)?;
        let trace_gap = (ax.trace() - x.trace())
            .norm()
            .max((ah.trace() - h.trace()).norm());
        report.trace_preserving = report.trace_preserving.max(trace_gap);

        let general = ComplexMatrix::from_fn(dim, |_, _| complex_gaussian::<T, _>(&mut rng));
        let lhs = apply_a(c, &general.adjoint())?;
        let rhs = apply_a(c, &general)?.adjoint();
        report.hermiticity_preserving = report.hermiticity_preserving.max(lhs.max_abs_diff(&rhs));

        let ax = ax.hermitian_part();
        report.min_output_eigenvalue = report
            .min_output_eigenvalue
            .min(hermitian_eigensystem(&ax)?.min_value());
        let input = descending_partial_sums(x)?;
        let output = descending_partial_sums(&ax)?;
        for (a, b) in input.iter().zip(&output) {
            report.majorization_margin = report.majorization_margin.min(*a - *b);
        }
    }
    Ok(report)
}

/// Distribution of a single spreading coefficient with prescribed power.
pub trait TapSampler<T: Scalar> {
    /// Zero-mean draw with `E|z|^2 = power`.
    fn sample<R: Rng + ?Sized>(&self, power: T, rng: &mut R) -> Complex<T>;
}

/// Circularly-symmetric complex Gaussian taps (Rayleigh fading).
#[derive(Clone, Copy, Debug, Default)]
pub struct RayleighTaps;

impl<T: Scalar> TapSampler<T> for RayleighTaps {
    fn sample<R: Rng + ?Sized>(&self, power: T, rng: &mut R) -> Complex<T> {
        complex_gaussian::<T, R>(rng) * power.sqrt()
    }
}

/// Draws independent taps for every shift; zero-weight shifts get exactly
/// zero and consume no randomness.
pub fn sample_realization_with<T: Scalar, S: TapSampler<T>, R: Rng + ?Sized>(
    c: &ScatteringFunction<T>,
    sampler: &S,
    rng: &mut R,
) -> ChannelRealization<T> {
    let coeffs = c
        .weights()
        .iter()
        .map(|&w| {
            if w.is_zero() {
                Complex::zero()
            } else {
                sampler.sample(w, rng)
            }
        })
        .collect();
    ChannelRealization {
        dim: c.dim(),
        coeffs,
    }
}

/// Rayleigh-fading realization of `c`.
pub fn sample_realization<T: Scalar, R: Rng + ?Sized>(
    c: &ScatteringFunction<T>,
    rng: &mut R,
) -> ChannelRealization<T> {
    sample_realization_with(c, &RayleighTaps, rng)
}

/// `H = sum_mu Sigma(mu) S_mu`.
pub fn realize_channel_matrix<T: Scalar>(r: &ChannelRealization<T>) -> ComplexMatrix<T> {
    let dim = r.dim();
    let mut h = ComplexMatrix::zeros(dim);
    for (mu, coeff) in all_shifts(dim).zip(r.coeffs()) {
        if coeff.is_zero() {
            continue;
        }
        h = &h + &shift_operator::<T>(dim, mu).scale(*coeff);
    }
    h
}

/// Applies `H` to a vector without materializing `H`.
pub fn apply_realization<T: Scalar>(
    r: &ChannelRealization<T>,
    v: &ComplexVector<T>,
) -> ComplexVector<T> {
    let n = r.dim();
    let mut out = vec![Complex::zero(); n];
    for (mu, coeff) in all_shifts(n).zip(r.coeffs()) {
        if coeff.is_zero() {
            continue;
        }
        for (col, value) in v.entries().iter().enumerate() {
            let row = (col + mu.time) % n;
            out[row] += *coeff * root_of_unity::<T>(mu.freq * row, n) * *value;
        }
    }
    ComplexVector::new(out)
}
