//! Multiplexing a second stream on `C^2` at unit spectral efficiency.
//!
//! A scheme is a set of shifts containing the origin; stream `k` is sent on
//! `S_mu_k gamma`. For the channel-optimal pulses `x(n)` the crosstalk
//! `<x(n), S_mu x(n)>` vanishes for exactly the two shifts whose Pauli index
//! differs from `n`, so those schemes need no further orthogonalization.

use num_complex::Complex;
use serde::Serialize;

use crate::bloch_solver::{optimal_precoder_vector, PauliAxis};
use crate::error::{Error, Result};
use crate::heisenberg::{shift_for_pauli, shift_operator, ShiftIndex};
use crate::linalg::{hermitian_eigensystem, ComplexMatrix, ComplexVector, Pulse};
use crate::scalar::{tol, Scalar};
use crate::wssus_map::{
    apply_a, ratio_with_sentinel, shift_conjugate, DensityOperator, NoiseLevel, ScatteringFunction,
};

/// Lattice of transmit shifts; always contains `(0,0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Scheme {
    dim: usize,
    shifts: Vec<ShiftIndex>,
}

impl Scheme {
    /// Shifts are reduced modulo `dim`; they must be distinct and include the origin.
    pub fn new(dim: usize, shifts: Vec<ShiftIndex>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadScheme("dimension must be positive".into()));
        }
        let shifts: Vec<ShiftIndex> = shifts.into_iter().map(|s| s.reduced(dim)).collect();
        if !shifts.contains(&ShiftIndex::ORIGIN) {
            return Err(Error::SchemeMissingOrigin);
        }
        for (k, s) in shifts.iter().enumerate() {
            if shifts[..k].contains(s) {
                return Err(Error::BadScheme(format!("duplicate shift {s}")));
            }
        }
        Ok(Self { dim, shifts })
    }

    /// Only the origin: a single stream, no interference.
    pub fn single(dim: usize) -> Self {
        Self {
            dim,
            shifts: vec![ShiftIndex::ORIGIN],
        }
    }

    pub fn two_point(dim: usize, mu: ShiftIndex) -> Result<Self> {
        Self::new(dim, vec![ShiftIndex::ORIGIN, mu])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shifts(&self) -> &[ShiftIndex] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn contains_origin(&self) -> bool {
        self.shifts.contains(&ShiftIndex::ORIGIN)
    }

    pub fn nonzero_shifts(&self) -> impl Iterator<Item = ShiftIndex> + '_ {
        self.shifts
            .iter()
            .copied()
            .filter(|s| *s != ShiftIndex::ORIGIN)
    }

    /// The unique nonzero shift of a two-point scheme.
    pub fn partner(&self) -> Result<ShiftIndex> {
        if self.shifts.len() != 2 {
            return Err(Error::BadScheme(format!(
                "expected two shifts, found {}",
                self.shifts.len()
            )));
        }
        Ok(self
            .nonzero_shifts()
            .next()
            .expect("two distinct shifts include a nonzero one"))
    }
}

/// Transmitter-side crosstalk `<x, S_mu x>`.
pub fn crosstalk<T: Scalar>(x: &Pulse<T>, mu: ShiftIndex) -> Complex<T> {
    x.inner(&shift_operator::<T>(x.dim(), mu).mul_vec(x))
}

/// Extremal eigenvalues `(lower, upper)` of the frame operator `sum_i v_i v_i^*`.
pub fn frame_bounds<T: Scalar>(vectors: &[ComplexVector<T>]) -> Result<(T, T)> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidInput("frame needs at least one vector".into()))?;
    let dim = first.dim();
    let mut frame = ComplexMatrix::zeros(dim);
    for v in vectors {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
        frame.add_scaled(T::one(), &v.outer(v));
    }
    let eig = hermitian_eigensystem(&frame)?;
    Ok((eig.min_value(), eig.max_value()))
}

/// The Weyl–Heisenberg family `{S_mu x : mu in scheme}`.
pub fn gabor_family<T: Scalar>(x: &ComplexVector<T>, scheme: &Scheme) -> Vec<ComplexVector<T>> {
    scheme
        .shifts()
        .iter()
        .map(|mu| shift_operator::<T>(x.dim(), *mu).mul_vec(x))
        .collect()
}

/// Two-point schemes on `C^2` with zero transmitter crosstalk for `x(n)`,
/// ordered lexicographically by shift.
pub fn select_schemes(n: usize) -> Result<Vec<Scheme>> {
    let axis = PauliAxis::new(n)?;
    let x = optimal_precoder_vector::<f64>(axis);
    let candidates = [
        ShiftIndex::new(0, 1),
        ShiftIndex::new(1, 0),
        ShiftIndex::new(1, 1),
    ];
    candidates
        .into_iter()
        .filter(|mu| crosstalk(&x, *mu).norm() <= 1e-12)
        .map(|mu| Scheme::two_point(2, mu))
        .collect()
}

/// Averaged interference `Tr(S_mu A(Gamma) S_mu^* G)` leaking from the first
/// stream into the receiver of the stream at the origin.
pub fn scheme_interference<T: Scalar>(
    c: &ScatteringFunction<T>,
    gamma: &DensityOperator<T>,
    g: &DensityOperator<T>,
    scheme: &Scheme,
) -> Result<T> {
    let ax = apply_a(c, gamma.matrix())?;
    Ok(scheme
        .nonzero_shifts()
        .map(|mu| shift_conjugate(&ax, mu).trace_product(g.matrix()).re)
        .sum())
}

/// Orders schemes by averaged interference, then by shift.
pub fn rank_schemes<T: Scalar>(
    c: &ScatteringFunction<T>,
    gamma: &DensityOperator<T>,
    g: &DensityOperator<T>,
    schemes: Vec<Scheme>,
) -> Result<Vec<(Scheme, T)>> {
    let mut scored = schemes
        .into_iter()
        .map(|s| scheme_interference(c, gamma, g, &s).map(|b| (s, b)))
        .collect::<Result<Vec<_>>>()?;
    let eps = tol::<T>(1e-12);
    scored.sort_by(|(sa, a), (sb, b)| {
        if (*a - *b).abs() <= eps {
            sa.shifts().cmp(sb.shifts())
        } else {
            a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
        }
    });
    Ok(scored)
}

/// SINR of the stream at the origin of a two-point scheme.
pub fn two_stream_sinr<T: Scalar>(
    c: &ScatteringFunction<T>,
    gamma: &DensityOperator<T>,
    g: &DensityOperator<T>,
    scheme: &Scheme,
    noise: NoiseLevel<T>,
) -> Result<T> {
    Ok(stream_sinrs(c, gamma, g, scheme, noise)?.0)
}

/// SINR of both streams of a two-point scheme. The first stream is evaluated
/// as `Tr(A(Gamma)G) / (sigma^2 + Tr(S_mu A(Gamma) S_mu^* G))`; the second
/// from its own pair, sending `S_mu gamma` and receiving with `S_mu g`.
pub fn stream_sinrs<T: Scalar>(
    c: &ScatteringFunction<T>,
    gamma: &DensityOperator<T>,
    g: &DensityOperator<T>,
    scheme: &Scheme,
    noise: NoiseLevel<T>,
) -> Result<(T, T)> {
    let mu = scheme.partner()?;
    let a_first = apply_a(c, gamma.matrix())?;
    let g_second = shift_conjugate(g.matrix(), mu);
    let gamma_second = shift_conjugate(gamma.matrix(), mu);
    let a_second = apply_a(c, &gamma_second)?;

    let first = ratio_with_sentinel(
        a_first.trace_product(g.matrix()).re,
        noise.sigma2() + shift_conjugate(&a_first, mu).trace_product(g.matrix()).re,
    )?;
    let second = ratio_with_sentinel(
        a_second.trace_product(&g_second).re,
        noise.sigma2() + a_first.trace_product(&g_second).re,
    )?;
    Ok((first, second))
}

/// `|<x(n), S_mu x(n)>|` for `n = 1..=3` (rows) and `mu = (1,0), (1,1), (0,1)` (columns).
pub fn crosstalk_table<T: Scalar>() -> [[T; 3]; 3] {
    let mut table = [[T::zero(); 3]; 3];
    for (row, n) in (1..=3).enumerate() {
        let x = optimal_precoder_vector::<T>(PauliAxis::new(n).expect("axis in range"));
        for (col, m) in (1..=3).enumerate() {
            let mu = shift_for_pauli(m).expect("axis in range");
            table[row][col] = crosstalk(&x, mu).norm();
        }
    }
    table
}
