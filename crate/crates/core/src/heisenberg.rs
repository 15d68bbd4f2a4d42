//! The finite Weyl–Heisenberg group on `C^L`.
//!
//! `S_(t,f)` cyclically delays a signal by `t` samples and then modulates it
//! by `f` frequency bins:
//!
//! ```text
//! (S_(t,f))_{m,n} = [m == n + t (mod L)] * exp(2 pi i f m / L)
//! ```
//!
//! with zero-based row index `m`. At `L = 2` the four shifts are the Pauli
//! matrices up to a phase: `S_(0,0) = s0`, `S_(1,0) = s1`, `S_(1,1) = i s2`,
//! `S_(0,1) = s3`.

use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{lit, Scalar};

/// Time–frequency shift index `(time, freq)`, both taken modulo `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ShiftIndex {
    pub time: usize,
    pub freq: usize,
}

impl ShiftIndex {
    pub const ORIGIN: ShiftIndex = ShiftIndex { time: 0, freq: 0 };

    pub const fn new(time: usize, freq: usize) -> Self {
        Self { time, freq }
    }

    pub fn reduced(self, dim: usize) -> Self {
        Self::new(self.time % dim, self.freq % dim)
    }

    pub fn is_origin(self, dim: usize) -> bool {
        self.reduced(dim) == Self::ORIGIN
    }

    /// Row-major position of the shift in an `L x L` grid.
    pub fn flat(self, dim: usize) -> usize {
        let r = self.reduced(dim);
        r.time * dim + r.freq
    }

    pub fn from_flat(index: usize, dim: usize) -> Self {
        Self::new(index / dim, index % dim)
    }

    pub fn add(self, other: Self, dim: usize) -> Self {
        Self::new(self.time + other.time, self.freq + other.freq).reduced(dim)
    }
}

impl fmt::Display for ShiftIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.time, self.freq)
    }
}

/// All `L^2` shift indices in row-major order.
pub fn all_shifts(dim: usize) -> impl Iterator<Item = ShiftIndex> {
    (0..dim * dim).map(move |k| ShiftIndex::from_flat(k, dim))
}

/// `exp(2 pi i k / L)`, exact on quarter turns so the `L = 2` and `L = 4`
/// groups contain only the entries `0, +-1, +-i`.
pub fn root_of_unity<T: Scalar>(k: usize, dim: usize) -> Complex<T> {
    let k = k % dim;
    if (4 * k).is_multiple_of(dim) {
        return match 4 * k / dim {
            0 => Complex::one(),
            1 => Complex::i(),
            2 => -Complex::<T>::one(),
            _ => -Complex::<T>::i(),
        };
    }
    let angle = T::TAU() * lit::<T>(k as f64) / lit::<T>(dim as f64);
    Complex::new(angle.cos(), angle.sin())
}

/// The shift operator `S_mu` on `C^dim`.
pub fn shift_operator<T: Scalar>(dim: usize, mu: ShiftIndex) -> ComplexMatrix<T> {
    let mu = mu.reduced(dim);
    let mut s = ComplexMatrix::zeros(dim);
    for n in 0..dim {
        let m = (n + mu.time) % dim;
        s[(m, n)] = root_of_unity(mu.freq * m, dim);
    }
    s
}

/// Every element of the group, paired with its index, in row-major order.
pub fn heisenberg_group<T: Scalar>(dim: usize) -> Vec<(ShiftIndex, ComplexMatrix<T>)> {
    all_shifts(dim)
        .map(|mu| (mu, shift_operator(dim, mu)))
        .collect()
}

/// Pauli matrix `sigma_index`, `index` in `0..4`.
pub fn pauli<T: Scalar>(index: usize) -> Result<ComplexMatrix<T>> {
    let (o, z, i) = (Complex::<T>::one(), Complex::<T>::zero(), Complex::<T>::i());
    let m = match index {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -i], [i, z]],
        3 => [[o, z], [z, -o]],
        _ => {
            return Err(Error::IndexOutOfRange {
                index,
                range: "0..=3",
            })
        }
    };
    Ok(ComplexMatrix::from_rows(m))
}

/// Shift index whose `L = 2` operator is proportional to `sigma_n`.
pub fn shift_for_pauli(n: usize) -> Result<ShiftIndex> {
    match n {
        0 => Ok(ShiftIndex::new(0, 0)),
        1 => Ok(ShiftIndex::new(1, 0)),
        2 => Ok(ShiftIndex::new(1, 1)),
        3 => Ok(ShiftIndex::new(0, 1)),
        _ => Err(Error::IndexOutOfRange {
            index: n,
            range: "0..=3",
        }),
    }
}

/// Pauli index of an `L = 2` shift.
pub fn pauli_for_shift(mu: ShiftIndex) -> usize {
    match (mu.time % 2, mu.freq % 2) {
        (0, 0) => 0,
        (1, 0) => 1,
        (1, 1) => 2,
        _ => 3,
    }
}

/// Unitary DFT matrix, `F_{mn} = exp(-2 pi i m n / L) / sqrt(L)`.
pub fn fourier_matrix<T: Scalar>(dim: usize) -> ComplexMatrix<T> {
    let norm = lit::<T>(dim as f64).sqrt().recip();
    ComplexMatrix::from_fn(dim, |m, n| {
        let k = (dim - (m * n) % dim) % dim;
        root_of_unity::<T>(k, dim) * norm
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn real(rows: [[f64; 2]; 2]) -> M {
        M::from_fn(2, |i, j| Complex::new(rows[i][j], 0.0))
    }

    #[test]
    fn two_by_two_shifts_are_exact() {
        assert_eq!(
            shift_operator::<f64>(2, ShiftIndex::new(0, 0)),
            M::identity(2)
        );
        assert_eq!(
            shift_operator::<f64>(2, ShiftIndex::new(1, 0)),
            real([[0., 1.], [1., 0.]])
        );
        assert_eq!(
            shift_operator::<f64>(2, ShiftIndex::new(0, 1)),
            real([[1., 0.], [0., -1.]])
        );
        assert_eq!(
            shift_operator::<f64>(2, ShiftIndex::new(1, 1)),
            real([[0., 1.], [-1., 0.]])
        );
    }

    #[test]
    fn pauli_correspondence() {
        assert_eq!(
            pauli::<f64>(0).unwrap(),
            shift_operator(2, ShiftIndex::new(0, 0))
        );
        assert_eq!(
            pauli::<f64>(1).unwrap(),
            shift_operator(2, ShiftIndex::new(1, 0))
        );
        assert_eq!(
            pauli::<f64>(3).unwrap(),
            shift_operator(2, ShiftIndex::new(0, 1))
        );
        let s11 = shift_operator::<f64>(2, ShiftIndex::new(1, 1));
        assert_eq!(pauli::<f64>(2).unwrap(), s11.scale(-Complex::i()));
        assert!(pauli::<f64>(4).is_err());
        for n in 0..4 {
            assert_eq!(pauli_for_shift(shift_for_pauli(n).unwrap()), n);
        }
    }

    #[test]
    fn pauli_algebra() {
        let s: Vec<M> = (0..4).map(|i| pauli(i).unwrap()).collect();
        let i = Complex::<f64>::i();
        for a in 0..4 {
            assert_eq!(&s[a] * &s[a], M::identity(2));
            assert_eq!(s[a].hermitian_defect(), 0.0);
            for b in 0..4 {
                let want = if a == b { 2.0 } else { 0.0 };
                assert_eq!(s[a].trace_product(&s[b]), Complex::new(want, 0.0));
            }
        }
        // s1 s2 = i s3 and cyclic.
        assert_eq!(&s[1] * &s[2], s[3].scale(i));
        assert_eq!(&s[2] * &s[3], s[1].scale(i));
        assert_eq!(&s[3] * &s[1], s[2].scale(i));
        assert_eq!(&s[2] * &s[1], s[3].scale(-i));
        for m in &s[1..] {
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            assert_eq!(det, Complex::new(-1.0, 0.0));
        }
        // S_(1,1) = S_(0,1) S_(1,0)
        assert_eq!(
            shift_operator::<f64>(2, ShiftIndex::new(1, 1)),
            &shift_operator::<f64>(2, ShiftIndex::new(0, 1))
                * &shift_operator(2, ShiftIndex::new(1, 0))
        );
    }

    #[test]
    fn fourier_examples() {
        let f = fourier_matrix::<f64>(2);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(f.max_abs_diff(&real([[r, r], [r, -r]])) < 1e-15);
        let conj = shift_operator::<f64>(2, ShiftIndex::new(1, 0)).conjugate_by(&f);
        assert!(conj.max_abs_diff(&shift_operator(2, ShiftIndex::new(0, 1))) < 1e-15);
        for dim in 1..=9 {
            let f = fourier_matrix::<f64>(dim);
            assert!((&f * &f.adjoint()).max_abs_diff(&M::identity(dim)) < 1e-12);
        }
    }

    #[test]
    fn unitarity_and_projective_group_law() {
        for dim in 1..=8 {
            let group = heisenberg_group::<f64>(dim);
            assert_eq!(group.len(), dim * dim);
            for (mu, s) in &group {
                assert!((s * &s.adjoint()).max_abs_diff(&M::identity(dim)) < 1e-12);
                for (nu, t) in &group {
                    let product = s * t;
                    let target = shift_operator::<f64>(dim, mu.add(*nu, dim));
                    let k = (0..dim * dim)
                        .find(|&k| target.entries()[k].norm() > 0.5)
                        .unwrap();
                    let phase = product.entries()[k] / target.entries()[k];
                    assert!((phase.norm() - 1.0).abs() < 1e-12);
                    assert!(product.max_abs_diff(&target.scale(phase)) < 1e-12);
                }
            }
            // Distinct operators.
            for (a, (_, s)) in group.iter().enumerate() {
                for (_, t) in group.iter().skip(a + 1) {
                    assert!(s.max_abs_diff(t) > 1e-6);
                }
            }
        }
    }

    #[test]
    fn shifts_reduce_modulo_dimension() {
        assert_eq!(
            shift_operator::<f64>(3, ShiftIndex::new(4, 5)),
            shift_operator::<f64>(3, ShiftIndex::new(1, 2))
        );
        assert_eq!(ShiftIndex::new(2, 3).flat(3), 6);
        assert_eq!(ShiftIndex::from_flat(7, 3), ShiftIndex::new(2, 1));
    }
}
