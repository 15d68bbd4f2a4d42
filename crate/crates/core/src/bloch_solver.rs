//! Closed-form precoder/equalizer design for the `2 x 2` WSSUS channel.
//!
//! Writing hermitian `X = (1/2) sum_i x_i sigma_i`, rank-one projectors are
//! exactly the Bloch vectors with `x_0 = 1`, `|x_vec| = 1`, and the averaged
//! channel acts diagonally in the Pauli basis:
//!
//! ```text
//! a = diag(1/2, (p0+p1) - 1/2, (p0+p2) - 1/2, (p0+p3) - 1/2)
//! Tr(A(X) Y) = <x, a y>
//! ```
//!
//! Hence the best fidelity is `1/2 + max_k |b_k|` with `b_k = a_kk`, reached
//! on a coordinate axis: `x = (1, e_n)` and `y = (1, sign(b_n) e_n)`.

use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heisenberg::{pauli, shift_for_pauli, ShiftIndex};
use crate::linalg::{ComplexMatrix, ComplexVector, Pulse};
use crate::scalar::{lit, tol, Scalar};
use crate::wssus_map::{DensityOperator, ScatteringFunction};

/// One of the three non-identity Pauli directions, `1..=3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "usize")]
pub struct PauliAxis(usize);

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis(1), PauliAxis(2), PauliAxis(3)];

    pub fn new(n: usize) -> Result<Self> {
        if (1..=3).contains(&n) {
            Ok(Self(n))
        } else {
            Err(Error::IndexOutOfRange {
                index: n,
                range: "1..=3",
            })
        }
    }

    pub fn index(self) -> usize {
        self.0
    }

    /// The shift operator proportional to `sigma_n`.
    pub fn shift(self) -> ShiftIndex {
        shift_for_pauli(self.0).expect("axis in range")
    }

    /// Sign of the `n`-th Bloch component of the tabulated precoder `x(n)`:
    /// `x(1) = (1,1)/sqrt2` and `x(2) = (1,i)/sqrt2` sit on the positive
    /// axis, `x(3) = (0,1)` on the negative one.
    pub fn table_sign(self) -> i8 {
        if self.0 == 3 {
            -1
        } else {
            1
        }
    }
}

impl From<PauliAxis> for usize {
    fn from(axis: PauliAxis) -> usize {
        axis.0
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Real Pauli coordinates `(x0, x1, x2, x3)` of a hermitian `2 x 2` operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochVector<T> {
    pub x0: T,
    pub xvec: [T; 3],
}

impl<T: Scalar> BlochVector<T> {
    pub fn new(x0: T, xvec: [T; 3]) -> Self {
        Self { x0, xvec }
    }

    pub fn from_components(x: [T; 4]) -> Self {
        Self::new(x[0], [x[1], x[2], x[3]])
    }

    pub fn components(&self) -> [T; 4] {
        [self.x0, self.xvec[0], self.xvec[1], self.xvec[2]]
    }

    /// `(1, s e_n)`: the pure state on Pauli axis `n` with orientation `s`.
    pub fn axis(axis: PauliAxis, sign: i8) -> Self {
        let mut xvec = [T::zero(); 3];
        xvec[axis.index() - 1] = lit(f64::from(sign.signum()));
        Self::new(T::one(), xvec)
    }

    pub fn radius(&self) -> T {
        self.xvec.iter().map(|v| *v * *v).sum::<T>().sqrt()
    }
}

/// The four scattering weights of the `L = 2` channel:
/// `p0 = C(0,0)`, `p1 = C(1,0)`, `p2 = C(1,1)`, `p3 = C(0,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScatteringQuad<T> {
    p: [T; 4],
}

impl<T: Scalar> ScatteringQuad<T> {
    pub fn new(p: [T; 4]) -> Result<Self> {
        if let Some(bad) = p.iter().find(|w| !w.is_finite() || **w < T::zero()) {
            return Err(Error::InvalidQuad(format!(
                "weights must be finite and nonnegative (found {bad})"
            )));
        }
        let total: T = p.iter().copied().sum();
        if (total - T::one()).abs() > tol(1e-9) {
            return Err(Error::InvalidQuad(format!(
                "weights must sum to 1 (sum = {total})"
            )));
        }
        Ok(Self { p })
    }

    /// Divides nonnegative weights by their total.
    pub fn renormalized(p: [T; 4]) -> Result<Self> {
        let total: T = p.iter().copied().sum();
        if total.is_nan() || total <= T::zero() {
            return Err(Error::InvalidQuad("total weight must be positive".into()));
        }
        Self::new(p.map(|w| w / total))
    }

    /// `(p0, (1-p0)/3 (1,1,1))`: the least favourable spread for a given `p0`.
    pub fn worst_case(p0: T) -> Result<Self> {
        check_probability(p0)?;
        let rest = (T::one() - p0) / lit(3.0);
        Self::new([p0, rest, rest, rest])
    }

    /// `(p0, (1-p0) e_k)`: all remaining mass on one shift.
    pub fn best_case(p0: T, axis: PauliAxis) -> Result<Self> {
        check_probability(p0)?;
        let mut p = [p0, T::zero(), T::zero(), T::zero()];
        p[axis.index()] = T::one() - p0;
        Self::new(p)
    }

    pub fn p(&self) -> [T; 4] {
        self.p
    }

    pub fn p0(&self) -> T {
        self.p[0]
    }

    /// The same weights as a scattering function on the `2 x 2` shift grid.
    pub fn to_scattering(&self) -> ScatteringFunction<T> {
        let mut weights = vec![T::zero(); 4];
        for n in 0..4 {
            weights[shift_for_pauli(n).expect("pauli index").flat(2)] = self.p[n];
        }
        ScatteringFunction::new(2, weights).expect("quad is normalized")
    }

    pub fn from_scattering(c: &ScatteringFunction<T>) -> Result<Self> {
        if c.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: c.dim(),
            });
        }
        let mut p = [T::zero(); 4];
        for (n, slot) in p.iter_mut().enumerate() {
            *slot = c.weight(shift_for_pauli(n).expect("pauli index"));
        }
        Self::new(p)
    }
}

fn check_probability<T: Scalar>(p0: T) -> Result<()> {
    if !(p0 >= T::zero() && p0 <= T::one()) {
        return Err(Error::OutOfRange {
            value: p0.to_f64().unwrap_or(f64::NAN),
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// `X = (1/2) sum_i x_i sigma_i`.
pub fn bloch_to_matrix<T: Scalar>(x: &BlochVector<T>) -> ComplexMatrix<T> {
    let half = lit::<T>(0.5);
    let mut m = ComplexMatrix::zeros(2);
    for (i, xi) in x.components().into_iter().enumerate() {
        m.add_scaled(xi * half, &pauli(i).expect("pauli index"));
    }
    m
}

/// `x_i = Tr(X sigma_i)`.
pub fn matrix_to_bloch<T: Scalar>(m: &ComplexMatrix<T>) -> Result<BlochVector<T>> {
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: m.dim(),
        });
    }
    let defect = m.hermitian_defect();
    if defect > tol::<T>(1e-12) * m.max_abs().max(T::one()) {
        return Err(Error::NonHermitianInput {
            deviation: defect.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut x = [T::zero(); 4];
    for (i, slot) in x.iter_mut().enumerate() {
        *slot = m.trace_product(&pauli(i).expect("pauli index")).re;
    }
    Ok(BlochVector::from_components(x))
}

/// Whether `x` parameterizes a rank-one projector: `x0 = 1` and `|x_vec| = 1`.
pub fn is_on_bloch_manifold<T: Scalar>(x: &BlochVector<T>) -> bool {
    let eps = tol::<T>(1e-10);
    (x.x0 - T::one()).abs() <= eps && (x.radius() - T::one()).abs() <= eps
}

/// Diagonal of the Pauli-basis matrix `a_kl = Tr(A(sigma_k) sigma_l) / 4`.
pub fn map_matrix_rep<T: Scalar>(p: &ScatteringQuad<T>) -> [T; 4] {
    let half = lit::<T>(0.5);
    let [p0, p1, p2, p3] = p.p();
    [half, p0 + p1 - half, p0 + p2 - half, p0 + p3 - half]
}

/// Optimum of `Tr(A(Gamma) G)` over rank-one `Gamma`, `G` for a `2 x 2` channel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelitySolution<T> {
    pub fidelity: T,
    pub n_star: PauliAxis,
    /// `sign(2(p0 + p_n) - 1)`, with `sign(0) = +1`.
    pub equalizer_sign: i8,
    pub x_opt: BlochVector<T>,
    pub y_opt: BlochVector<T>,
    #[serde(skip)]
    pub precoder: Pulse<T>,
    #[serde(skip)]
    pub equalizer: Pulse<T>,
    pub degenerate: bool,
    /// Every axis attaining the maximum, ascending.
    pub tied: Vec<PauliAxis>,
}

/// Closed-form fidelity maximum `(1 + max_k |2(p0 + p_k) - 1|) / 2`.
///
/// Ties pick the smallest axis and are listed in `tied`. `x_opt`/`y_opt` are
/// the axis Bloch vectors `(1, e_n)`, `(1, s e_n)`. The returned pulses use
/// the tabulated precoder `x(n)` and the equalizer matched to it, which for
/// `n = 3` is the opposite orientation of `x_opt` with the same fidelity.
pub fn solve_fidelity<T: Scalar>(p: &ScatteringQuad<T>) -> Result<FidelitySolution<T>> {
    let [p0, ..] = p.p();
    let two = lit::<T>(2.0);
    let margins: Vec<T> = PauliAxis::ALL
        .iter()
        .map(|axis| two * (p0 + p.p()[axis.index()]) - T::one())
        .collect();
    let best = margins.iter().map(|m| m.abs()).fold(T::zero(), T::max);
    let eps = tol::<T>(1e-12);
    let tied: Vec<PauliAxis> = PauliAxis::ALL
        .iter()
        .zip(&margins)
        .filter(|(_, m)| m.abs() >= best - eps)
        .map(|(axis, _)| *axis)
        .collect();
    let n_star = tied[0];
    let margin = margins[n_star.index() - 1];
    let equalizer_sign: i8 = if margin < T::zero() { -1 } else { 1 };

    let fidelity = lit::<T>(0.5) * (T::one() + margin.abs());
    let table = n_star.table_sign();
    Ok(FidelitySolution {
        fidelity,
        n_star,
        equalizer_sign,
        x_opt: BlochVector::axis(n_star, 1),
        y_opt: BlochVector::axis(n_star, equalizer_sign),
        precoder: axis_pulse(n_star, table),
        equalizer: axis_pulse(n_star, table * equalizer_sign),
        degenerate: tied.len() > 1,
        tied,
    })
}

/// Unit vector whose projector is `(sigma_0 + s sigma_n) / 2`.
pub fn axis_pulse<T: Scalar>(axis: PauliAxis, sign: i8) -> Pulse<T> {
    let r = lit::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let (o, z) = (Complex::<T>::one(), Complex::<T>::zero());
    let s = Complex::new(lit::<T>(f64::from(sign.signum())), T::zero());
    let entries = match axis.index() {
        1 => vec![o * r, s * r],
        2 => vec![o * r, s * Complex::i() * r],
        _ if sign >= 0 => vec![o, z],
        _ => vec![z, o],
    };
    Pulse::new(ComplexVector::new(entries)).expect("axis pulses are unit norm")
}

/// `X = (sigma_0 + sigma_n)/2` and `Y = (sigma_0 + s sigma_n)/2`.
pub fn optimal_projectors<T: Scalar>(
    n: usize,
    sign: i8,
) -> Result<(DensityOperator<T>, DensityOperator<T>)> {
    let axis = PauliAxis::new(n)?;
    let x = DensityOperator::new(bloch_to_matrix(&BlochVector::axis(axis, 1)))?;
    let y = DensityOperator::new(bloch_to_matrix(&BlochVector::axis(axis, sign)))?;
    Ok((x, y))
}

/// Tabulated channel-optimal precoder `x(n)`:
/// `x(1) = (1,1)/sqrt2`, `x(2) = (1,i)/sqrt2`, `x(3) = (0,1)`.
pub fn optimal_precoder_vector<T: Scalar>(axis: PauliAxis) -> Pulse<T> {
    axis_pulse(axis, axis.table_sign())
}

/// Qualitative regime of a `2 x 2` scattering quad.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelClass {
    /// One shift carries all the mass (flat fading).
    NonDispersive,
    /// Exactly two weights vanish; all shifts commute with one Pauli axis.
    SingleDispersive,
    /// Uniform weights; every precoder achieves `F = 1/2`.
    CompletelyOverspread,
    /// Some weight exceeds one half.
    Underspread,
    Generic,
}

impl ChannelClass {
    /// Numbered regime of the `2 x 2` discussion, when the class has one.
    pub fn case_number(self) -> Option<u8> {
        match self {
            ChannelClass::NonDispersive => Some(1),
            ChannelClass::SingleDispersive => Some(2),
            ChannelClass::Underspread => Some(3),
            ChannelClass::CompletelyOverspread => Some(4),
            ChannelClass::Generic => None,
        }
    }

    pub fn narrative(self) -> &'static str {
        match self {
            ChannelClass::NonDispersive => {
                "non-dispersive (flat fading): F = 1 with any axis precoder, no precoding needed"
            }
            ChannelClass::SingleDispersive => {
                "single-dispersive: all shifts diagonalize jointly (as in OFDM), F = 1 on the remaining axis"
            }
            ChannelClass::CompletelyOverspread => {
                "completely overspread: uniform scattering, F = 1/2 for every precoder (worst case)"
            }
            ChannelClass::Underspread => {
                "doubly-dispersive underspread: a dominant shift carries more than half the power, F > 1/2"
            }
            ChannelClass::Generic => "doubly-dispersive without a dominant shift",
        }
    }
}

/// Classification with precedence NonDispersive > SingleDispersive >
/// CompletelyOverspread > Underspread > Generic, tolerance `1e-9`.
pub fn classify_channel<T: Scalar>(p: &ScatteringQuad<T>) -> ChannelClass {
    let eps = tol::<T>(1e-9);
    let w = p.p();
    let half = lit::<T>(0.5);
    let quarter = lit::<T>(0.25);
    if w.iter().any(|x| (*x - T::one()).abs() <= eps) {
        ChannelClass::NonDispersive
    } else if w.iter().filter(|x| x.abs() <= eps).count() == 2 {
        ChannelClass::SingleDispersive
    } else if w.iter().all(|x| (*x - quarter).abs() <= eps) {
        ChannelClass::CompletelyOverspread
    } else if w.iter().any(|x| *x > half + eps) {
        ChannelClass::Underspread
    } else {
        ChannelClass::Generic
    }
}

/// Extremal families for fixed `p0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "family", content = "axis")]
pub enum ExtremalFamily {
    /// `p1 = p2 = p3`: least favourable spread (case 5).
    WorstCase,
    /// `(1 - p0) e_k`: most favourable spread (case 6).
    BestCase(PauliAxis),
}

impl ExtremalFamily {
    pub fn case_number(self) -> u8 {
        match self {
            ExtremalFamily::WorstCase => 5,
            ExtremalFamily::BestCase(_) => 6,
        }
    }
}

/// Membership in the worst- or best-case family, if any (worst case wins
/// when `p0 = 1`, where both coincide).
pub fn extremal_family<T: Scalar>(p: &ScatteringQuad<T>) -> Option<ExtremalFamily> {
    let eps = tol::<T>(1e-9);
    let [_, p1, p2, p3] = p.p();
    if (p1 - p2).abs() <= eps && (p2 - p3).abs() <= eps {
        return Some(ExtremalFamily::WorstCase);
    }
    let rest = [p1, p2, p3];
    let zeros = rest.iter().filter(|x| x.abs() <= eps).count();
    if zeros == 2 {
        let k = rest
            .iter()
            .position(|x| x.abs() > eps)
            .expect("one nonzero weight");
        return Some(ExtremalFamily::BestCase(PauliAxis(k + 1)));
    }
    None
}

/// `1/2 + (2/3)|p0 - 1/4|`: fidelity of the worst-case channel at fixed `p0`.
pub fn worst_case_fidelity<T: Scalar>(p0: T) -> Result<T> {
    check_probability(p0)?;
    Ok(lit::<T>(0.5) + lit::<T>(2.0) / lit::<T>(3.0) * (p0 - lit(0.25)).abs())
}

/// `(1 + max(|2 p0 - 1|, 1)) / 2 = 1`: fidelity of the best-case channel,
/// attained with `x(k)`.
pub fn best_case_fidelity<T: Scalar>(p0: T, k: usize) -> Result<T> {
    PauliAxis::new(k)?;
    check_probability(p0)?;
    let two = lit::<T>(2.0);
    Ok(lit::<T>(0.5) * (T::one() + (two * p0 - T::one()).abs().max(T::one())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_quad, substream};
    use crate::wssus_map::{apply_a, channel_fidelity};

    type M = ComplexMatrix<f64>;

    fn quad(p: [f64; 4]) -> ScatteringQuad<f64> {
        ScatteringQuad::new(p).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn bloch_matrix_examples() {
        let x = BlochVector::from_components([1.0, 0.0, 0.0, 1.0]);
        assert_eq!(bloch_to_matrix(&x), M::from_real_diagonal(&[1.0, 0.0]));
        let x = BlochVector::from_components([1.0, 0.0, 0.0, 0.0]);
        assert_eq!(bloch_to_matrix(&x), M::from_real_diagonal(&[0.5, 0.5]));
        let x = BlochVector::from_components([1.0, 1.0, 0.0, 0.0]);
        assert_eq!(bloch_to_matrix(&x), M::from_fn(2, |_, _| c(0.5, 0.0)));

        assert_eq!(
            matrix_to_bloch(&M::from_real_diagonal(&[1.0, 0.0]))
                .unwrap()
                .components(),
            [1.0, 0.0, 0.0, 1.0]
        );
        assert_eq!(
            matrix_to_bloch(&M::from_real_diagonal(&[0.5, 0.5]))
                .unwrap()
                .components(),
            [1.0, 0.0, 0.0, 0.0]
        );
        let skew = M::from_rows([[c(0., 0.), c(1., 0.)], [c(0., 0.), c(0., 0.)]]);
        assert!(matrix_to_bloch(&skew).is_err());
    }

    #[test]
    fn bloch_round_trip() {
        let mut rng = substream(30, 0);
        for _ in 0..1000 {
            let m: M = random_hermitian(2, &mut rng);
            let x = matrix_to_bloch(&m).unwrap();
            assert!(bloch_to_matrix(&x).max_abs_diff(&m) < 1e-12);
            assert!((m.trace().re - x.x0).abs() < 1e-12);
        }
    }

    #[test]
    fn manifold_examples() {
        assert!(is_on_bloch_manifold(&BlochVector::from_components([
            1.0, 1.0, 0.0, 0.0
        ])));
        assert!(!is_on_bloch_manifold(&BlochVector::from_components([
            1.0, 0.0, 0.0, 0.0
        ])));
        let r = 0.9 / 3f64.sqrt();
        assert!(!is_on_bloch_manifold(&BlochVector::new(0.9, [r, r, r])));
    }

    #[test]
    fn map_matrix_examples() {
        assert_eq!(map_matrix_rep(&quad([0.25; 4])), [0.5, 0.0, 0.0, 0.0]);
        assert_eq!(map_matrix_rep(&quad([1.0, 0.0, 0.0, 0.0])), [0.5; 4]);
        let d = map_matrix_rep(&quad([0.4, 0.3, 0.2, 0.1]));
        for (got, want) in d.iter().zip([0.5, 0.2, 0.1, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn map_rep_is_the_pauli_action() {
        // Tr(A(X)Y) = <x, a y> for arbitrary hermitian X, Y.
        let mut rng = substream(31, 0);
        for _ in 0..200 {
            let p: ScatteringQuad<f64> = random_quad(&mut rng);
            let a = map_matrix_rep(&p);
            let x: M = random_hermitian(2, &mut rng);
            let y: M = random_hermitian(2, &mut rng);
            let lhs = apply_a(&p.to_scattering(), &x)
                .unwrap()
                .trace_product(&y)
                .re;
            let (bx, by) = (matrix_to_bloch(&x).unwrap(), matrix_to_bloch(&y).unwrap());
            let rhs: f64 = (0..4)
                .map(|i| bx.components()[i] * a[i] * by.components()[i])
                .sum();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn solve_uniform_and_flat() {
        let s = solve_fidelity(&quad([0.25; 4])).unwrap();
        assert_eq!(s.fidelity, 0.5);
        assert!(s.degenerate);
        assert_eq!(s.tied, PauliAxis::ALL.to_vec());

        let s = solve_fidelity(&quad([1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(s.fidelity, 1.0);
        assert!(s.degenerate);
        assert_eq!(s.tied.len(), 3);
    }

    #[test]
    fn solve_generic_example() {
        let s = solve_fidelity(&quad([0.4, 0.3, 0.2, 0.1])).unwrap();
        assert!((s.fidelity - 0.7).abs() < 1e-15);
        assert_eq!(s.n_star.index(), 1);
        assert!(!s.degenerate);
        assert_eq!(s.x_opt.components(), [1.0, 1.0, 0.0, 0.0]);
        assert_eq!(s.y_opt, s.x_opt);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(
            s.precoder
                .max_abs_diff(&ComplexVector::new(vec![c(r, 0.), c(r, 0.)]))
                < 1e-15
        );
    }

    #[test]
    fn negative_margin_flips_equalizer() {
        // p0 + p1 = 0.05 gives |2*0.05 - 1| = 0.9, the maximum.
        let s = solve_fidelity(&quad([0.05, 0.0, 0.5, 0.45])).unwrap();
        assert_eq!(s.n_star.index(), 1);
        assert_eq!(s.equalizer_sign, -1);
        assert_eq!(s.y_opt.components(), [1.0, -1.0, 0.0, 0.0]);
        assert!((s.fidelity - 0.95).abs() < 1e-15);
    }

    #[test]
    fn solution_is_attained_by_projectors_and_pulses() {
        let mut rng = substream(32, 0);
        for _ in 0..1000 {
            let p: ScatteringQuad<f64> = random_quad(&mut rng);
            let s = solve_fidelity(&p).unwrap();
            let c = p.to_scattering();
            assert!((0.5..=1.0).contains(&s.fidelity));
            assert!(is_on_bloch_manifold(&s.x_opt) && is_on_bloch_manifold(&s.y_opt));
            let x = bloch_to_matrix(&s.x_opt);
            let y = bloch_to_matrix(&s.y_opt);
            let f = apply_a(&c, &x).unwrap().trace_product(&y).re;
            assert!((f - s.fidelity).abs() < 1e-12);
            let gamma = DensityOperator::from_pulse(&s.precoder);
            let g = DensityOperator::from_pulse(&s.equalizer);
            assert!((channel_fidelity(&c, &gamma, &g).unwrap() - s.fidelity).abs() < 1e-12);
        }
    }

    #[test]
    fn projector_examples() {
        let (x, y) = optimal_projectors::<f64>(1, 1).unwrap();
        let half = M::from_fn(2, |_, _| c(0.5, 0.0));
        assert_eq!(x.matrix(), &half);
        assert_eq!(y.matrix(), &half);
        let (x, _) = optimal_projectors::<f64>(3, 1).unwrap();
        assert_eq!(x.matrix(), &M::from_real_diagonal(&[1.0, 0.0]));
        let (x, _) = optimal_projectors::<f64>(2, 1).unwrap();
        let want = M::from_rows([[c(0.5, 0.), c(0., -0.5)], [c(0., 0.5), c(0.5, 0.)]]);
        assert_eq!(x.matrix(), &want);
        let (_, y) = optimal_projectors::<f64>(3, -1).unwrap();
        assert_eq!(y.matrix(), &M::from_real_diagonal(&[0.0, 1.0]));
        assert!(optimal_projectors::<f64>(0, 1).is_err());
        for n in 1..=3 {
            for sign in [-1, 1] {
                let (x, y) = optimal_projectors::<f64>(n, sign).unwrap();
                assert!(x.is_rank_one() && y.is_rank_one());
            }
        }
    }

    #[test]
    fn precoder_table_and_fourier_images() {
        let f = crate::heisenberg::fourier_matrix::<f64>(2);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let x1 = optimal_precoder_vector::<f64>(PauliAxis::new(1).unwrap());
        assert!(x1.max_abs_diff(&ComplexVector::new(vec![c(r, 0.), c(r, 0.)])) < 1e-15);
        assert!(
            f.mul_vec(&x1)
                .max_abs_diff(&ComplexVector::new(vec![c(1., 0.), c(0., 0.)]))
                < 1e-15
        );

        let x2 = optimal_precoder_vector::<f64>(PauliAxis::new(2).unwrap());
        assert!(x2.max_abs_diff(&ComplexVector::new(vec![c(r, 0.), c(0., r)])) < 1e-15);
        let want = ComplexVector::new(vec![c(0.5, 0.5), c(0.5, -0.5)]);
        assert!(f.mul_vec(&x2).max_abs_diff(&want) < 1e-15);

        let x3 = optimal_precoder_vector::<f64>(PauliAxis::new(3).unwrap());
        assert_eq!(x3.vector(), &ComplexVector::new(vec![c(0., 0.), c(1., 0.)]));
        assert!(
            f.mul_vec(&x3)
                .max_abs_diff(&ComplexVector::new(vec![c(r, 0.), c(-r, 0.)]))
                < 1e-15
        );

        // Each projector is (s0 +- s_n)/2.
        for axis in PauliAxis::ALL {
            let p = optimal_precoder_vector::<f64>(axis).projector();
            let plus = bloch_to_matrix(&BlochVector::axis(axis, 1));
            let minus = bloch_to_matrix(&BlochVector::axis(axis, -1));
            assert!(p.max_abs_diff(&plus) < 1e-15 || p.max_abs_diff(&minus) < 1e-15);
        }
    }

    #[test]
    fn classification_examples() {
        assert_eq!(
            classify_channel(&quad([1.0, 0.0, 0.0, 0.0])),
            ChannelClass::NonDispersive
        );
        assert_eq!(
            classify_channel(&quad([0.0, 0.0, 1.0, 0.0])),
            ChannelClass::NonDispersive
        );
        assert_eq!(
            classify_channel(&quad([0.5, 0.5, 0.0, 0.0])),
            ChannelClass::SingleDispersive
        );
        assert_eq!(
            solve_fidelity(&quad([0.5, 0.5, 0.0, 0.0]))
                .unwrap()
                .fidelity,
            1.0
        );
        assert_eq!(
            classify_channel(&quad([0.25; 4])),
            ChannelClass::CompletelyOverspread
        );
        assert_eq!(
            classify_channel(&quad([0.6, 0.2, 0.1, 0.1])),
            ChannelClass::Underspread
        );
        assert_eq!(
            classify_channel(&quad([0.4, 0.3, 0.2, 0.1])),
            ChannelClass::Generic
        );
        assert_eq!(ChannelClass::Underspread.case_number(), Some(3));
    }

    #[test]
    fn underspread_at_origin_gives_p0_plus_largest() {
        let p = quad([0.6, 0.1, 0.25, 0.05]);
        let s = solve_fidelity(&p).unwrap();
        assert!((s.fidelity - 0.85).abs() < 1e-15);
        assert_eq!(s.n_star.index(), 2);
    }

    #[test]
    fn extremal_families() {
        assert_eq!(
            extremal_family(&ScatteringQuad::worst_case(0.4).unwrap()),
            Some(ExtremalFamily::WorstCase)
        );
        let axis = PauliAxis::new(2).unwrap();
        assert_eq!(
            extremal_family(&ScatteringQuad::best_case(0.4, axis).unwrap()),
            Some(ExtremalFamily::BestCase(axis))
        );
        assert_eq!(extremal_family(&quad([0.4, 0.3, 0.2, 0.1])), None);
    }

    #[test]
    fn worst_case_examples() {
        assert_eq!(worst_case_fidelity::<f64>(0.25).unwrap(), 0.5);
        assert!((worst_case_fidelity::<f64>(1.0).unwrap() - 1.0).abs() < 1e-15);
        let f0 = worst_case_fidelity::<f64>(0.0).unwrap();
        assert!((f0 - 2.0 / 3.0).abs() < 1e-15);
        let s = solve_fidelity(&ScatteringQuad::<f64>::worst_case(0.0).unwrap()).unwrap();
        assert!((s.fidelity - f0).abs() < 1e-12);
        assert!(worst_case_fidelity::<f64>(1.5).is_err());
        assert!(worst_case_fidelity::<f64>(-0.1).is_err());
    }

    #[test]
    fn best_case_examples() {
        let s = solve_fidelity(
            &ScatteringQuad::<f64>::best_case(0.3, PauliAxis::new(1).unwrap()).unwrap(),
        )
        .unwrap();
        assert_eq!(best_case_fidelity::<f64>(0.3, 1).unwrap(), 1.0);
        assert!((s.fidelity - 1.0).abs() < 1e-15);
        assert_eq!(s.n_star.index(), 1);
        for k in 1..=3 {
            assert_eq!(best_case_fidelity::<f64>(1.0, k).unwrap(), 1.0);
        }
        let s = solve_fidelity(
            &ScatteringQuad::<f64>::best_case(0.5, PauliAxis::new(2).unwrap()).unwrap(),
        )
        .unwrap();
        assert!((s.fidelity - best_case_fidelity::<f64>(0.5, 2).unwrap()).abs() < 1e-15);
        assert!(best_case_fidelity::<f64>(0.5, 0).is_err());
        assert!(best_case_fidelity::<f64>(2.0, 1).is_err());
    }

    #[test]
    fn quad_validation_and_grid_layout() {
        assert!(ScatteringQuad::new([0.4, 0.3, 0.4, 0.1]).is_err());
        assert!(ScatteringQuad::new([-0.1, 0.5, 0.5, 0.1]).is_err());
        let p = quad([0.4, 0.3, 0.2, 0.1]);
        let c = p.to_scattering();
        assert_eq!(c.weight(ShiftIndex::new(0, 0)), 0.4);
        assert_eq!(c.weight(ShiftIndex::new(1, 0)), 0.3);
        assert_eq!(c.weight(ShiftIndex::new(1, 1)), 0.2);
        assert_eq!(c.weight(ShiftIndex::new(0, 1)), 0.1);
        assert_eq!(ScatteringQuad::from_scattering(&c).unwrap(), p);
    }

    #[test]
    fn single_precision_solve() {
        let s = solve_fidelity(&ScatteringQuad::<f32>::new([0.4, 0.3, 0.2, 0.1]).unwrap()).unwrap();
        assert!((s.fidelity - 0.7).abs() < 1e-6);
    }
}
