//! Monte Carlo check of the averaged gain and interference formulas.
//!
//! Each trial draws a Rayleigh realization `H`, then records
//! `a = |<g, H gamma>|^2` and `b = sum_{mu in scheme \ 0} |<g, H S_mu gamma>|^2`.
//! Noise is not sampled; `sigma^2` enters the SINR ratio as a fixed power.

use rayon::prelude::*;
use serde::Serialize;

use crate::bloch_solver::{solve_fidelity, ScatteringQuad};
use crate::error::{Error, Result};
use crate::heisenberg::shift_operator;
use crate::linalg::Pulse;
use crate::multiplex::Scheme;
use crate::random::{derive_seed, substream};
use crate::scalar::{lit, Scalar};
use crate::wssus_map::{
    apply_interference, apply_realization, channel_fidelity, ratio_with_sentinel,
    sample_realization, DensityOperator, NoiseLevel, ScatteringFunction,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport<T> {
    pub trials: usize,
    pub mean_gain: T,
    pub mean_interf: T,
    pub stderr_gain: T,
    pub stderr_interf: T,
    pub analytic_gain: T,
    pub analytic_interf: T,
    pub sinr_empirical: T,
    pub sinr_analytic: T,
    pub seed: u64,
}

/// Welford running mean and variance.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunningStats<T> {
    count: usize,
    mean: T,
    m2: T,
}

impl<T: Scalar> RunningStats<T> {
    pub fn push(&mut self, x: T) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / lit(self.count as f64);
        self.m2 += delta * (x - self.mean);
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> T {
        if self.count < 2 {
            return T::zero();
        }
        self.m2 / lit((self.count - 1) as f64)
    }

    pub fn stderr(&self) -> T {
        (self.variance() / lit(self.count as f64)).sqrt()
    }
}

/// Samples `trials` realizations (trial `k` on substream `k` of `seed`) and
/// compares the empirical gain and interference with their trace formulas.
pub fn estimate_expectations<T: Scalar>(
    c: &ScatteringFunction<T>,
    gamma: &Pulse<T>,
    g: &Pulse<T>,
    scheme: &Scheme,
    noise: NoiseLevel<T>,
    trials: usize,
    seed: u64,
) -> Result<McReport<T>> {
    if trials < 2 {
        return Err(Error::InvalidInput(format!(
            "trials must be at least 2 (got {trials})"
        )));
    }
    let dim = c.dim();
    if gamma.dim() != dim || g.dim() != dim || scheme.dim() != dim {
        return Err(Error::InvalidInput(format!(
            "pulse and scheme dimensions must match the channel dimension {dim}"
        )));
    }

    let shifted: Vec<_> = scheme
        .nonzero_shifts()
        .map(|mu| shift_operator::<T>(dim, mu).mul_vec(gamma))
        .collect();
    let samples: Vec<(T, T)> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k as u64);
            let r = sample_realization(c, &mut rng);
            let gain = g.inner(&apply_realization(&r, gamma)).norm_sqr();
            let interf = shifted
                .iter()
                .map(|v| g.inner(&apply_realization(&r, v)).norm_sqr())
                .sum::<T>();
            (gain, interf)
        })
        .collect();

    let mut gain_stats = RunningStats::default();
    let mut interf_stats = RunningStats::default();
    for (a, b) in samples {
        gain_stats.push(a);
        interf_stats.push(b);
    }

    let gamma_proj = DensityOperator::from_pulse(gamma);
    let g_proj = DensityOperator::from_pulse(g);
    let analytic_gain = channel_fidelity(c, &gamma_proj, &g_proj)?;
    let analytic_interf = apply_interference(c, gamma_proj.matrix(), scheme)?
        .trace_product(g_proj.matrix())
        .re;

    Ok(McReport {
        trials,
        mean_gain: gain_stats.mean(),
        mean_interf: interf_stats.mean(),
        stderr_gain: gain_stats.stderr(),
        stderr_interf: interf_stats.stderr(),
        analytic_gain,
        analytic_interf,
        sinr_empirical: ratio_with_sentinel(
            gain_stats.mean(),
            noise.sigma2() + interf_stats.mean(),
        )?,
        sinr_analytic: ratio_with_sentinel(analytic_gain, noise.sigma2() + analytic_interf)?,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow<T> {
    pub p0: T,
    pub analytic: T,
    pub mc_gain: T,
    pub stderr: T,
}

/// The worst-case family `(p0, (1 - p0)/3 (1,1,1))`.
pub fn worst_case_family<T: Scalar>(p0: T) -> Result<ScatteringQuad<T>> {
    ScatteringQuad::worst_case(p0)
}

/// For each `p0` on the grid: closed-form fidelity of `family(p0)` and a
/// Monte Carlo estimate of the gain achieved by the solver's pulse pair.
/// Row `i` uses the seed `derive_seed(seed, i)`.
pub fn sweep_p0<T: Scalar>(
    family: impl Fn(T) -> Result<ScatteringQuad<T>>,
    grid: &[T],
    trials: usize,
    seed: u64,
) -> Result<Vec<SweepRow<T>>> {
    grid.iter()
        .enumerate()
        .map(|(i, &p0)| {
            let quad = family(p0)?;
            let solution = solve_fidelity(&quad)?;
            let report = estimate_expectations(
                &quad.to_scattering(),
                &solution.precoder,
                &solution.equalizer,
                &Scheme::single(2),
                NoiseLevel::noiseless(),
                trials,
                derive_seed(seed, i as u64),
            )?;
            Ok(SweepRow {
                p0,
                analytic: solution.fidelity,
                mc_gain: report.mean_gain,
                stderr: report.stderr_gain,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch_solver::worst_case_fidelity;
    use crate::heisenberg::ShiftIndex;
    use crate::linalg::ComplexVector;
    use crate::multiplex::scheme_interference;
    use crate::random::{random_quad, random_unit_vector};

    fn quad(p: [f64; 4]) -> ScatteringQuad<f64> {
        ScatteringQuad::new(p).unwrap()
    }

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, 2.5, -3.0, 7.25];
        let mut s = RunningStats::default();
        xs.iter().for_each(|x| s.push(*x));
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((s.mean() - mean).abs() < 1e-14);
        assert!((s.variance() - var).abs() < 1e-12);
    }

    #[test]
    fn identity_channel_gain_is_tap_power() {
        let c = ScatteringFunction::<f64>::point_mass(2, ShiftIndex::ORIGIN);
        let p = Pulse::new(ComplexVector::basis(2, 0)).unwrap();
        let r = estimate_expectations(
            &c,
            &p,
            &p,
            &Scheme::single(2),
            NoiseLevel::new(1.0).unwrap(),
            100_000,
            1,
        )
        .unwrap();
        assert_eq!(r.mean_interf, 0.0);
        assert!((r.mean_gain - 1.0).abs() <= 4.0 * r.stderr_gain);
        assert_eq!(r.analytic_gain, 1.0);
    }

    #[test]
    fn orthogonal_streams_never_interfere_on_flat_channel() {
        let c = quad([1.0, 0.0, 0.0, 0.0]).to_scattering();
        let p = Pulse::new(ComplexVector::basis(2, 0)).unwrap();
        let scheme = Scheme::two_point(2, ShiftIndex::new(1, 0)).unwrap();
        let r = estimate_expectations(&c, &p, &p, &scheme, NoiseLevel::new(0.1).unwrap(), 1000, 2)
            .unwrap();
        assert_eq!(r.mean_interf, 0.0);
        assert_eq!(r.stderr_interf, 0.0);
    }

    #[test]
    fn optimal_pair_gain_is_unbiased() {
        let q = quad([0.4, 0.3, 0.2, 0.1]);
        let s = solve_fidelity(&q).unwrap();
        let scheme = Scheme::two_point(2, ShiftIndex::new(0, 1)).unwrap();
        let r = estimate_expectations(
            &q.to_scattering(),
            &s.precoder,
            &s.equalizer,
            &scheme,
            NoiseLevel::new(0.1).unwrap(),
            200_000,
            5,
        )
        .unwrap();
        assert!((r.mean_gain - 0.7).abs() <= 4.0 * r.stderr_gain);
        assert!((r.mean_interf - r.analytic_interf).abs() <= 4.0 * r.stderr_interf);
    }

    #[test]
    fn unbiasedness_flake_budget() {
        let mut rng = substream(50, 0);
        let q: ScatteringQuad<f64> = random_quad(&mut rng);
        let c = q.to_scattering();
        let gamma = Pulse::new(random_unit_vector(2, &mut rng)).unwrap();
        let g = Pulse::new(random_unit_vector(2, &mut rng)).unwrap();
        let scheme = Scheme::two_point(2, ShiftIndex::new(1, 1)).unwrap();
        let inside = (0..100u64)
            .filter(|seed| {
                let r = estimate_expectations(
                    &c,
                    &gamma,
                    &g,
                    &scheme,
                    NoiseLevel::new(0.1).unwrap(),
                    10_000,
                    *seed,
                )
                .unwrap();
                (r.mean_gain - r.analytic_gain).abs() <= 4.0 * r.stderr_gain
            })
            .count();
        assert!(inside >= 99, "{inside}/100 runs inside the 4-sigma band");
    }

    #[test]
    fn reports_are_deterministic() {
        let q = quad([0.4, 0.3, 0.2, 0.1]);
        let s = solve_fidelity(&q).unwrap();
        let scheme = Scheme::two_point(2, ShiftIndex::new(1, 1)).unwrap();
        let run = || {
            estimate_expectations(
                &q.to_scattering(),
                &s.precoder,
                &s.equalizer,
                &scheme,
                NoiseLevel::new(0.1).unwrap(),
                5000,
                77,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn analytic_interference_is_additive() {
        let mut rng = substream(51, 0);
        let c = crate::random::random_scattering::<f64, _>(3, &mut rng);
        let gamma = Pulse::new(random_unit_vector(3, &mut rng)).unwrap();
        let g = Pulse::new(random_unit_vector(3, &mut rng)).unwrap();
        let shifts = vec![
            ShiftIndex::ORIGIN,
            ShiftIndex::new(1, 0),
            ShiftIndex::new(2, 1),
            ShiftIndex::new(0, 2),
        ];
        let scheme = Scheme::new(3, shifts.clone()).unwrap();
        let r = estimate_expectations(
            &c,
            &gamma,
            &g,
            &scheme,
            NoiseLevel::new(0.1).unwrap(),
            10,
            0,
        )
        .unwrap();
        let (gp, pp) = (
            DensityOperator::from_pulse(&gamma),
            DensityOperator::from_pulse(&g),
        );
        let total: f64 = shifts[1..]
            .iter()
            .map(|mu| {
                scheme_interference(&c, &gp, &pp, &Scheme::two_point(3, *mu).unwrap()).unwrap()
            })
            .sum();
        assert!((r.analytic_interf - total).abs() < 1e-12);
    }

    #[test]
    fn input_validation() {
        let c = quad([0.25; 4]).to_scattering();
        let p = Pulse::new(ComplexVector::basis(2, 0)).unwrap();
        let noise = NoiseLevel::new(0.1).unwrap();
        assert!(estimate_expectations(&c, &p, &p, &Scheme::single(2), noise, 1, 0).is_err());
        let q = Pulse::new(ComplexVector::basis(3, 0)).unwrap();
        assert!(estimate_expectations(&c, &q, &q, &Scheme::single(2), noise, 10, 0).is_err());
    }

    #[test]
    fn sweep_rows() {
        let grid: [f64; 3] = [0.25, 1.0, 0.6];
        let rows = sweep_p0(worst_case_family, &grid, 2000, 3).unwrap();
        assert_eq!(rows[0].analytic, 0.5);
        assert!((rows[1].analytic - 1.0).abs() < 1e-12);
        assert!((rows[2].analytic - (0.5 + 2.0 / 3.0 * 0.35)).abs() < 1e-12);
        for row in &rows {
            assert!((row.analytic - worst_case_fidelity(row.p0).unwrap()).abs() < 1e-12);
            assert!((row.mc_gain - row.analytic).abs() <= 5.0 * row.stderr + 1e-12);
        }
        assert!(sweep_p0(worst_case_family, &[1.5], 10, 0).is_err());
    }
}
