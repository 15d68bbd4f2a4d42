//! Precoder, equalizer and multiplexing design for doubly-dispersive WSSUS
//! channels on the finite Weyl–Heisenberg group.
//!
//! The channel is a random superposition `H = sum_mu Sigma(mu) S_mu` of
//! cyclic time–frequency shifts on `C^L`. Knowing only the scattering
//! function `C(mu) = E|Sigma(mu)|^2`, the transmitter picks a pulse `gamma`
//! and the receiver a pulse `g` to maximize the averaged gain
//! `Tr(A(Gamma) G)` or the SINR.
//!
//! * [`linalg`]: dense complex kernel (Jacobi eigensolver, generalized problem).
//! * [`heisenberg`]: shift operators, Pauli correspondence, Fourier matrix.
//! * [`wssus_map`]: scattering functions, the averaged map `A`, SINR, sampling.
//! * [`bloch_solver`]: closed-form `L = 2` optimum via Bloch vectors.
//! * [`numeric_opt`]: receiver eigenproblem, alternating ascent, oracles.
//! * [`multiplex`]: crosstalk, frame bounds, scheme selection.
//! * [`mc_sim`]: Monte Carlo verification harness.
//!
//! Every numeric type is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`.
//!
//! ```
//! use wssus::{solve_fidelity, Quad};
//!
//! let p = Quad::new([0.4, 0.3, 0.2, 0.1]).unwrap();
//! let solution = solve_fidelity(&p).unwrap();
//! assert!((solution.fidelity - 0.7).abs() < 1e-12);
//! assert_eq!(solution.n_star.index(), 1);
//! ```

pub mod bloch_solver;
pub mod error;
pub mod heisenberg;
pub mod linalg;
pub mod mc_sim;
pub mod multiplex;
pub mod numeric_opt;
pub mod random;
pub mod scalar;
pub mod wssus_map;

pub use bloch_solver::{
    best_case_fidelity, bloch_to_matrix, classify_channel, extremal_family, is_on_bloch_manifold,
    map_matrix_rep, matrix_to_bloch, optimal_precoder_vector, optimal_projectors, solve_fidelity,
    worst_case_fidelity, BlochVector, ChannelClass, ExtremalFamily, FidelitySolution, PauliAxis,
    ScatteringQuad,
};
pub use error::{Error, Result};
pub use heisenberg::{fourier_matrix, pauli, shift_operator, ShiftIndex};
pub use linalg::{
    hermitian_eigensystem, max_generalized_eigenpair, rank_one_projector, ComplexMatrix,
    ComplexVector, EigenSystem, Pulse,
};
pub use mc_sim::{estimate_expectations, sweep_p0, worst_case_family, McReport, SweepRow};
pub use multiplex::{crosstalk, frame_bounds, select_schemes, two_stream_sinr, Scheme};
pub use numeric_opt::{
    alternating_fidelity_max, brute_force_bloch_oracle, fidelity_lower_bound_search,
    optimal_receiver, OptimizationTrace, OptimizerConfig,
};
pub use scalar::Scalar;
pub use wssus_map::{
    apply_a, apply_adjoint_a, apply_interference, channel_fidelity, realize_channel_matrix,
    sample_realization, sinr, verify_cp_properties, ChannelRealization, DensityOperator,
    NoiseLevel, PropertyReport, ScatteringFunction,
};

pub type Matrix = ComplexMatrix<f64>;
pub type Vector = ComplexVector<f64>;
pub type Pulse64 = Pulse<f64>;
pub type Quad = ScatteringQuad<f64>;
pub type Scattering = ScatteringFunction<f64>;
pub type Density = DensityOperator<f64>;
pub type Noise = NoiseLevel<f64>;
pub type Bloch = BlochVector<f64>;
pub type Solution = FidelitySolution<f64>;
pub type Report = McReport<f64>;
