use num_complex::Complex;
use proptest::prelude::*;
use wssus::bloch_solver::{bloch_to_matrix, is_on_bloch_manifold, solve_fidelity};
use wssus::heisenberg::shift_operator;
use wssus::linalg::{hermitian_eigensystem, ComplexMatrix, ComplexVector, Pulse};
use wssus::multiplex::Scheme;
use wssus::wssus_map::{apply_a, apply_adjoint_a, channel_fidelity, pulse_fidelity, sinr};
use wssus::{Bloch, Density, Noise, Quad, Scattering, ScatteringQuad, ShiftIndex};

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_filter_map("positive total", |w| {
        let total: f64 = w.iter().sum();
        (total > 1e-6).then(|| w.iter().map(|x| x / total).collect())
    })
}

fn quad() -> impl Strategy<Value = Quad> {
    weights(4).prop_map(|w| Quad::renormalized([w[0], w[1], w[2], w[3]]).unwrap())
}

fn fidelity(p: [f64; 4]) -> f64 {
    solve_fidelity(&Quad::renormalized(p).unwrap())
        .unwrap()
        .fidelity
}

fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex<f64>>> {
    prop::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex::new(a, b)),
        n,
    )
}

fn unit(n: usize) -> impl Strategy<Value = Pulse<f64>> {
    complex_vec(n).prop_filter_map("nonzero", |v| Pulse::normalize(&ComplexVector::new(v)).ok())
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix<f64>> {
    complex_vec(n * n).prop_map(move |e| ComplexMatrix::from_row_major(e).unwrap().hermitian_part())
}

fn pulses_and_channel() -> impl Strategy<Value = (usize, Vec<f64>, Pulse<f64>, Pulse<f64>)> {
    (1usize..=5).prop_flat_map(|l| (Just(l), weights(l * l), unit(l), unit(l)))
}

proptest! {
    #[test]
    fn fidelity_is_symmetric_in_the_spread(q in quad(), perm in 0usize..6) {
        let [p0, p1, p2, p3] = q.p();
        let orders = [[p1, p2, p3], [p1, p3, p2], [p2, p1, p3], [p2, p3, p1], [p3, p1, p2], [p3, p2, p1]];
        let [a, b, c] = orders[perm];
        prop_assert!((fidelity([p0, a, b, c]) - fidelity(q.p())).abs() < 1e-12);
    }

    #[test]
    fn evening_out_the_spread_never_helps(q in quad(), i in 1usize..4, j in 1usize..4, t in 0.0f64..=1.0) {
        prop_assume!(i != j);
        let mut p = q.p();
        let (hi, lo) = if p[i] >= p[j] { (i, j) } else { (j, i) };
        let moved = t * (p[hi] - p[lo]) / 2.0;
        let before = fidelity(p);
        p[hi] -= moved;
        p[lo] += moved;
        prop_assert!(fidelity(p) <= before + 1e-12);
    }

    #[test]
    fn worst_case_is_the_floor(q in quad()) {
        let floor = solve_fidelity(&ScatteringQuad::worst_case(q.p0()).unwrap()).unwrap().fidelity;
        let f = solve_fidelity(&q).unwrap().fidelity;
        prop_assert!(f >= floor - 1e-12);
        prop_assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn solution_pulses_attain_the_fidelity(q in quad()) {
        let s = solve_fidelity(&q).unwrap();
        let c = q.to_scattering();
        let achieved = pulse_fidelity(&c, &s.precoder, &s.equalizer).unwrap();
        prop_assert!((achieved - s.fidelity).abs() < 1e-12);
        let (x, y) = (Density::new(bloch_to_matrix(&s.x_opt)).unwrap(), Density::new(bloch_to_matrix(&s.y_opt)).unwrap());
        prop_assert!((channel_fidelity(&c, &x, &y).unwrap() - s.fidelity).abs() < 1e-12);
    }

    #[test]
    fn no_pulse_pair_beats_the_closed_form(q in quad(), gamma in unit(2), g in unit(2)) {
        let f = solve_fidelity(&q).unwrap().fidelity;
        prop_assert!(pulse_fidelity(&q.to_scattering(), &gamma, &g).unwrap() <= f + 1e-12);
    }

    #[test]
    fn bloch_manifold_is_the_rank_one_projectors(x in prop::array::uniform4(-1.5f64..1.5)) {
        let on = Bloch::from_components(x);
        let m = bloch_to_matrix(&on);
        let eig = hermitian_eigensystem(&m).unwrap();
        let projector = (eig.values[0]).abs() < 1e-9 && (eig.values[1] - 1.0).abs() < 1e-9;
        prop_assert_eq!(is_on_bloch_manifold(&on), projector);

        let r = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
        prop_assume!(r > 1e-3);
        let snapped = Bloch::new(1.0, [x[1] / r, x[2] / r, x[3] / r]);
        prop_assert!(is_on_bloch_manifold(&snapped));
        let p = bloch_to_matrix(&snapped);
        prop_assert!((&p * &p).max_abs_diff(&p) < 1e-12);
        prop_assert!((p.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adjoint_pairs_with_the_map(
        (l, w, x, y) in (1usize..=5).prop_flat_map(|l| (Just(l), weights(l * l), hermitian(l), hermitian(l))),
    ) {
        let c = Scattering::new(l, w).unwrap();
        let lhs = apply_a(&c, &x).unwrap().trace_product(&y);
        let rhs = x.trace_product(&apply_adjoint_a(&c, &y).unwrap());
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn trace_and_inner_product_forms_agree((l, w, gamma, g) in pulses_and_channel()) {
        let c = Scattering::new(l, w).unwrap();
        let trace = channel_fidelity(&c, &Density::from_pulse(&gamma), &Density::from_pulse(&g)).unwrap();
        let inner = pulse_fidelity(&c, &gamma, &g).unwrap();
        prop_assert!((trace - inner).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&trace));
    }

    #[test]
    fn sinr_does_not_depend_on_the_slot(
        q in quad(), gamma in unit(2), g in unit(2), partner in 1usize..4, slot in 0usize..4,
    ) {
        let c = q.to_scattering();
        let mu = [ShiftIndex::new(1, 0), ShiftIndex::new(1, 1), ShiftIndex::new(0, 1)][partner - 1];
        let nu = ShiftIndex::new(slot / 2, slot % 2);
        let s = shift_operator::<f64>(2, nu);
        let scheme = Scheme::two_point(2, mu).unwrap();
        let noise = Noise::new(0.1).unwrap();
        let base = sinr(&c, &Density::from_pulse(&gamma), &Density::from_pulse(&g), &scheme, noise).unwrap();
        let moved_gamma = Density::new(gamma.projector().conjugate_by(&s).hermitian_part()).unwrap();
        let moved_g = Density::new(g.projector().conjugate_by(&s).hermitian_part()).unwrap();
        let moved = sinr(&c, &moved_gamma, &moved_g, &scheme, noise).unwrap();
        prop_assert!((base - moved).abs() < 1e-12 * base.max(1.0));
    }
}

#[test]
fn single_precision_agrees_with_double() {
    let p = [0.4f32, 0.3, 0.2, 0.1];
    let s32 = solve_fidelity(&ScatteringQuad::<f32>::new(p).unwrap()).unwrap();
    let s64 = solve_fidelity(&Quad::new([0.4, 0.3, 0.2, 0.1]).unwrap()).unwrap();
    assert_eq!(s32.n_star, s64.n_star);
    assert!((f64::from(s32.fidelity) - s64.fidelity).abs() < 1e-6);
    let c = ScatteringQuad::<f32>::new(p).unwrap().to_scattering();
    let achieved = pulse_fidelity(&c, &s32.precoder, &s32.equalizer).unwrap();
    assert!((achieved - s32.fidelity).abs() < 1e-5);
}
