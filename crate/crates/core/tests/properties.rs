use std::f64::consts::FRAC_PI_4;

use belltransfer_core::protocol::{constructive_filter, PaperLayout, StageName};
use belltransfer_core::statevec::{basis_index, basis_label, gates};
use belltransfer_core::sweep::random_input;
use belltransfer_core::*;
use proptest::prelude::*;

fn open_departure() -> impl Strategy<Value = f64> {
    -FRAC_PI_4 + 1e-3..FRAC_PI_4 - 1e-3
}

fn published_regime() -> impl Strategy<Value = f64> {
    -FRAC_PI_4 + 1e-3..=0.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn unitary_operators_conserve_norm(seed in any::<u64>(), da in published_regime(), db in published_regime()) {
        let m = coefficient_products(&paper_channels(&[da, db]).unwrap()).unwrap();
        let v = random_input(6, seed, 0);
        for op in [paper_filter_bipartite(&m).unwrap(), paper_permutation(2).unwrap(), constructive_filter(&m, &[0, 2, 4, 6], 64).unwrap()] {
            prop_assert!(verify_unitary(&op) <= 1e-12);
            let out = v.state().apply_operator(&op).unwrap();
            prop_assert!((out.norm_tracked() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn projector_outcomes_sum_to_one(seed in any::<u64>(), qubits in proptest::sample::subsequence(vec![0usize, 1, 2, 3, 4], 1..=5)) {
        let v = random_input(5, seed, 1);
        let total: f64 = ProjectorSpec::outcomes(&qubits).unwrap().iter()
            .map(|p| v.state().project(p).unwrap().probability)
            .sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn tensor_is_associative(s in any::<u64>()) {
        let a = random_input(1, s, 0).state().clone();
        let b = random_input(2, s, 1).state().clone();
        let c = random_input(1, s, 2).state().clone();
        let left = tensor(&[a.clone(), tensor(&[b.clone(), c.clone()]).unwrap()]).unwrap();
        let right = tensor(&[tensor(&[a, b]).unwrap(), c]).unwrap();
        for (x, y) in left.amplitudes().iter().zip(right.amplitudes()) {
            prop_assert!((x - y).norm() <= 1e-15);
        }
    }

    #[test]
    fn coefficients_are_normalized(d in -FRAC_PI_4..=FRAC_PI_4) {
        let ch = ChannelSpec::new(Parity::Correlated, Sign::Plus, d).unwrap();
        prop_assert!((ch.a().powi(2) + ch.b().powi(2) - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn products_square_sum_to_one(da in open_departure(), db in open_departure(), dc in open_departure()) {
        let m = coefficient_products(&paper_channels(&[da, db, dc]).unwrap()).unwrap();
        let total: f64 = m.values.iter().map(|v| v * v).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn probability_is_even_and_bounded(da in open_departure(), db in open_departure()) {
        let p = |a: f64, b: f64| analytic_success_probability(&paper_channels(&[a, b]).unwrap()).unwrap();
        prop_assert!(p(da, db) <= 1.0 + 1e-15);
        prop_assert!((p(da, db) - p(-da, db)).abs() <= 1e-12);
        prop_assert!((p(da, db) - p(da, -db)).abs() <= 1e-12);
    }

    #[test]
    fn probability_degrades_with_departure(x in 0.0..FRAC_PI_4 - 1e-3, y in 0.0..FRAC_PI_4 - 1e-3, db in open_departure()) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let p = |a: f64| analytic_success_probability(&paper_channels(&[a, db]).unwrap()).unwrap();
        prop_assert!(p(hi) <= p(lo) + 1e-15);
    }

    #[test]
    fn sign_flip_leaves_probabilities_unchanged(da in open_departure(), db in open_departure(), seed in any::<u64>()) {
        let input = random_input(2, seed, 0);
        let plain = paper_channels(&[da, db]).unwrap();
        let flipped: Vec<ChannelSpec> = plain.iter()
            .map(|c| ChannelSpec::new(c.parity(), Sign::Minus, c.departure()).unwrap())
            .collect();
        let r1 = run_full_protocol(&input, &plain).unwrap();
        let r2 = run_full_protocol(&input, &flipped).unwrap();
        prop_assert!((r1.p_analytic - r2.p_analytic).abs() <= 1e-15);
        for (b1, b2) in r1.branches.iter().zip(&r2.branches) {
            prop_assert!((b1.branch_probability - b2.branch_probability).abs() <= 1e-12);
            prop_assert!((b1.measurement_probability - b2.measurement_probability).abs() <= 1e-12);
        }
    }

    #[test]
    fn filter_restores_least_coefficient(seed in any::<u64>(), da in open_departure(), db in open_departure(), dc in open_departure()) {
        // F applied to m_i c_i on the targets yields m_least c_i there.
        let ch = paper_channels(&[da, db, dc]).unwrap();
        let m = coefficient_products(&ch).unwrap();
        let layout = PaperLayout::for_k(3).unwrap();
        let targets: Vec<usize> = (0..8).map(|x| layout.target(x)).collect();
        let f = constructive_filter(&m, &targets, 512).unwrap();
        prop_assert!(verify_unitary(&f) <= 1e-12);
        let input = random_input(3, seed, 0);
        let mut v = vec![Complex64::new(0.0, 0.0); 512];
        for (i, &t) in targets.iter().enumerate() {
            v[t] = input.coefficients()[i] * m.values[i];
        }
        let out = f.apply(&v).unwrap();
        for (i, &t) in targets.iter().enumerate() {
            prop_assert!((out[t] - input.coefficients()[i] * m.least_value).norm() <= 1e-12);
        }
    }

    #[test]
    fn trace_and_full_protocol_agree(seed in any::<u64>(), da in published_regime(), db in published_regime()) {
        let ch = paper_channels(&[da, db]).unwrap();
        let input = random_input(2, seed, 0);
        let t = paper_trace(&input, &ch).unwrap();
        let r = run_full_protocol(&input, &ch).unwrap();
        let first = r.branches[0].receiver_state.as_ref().unwrap();
        prop_assert!(protocol::receiver_states_agree(&t.receiver_state, first, 1e-12));
        prop_assert!((t.total_probability - r.p_simulated).abs() <= 1e-10);
        prop_assert!(t.stage(StageName::PostU).state.support(0.0).iter().all(|i| [0, 2, 4, 6].contains(i)));
    }

    #[test]
    fn full_protocol_conserves_mass(seed in any::<u64>(), da in open_departure(), db in open_departure()) {
        let r = run_full_protocol(&random_input(2, seed, 0), &paper_channels(&[da, db]).unwrap()).unwrap();
        prop_assert!((r.measurement_total() - 1.0).abs() <= 1e-12);
        prop_assert!(r.p_simulated <= 1.0 + 1e-12);
        prop_assert!(r.violations(&protocol::Tolerances::default()).is_empty());
    }
}

#[test]
fn label_round_trip_up_to_nine_qubits() {
    for n in 1..=9 {
        for i in 0..1usize << n {
            assert_eq!(basis_index(&basis_label(i, n)).unwrap(), i);
        }
    }
}

#[test]
fn permutation_mappings_are_involutions() {
    for k in [2, 3] {
        let u = paper_permutation(k).unwrap();
        let v = random_input(3 * k, 5, 0);
        let twice = v.state().apply_operator(&u).unwrap().apply_operator(&u).unwrap();
        assert_eq!(twice.amplitudes(), v.coefficients());
    }
}

#[test]
fn permutation_preserves_amplitude_multiset() {
    let u = paper_permutation(2).unwrap();
    let v = random_input(6, 77, 0);
    let out = v.state().apply_operator(&u).unwrap();
    let key = |c: &Complex64| (c.re.to_bits(), c.im.to_bits());
    let mut a: Vec<_> = v.coefficients().iter().map(key).collect();
    let mut b: Vec<_> = out.amplitudes().iter().map(key).collect();
    a.sort_unstable();
    b.sort_unstable();
    assert_eq!(a, b);
}

#[test]
fn bell_measurement_is_complete_on_random_states() {
    for s in 0..100 {
        let v = random_input(6, s, 0);
        let total: f64 = bell_measure_pair(v.state(), (1, 4))
            .unwrap()
            .iter()
            .map(|b| b.probability)
            .sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn gates_preserve_norm() {
    let v = random_input(4, 1, 0);
    let out = v
        .state()
        .apply_gate(&gates::cnot(), &[3, 1])
        .unwrap()
        .apply_gate(&gates::bell_operation(), &[2])
        .unwrap();
    assert!((out.norm_tracked() - 1.0).abs() < 1e-14);
}
