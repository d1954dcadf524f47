use std::f64::consts::PI;

use proptest::prelude::*;
use qtomo::group::{
    builtin_group, character_from_csv, character_from_tomogram, character_to_csv, discrete_tomograms,
    equivariance_residual, group_from_json, group_to_json, reconstruct_finite, reconstruct_from_tomograms, regular_rep,
    smeared_character, BuiltinGroup,
};
use qtomo::numkernel::{psd_min_eigenvalue, ComplexMatrix};
use qtomo::spin::{
    equivariance_residual as spin_equivariance_residual, moved_axis, pure_state_weights, spin_tomogram, su2_element,
    su2_reconstruct, EulerAngles, SpinAxis,
};
use qtomo::states::{bloch_density, random_density, trace_distance, BlochPoint};

fn groups() -> impl Strategy<Value = BuiltinGroup> {
    prop_oneof![
        Just(BuiltinGroup::PauliQubit),
        Just(BuiltinGroup::Heisenberg { d: 3 }),
        Just(BuiltinGroup::Heisenberg { d: 5 }),
        (3usize..8).prop_map(|n| BuiltinGroup::Dihedral { n }),
        (2usize..8, 1usize..7).prop_map(|(n, k)| BuiltinGroup::Cyclic { n, k: 1 + k % (n - 1).max(1) }),
    ]
}

fn axis() -> impl Strategy<Value = SpinAxis> {
    (prop::array::uniform3(-3.0f64..3.0), 0.05f64..4.0)
        .prop_filter_map("nonzero axis", |(v, c)| SpinAxis::new(v).ok()?.scaled(c).ok())
}

fn euler() -> impl Strategy<Value = EulerAngles> {
    (0.0..2.0 * PI, 0.0..=PI, 0.0..4.0 * PI).prop_map(|(a, b, g)| EulerAngles::new(a, b, g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn finite_group_round_trip(kind in groups(), seed in any::<u64>()) {
        let (_, rep) = builtin_group(kind).unwrap();
        let rho = random_density(rep.dim(), seed).unwrap();
        let back = reconstruct_finite(&smeared_character(&rho, &rep).unwrap(), &rep).unwrap();
        prop_assert!(trace_distance(&rho, &back).unwrap() < 1e-10);
    }

    #[test]
    fn tomograms_are_stochastic_and_invert(kind in groups(), seed in any::<u64>()) {
        let (_, rep) = builtin_group(kind).unwrap();
        let rho = random_density(rep.dim(), seed).unwrap();
        let chi = smeared_character(&rho, &rep).unwrap();
        let tomos = discrete_tomograms(&rho, &rep).unwrap();
        for (t, c) in tomos.iter().zip(&chi.values) {
            prop_assert!((t.total_weight() - 1.0).abs() <= 1e-10);
            prop_assert!(t.atoms.iter().all(|a| (-1e-10..=1.0 + 1e-10).contains(&a.weight)));
            prop_assert!(t.atoms.iter().all(|a| a.location > -PI - 1e-12 && a.location <= PI + 1e-12));
            prop_assert!((character_from_tomogram(t) - c).norm() <= 1e-12);
        }
        let back = reconstruct_from_tomograms(&tomos, &rep).unwrap();
        prop_assert!(trace_distance(&rho, &back).unwrap() < 1e-10);
    }

    #[test]
    fn gram_over_element_subsets_is_psd(kind in groups(), seed in any::<u64>(), picks in prop::collection::vec(any::<prop::sample::Index>(), 8)) {
        let (g, rep) = builtin_group(kind).unwrap();
        let chi = smeared_character(&random_density(rep.dim(), seed).unwrap(), &rep).unwrap();
        let els: Vec<usize> = picks.iter().map(|i| i.index(g.order())).collect();
        let m = ComplexMatrix::from_fn(8, 8, |i, j| chi.values[g.mul(g.inv(els[i]), els[j])]);
        prop_assert!(m.hermitian_residual() < 1e-12);
        prop_assert!(psd_min_eigenvalue(&m.hermitian_part()).unwrap() >= -1e-10);
    }

    #[test]
    fn spin_weights_normalized_and_homogeneous(seed in any::<u64>(), s in axis(), c in 0.05f64..20.0) {
        let rho = random_density(2, seed).unwrap();
        let t = spin_tomogram(&rho, &s).unwrap();
        prop_assert!((t.total_weight() - 1.0).abs() < 1e-12);
        prop_assert!(t.atoms.iter().all(|a| (0.0..=1.0).contains(&a.weight)));
        prop_assert!((t.atoms[1].location - s.norm() / 2.0).abs() < 1e-12);
        let scaled = spin_tomogram(&rho, &s.scaled(c).unwrap()).unwrap();
        for (a, b) in scaled.atoms.iter().zip(&t.atoms) {
            prop_assert!((a.location - c * b.location).abs() < 1e-12 * c.max(1.0));
            prop_assert!((a.weight - b.weight).abs() < 1e-12);
        }
    }

    #[test]
    fn spin_closed_form(theta in 0.0..=PI, phi in 0.0..2.0 * PI, s in axis()) {
        let rho = bloch_density(&BlochPoint::new(1.0, theta, phi).unwrap()).unwrap();
        let t = spin_tomogram(&rho, &s).unwrap();
        let (wm, wp) = pure_state_weights(theta, phi, &s);
        prop_assert!((t.atoms[0].weight - wm).abs() < 1e-12);
        prop_assert!((t.atoms[1].weight - wp).abs() < 1e-12);
    }

    #[test]
    fn spin_equivariance(seed in any::<u64>(), s in axis(), e in euler()) {
        let rho = random_density(2, seed).unwrap();
        let g = su2_element(&e);
        prop_assert!(spin_equivariance_residual(&rho, &s, &g).unwrap() < 1e-12);
        prop_assert!((moved_axis(&s, &g).unwrap().norm() - s.norm()).abs() < 1e-12);
    }
}

#[test]
fn group_equivariance_over_pauli() {
    let (_, rep) = builtin_group(BuiltinGroup::PauliQubit).unwrap();
    for seed in 0..20 {
        assert!(equivariance_residual(&random_density(2, seed).unwrap(), &rep).unwrap() < 1e-12);
    }
}

#[test]
fn regular_character_vanishes_off_identity() {
    let (g, _) = builtin_group(BuiltinGroup::Dihedral { n: 3 }).unwrap();
    let reg = regular_rep(&g).unwrap();
    assert_eq!(reg.dim(), 6);
    let chi = reg.character();
    assert!((chi[g.identity()].re - 6.0).abs() < 1e-12);
    assert!(chi.iter().enumerate().all(|(x, c)| x == g.identity() || c.norm() < 1e-12));
}

#[test]
fn group_json_and_character_csv_round_trip() {
    let (g, rep) = builtin_group(BuiltinGroup::Heisenberg { d: 3 }).unwrap();
    let (g2, reps) = group_from_json(&group_to_json(&g, std::slice::from_ref(&rep)).unwrap()).unwrap();
    assert_eq!(g2.table(), g.table());
    assert_eq!(reps[0].matrices(), rep.matrices());

    let chi = smeared_character(&random_density(3, 2).unwrap(), &rep).unwrap();
    assert_eq!(character_from_csv(&character_to_csv(&chi), g.order()).unwrap(), chi);
}

#[test]
fn su2_round_trip_at_stated_orders() {
    for seed in 0..5 {
        let rho = random_density(2, seed).unwrap();
        let back = su2_reconstruct(|u| rho.matrix().trace_product(u), (32, 32, 64)).unwrap();
        assert!(trace_distance(&rho, &back).unwrap() < 1e-8);
    }
}
