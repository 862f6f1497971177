//! Invariants checked over random inputs.

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use phasegate::region;
use phasegate::response::{check_achievable, coefficients_from_phases};
use phasegate::su2::{self, PhaseSequence, Rotation};
use phasegate::synthesis::{extend_negative_target, synthesize, GateRequest, Variant};

fn phases(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-PI..PI, 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn composed_sequences_are_unitary(p in phases(6), theta in -TAU..TAU) {
        let u = su2::compose_sequence(&PhaseSequence::new(p).unwrap(), theta);
        prop_assert!(u.is_unitary(1e-12));
        prop_assert!((u.det().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn response_matches_the_matrix(p in phases(4), theta in -TAU..TAU) {
        let s = PhaseSequence::new(p).unwrap();
        let rc = coefficients_from_phases(&s).unwrap();
        let u = su2::compose_sequence(&s, theta).entries();
        let (a, c) = rc.evaluate(theta);
        prop_assert!((a - u[0][0].re).abs() < 1e-9);
        prop_assert!((c - u[0][1].im).abs() < 1e-9);
        prop_assert!(check_achievable(&rc).achievable);
    }

    #[test]
    fn global_phase_shift_conjugates_by_z(p in phases(4), theta in 0.1..3.0f64, delta in -PI..PI) {
        // shifting every phase is a z rotation frame change: |A| and |B| are unchanged
        let s = PhaseSequence::new(p).unwrap();
        let u = su2::compose_sequence(&s, theta).entries();
        let v = su2::compose_sequence(&s.shifted(delta), theta).entries();
        prop_assert!((u[0][0] - v[0][0]).norm() < 1e-12);
        prop_assert!((u[0][1].norm() - v[0][1].norm()).abs() < 1e-12);
    }

    #[test]
    fn negative_targets_mirror(p in phases(4), theta in 0.1..3.0f64, tt in 0.0..TAU) {
        let s = PhaseSequence::new(p).unwrap();
        let f = su2::fidelity(tt, &su2::compose_sequence(&s, theta)).unwrap();
        let g = su2::fidelity(-tt, &su2::compose_sequence(&extend_negative_target(&s), theta)).unwrap();
        prop_assert!((f - g).abs() < 1e-12);
    }

    #[test]
    fn rotation_matrix_is_a_group_action(phi in -PI..PI, a in -TAU..TAU, b in -TAU..TAU) {
        let ra = su2::rotation_matrix(Rotation::new(phi, a)).unwrap();
        let rb = su2::rotation_matrix(Rotation::new(phi, b)).unwrap();
        let rab = su2::rotation_matrix(Rotation::new(phi, a + b)).unwrap();
        prop_assert!((ra * rb).max_abs_diff(&rab) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn valid_cells_synthesize_and_verify(i in 0usize..3, t0 in 0.05..3.09f64, tt in -4.0 * PI..4.0 * PI) {
        let v = Variant::ALL[i];
        prop_assume!(region::is_valid(v, t0, tt));
        let s = synthesize(&GateRequest::new(t0, tt, v).unwrap()).unwrap();
        prop_assert!(s.verified);
        let f = su2::fidelity(tt, &su2::compose_sequence(&s.phases, t0)).unwrap();
        prop_assert!(f >= 1.0 - 1e-8);
    }

    #[test]
    fn validity_depends_on_the_folded_target(i in 0usize..3, t0 in 0.05..3.09f64, tt in 0.0..TAU) {
        let v = Variant::ALL[i];
        prop_assert_eq!(region::is_valid(v, t0, tt), region::is_valid(v, t0, -tt));
        prop_assert_eq!(region::is_valid(v, t0, tt), region::is_valid(v, t0, tt - 2.0 * TAU));
    }
}
