mod common;

use common::*;
use dsm_core::tensor::{dot3, norm3};
use dsm_core::{spectral_decompose, tensile_part, tension_compression_split, SymTensor};
use proptest::prelude::*;

fn rel(a: &SymTensor<f64>, b: &SymTensor<f64>) -> f64 {
    (*a - *b).norm() / b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn spectral_invariants(t in prop_oneof![arb_tensor(100.0), arb_degenerate_tensor()]) {
        let s = spectral_decompose(&t).unwrap();
        prop_assert!(s.values[0] >= s.values[1] && s.values[1] >= s.values[2]);
        for i in 0..3 {
            prop_assert!((norm3(&s.vectors[i]) - 1.0).abs() < 1e-12);
            for j in (i + 1)..3 {
                prop_assert!(dot3(&s.vectors[i], &s.vectors[j]).abs() < 1e-10);
            }
        }
        if t.norm() > 1e-12 {
            prop_assert!(rel(&s.reconstruct(), &t) < 1e-9);
        }
        let lmax = oracle_max_eigenvalue(&t);
        prop_assert!((s.values[0] - lmax).abs() <= 1e-10 * t.norm().max(1e-300));
    }

    #[test]
    fn split_identity_and_idempotence(t in prop_oneof![arb_tensor(10.0), arb_degenerate_tensor()]) {
        let (tp, tc) = tension_compression_split(&t).unwrap();
        prop_assert!((tp + tc - t).norm() <= 1e-10 * t.norm().max(1.0));
        let tpp = tensile_part(&tp).unwrap();
        prop_assert!((tpp - tp).norm() <= 1e-10 * t.norm().max(1.0));
        // positive part is positive semidefinite
        let sp = spectral_decompose(&tp).unwrap();
        prop_assert!(sp.values[2] >= -1e-10 * t.norm().max(1.0));
    }

    #[test]
    fn deviator_trace_free_and_recomposes(t in arb_tensor(1e3)) {
        let (p, s) = t.vol_dev_split();
        prop_assert!(s.trace().abs() <= 1e-12 * t.norm());
        let back = SymTensor::identity().scale(p) + s;
        prop_assert!((back - t).norm() <= 1e-13 * t.norm());
    }

    #[test]
    fn von_mises_ignores_hydrostatic_shift(t in arb_tensor(10.0), a in -50.0f64..50.0) {
        let q0 = t.invariants().q;
        let q1 = (t + SymTensor::identity().scale(a)).invariants().q;
        prop_assert!(q0 >= 0.0);
        prop_assert!((q0 - q1).abs() <= 1e-12 * (q0 + a.abs()).max(1.0));
        let inv = t.invariants();
        let (_, s) = t.vol_dev_split();
        prop_assert!((inv.j2 - 0.5 * s.contract(&s)).abs() <= 1e-12 * inv.j2.max(1e-300));
    }

    #[test]
    fn normal_projection_matches_component_sum(t in arb_tensor(5.0), q in arb_quaternion()) {
        let r = rotation_from_quaternion(q);
        let n = [r[0][0], r[1][0], r[2][0]];
        let m = t.to_matrix();
        let mut sum = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                sum += n[i] * m[i][j] * n[j];
            }
        }
        let got = t.normal_projection(&n).unwrap();
        prop_assert!((got - sum).abs() < 1e-13 * t.norm().max(1.0));
    }
}

#[test]
fn projection_on_eigenvector_returns_eigenvalue() {
    let t = rotated_diag(&rotation_from_quaternion([0.3, -0.2, 0.8, 0.1]), [4.0, -1.5, 2.0]);
    let s = spectral_decompose(&t).unwrap();
    for i in 0..3 {
        let v = t.normal_projection(&s.vectors[i]).unwrap();
        assert!((v - s.values[i]).abs() < 1e-12);
    }
}

#[test]
fn degenerate_eigenspaces_give_basis_independent_projection() {
    // two equal positive eigenvalues and one negative: P:t = a * (I - m⊗m)
    let r = rotation_from_quaternion([0.9, 0.1, -0.3, 0.2]);
    let a = 3.0;
    let t = rotated_diag(&r, [a, a, -2.0]);
    let m = [r[0][2], r[1][2], r[2][2]];
    let expected = (SymTensor::identity() - SymTensor::dyad(&m)).scale(a);
    let tp = tensile_part(&t).unwrap();
    assert!((tp - expected).norm() < 1e-12);

    // repeated maximum: the max-principal direction lies in the eigenspace
    let s = spectral_decompose(&t).unwrap();
    assert!((t.normal_projection(&s.max_vector()).unwrap() - a).abs() < 1e-12);
    assert!(dot3(&s.max_vector(), &m).abs() < 1e-10);
}

#[test]
fn ten_thousand_random_split_checks() {
    use rand::{RngExt, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let start = std::time::Instant::now();
    for i in 0..10_000 {
        let t = if i % 3 == 0 {
            let q = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 1.0];
            let l0: f64 = rng.random_range(-5.0..5.0);
            rotated_diag(&rotation_from_quaternion(q), [l0, l0, rng.random_range(-5.0..5.0)])
        } else {
            SymTensor::from_array(std::array::from_fn(|_| rng.random_range(-5.0..5.0)))
        };
        let (tp, tc) = tension_compression_split(&t).unwrap();
        assert!((tp + tc - t).norm() <= 1e-10 * t.norm().max(1.0));
        assert!((tensile_part(&tp).unwrap() - tp).norm() <= 1e-10 * t.norm().max(1.0));
    }
    assert!(start.elapsed().as_secs_f64() < 5.0);
}
