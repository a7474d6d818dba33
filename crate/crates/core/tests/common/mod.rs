#![allow(dead_code)]

use dsm_core::SymTensor;
use proptest::prelude::*;

/// Number of eigenvalues of `a` strictly greater than `x`, from the signs of the
/// LDLᵀ pivots of `a - x I` (Sylvester's law of inertia).
pub fn count_above(a: &[[f64; 3]; 3], x: f64) -> usize {
    let tiny = 1e-300;
    let nz = |d: f64| if d == 0.0 { tiny } else { d };
    let d1 = nz(a[0][0] - x);
    let l21 = a[1][0] / d1;
    let l31 = a[2][0] / d1;
    let d2 = nz(a[1][1] - x - l21 * a[1][0]);
    let l32 = (a[2][1] - l31 * a[1][0]) / d2;
    let d3 = nz(a[2][2] - x - l31 * a[2][0] - l32 * l32 * d2);
    [d1, d2, d3].iter().filter(|d| **d > 0.0).count()
}

/// Largest eigenvalue by bisection on the inertia count.
pub fn oracle_max_eigenvalue(t: &SymTensor<f64>) -> f64 {
    let a = t.to_matrix();
    let bound = (0..3).map(|i| (0..3).map(|j| a[i][j].abs()).sum::<f64>()).fold(0.0, f64::max) + 1e-300;
    let (mut lo, mut hi) = (-bound - 1.0, bound + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if count_above(&a, mid) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn rotation_from_quaternion(q: [f64; 4]) -> [[f64; 3]; 3] {
    let n = (q.iter().map(|x| x * x).sum::<f64>()).sqrt();
    let [w, x, y, z] = q.map(|c| c / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

/// `R diag(l) Rᵀ`.
pub fn rotated_diag(r: &[[f64; 3]; 3], l: [f64; 3]) -> SymTensor<f64> {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| r[i][k] * l[k] * r[j][k]).sum();
        }
    }
    SymTensor::from_matrix(&m)
}

prop_compose! {
    pub fn arb_tensor(scale: f64)(c in proptest::array::uniform6(-1.0f64..1.0)) -> SymTensor<f64> {
        SymTensor::from_array(c.map(|x| x * scale))
    }
}

prop_compose! {
    pub fn arb_quaternion()(q in proptest::array::uniform4(-1.0f64..1.0)
        .prop_filter("non-degenerate", |q| q.iter().map(|x| x * x).sum::<f64>() > 1e-3)) -> [f64; 4] {
        q
    }
}

/// Tensors with a prescribed eigenvalue multiplicity pattern: 0 = distinct,
/// 1 = two equal, 2 = all equal.
pub fn arb_degenerate_tensor() -> impl Strategy<Value = SymTensor<f64>> {
    (arb_quaternion(), proptest::array::uniform3(-10.0f64..10.0), 0usize..3).prop_map(|(q, mut l, pattern)| {
        match pattern {
            1 => l[1] = l[0],
            2 => {
                l[1] = l[0];
                l[2] = l[0];
            }
            _ => {}
        }
        rotated_diag(&rotation_from_quaternion(q), l)
    })
}
