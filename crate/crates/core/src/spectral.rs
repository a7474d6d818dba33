//! Eigen-decomposition of symmetric 3x3 tensors and the tension/compression split.
//!
//! Eigenvalues come from the trigonometric closed form. The eigenvector of the
//! best separated eigenvalue is taken from the null space of `A - λI` (largest
//! row cross product), the remaining pair from an exact rotation in its
//! orthogonal complement, so the triad is orthonormal even for clustered
//! eigenvalues. Cyclic Jacobi takes over when the closed form degenerates.

use crate::error::{Error, Result};
use crate::num::{heaviside, Real};
use crate::tensor::{cross3, dot3, norm3, SymTensor, Vec3};

/// Below this Frobenius norm a tensor is treated as exactly zero.
const ZERO_TENSOR_NORM: f64 = 1e-14;
/// Relative threshold on the closed-form discriminant below which Jacobi is used.
const DEGENERATE_REL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Principal values sorted descending with matching orthonormal eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectral<T> {
    pub values: [T; 3],
    pub vectors: [Vec3<T>; 3],
}

impl<T: Real> Spectral<T> {
    pub fn reconstruct(&self) -> SymTensor<T> {
        (0..3).fold(SymTensor::zero(), |acc, i| acc + SymTensor::dyad(&self.vectors[i]).scale(self.values[i]))
    }

    pub fn max_value(&self) -> T {
        self.values[0]
    }

    pub fn max_vector(&self) -> Vec3<T> {
        self.vectors[0]
    }

    /// `Σ H(λᵢ) λᵢ nᵢ⊗nᵢ`.
    pub fn tensile_part(&self) -> SymTensor<T> {
        (0..3).fold(SymTensor::zero(), |acc, i| {
            let w = heaviside(self.values[i]) * self.values[i];
            acc + SymTensor::dyad(&self.vectors[i]).scale(w)
        })
    }

    fn axes(values: [T; 3]) -> Self {
        let (o, z) = (T::one(), T::zero());
        let mut s = Self { values, vectors: [[o, z, z], [z, o, z], [z, z, o]] };
        s.sort();
        s
    }

    fn sort(&mut self) {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| self.values[b].partial_cmp(&self.values[a]).unwrap_or(std::cmp::Ordering::Equal));
        let (v, n) = (self.values, self.vectors);
        for (k, &i) in idx.iter().enumerate() {
            self.values[k] = v[i];
            self.vectors[k] = n[i];
        }
    }
}

/// Flips `v` so that its largest-magnitude component is positive.
fn canonical_sign<T: Real>(v: Vec3<T>) -> Vec3<T> {
    let mut imax = 0;
    for i in 1..3 {
        if v[i].abs() > v[imax].abs() {
            imax = i;
        }
    }
    if v[imax] < T::zero() {
        [-v[0], -v[1], -v[2]]
    } else {
        v
    }
}

fn normalize<T: Real>(v: Vec3<T>) -> Vec3<T> {
    let n = norm3(&v);
    [v[0] / n, v[1] / n, v[2] / n]
}

fn mat_vec<T: Real>(m: &[[T; 3]; 3], v: &Vec3<T>) -> Vec3<T> {
    [dot3(&m[0], v), dot3(&m[1], v), dot3(&m[2], v)]
}

/// Any unit vector orthogonal to the unit vector `w`.
fn orthogonal_unit<T: Real>(w: &Vec3<T>) -> Vec3<T> {
    if w[0].abs() > w[1].abs() {
        normalize([-w[2], T::zero(), w[0]])
    } else {
        normalize([T::zero(), w[2], -w[1]])
    }
}

pub fn spectral_decompose<T: Real>(t: &SymTensor<T>) -> Result<Spectral<T>> {
    if !t.is_finite() {
        return Err(Error::InvalidInput("tensor has non-finite components".into()));
    }
    if t.norm() < T::lit(ZERO_TENSOR_NORM) {
        return Ok(Spectral::axes([T::zero(); 3]));
    }
    let scale = t.max_abs_component();
    let a = t.scale(T::one() / scale);

    let (mean, b) = a.vol_dev_split();
    let p2 = b.contract(&b);
    let p = (p2 / T::lit(6.0)).sqrt();
    if p <= T::lit(DEGENERATE_REL) {
        // Isotropic within resolution; any triad is an eigenbasis.
        let v = mean * scale;
        return Ok(Spectral::axes([v, v, v]));
    }

    let m = a.to_matrix();
    let mut s = match closed_form(&m, mean, &b, p) {
        Some(s) => s,
        None => jacobi(m),
    };
    for i in 0..3 {
        s.values[i] = s.values[i] * scale;
        s.vectors[i] = canonical_sign(s.vectors[i]);
    }
    s.sort();
    Ok(s)
}

fn closed_form<T: Real>(m: &[[T; 3]; 3], mean: T, dev: &SymTensor<T>, p: T) -> Option<Spectral<T>> {
    let two = T::lit(2.0);
    let bm = dev.scale(T::one() / p).to_matrix();
    let det = bm[0][0] * (bm[1][1] * bm[2][2] - bm[1][2] * bm[2][1])
        - bm[0][1] * (bm[1][0] * bm[2][2] - bm[1][2] * bm[2][0])
        + bm[0][2] * (bm[1][0] * bm[2][1] - bm[1][1] * bm[2][0]);
    let r = (det / two).max(-T::one()).min(T::one());
    let phi = r.acos() / T::lit(3.0);
    let third = two * T::PI() / T::lit(3.0);
    let l1 = mean + two * p * phi.cos();
    let l3 = mean + two * p * (phi + third).cos();
    let l2 = T::lit(3.0) * mean - l1 - l3;

    // Isolated eigenvalue: the one farther from the middle.
    let lambda = if l1 - l2 >= l2 - l3 { l1 } else { l3 };
    let shifted = [
        [m[0][0] - lambda, m[0][1], m[0][2]],
        [m[1][0], m[1][1] - lambda, m[1][2]],
        [m[2][0], m[2][1], m[2][2] - lambda],
    ];
    let candidates =
        [cross3(&shifted[0], &shifted[1]), cross3(&shifted[0], &shifted[2]), cross3(&shifted[1], &shifted[2])];
    let (mut best, mut best_n2) = (candidates[0], dot3(&candidates[0], &candidates[0]));
    for c in &candidates[1..] {
        let n2 = dot3(c, c);
        if n2 > best_n2 {
            best = *c;
            best_n2 = n2;
        }
    }
    // Entries of `m` are O(1) after scaling; a vanishing cross product means the
    // shifted matrix has rank < 2 within roundoff.
    if !(best_n2 > T::lit(DEGENERATE_REL)) {
        return None;
    }
    let w = normalize(best);

    // Complete the basis and diagonalize the 2x2 block in the complement.
    let u = orthogonal_unit(&w);
    let v = cross3(&w, &u);
    let (au, av) = (mat_vec(m, &u), mat_vec(m, &v));
    let (muu, muv, mvv) = (dot3(&u, &au), dot3(&u, &av), dot3(&v, &av));
    let (c, s) = if muv == T::zero() {
        (T::one(), T::zero())
    } else {
        let theta = (mvv - muu) / (two * muv);
        let tt = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
        let c = T::one() / (tt * tt + T::one()).sqrt();
        (c, tt * c)
    };
    let e1 = normalize([c * u[0] - s * v[0], c * u[1] - s * v[1], c * u[2] - s * v[2]]);
    let e2 = normalize([s * u[0] + c * v[0], s * u[1] + c * v[1], s * u[2] + c * v[2]]);
    let rq = |x: &Vec3<T>| dot3(x, &mat_vec(m, x));
    Some(Spectral { values: [rq(&w), rq(&e1), rq(&e2)], vectors: [w, e1, e2] })
}

/// Cyclic Jacobi iteration on a symmetric 3x3 matrix.
fn jacobi<T: Real>(mut a: [[T; 3]; 3]) -> Spectral<T> {
    let (o, z) = (T::one(), T::zero());
    let mut v = [[o, z, z], [z, o, z], [z, z, o]];
    let two = T::lit(2.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        let diag = a[0][0].abs() + a[1][1].abs() + a[2][2].abs();
        if off <= T::epsilon() * diag.max(T::min_positive_value()) {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q] == z {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (two * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + o).sqrt());
            let c = o / (t * t + o).sqrt();
            let s = t * c;
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let (vkp, vkq) = (row[p], row[q]);
                row[p] = c * vkp - s * vkq;
                row[q] = s * vkp + c * vkq;
            }
        }
    }
    Spectral {
        values: [a[0][0], a[1][1], a[2][2]],
        vectors: [[v[0][0], v[1][0], v[2][0]], [v[0][1], v[1][1], v[2][1]], [v[0][2], v[1][2], v[2][2]]],
    }
}

/// Positive part `P : t` of a tensor.
pub fn tensile_part<T: Real>(t: &SymTensor<T>) -> Result<SymTensor<T>> {
    Ok(spectral_decompose(t)?.tensile_part())
}

/// Tensile and compressive parts; the compressive part is the remainder `t - P : t`.
pub fn tension_compression_split<T: Real>(t: &SymTensor<T>) -> Result<(SymTensor<T>, SymTensor<T>)> {
    let tensile = tensile_part(t)?;
    Ok((tensile, *t - tensile))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_orthonormal(s: &Spectral<f64>) {
        for i in 0..3 {
            assert!((norm3(&s.vectors[i]) - 1.0).abs() < 1e-12);
            for j in (i + 1)..3 {
                assert!(dot3(&s.vectors[i], &s.vectors[j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let s = spectral_decompose(&SymTensor::<f64>::identity()).unwrap();
        for v in s.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert_orthonormal(&s);
    }

    #[test]
    fn diagonal_tensor_sorted_with_axes() {
        let s = spectral_decompose(&SymTensor::diag(3.0_f64, -1.0, 2.0)).unwrap();
        assert_eq!(s.values, [3.0, 2.0, -1.0]);
        assert_eq!(s.vectors[0], [1.0, 0.0, 0.0]);
        assert_eq!(s.vectors[1], [0.0, 0.0, 1.0]);
        assert_eq!(s.vectors[2], [0.0, 1.0, 0.0]);
    }

    #[test]
    fn tiny_tensor_is_zero() {
        let s = spectral_decompose(&SymTensor::new(1e-16_f64, 0.0, 0.0, 3e-16, 0.0, 0.0)).unwrap();
        assert_eq!(s.values, [0.0; 3]);
        assert_eq!(s.vectors[0], [1.0, 0.0, 0.0]);
    }

    #[test]
    fn non_finite_rejected() {
        let t = SymTensor::new(f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(matches!(spectral_decompose(&t), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn tensile_part_zeroes_nonpositive_principals() {
        let tp = tensile_part(&SymTensor::diag(5.0_f64, -2.0, 0.0)).unwrap();
        assert_eq!(tp, SymTensor::diag(5.0, 0.0, 0.0));
        let t = SymTensor::new(4.0_f64, 3.0, 2.0, 0.5, 0.1, -0.2);
        let tp = tensile_part(&t).unwrap();
        assert!((tp - t).norm() < 1e-13);
    }

    #[test]
    fn sign_convention_largest_component_positive() {
        let t = SymTensor::new(1.0_f64, 2.0, 3.0, -0.4, 0.3, -0.9);
        let s = spectral_decompose(&t).unwrap();
        for v in s.vectors {
            let imax = (0..3).max_by(|&a, &b| v[a].abs().partial_cmp(&v[b].abs()).unwrap()).unwrap();
            assert!(v[imax] > 0.0);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let t = SymTensor::new(2.0_f32, -1.0, 0.5, 0.3, 0.0, 0.7);
        let s = spectral_decompose(&t).unwrap();
        let err = (s.reconstruct() - t).norm() / t.norm();
        assert!(err < 1e-5);
    }
}
