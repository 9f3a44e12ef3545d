//! Small dense linear-algebra helpers over `Complex64`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;

/// A vector in the Cartan–Weyl coordinates of a Lie algebra.
pub type GVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Binomial coefficient, zero whenever `k < 0` or `k > n` (including negative `n`).
pub fn binom(n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc as f64
}

/// Largest entry modulus of a complex matrix or vector.
pub trait MaxNorm {
    fn max_norm(&self) -> f64;
}

impl<R: nalgebra::Dim, C: nalgebra::Dim, S: nalgebra::RawStorage<C64, R, C>> MaxNorm
    for nalgebra::Matrix<C64, R, C, S>
{
    fn max_norm(&self) -> f64 {
        self.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

pub fn max_abs_vec(v: &DVector<C64>) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Left pseudo-inverse `(Mᴴ M)⁻¹ Mᴴ` of a matrix with full column rank.
pub fn left_pseudo_inverse(m: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    let mh = m.adjoint();
    let gram = &mh * m;
    gram.try_inverse().map(|g| g * mh)
}

/// Orthonormal basis of the kernel of `m`, using singular values below `tol`.
pub fn null_space(m: &DMatrix<C64>, tol: f64) -> Vec<DVector<C64>> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    // Pad to at least square so the SVD returns a full right-singular basis.
    let rows = m.nrows().max(cols);
    let mut padded = DMatrix::<C64>::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let scale = svd.singular_values.iter().cloned().fold(1.0, f64::max);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= tol * scale)
        .map(|(i, _)| v_t.row(i).adjoint().into_owned())
        .collect()
}

/// Column rank of `m` with relative singular-value cutoff `tol`.
pub fn rank(m: &DMatrix<C64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let scale = sv.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * scale).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), 10.0);
        assert_eq!(binom(0, 0), 1.0);
        assert_eq!(binom(-1, 0), 0.0);
        assert_eq!(binom(3, 4), 0.0);
        assert_eq!(binom(40, 20), 137846528820.0);
    }

    #[test]
    fn kernel_of_wide_matrix() {
        let m = DMatrix::from_row_slice(1, 3, &[c(1.0), c(1.0), c(0.0)]);
        let ker = null_space(&m, 1e-12);
        assert_eq!(ker.len(), 2);
        for v in ker {
            assert!((&m * v).norm() < 1e-12);
        }
    }
}
