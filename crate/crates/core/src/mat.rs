//! Dense complex-matrix helpers: Kronecker products, column-stacking
//! vectorisation, Hermitian eigenvalues, and entrywise distances.
//!
//! Conventions used throughout the crate:
//! * matrices are `nalgebra::DMatrix<Complex64>`;
//! * `vec(M)` stacks columns, so `vec(M)[d*j + i] = M[(i, j)]` and
//!   `vec(A X B) = (B^T (x) A) vec(X)`;
//! * Kronecker products follow the standard convention
//!   `(A (x) B)[(i*p + k, j*q + l)] = A[(i, j)] * B[(k, l)]`.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Column-stacking vectorisation. `nalgebra` stores matrices column-major, so
/// this is a straight copy of the internal buffer.
pub fn vectorize(m: &CMat) -> Vec<Complex64> {
    m.as_slice().to_vec()
}

/// Inverse of [`vectorize`] for a square `d x d` matrix.
pub fn unvectorize(v: &[Complex64], d: usize) -> CMat {
    assert_eq!(v.len(), d * d, "unvectorize: length must be d^2");
    CMat::from_column_slice(d, d, v)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise modulus of `a - b`; the channel-equality metric.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff: shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// Eigenvalues of a (numerically) Hermitian matrix, ascending. The input is
/// symmetrised first so that O(1e-14) asymmetry from arithmetic noise cannot
/// leak imaginary parts into the spectrum.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    let eig = h.symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Smallest eigenvalue of a Hermitian matrix; the positivity diagnostic.
pub fn min_hermitian_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m)[0]
}

/// Inverse square root of a Hermitian positive-definite matrix.
pub fn hermitian_inv_sqrt(m: &CMat) -> CMat {
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    let eig = h.symmetric_eigen();
    let d = m.nrows();
    let mut out = CMat::zeros(d, d);
    for k in 0..d {
        let lam = eig.eigenvalues[k];
        assert!(lam > 0.0, "hermitian_inv_sqrt: matrix not positive definite");
        let v = eig.eigenvectors.column(k);
        let scale = Complex64::new(1.0 / lam.sqrt(), 0.0);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += scale * v[i] * v[j].conj();
            }
        }
    }
    out
}

/// `Tr(A B)` computed entrywise in O(d^2).
pub fn trace_product(a: &CMat, b: &CMat) -> Complex64 {
    assert_eq!(a.ncols(), b.nrows(), "trace_product: shape mismatch");
    let mut acc = C_ZERO;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vectorize_is_column_stacking() {
        // M = [[1, 3], [2, 4]] -> vec(M) = (1, 2, 3, 4)
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(3.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        let v = vectorize(&m);
        assert_eq!(v, vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(unvectorize(&v, 2), m);
    }

    #[test]
    fn kron_standard_convention() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let b = identity(2);
        let k = kron(&a, &b);
        assert_eq!(k.nrows(), 4);
        assert_eq!(k[(0, 2)], c(2.0, 0.0)); // A[0,1] * B[0,0]
        assert_eq!(k[(1, 3)], c(2.0, 0.0)); // A[0,1] * B[1,1]
        assert_eq!(k[(0, 3)], c(0.0, 0.0)); // A[0,1] * B[0,1]
    }

    #[test]
    fn vec_of_sandwich_matches_kron_identity() {
        // vec(A X B) = (B^T (x) A) vec(X) on a random-ish instance.
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.0, -1.0), c(2.0, 0.0), c(1.0, 1.0)]);
        let b = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(1.0, -0.5), c(0.0, 2.0), c(1.0, 0.0)]);
        let x = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)]);
        let lhs = vectorize(&(&a * &x * &b));
        let op = kron(&b.transpose(), &a);
        let v = nalgebra::DVector::from_vec(vectorize(&x));
        let rhs = &op * v;
        for (l, r) in lhs.iter().zip(rhs.iter()) {
            assert!((l - r).norm() < 1e-12);
        }
    }

    #[test]
    fn hermitian_eigenvalues_of_pauli_x() {
        let x = CMat::from_row_slice(2, 2, &[C_ZERO, C_ONE, C_ONE, C_ZERO]);
        let ev = hermitian_eigenvalues(&x);
        assert!((ev[0] + 1.0).abs() < 1e-12);
        assert!((ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inv_sqrt_squares_to_inverse() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.5, 0.5), c(0.5, -0.5), c(3.0, 0.0)]);
        let s = hermitian_inv_sqrt(&m);
        let prod = &s * &m * &s;
        assert!(max_abs_diff(&prod, &identity(2)) < 1e-10);
    }

    #[test]
    fn trace_product_matches_full_multiply() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 2.0), c(0.0, 1.0), c(3.0, 0.0), c(1.0, -1.0)]);
        let b = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), c(2.0, 0.0), c(1.0, 1.0), c(0.5, 0.0)]);
        let direct = (&a * &b).trace();
        assert!((trace_product(&a, &b) - direct).norm() < 1e-13);
    }
}
