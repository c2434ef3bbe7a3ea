//! Dense complex-matrix helpers shared across the crate.
//!
//! Everything here operates on `nalgebra` dynamic matrices over `Complex64`.
//! The problem sizes are desk scale (a few hundred basis vectors), so dense
//! storage and full decompositions are used throughout.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;

/// Largest entry magnitude; zero for empty matrices.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry magnitude of a vector.
pub fn max_abs_vec(v: &DVector<C64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |M - M^*|` where `*` is the conjugate transpose.
pub fn hermiticity_residual(m: &DMatrix<C64>) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `max |M^2 - I|`.
pub fn involution_residual(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    max_abs(&(m * m - DMatrix::<C64>::identity(n, n)))
}

/// `max |M^* M - I|`.
pub fn unitarity_residual(m: &DMatrix<C64>) -> f64 {
    let n = m.ncols();
    max_abs(&(m.adjoint() * m - DMatrix::<C64>::identity(n, n)))
}

/// n-fold Kronecker power; `n = 0` gives the 1x1 identity.
pub fn kron_power(u: &DMatrix<C64>, n: usize) -> DMatrix<C64> {
    let mut out = DMatrix::<C64>::identity(1, 1);
    for _ in 0..n {
        out = out.kronecker(u);
    }
    out
}

/// Numerical rank: number of singular values above `tol`.
pub fn rank(m: &DMatrix<C64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    m.singular_values().iter().filter(|s| **s > tol).count()
}

/// Uniform complex sample from the square `[-1, 1] x [-1, 1]i`.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<C64> {
    DVector::from_fn(n, |_, _| random_complex(rng))
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| random_complex(rng))
}

/// Unitary `Q` factor of a random complex matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<C64> {
    random_matrix(rng, n, n).qr().q()
}
