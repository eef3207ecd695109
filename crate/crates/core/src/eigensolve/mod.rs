//! Hermitian generalized eigensolvers for `K x = λ M x`.
//!
//! Two paths share one result type:
//!
//! - [`eig_dense_hermitian_generalized`]: Cholesky reduction, Householder
//!   tridiagonalisation and implicit QL. All pairs, for small systems.
//! - [`eig_sparse_shift_invert`]: Lanczos on `(K − σM)⁻¹M` in the `M` inner
//!   product with full reorthogonalisation, using an RCM-ordered banded LU
//!   of `K − σM`.
//!
//! Both work over `f64` and `Complex64` through [`Scalar`].

mod dense;
mod lanczos;
mod sparse;

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rand::Rng;

pub use dense::{
    count_eigenvalues_below, eig_dense_hermitian_generalized, tridiagonal_eigen, DenseMatrix,
};
pub use lanczos::{
    eig_sparse_shift_invert, eig_sparse_with, ShiftInvertOptions, MAX_SHIFT_RETRIES,
};
pub use sparse::{reverse_cuthill_mckee, BandedLu, CsrMatrix, SparseLu, TripletBuilder};

/// Field of matrix entries: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + Default
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    const IS_COMPLEX: bool;
    fn from_re(x: f64) -> Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn abs2(self) -> f64;
    fn abs(self) -> f64 {
        self.abs2().sqrt()
    }
    fn scale(self, s: f64) -> Self;
    /// Unit-modulus phase `z/|z|`, or one at zero.
    fn phase(self) -> Self;
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;
    fn from_re(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn abs2(self) -> f64 {
        self * self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn phase(self) -> Self {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen_range(-1.0..1.0)
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;
    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn phase(self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self / n
        }
    }
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }
}

/// `xᴴ y`.
pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter()
        .zip(y)
        .fold(T::default(), |acc, (&a, &b)| acc + a.conj() * b)
}

pub fn norm2<T: Scalar>(x: &[T]) -> f64 {
    x.iter().map(|v| v.abs2()).sum::<f64>().sqrt()
}

/// Eigenpairs of a Hermitian pencil, ascending.
#[derive(Debug, Clone)]
pub struct EigenResult<T> {
    pub values: Vec<f64>,
    /// `M`-orthonormal eigenvectors, one per value.
    pub vectors: Option<Vec<Vec<T>>>,
    /// `‖K x − λ M x‖ / ‖x‖` on the original pencil.
    pub residual_norms: Vec<f64>,
    /// `‖K x − λ M x‖ / ((‖K‖ + |λ|‖M‖)‖x‖)`, the quantity tested against `tol`.
    pub backward_errors: Vec<f64>,
    /// Lanczos steps (sparse) or QL sweeps (dense).
    pub iterations: usize,
    /// Start-vector seed of the sparse path; zero for the dense path.
    pub seed: u64,
    /// Shift actually factorised (after jitter retries).
    pub sigma: f64,
    /// True for values outside the requested window, if one was given.
    pub outside_window: Vec<bool>,
}

impl<T> EigenResult<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values flagged inside the window, in ascending order.
    pub fn values_in_window(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.outside_window)
            .filter(|(_, &o)| !o)
            .map(|(&v, _)| v)
            .collect()
    }
}

/// Residuals of pairs on the original pencil.
pub(crate) fn pencil_residuals<T: Scalar>(
    k: &CsrMatrix<T>,
    m: &CsrMatrix<T>,
    values: &[f64],
    vectors: &[Vec<T>],
) -> (Vec<f64>, Vec<f64>) {
    let (nk, nm) = (k.norm_inf(), m.norm_inf());
    values
        .iter()
        .zip(vectors)
        .map(|(&lam, x)| {
            let kx = k.matvec(x);
            let mx = m.matvec(x);
            let r: f64 = kx
                .iter()
                .zip(&mx)
                .map(|(&a, &b)| (a - b.scale(lam)).abs2())
                .sum::<f64>()
                .sqrt();
            let nx = norm2(x);
            (r / nx, r / ((nk + lam.abs() * nm) * nx))
        })
        .unzip()
}
