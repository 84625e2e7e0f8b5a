//! Scalar abstraction for the numeric layer.
//!
//! Everything dense in this crate is complex-valued with a real component type
//! `T: Real`. Only `f32` and `f64` implement the trait; the dense kernels that
//! need a concrete element type (SVD, matrix products) dispatch through it.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatMut, MatRef, Par};
use num_complex::Complex;
use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::numeric::NumericError;

/// Real component type of the dense complex arithmetic: `f32` or `f64`.
pub trait Real:
    'static
    + Copy
    + Debug
    + Default
    + Display
    + Float
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + Sum
    + for<'x> Sum<&'x Self>
{
    /// Machine-level name, echoed into output metadata.
    const NAME: &'static str;

    /// Singular values of a row-major `rows x cols` matrix, descending.
    fn singular_values(
        rows: usize,
        cols: usize,
        data: &[Complex<Self>],
    ) -> Result<Vec<Self>, NumericError>;

    /// Row-major product of an `m x k` and a `k x n` matrix.
    fn matmul(m: usize, k: usize, n: usize, a: &[Complex<Self>], b: &[Complex<Self>])
        -> Vec<Complex<Self>>;

    /// `A^dagger A` for a row-major `rows x cols` matrix (result is `cols x cols`).
    fn gram(rows: usize, cols: usize, a: &[Complex<Self>]) -> Vec<Complex<Self>>;

    /// One draw from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 converts to every Real")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

macro_rules! impl_real {
    ($t:ty, $name:literal) => {
        impl Real for $t {
            const NAME: &'static str = $name;

            fn singular_values(
                rows: usize,
                cols: usize,
                data: &[Complex<Self>],
            ) -> Result<Vec<Self>, NumericError> {
                if rows == 0 || cols == 0 {
                    return Ok(Vec::new());
                }
                let view = MatRef::from_row_major_slice(data, rows, cols);
                let owned: Mat<Complex<Self>> = view.to_owned();
                let mut s = owned
                    .singular_values()
                    .map_err(|e| NumericError::SvdFailed(format!("{e:?}")))?;
                // faer already sorts; keep the contract explicit for callers.
                s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
                Ok(s)
            }

            fn matmul(
                m: usize,
                k: usize,
                n: usize,
                a: &[Complex<Self>],
                b: &[Complex<Self>],
            ) -> Vec<Complex<Self>> {
                let mut out = vec![Complex::new(0.0, 0.0); m * n];
                if m == 0 || n == 0 {
                    return out;
                }
                let lhs = MatRef::from_row_major_slice(a, m, k);
                let rhs = MatRef::from_row_major_slice(b, k, n);
                let dst = MatMut::from_row_major_slice_mut(&mut out, m, n);
                matmul(dst, Accum::Replace, lhs, rhs, Complex::new(1.0, 0.0), Par::Seq);
                out
            }

            fn gram(rows: usize, cols: usize, a: &[Complex<Self>]) -> Vec<Complex<Self>> {
                let mut out = vec![Complex::new(0.0, 0.0); cols * cols];
                if cols == 0 {
                    return out;
                }
                let view = MatRef::from_row_major_slice(a, rows, cols);
                let dst = MatMut::from_row_major_slice_mut(&mut out, cols, cols);
                matmul(
                    dst,
                    Accum::Replace,
                    view.adjoint(),
                    view,
                    Complex::new(1.0, 0.0),
                    Par::Seq,
                );
                out
            }

            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.sample(StandardNormal)
            }
        }
    };
}

impl_real!(f32, "f32");
impl_real!(f64, "f64");
