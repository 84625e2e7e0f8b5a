use num_complex::Complex;
use rand::Rng;

use super::{memory_budget, NumericError};
use crate::scalar::Real;

/// A complex tensor with every extent equal to `n`, stored row-major (the
/// first index is the most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor<T: Real> {
    pub n: usize,
    pub dims: Vec<usize>,
    pub data: Vec<Complex<T>>,
    pub provenance: String,
}

impl<T: Real> DenseTensor<T> {
    pub fn degree(&self) -> usize {
        self.dims.len()
    }

    pub fn from_data(n: usize, degree: usize, data: Vec<Complex<T>>) -> Result<Self, NumericError> {
        let want = checked_pow(n, degree)?;
        if data.len() != want {
            return Err(NumericError::DimensionMismatch(format!(
                "{} entries for a degree-{degree} tensor with N = {n}",
                data.len()
            )));
        }
        Ok(Self {
            n,
            dims: vec![n; degree],
            data,
            provenance: "explicit".into(),
        })
    }
}

pub(crate) fn checked_pow(n: usize, e: usize) -> Result<usize, NumericError> {
    n.checked_pow(e as u32)
        .ok_or_else(|| NumericError::MemoryBudget { bytes: u128::MAX, budget: memory_budget() })
}

pub(crate) fn check_bytes<T: Real>(entries: usize) -> Result<(), NumericError> {
    let bytes = entries as u128 * std::mem::size_of::<Complex<T>>() as u128;
    let budget = memory_budget();
    if bytes > budget {
        return Err(NumericError::MemoryBudget { bytes, budget });
    }
    Ok(())
}

/// One complex Gaussian with density `exp(-|z|^2) / pi`.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let s = T::from_f64_lossy(std::f64::consts::FRAC_1_SQRT_2);
    Complex::new(T::standard_normal(rng) * s, T::standard_normal(rng) * s)
}

/// `N^d` i.i.d. complex Gaussians with `E|z|^2 = 1`.
pub fn sample_tensor<T: Real, R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<DenseTensor<T>, NumericError> {
    if n == 0 {
        return Err(NumericError::InvalidArgument("N must be at least 1".into()));
    }
    let len = checked_pow(n, d)?;
    check_bytes::<T>(len)?;
    let data = (0..len).map(|_| complex_gaussian(rng)).collect();
    Ok(DenseTensor {
        n,
        dims: vec![n; d],
        data,
        provenance: format!("gaussian N={n} d={d}"),
    })
}

/// Tensor over the paired index `(i, j) -> i * N2 + j` whose entries are
/// products of matching entries of `t1` and `t2`.
pub fn kron_compose<T: Real>(t1: &DenseTensor<T>, t2: &DenseTensor<T>) -> Result<DenseTensor<T>, NumericError> {
    let d = t1.degree();
    if d != t2.degree() {
        return Err(NumericError::DimensionMismatch(format!(
            "degrees {d} and {} differ",
            t2.degree()
        )));
    }
    let (n1, n2) = (t1.n, t2.n);
    let n = n1 * n2;
    let len = checked_pow(n, d)?;
    check_bytes::<T>(len)?;
    let mut data = Vec::with_capacity(len);
    let mut digits = vec![0usize; d];
    for _ in 0..len {
        let (mut a, mut b) = (0, 0);
        for &x in &digits {
            a = a * n1 + x / n2;
            b = b * n2 + x % n2;
        }
        data.push(t1.data[a] * t2.data[b]);
        for pos in (0..d).rev() {
            digits[pos] += 1;
            if digits[pos] < n {
                break;
            }
            digits[pos] = 0;
        }
    }
    Ok(DenseTensor {
        n,
        dims: vec![n; d],
        data,
        provenance: format!("kron({}, {})", t1.provenance, t2.provenance),
    })
}
