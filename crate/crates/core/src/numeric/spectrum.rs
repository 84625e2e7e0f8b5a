use num_complex::Complex;
use rand::Rng;
use serde::Serialize;

use super::tensor::{check_bytes, complex_gaussian};
use super::{NumericError, OperatorMatrix};
use crate::scalar::Real;
use crate::wick::Ensemble;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Raw,
    /// Divide by `sqrt(N^(|E| - MC))`.
    K,
}

/// Singular values of one operator, descending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSample<T: Real> {
    pub singular_values: Vec<T>,
    pub normalization: Normalization,
    /// The exact divisor applied (1 for raw spectra).
    pub divisor: f64,
    pub n: usize,
    pub mc: usize,
    pub seed: Option<u64>,
    pub ensemble: Option<Ensemble>,
    pub network: String,
}

impl<T: Real> SpectrumSample<T> {
    /// `N^MC`, the length of the distribution the spectrum is a sample of.
    pub fn qmc(&self) -> usize {
        self.n.pow(self.mc as u32)
    }

    /// `av((K^dagger K)^k) = sum_i sigma_i^(2k) / N^MC`.
    pub fn normalized_moment(&self, k: usize) -> f64 {
        let total: f64 = self.singular_values.iter().map(|s| s.to_f64_lossy().powi(2 * k as i32)).sum();
        total / self.qmc().max(1) as f64
    }
}

/// Full SVD spectrum of `l`.
pub fn spectrum<T: Real>(l: &OperatorMatrix<T>, normalization: Normalization) -> Result<SpectrumSample<T>, NumericError> {
    let raw = T::singular_values(l.rows, l.cols, &l.data)
        .map_err(|e| NumericError::SvdFailed(format!("{e} ({} at N = {})", l.network, l.n)))?;
    let divisor = match normalization {
        Normalization::Raw => 1.0,
        Normalization::K => (l.n as f64).powf((l.edges - l.mc) as f64 / 2.0),
    };
    let d = T::from_f64_lossy(divisor);
    Ok(SpectrumSample {
        singular_values: raw.into_iter().map(|s| s / d).collect(),
        normalization,
        divisor,
        n: l.n,
        mc: l.mc,
        seed: None,
        ensemble: None,
        network: l.network.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Confident,
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub threshold: f64,
    pub sigma_max: f64,
    pub smallest_kept: Option<f64>,
    pub largest_dropped: Option<f64>,
    /// `smallest_kept / largest_dropped`, or `smallest_kept / threshold` when
    /// nothing nonzero was dropped.
    pub gap_ratio: f64,
    /// Largest ratio between consecutive values, and the index of the upper one.
    pub widest_gap: Option<(usize, f64)>,
    pub verdict: Verdict,
}

/// Ratio between kept and dropped values required for a confident verdict.
pub const CONFIDENT_GAP: f64 = 1e6;
/// Default relative floor: values below `1e-10 * sigma_max` are dropped.
pub const DEFAULT_REL_FLOOR: f64 = 1e-10;

/// Counts singular values `>= max(abs_floor, rel_floor * sigma_max)` (zero
/// never counts) and reports how cleanly the threshold separates them.
pub fn numerical_rank<T: Real>(s: &SpectrumSample<T>, abs_floor: f64, rel_floor: f64) -> RankReport {
    let v: Vec<f64> = s.singular_values.iter().map(|x| x.to_f64_lossy()).collect();
    let sigma_max = v.first().copied().unwrap_or(0.0);
    let threshold = abs_floor.max(rel_floor * sigma_max);
    let rank = v.iter().filter(|&&x| x > 0.0 && x >= threshold).count();
    let smallest_kept = rank.checked_sub(1).map(|i| v[i]);
    let largest_dropped = v.get(rank).copied();
    let gap_ratio = match (smallest_kept, largest_dropped) {
        (None, _) => 0.0,
        (Some(k), Some(d)) if d > 0.0 => k / d,
        (Some(k), _) if threshold > 0.0 => k / threshold,
        (Some(_), _) => f64::INFINITY,
    };
    let widest_gap = v
        .windows(2)
        .enumerate()
        .map(|(i, w)| (i, if w[1] > 0.0 { w[0] / w[1] } else { f64::INFINITY }))
        .fold(None, |best: Option<(usize, f64)>, x| match best {
            Some(b) if b.1 >= x.1 => Some(b),
            _ => Some(x),
        });
    let verdict = if rank == 0 && sigma_max == 0.0 || gap_ratio >= CONFIDENT_GAP {
        Verdict::Confident
    } else {
        Verdict::Ambiguous
    };
    RankReport {
        rank,
        threshold,
        sigma_max,
        smallest_kept,
        largest_dropped,
        gap_ratio,
        widest_gap,
        verdict,
    }
}

fn trace<T: Real>(dim: usize, m: &[Complex<T>]) -> f64 {
    (0..dim).map(|i| m[i * dim + i].re.to_f64_lossy()).sum()
}

/// `tr((L^dagger L)^k)` by repeated products of the Gram matrix.
pub fn trace_power<T: Real>(l: &OperatorMatrix<T>, k: usize) -> f64 {
    if k == 0 {
        return l.cols as f64;
    }
    // work with the smaller of L^dagger L and L L^dagger
    let (dim, g) = if l.cols <= l.rows {
        (l.cols, T::gram(l.rows, l.cols, &l.data))
    } else {
        let mut adj = Vec::with_capacity(l.data.len());
        for c in 0..l.cols {
            for r in 0..l.rows {
                adj.push(l.data[r * l.cols + c].conj());
            }
        }
        (l.rows, T::gram(l.cols, l.rows, &adj))
    };
    if k == 1 {
        return trace(dim, &g);
    }
    if k == 2 {
        return g.iter().map(|z| z.norm_sqr().to_f64_lossy()).sum();
    }
    let mut p = g.clone();
    for _ in 1..k {
        p = T::matmul(dim, dim, dim, &p, &g);
    }
    trace(dim, &p)
}

/// `(tr(L^dagger L)^k / tr((L^dagger L)^k))^(1/(k-1))`, a lower bound on the
/// rank computed from traces alone.
pub fn rank_lower_bound<T: Real>(l: &OperatorMatrix<T>, k: usize) -> Result<f64, NumericError> {
    if k < 2 {
        return Err(NumericError::InvalidArgument("k must be at least 2".into()));
    }
    let t1 = trace_power(l, 1);
    let tk = trace_power(l, k);
    if tk <= 0.0 {
        return Err(NumericError::ZeroOperator);
    }
    Ok((t1.powi(k as i32) / tk).powf(1.0 / (k as f64 - 1.0)))
}

/// Singular values of an `n x n` matrix of unit complex Gaussians, divided by
/// `sqrt(n)` so they fill `[0, 2]`.
pub fn chgue_baseline<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SpectrumSample<T>, NumericError> {
    if n == 0 {
        return Err(NumericError::InvalidArgument("n must be at least 1".into()));
    }
    check_bytes::<T>(n * n)?;
    let data: Vec<Complex<T>> = (0..n * n).map(|_| complex_gaussian(rng)).collect();
    let l = OperatorMatrix::from_matrix(n, n, data)?;
    let mut s = spectrum(&l, Normalization::Raw)?;
    let d = (n as f64).sqrt();
    let dt = T::from_f64_lossy(d);
    s.singular_values.iter_mut().for_each(|x| *x = *x / dt);
    s.divisor = d;
    s.normalization = Normalization::K;
    s.n = n;
    s.mc = 1;
    s.network = "chgue".into();
    Ok(s)
}

/// Cutoff `f`: 1 on `[0, 1]`, 0 on `[2, inf)`, `1 - 3t^2 + 2t^3` with
/// `t = x - 1` in between.
pub fn cutoff(x: f64) -> f64 {
    if x <= 1.0 {
        1.0
    } else if x >= 2.0 {
        0.0
    } else {
        let t = x - 1.0;
        1.0 - 3.0 * t * t + 2.0 * t * t * t
    }
}

/// `(1/N^MC) sum_i f(sigma_i / eps)` over the largest `N^MC` values, padding
/// with zeros up to `N^MC`.
pub fn small_sv_fraction<T: Real>(s: &SpectrumSample<T>, eps: f64) -> Result<f64, NumericError> {
    if eps <= 0.0 {
        return Err(NumericError::InvalidArgument("epsilon must be positive".into()));
    }
    let q = s.qmc();
    let present = s.singular_values.len().min(q);
    let sum: f64 = s.singular_values[..present]
        .iter()
        .map(|x| cutoff(x.to_f64_lossy() / eps))
        .sum::<f64>()
        + (q - present) as f64;
    Ok(sum / q as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductSvReport {
    pub r_a: usize,
    pub r_b: usize,
    pub inner: usize,
    /// `r_A + r_B - N_2`.
    pub bound: i64,
    /// Singular values of `AB` that are `>= eps_a * eps_b`.
    pub count: usize,
    pub holds: bool,
}

/// Counts singular values of `A`, `B` and `AB` against `eps_a`, `eps_b` and
/// `eps_a * eps_b`.
pub fn check_product_sv_count<T: Real>(
    a: &OperatorMatrix<T>,
    b: &OperatorMatrix<T>,
    eps_a: f64,
    eps_b: f64,
) -> Result<ProductSvReport, NumericError> {
    let ab = a.mul(b)?;
    let count_ge = |m: &OperatorMatrix<T>, eps: f64| -> Result<usize, NumericError> {
        Ok(spectrum(m, Normalization::Raw)?
            .singular_values
            .iter()
            .filter(|x| x.to_f64_lossy() >= eps)
            .count())
    };
    let r_a = count_ge(a, eps_a)?;
    let r_b = count_ge(b, eps_b)?;
    let count = count_ge(&ab, eps_a * eps_b)?;
    let bound = r_a as i64 + r_b as i64 - a.cols as i64;
    Ok(ProductSvReport {
        r_a,
        r_b,
        inner: a.cols,
        bound,
        count,
        holds: count as i64 >= bound,
    })
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / x.len() as f64 - j as f64 / y.len() as f64).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rng::stream_rng;

    fn sample(values: Vec<f64>, n: usize, mc: usize) -> SpectrumSample<f64> {
        SpectrumSample {
            singular_values: values,
            normalization: Normalization::K,
            divisor: 1.0,
            n,
            mc,
            seed: None,
            ensemble: None,
            network: "t".into(),
        }
    }

    #[test]
    fn identity_spectrum_and_rank() {
        let s = spectrum(&OperatorMatrix::<f64>::identity(5), Normalization::Raw).unwrap();
        assert!(s.singular_values.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        let r = numerical_rank(&s, 0.0, DEFAULT_REL_FLOOR);
        assert_eq!(r.rank, 5);
        assert_eq!(r.verdict, Verdict::Confident);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let z = OperatorMatrix::<f64>::from_matrix(3, 3, vec![Complex::new(0.0, 0.0); 9]).unwrap();
        let r = numerical_rank(&spectrum(&z, Normalization::Raw).unwrap(), 0.0, DEFAULT_REL_FLOOR);
        assert_eq!(r.rank, 0);
        assert!(matches!(rank_lower_bound(&z, 2), Err(NumericError::ZeroOperator)));
    }

    #[test]
    fn gap_verdicts() {
        let r = numerical_rank(&sample(vec![1.0, 0.5, 1e-16], 3, 1), 0.0, DEFAULT_REL_FLOOR);
        assert_eq!((r.rank, r.verdict), (2, Verdict::Confident));
        assert_eq!(r.widest_gap.unwrap().0, 1);
        let r = numerical_rank(&sample(vec![1.0, 1e-9, 1e-11], 3, 1), 0.0, DEFAULT_REL_FLOOR);
        assert_eq!((r.rank, r.verdict), (2, Verdict::Ambiguous));
    }

    #[test]
    fn rank_bound_examples() {
        let id = OperatorMatrix::<f64>::identity(7);
        assert!((rank_lower_bound(&id, 2).unwrap() - 7.0).abs() < 1e-9);
        let mut d = vec![Complex::new(0.0, 0.0); 9];
        d[1] = Complex::new(2.0, 1.0);
        let r1 = OperatorMatrix::<f64>::from_matrix(3, 3, d).unwrap();
        for k in 2..5 {
            assert!((rank_lower_bound(&r1, k).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn trace_power_matches_singular_values() {
        let mut rng = stream_rng(4, 0, 0, 0);
        let data: Vec<Complex<f64>> = (0..12).map(|_| complex_gaussian(&mut rng)).collect();
        for (r, c) in [(3, 4), (4, 3)] {
            let l = OperatorMatrix::from_matrix(r, c, data.clone()).unwrap();
            let s = spectrum(&l, Normalization::Raw).unwrap();
            for k in 1..=3 {
                let want: f64 = s.singular_values.iter().map(|x| x.powi(2 * k as i32)).sum();
                assert!((trace_power(&l, k) - want).abs() < 1e-9 * want);
            }
        }
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(0.3), 1.0);
        assert_eq!(cutoff(1.0), 1.0);
        assert_eq!(cutoff(2.5), 0.0);
        assert!((cutoff(1.5) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn small_fraction_examples() {
        let s = sample(vec![5.0, 4.0], 2, 1);
        assert_eq!(small_sv_fraction(&s, 1.0).unwrap(), 0.0);
        let s = sample(vec![1.0; 4], 4, 1);
        assert_eq!(small_sv_fraction(&s, 1.0).unwrap(), 1.0);
        // padding: 2 values for N^MC = 4, both large
        let s = sample(vec![9.0, 9.0], 2, 2);
        assert_eq!(small_sv_fraction(&s, 1.0).unwrap(), 0.5);
        assert!(small_sv_fraction(&s, 0.0).is_err());
    }

    #[test]
    fn product_count_identity() {
        let id = OperatorMatrix::<f64>::identity(4);
        let r = check_product_sv_count(&id, &id, 1.0, 1.0).unwrap();
        assert_eq!((r.bound, r.count, r.holds), (4, 4, true));
        let z = OperatorMatrix::<f64>::from_matrix(4, 4, vec![Complex::new(0.0, 0.0); 16]).unwrap();
        let r = check_product_sv_count(&z, &id, 1.0, 1.0).unwrap();
        assert!(r.bound <= 0 && r.holds);
        let wide = OperatorMatrix::<f64>::identity(3);
        assert!(check_product_sv_count(&id, &wide, 1.0, 1.0).is_err());
    }

    #[test]
    fn chgue_single_value() {
        let mut rng = stream_rng(9, 0, 0, 0);
        let s: SpectrumSample<f64> = chgue_baseline(1, &mut rng).unwrap();
        let mut rng = stream_rng(9, 0, 0, 0);
        let z: Complex<f64> = complex_gaussian(&mut rng);
        assert!((s.singular_values[0] - z.norm()).abs() < 1e-14);
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_distance(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(ks_distance(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
        assert!((ks_distance(&[1.0, 3.0], &[2.0, 4.0]) - 0.5).abs() < 1e-12);
    }
}
