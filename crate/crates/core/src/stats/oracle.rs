//! Exact expected suffix-size histogram `Ḡ(s)` at finite `n`.
//!
//! Reads are ordered by `(start, index)`. For the read with index `i`
//! (1-based) among `K`, the forward distance `D_i` to its successor has
//!
//! ```text
//! P(D_i = 0)  = 1 - ((n-1)/n)^(K-i)                      (a later-index read shares the start)
//! P(D_i >= g) = ((n-g)/n)^(K-i) * ((n-g+1)/n)^(i-1)      for 1 <= g <= n
//! ```
//!
//! (reads with a smaller index may share the start without becoming the
//! successor). The overlap is `max(0, L - D_i)` and, given overlap `l`, the
//! suffix size is Binomial(`l`, `1 - delta`). Summing over reads gives
//! `Ḡ(s)`. The same code runs over `f64` and exact rationals.

use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::channel::ChannelParams;

/// Scalar type the oracle can run over.
pub trait OracleScalar:
    Clone
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn ratio(num: u64, den: u64) -> Self;
    fn pow(&self, e: usize) -> Self;
}

impl OracleScalar for f64 {
    fn ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn pow(&self, e: usize) -> Self {
        if e <= i32::MAX as usize {
            self.powi(e as i32)
        } else {
            self.powf(e as f64)
        }
    }
}

impl OracleScalar for BigRational {
    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn pow(&self, e: usize) -> Self {
        num_traits::pow::pow(self.clone(), e)
    }
}

/// Expected number of reads (summed over all `K`) whose true overlap equals
/// `l`, for `l = 0..=L`.
pub fn expected_overlap_counts<T: OracleScalar>(n: usize, read_len: usize, k: usize) -> Vec<T> {
    let nn = n as u64;
    // tail(i, g) = P(D_i >= g), i is 1-based.
    let tail = |i: usize, g: usize| -> T {
        if g == 0 {
            return T::one();
        }
        if g > n {
            return T::zero();
        }
        let a = T::ratio(nn - g as u64, nn).pow(k - i);
        let b = T::ratio(nn - g as u64 + 1, nn).pow(i - 1);
        a * b
    };
    let mut counts = vec![T::zero(); read_len + 1];
    for i in 1..=k {
        // overlap L <=> D = 0
        counts[read_len] = counts[read_len].clone() + (T::one() - tail(i, 1));
        for (l, slot) in counts.iter_mut().enumerate().take(read_len).skip(1) {
            let g = read_len - l;
            *slot = slot.clone() + (tail(i, g) - tail(i, g + 1));
        }
        counts[0] = counts[0].clone() + tail(i, read_len);
    }
    counts
}

fn binomial_pmf<T: OracleScalar>(trials: usize, successes: usize, keep: &T, erase: &T) -> T {
    if successes > trials {
        return T::zero();
    }
    let mut coef = T::one();
    for j in 0..successes {
        coef = coef * T::ratio((trials - j) as u64, (j + 1) as u64);
    }
    coef * keep.pow(successes) * erase.pow(trials - successes)
}

/// `Ḡ(s)` for `s = 0..=L` over a generic scalar; `delta` is the erasure
/// probability.
pub fn expected_suffix_sizes<T: OracleScalar>(
    n: usize,
    read_len: usize,
    k: usize,
    delta: &T,
) -> Vec<T> {
    let overlaps = expected_overlap_counts::<T>(n, read_len, k);
    let keep = T::one() - delta.clone();
    (0..=read_len)
        .map(|s| {
            overlaps
                .iter()
                .enumerate()
                .skip(s)
                .fold(T::zero(), |acc, (l, w)| {
                    acc + w.clone() * binomial_pmf(l, s, &keep, delta)
                })
        })
        .collect()
}

/// `Ḡ(s)` for every suffix size `s = 0..=L`.
pub fn expected_g_tau_table(params: &ChannelParams) -> Vec<f64> {
    expected_suffix_sizes::<f64>(params.n, params.read_len, params.num_reads, &params.delta)
}

/// `Ḡ(s)` for one suffix size; 0 outside `[0, L]`.
pub fn expected_g_tau(params: &ChannelParams, suffix_size: usize) -> f64 {
    if suffix_size > params.read_len {
        return 0.0;
    }
    expected_g_tau_table(params)[suffix_size]
}

/// Exact rational `Ḡ(s)` table.
pub fn expected_g_tau_exact(
    n: usize,
    read_len: usize,
    k: usize,
    delta: &BigRational,
) -> Vec<BigRational> {
    expected_suffix_sizes::<BigRational>(n, read_len, k, delta)
}

/// `(log n / n) * sum_{s = 1}^{floor(log n)} (1 - s / log n) Ḡ(s)`, the
/// finite-`n` quantity that the island-count exponent bound controls.
pub fn island_choice_exponent(params: &ChannelParams) -> f64 {
    let table = expected_g_tau_table(params);
    let log_n = params.log_n();
    let top = (log_n.floor() as usize).min(params.read_len);
    let sum: f64 = (1..=top).map(|s| (1.0 - s as f64 / log_n) * table[s]).sum();
    log_n / params.n as f64 * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_mass_is_k() {
        for &(n, l, k, d) in &[
            (12, 4, 3, 0.5),
            (100, 10, 37, 0.2),
            (1000, 20, 400, 0.0),
            (50, 50, 9, 1.0),
        ] {
            let p = ChannelParams::new(n, l, k, d).unwrap();
            let total: f64 = expected_g_tau_table(&p).iter().sum();
            assert!((total - k as f64).abs() < 1e-9 * k as f64, "{total} vs {k}");
        }
    }

    #[test]
    fn everything_erased_gives_zero_sizes() {
        let p = ChannelParams::new(40, 6, 10, 1.0).unwrap();
        let t = expected_g_tau_table(&p);
        assert!((t[0] - 10.0).abs() < 1e-12);
        assert!(t[1..].iter().all(|&g| g == 0.0));
    }

    #[test]
    fn exact_and_float_agree() {
        let half = BigRational::new(1.into(), 2.into());
        let exact = expected_g_tau_exact(12, 4, 3, &half);
        let p = ChannelParams::new(12, 4, 3, 0.5).unwrap();
        let float = expected_g_tau_table(&p);
        let total = exact.iter().fold(BigRational::zero(), |a, b| a + b);
        assert_eq!(total, BigRational::from_integer(3.into()));
        for (e, f) in exact.iter().zip(&float) {
            let e = num_traits::ToPrimitive::to_f64(e).unwrap();
            assert!((e - f).abs() < 1e-12);
        }
    }

    #[test]
    fn single_read_never_overlaps() {
        let c = expected_overlap_counts::<f64>(10, 4, 1);
        assert_eq!(c, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
    }
}
