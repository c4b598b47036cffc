//! Randomized quasi-Monte Carlo integration over boxes.
//!
//! Points come from Owen-scrambled Sobol sequences (`sobol_burley`). The
//! total sample budget is split across independent randomizations (distinct
//! scramble seeds); the spread of the per-randomization estimates gives an
//! unbiased standard error. Sequences longer than the generator's 2^16 cap
//! are assembled from independently seeded blocks, which keeps each block
//! low-discrepancy and leaves the estimator unbiased.

use rayon::prelude::*;
use thiserror::Error;

const MAX_BLOCK: u32 = 1 << 16;

#[derive(Debug, Error, PartialEq)]
pub enum QmcError {
    #[error("dimension {dim}: lower bound {lo} not below upper bound {hi}")]
    BadBounds { dim: usize, lo: f64, hi: f64 },
    #[error("sample budget {0} below the minimum of 10^4")]
    BudgetTooSmall(u64),
    #[error("boxes must have at least one dimension")]
    Empty,
}

/// Integration domain: per-dimension bounds plus a total sample budget.
#[derive(Debug, Clone)]
pub struct QmcBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
    budget: u64,
}

impl QmcBox {
    pub fn new(bounds: &[(f64, f64)], budget: u64) -> Result<Self, QmcError> {
        if bounds.is_empty() {
            return Err(QmcError::Empty);
        }
        for (dim, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(QmcError::BadBounds { dim, lo, hi });
            }
        }
        if budget < 10_000 {
            return Err(QmcError::BudgetTooSmall(budget));
        }
        Ok(Self {
            lo: bounds.iter().map(|b| b.0).collect(),
            hi: bounds.iter().map(|b| b.1).collect(),
            budget,
        })
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(lo, hi)| hi - lo)
            .product()
    }
}

/// QMC estimate with a standard error from independent randomizations.
#[derive(Debug, Clone, Copy)]
pub struct QmcEstimate {
    pub value: f64,
    pub std_error: f64,
    pub randomizations: usize,
}

fn mix32(mut x: u32) -> u32 {
    // splitmix-style avalanche; decorrelates block seeds.
    x = x.wrapping_add(0x9E37_79B9);
    x ^= x >> 16;
    x = x.wrapping_mul(0x21F0_AAAD);
    x ^= x >> 15;
    x = x.wrapping_mul(0x735A_2D97);
    x ^= x >> 15;
    x
}

/// Integrate `f` over the box with `n_randomizations >= 8` independent
/// scrambles. Deterministic for fixed (`seed`, budget, randomizations),
/// regardless of thread count.
pub fn integrate_qmc<F>(
    f: F,
    domain: &QmcBox,
    n_randomizations: usize,
    seed: u32,
) -> QmcEstimate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n_rand = n_randomizations.max(8);
    let per_rand = (domain.budget / n_rand as u64).max(1);
    let volume = domain.volume();
    let dim = domain.dimension();

    let estimates: Vec<f64> = (0..n_rand)
        .into_par_iter()
        .map(|r| {
            let mut point = vec![0.0f64; dim];
            let mut acc = 0.0f64;
            let mut remaining = per_rand;
            let mut block = 0u32;
            while remaining > 0 {
                let n = remaining.min(MAX_BLOCK as u64) as u32;
                let block_seed = mix32(seed ^ mix32((r as u32) << 8 ^ block));
                for i in 0..n {
                    for (j, p) in point.iter_mut().enumerate() {
                        let u = sobol_burley::sample(i, j as u32, block_seed) as f64;
                        *p = domain.lo[j] + (domain.hi[j] - domain.lo[j]) * u;
                    }
                    acc += f(&point);
                }
                remaining -= n as u64;
                block += 1;
            }
            acc / per_rand as f64 * volume
        })
        .collect();

    let mean = estimates.iter().sum::<f64>() / n_rand as f64;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n_rand - 1) as f64;
    QmcEstimate {
        value: mean,
        std_error: (var / n_rand as f64).sqrt(),
        randomizations: n_rand,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_boxes() {
        assert_eq!(QmcBox::new(&[], 20_000).unwrap_err(), QmcError::Empty);
        assert!(matches!(
            QmcBox::new(&[(1.0, 0.0)], 20_000).unwrap_err(),
            QmcError::BadBounds { .. }
        ));
        assert_eq!(
            QmcBox::new(&[(0.0, 1.0)], 100).unwrap_err(),
            QmcError::BudgetTooSmall(100)
        );
    }

    #[test]
    fn constant_is_exact() {
        let b = QmcBox::new(&[(0.0, 2.0), (1.0, 3.0)], 16_384).unwrap();
        let est = integrate_qmc(|_| 2.5, &b, 8, 7);
        assert!((est.value - 2.5 * 4.0).abs() < 1e-12);
        assert!(est.std_error < 1e-12);
    }

    #[test]
    fn separable_5d_product() {
        // f(x) = prod_j (a_j + b_j x_j) on [0,1]^5 integrates to prod_j (a_j + b_j/2).
        let a = [0.3, 1.0, 0.5, 2.0, 0.1];
        let b = [1.0, -0.5, 2.0, 0.25, 3.0];
        let exact: f64 = a.iter().zip(&b).map(|(ai, bi)| ai + bi / 2.0).product();
        let domain = QmcBox::new(&[(0.0, 1.0); 5], 1 << 17).unwrap();
        let est = integrate_qmc(
            |x| {
                x.iter()
                    .enumerate()
                    .map(|(j, &xj)| a[j] + b[j] * xj)
                    .product::<f64>()
            },
            &domain,
            8,
            42,
        );
        assert!(
            (est.value - exact).abs() <= 3.0 * est.std_error.max(1e-9),
            "est {} +- {} vs exact {}",
            est.value,
            est.std_error,
            exact
        );
    }

    #[test]
    fn stderr_shrinks_with_budget() {
        let f = |x: &[f64]| (x[0] * x[1]).sin() + x[2] * x[2];
        let mut prev = f64::INFINITY;
        for (i, budget) in [1u64 << 14, 1 << 15, 1 << 16, 1 << 17, 1 << 18]
            .into_iter()
            .enumerate()
        {
            let domain = QmcBox::new(&[(0.0, 1.0); 3], budget).unwrap();
            let est = integrate_qmc(f, &domain, 8, 3);
            if i > 0 {
                assert!(
                    est.std_error <= prev * 1.10,
                    "budget {budget}: stderr {} vs previous {prev}",
                    est.std_error
                );
            }
            prev = est.std_error;
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let domain = QmcBox::new(&[(0.0, 1.0); 4], 1 << 15).unwrap();
        let f = |x: &[f64]| (-(x[0] + x[1] + x[2] + x[3])).exp();
        let e1 = integrate_qmc(f, &domain, 8, 11);
        let e2 = integrate_qmc(f, &domain, 8, 11);
        assert_eq!(e1.value.to_bits(), e2.value.to_bits());
        assert_eq!(e1.std_error.to_bits(), e2.std_error.to_bits());
    }
}
