//! Poisson pmf/cmf factors and tail-truncated weighted sums.
//!
//! The load integrands multiply several Poisson point-count probabilities per
//! evaluation, with means ranging from 0 to thousands, so both functions work
//! in log space (pmf) or through the regularized incomplete gamma function
//! (cmf) to stay finite far into the tails.

use statrs::function::gamma::{gamma_ur, ln_gamma};

/// P[X = n] for X ~ Poisson(mu). Negative `n` yields 0; `mu = 0` puts all
/// mass on n = 0.
pub fn poisson_pmf(n: i64, mu: f64) -> f64 {
    debug_assert!(mu >= 0.0, "poisson mean must be nonnegative");
    if n < 0 {
        return 0.0;
    }
    if mu == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let n_f = n as f64;
    (n_f * mu.ln() - mu - ln_gamma(n_f + 1.0)).exp()
}

/// P[X <= n] for X ~ Poisson(mu), via the identity with the regularized
/// upper incomplete gamma function Q(n+1, mu). Negative `n` yields 0.
pub fn poisson_cmf(n: i64, mu: f64) -> f64 {
    debug_assert!(mu >= 0.0, "poisson mean must be nonnegative");
    if n < 0 {
        return 0.0;
    }
    if mu == 0.0 {
        return 1.0;
    }
    gamma_ur(n as f64 + 1.0, mu)
}

/// Sum of `pmf(k) * g(k)` over k = 0, 1, ..., truncated once the residual
/// pmf mass drops below `tail_eps`.
///
/// `pmf` must describe a (sub-)probability mass function over the
/// nonnegative integers; the iteration is capped defensively at 10^7 terms.
pub fn sum_pmf_weighted(
    pmf: impl Fn(u64) -> f64,
    g: impl Fn(u64) -> f64,
    tail_eps: f64,
) -> f64 {
    let mut acc = 0.0;
    let mut mass = 0.0;
    for k in 0..10_000_000u64 {
        let p = pmf(k);
        acc += p * g(k);
        mass += p;
        if 1.0 - mass < tail_eps {
            break;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_edge_cases() {
        assert_eq!(poisson_pmf(0, 0.0), 1.0);
        assert_eq!(poisson_pmf(3, 0.0), 0.0);
        assert_eq!(poisson_pmf(-1, 2.0), 0.0);
        assert!((poisson_pmf(0, 2.0) - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn cmf_edge_cases() {
        assert_eq!(poisson_cmf(-1, 5.0), 0.0);
        assert_eq!(poisson_cmf(0, 0.0), 1.0);
        // cmf(0, mu) = pmf(0, mu)
        assert!((poisson_cmf(0, 3.3) - poisson_pmf(0, 3.3)).abs() < 1e-14);
    }

    #[test]
    fn cmf_matches_partial_pmf_sums() {
        let mu = 7.3;
        let mut acc = 0.0;
        for n in 0..40 {
            acc += poisson_pmf(n, mu);
            let c = poisson_cmf(n, mu);
            assert!((c - acc).abs() < 1e-12, "n={n}: {c} vs {acc}");
        }
    }

    #[test]
    fn weighted_sum_recovers_mean() {
        let mu = 7.3;
        let mean = sum_pmf_weighted(|k| poisson_pmf(k as i64, mu), |k| k as f64, 1e-6);
        assert!((mean - mu).abs() < 1e-4, "got {mean}");
    }

    #[test]
    fn no_overflow_at_large_arguments() {
        let p = poisson_pmf(100_000, 1e4);
        assert!(p.is_finite());
        assert!(p >= 0.0);
        let c = poisson_cmf(100_000, 1e4);
        assert!(c.is_finite());
        assert!((c - 1.0).abs() < 1e-12);
        // Near the bulk too.
        let p_bulk = poisson_pmf(10_000, 1e4);
        assert!(p_bulk > 0.0 && p_bulk < 1.0);
    }
}
