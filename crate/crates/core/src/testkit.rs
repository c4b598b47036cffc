//! Validation oracles shared by the test suites.
//!
//! These helpers deliberately avoid the analytic kernels they are used to
//! check: areas come from counting quasi-random darts against circle
//! membership tests, and distribution checks use the Kolmogorov-Smirnov
//! statistic against a caller-supplied CDF. They live in the library (rather
//! than a test module) so the integration and acceptance suites of dependent
//! crates can reuse them.

use crate::geometry::Point2D;

/// Low-discrepancy point in [0,1)^2. Indices beyond the generator's block
/// size continue in independently scrambled blocks.
fn sobol2(index: u64, seed: u32) -> (f64, f64) {
    let block = (index >> 16) as u32;
    let i = (index & 0xFFFF) as u32;
    let s = seed ^ block.wrapping_mul(0x9E37_79B9);
    (
        sobol_burley::sample(i, 0, s) as f64,
        sobol_burley::sample(i, 1, s) as f64,
    )
}

fn bbox_intersection(boxes: &[(f64, f64, f64, f64)]) -> Option<(f64, f64, f64, f64)> {
    let mut lo_x = f64::NEG_INFINITY;
    let mut lo_y = f64::NEG_INFINITY;
    let mut hi_x = f64::INFINITY;
    let mut hi_y = f64::INFINITY;
    for &(x0, y0, x1, y1) in boxes {
        lo_x = lo_x.max(x0);
        lo_y = lo_y.max(y0);
        hi_x = hi_x.min(x1);
        hi_y = hi_y.min(y1);
    }
    (lo_x < hi_x && lo_y < hi_y).then_some((lo_x, lo_y, hi_x, hi_y))
}

fn circle_bbox(c: Point2D, r: f64) -> (f64, f64, f64, f64) {
    (c.x - r, c.y - r, c.x + r, c.y + r)
}

fn dart_area(circles: &[(Point2D, f64)], darts: u64, seed: u32) -> f64 {
    let boxes: Vec<_> = circles.iter().map(|&(c, r)| circle_bbox(c, r)).collect();
    let Some((x0, y0, x1, y1)) = bbox_intersection(&boxes) else {
        return 0.0;
    };
    let mut hits = 0u64;
    for i in 0..darts {
        let (u, v) = sobol2(i, seed);
        let px = x0 + (x1 - x0) * u;
        let py = y0 + (y1 - y0) * v;
        let p = Point2D::new(px, py);
        if circles
            .iter()
            .all(|&(c, r)| c.distance_sq(&p) <= r * r)
        {
            hits += 1;
        }
    }
    hits as f64 / darts as f64 * (x1 - x0) * (y1 - y0)
}

/// Rejection-sampling estimate of the overlap area of two circles.
pub fn dart_overlap_two_circles(
    c1: Point2D,
    r1: f64,
    c2: Point2D,
    r2: f64,
    darts: u64,
    seed: u32,
) -> f64 {
    dart_area(&[(c1, r1), (c2, r2)], darts, seed)
}

/// Rejection-sampling estimate of the common area of three circles.
#[allow(clippy::too_many_arguments)]
pub fn dart_overlap_three_circles(
    c1: Point2D,
    r1: f64,
    c2: Point2D,
    r2: f64,
    c3: Point2D,
    r3: f64,
    darts: u64,
    seed: u32,
) -> f64 {
    dart_area(&[(c1, r1), (c2, r2), (c3, r3)], darts, seed)
}

/// Kolmogorov-Smirnov statistic sup |F_n - F| for samples against a CDF.
/// Sorts the sample buffer in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(!samples.is_empty());
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        sup = sup
            .max((f - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - f).abs());
    }
    sup
}

/// Asymptotic critical value for the one-sample KS test at level `alpha`:
/// reject when the statistic exceeds this.
pub fn ks_critical_value(alpha: f64, n: usize) -> f64 {
    ((-0.5 * (alpha / 2.0).ln()) / n as f64).sqrt()
}

/// Ordinary-least-squares R^2 of y against x.
pub fn linear_fit_r2(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return 1.0;
    }
    (sxy * sxy) / (sxx * syy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dart_area_of_single_circle_pair_full_overlap() {
        let a = dart_overlap_two_circles(
            Point2D::ORIGIN,
            1.0,
            Point2D::ORIGIN,
            1.0,
            1_000_000,
            1,
        );
        assert!((a - PI).abs() < 2e-3, "got {a}");
    }

    #[test]
    fn dart_area_disjoint_is_zero() {
        let a = dart_overlap_two_circles(
            Point2D::ORIGIN,
            1.0,
            Point2D::new(5.0, 0.0),
            1.0,
            10_000,
            2,
        );
        assert_eq!(a, 0.0);
    }

    #[test]
    fn ks_accepts_true_uniform() {
        // Deterministic stratified "sample" from the true CDF: sup gap ~ 1/n.
        let n = 10_000;
        let mut s: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&mut s, |x| x.clamp(0.0, 1.0));
        assert!(d < ks_critical_value(0.01, n));
    }

    #[test]
    fn r2_of_exact_line_is_one() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 2.0).collect();
        assert!((linear_fit_r2(&x, &y) - 1.0).abs() < 1e-12);
    }
}
