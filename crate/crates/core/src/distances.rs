//! Distance distributions for the two deployment models.
//!
//! Finite-disk (binomial point process) laws: the center distance of a
//! uniform point, the distance from a fixed point to a uniformly placed AP,
//! its nearest-of-M order statistic, and the lower-truncated law of the
//! remaining APs given the nearest one. Plane (Poisson point process) laws:
//! the distance to the N-th nearest AP (generalized gamma) and the
//! conditional law of the closer APs given that distance.
//!
//! All laws expose pdf/cdf/support plus inverse-cdf sampling through
//! bisection, which is how the simulation cross-checks draw from them.

use statrs::function::gamma::gamma_lr;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DistanceError {
    /// Truncation point at or beyond the end of the support.
    #[error("empty-support: truncation leaves no probability mass")]
    EmptySupport,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// A univariate distance distribution on a bounded or half-open support.
pub trait DistanceLaw: Sync {
    fn pdf(&self, d: f64) -> f64;
    fn cdf(&self, d: f64) -> f64;
    /// Support [lo, hi]. `hi` may be a practical (quantile-complete) bound
    /// for laws on [0, inf).
    fn support(&self) -> (f64, f64);

    /// Inverse CDF by bisection to 1e-9 of the support width.
    fn quantile(&self, q: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&q));
        let (mut lo, mut hi) = self.support();
        let tol = 1e-9 * (hi - lo).max(f64::MIN_POSITIVE);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn sample(&self, rng: &mut impl rand::Rng) -> f64
    where
        Self: Sized,
    {
        self.quantile(rng.gen::<f64>())
    }
}

fn clamped_acos(x: f64) -> f64 {
    // Branch-point roundoff pushes arguments marginally outside [-1, 1].
    x.clamp(-1.0, 1.0).acos()
}

/// Distance from the disk center to a uniform point: f(r) = 2r/R_s^2.
#[derive(Debug, Clone, Copy)]
pub struct CenterDistanceLaw {
    pub r_s: f64,
}

impl CenterDistanceLaw {
    pub fn new(r_s: f64) -> Self {
        assert!(r_s > 0.0);
        Self { r_s }
    }
}

impl DistanceLaw for CenterDistanceLaw {
    fn pdf(&self, d: f64) -> f64 {
        if (0.0..=self.r_s).contains(&d) {
            2.0 * d / (self.r_s * self.r_s)
        } else {
            0.0
        }
    }

    fn cdf(&self, d: f64) -> f64 {
        if d <= 0.0 {
            0.0
        } else if d >= self.r_s {
            1.0
        } else {
            d * d / (self.r_s * self.r_s)
        }
    }

    fn support(&self) -> (f64, f64) {
        (0.0, self.r_s)
    }

    fn quantile(&self, q: f64) -> f64 {
        self.r_s * q.sqrt()
    }
}

/// Distance between a point at radius `r_o` inside the disk and a uniformly
/// placed AP. Piecewise: below `R_s - r_o` the ball around the user is fully
/// inside the disk; beyond it boundary arcs take over.
#[derive(Debug, Clone, Copy)]
pub struct UserToRandomApLaw {
    pub r_o: f64,
    pub r_s: f64,
}

impl UserToRandomApLaw {
    pub fn new(r_o: f64, r_s: f64) -> Self {
        assert!(r_s > 0.0 && (0.0..=r_s).contains(&r_o));
        Self { r_o, r_s }
    }

    fn theta_star(&self, d: f64) -> f64 {
        clamped_acos((d * d + self.r_o * self.r_o - self.r_s * self.r_s) / (2.0 * self.r_o * d))
    }

    fn phi_star(&self, d: f64) -> f64 {
        clamped_acos(
            (self.r_s * self.r_s + self.r_o * self.r_o - d * d) / (2.0 * self.r_o * self.r_s),
        )
    }
}

impl DistanceLaw for UserToRandomApLaw {
    fn pdf(&self, d: f64) -> f64 {
        let (lo, hi) = self.support();
        if d < lo || d > hi {
            return 0.0;
        }
        if d < self.r_s - self.r_o || self.r_o == 0.0 {
            2.0 * d / (self.r_s * self.r_s)
        } else {
            2.0 * d * self.theta_star(d) / (PI * self.r_s * self.r_s)
        }
    }

    fn cdf(&self, d: f64) -> f64 {
        if d <= 0.0 {
            return 0.0;
        }
        if d >= self.r_s + self.r_o {
            return 1.0;
        }
        if d < self.r_s - self.r_o || self.r_o == 0.0 {
            d * d / (self.r_s * self.r_s)
        } else {
            let th = self.theta_star(d);
            let ph = self.phi_star(d);
            d * d * (th - 0.5 * (2.0 * th).sin()) / (PI * self.r_s * self.r_s)
                + (ph - 0.5 * (2.0 * ph).sin()) / PI
        }
    }

    fn support(&self) -> (f64, f64) {
        (0.0, self.r_s + self.r_o)
    }
}

/// Nearest of `m` i.i.d. AP distances: F = 1 - (1 - F_single)^m.
#[derive(Debug, Clone, Copy)]
pub struct NearestOfMLaw {
    pub base: UserToRandomApLaw,
    pub m: u32,
}

impl NearestOfMLaw {
    pub fn new(r_o: f64, r_s: f64, m: u32) -> Self {
        assert!(m >= 1);
        Self {
            base: UserToRandomApLaw::new(r_o, r_s),
            m,
        }
    }
}

impl DistanceLaw for NearestOfMLaw {
    fn pdf(&self, d: f64) -> f64 {
        let f = self.base.cdf(d);
        self.m as f64 * self.base.pdf(d) * (1.0 - f).powi(self.m as i32 - 1)
    }

    fn cdf(&self, d: f64) -> f64 {
        1.0 - (1.0 - self.base.cdf(d)).powi(self.m as i32)
    }

    fn support(&self) -> (f64, f64) {
        self.base.support()
    }
}

/// Law of a remaining AP distance given the nearest one is at `d_oo`:
/// the single-AP law lower-truncated at `d_oo`.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedRemainingLaw {
    pub base: UserToRandomApLaw,
    pub d_oo: f64,
    norm: f64,
}

impl TruncatedRemainingLaw {
    pub fn new(r_o: f64, r_s: f64, d_oo: f64) -> Result<Self, DistanceError> {
        if d_oo < 0.0 {
            return Err(DistanceError::InvalidParameter("d_oo must be nonnegative"));
        }
        let base = UserToRandomApLaw::new(r_o, r_s);
        let tail = 1.0 - base.cdf(d_oo);
        if tail <= 0.0 {
            return Err(DistanceError::EmptySupport);
        }
        Ok(Self {
            base,
            d_oo,
            norm: 1.0 / tail,
        })
    }
}

impl DistanceLaw for TruncatedRemainingLaw {
    fn pdf(&self, d: f64) -> f64 {
        if d < self.d_oo {
            0.0
        } else {
            self.base.pdf(d) * self.norm
        }
    }

    fn cdf(&self, d: f64) -> f64 {
        if d <= self.d_oo {
            0.0
        } else {
            ((self.base.cdf(d) - self.base.cdf(self.d_oo)) * self.norm).min(1.0)
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.d_oo, self.base.support().1)
    }
}

/// Distance from a point to the N-th nearest point of a plane Poisson
/// process of intensity `lambda_r`: the square is Gamma(N, 1/(pi lambda_r)).
#[derive(Debug, Clone, Copy)]
pub struct PppOrderLaw {
    pub n_s: u32,
    pub lambda_r: f64,
}

impl PppOrderLaw {
    pub fn new(n_s: u32, lambda_r: f64) -> Self {
        assert!(n_s >= 1 && lambda_r > 0.0);
        Self { n_s, lambda_r }
    }
}

impl DistanceLaw for PppOrderLaw {
    fn pdf(&self, d: f64) -> f64 {
        if d <= 0.0 {
            return 0.0;
        }
        let a = PI * self.lambda_r;
        let n = self.n_s as f64;
        // 2 / Gamma(N) * a^N * d^{2N-1} * exp(-a d^2), in log space.
        let ln = (2.0f64).ln() + n * a.ln() + (2.0 * n - 1.0) * d.ln()
            - a * d * d
            - statrs::function::gamma::ln_gamma(n);
        ln.exp()
    }

    fn cdf(&self, d: f64) -> f64 {
        if d <= 0.0 {
            return 0.0;
        }
        gamma_lr(self.n_s as f64, PI * self.lambda_r * d * d)
    }

    fn support(&self) -> (f64, f64) {
        // Quantile-complete upper bound: the Gamma(N,1) mass above
        // N + 40 ln(10) is far below any tolerance used here.
        let hi_sq = (self.n_s as f64 + 95.0) / (PI * self.lambda_r);
        (0.0, hi_sq.sqrt())
    }
}

/// Conditional law of each closer-AP distance given the N-th nearest is at
/// `d_max`: f(d) = 2 d / d_max^2 on [0, d_max], i.i.d. across the N-1 APs.
#[derive(Debug, Clone, Copy)]
pub struct ConditionalInnerLaw {
    pub d_max: f64,
}

impl ConditionalInnerLaw {
    pub fn new(d_max: f64) -> Self {
        assert!(d_max > 0.0);
        Self { d_max }
    }
}

impl DistanceLaw for ConditionalInnerLaw {
    fn pdf(&self, d: f64) -> f64 {
        if (0.0..=self.d_max).contains(&d) {
            2.0 * d / (self.d_max * self.d_max)
        } else {
            0.0
        }
    }

    fn cdf(&self, d: f64) -> f64 {
        if d <= 0.0 {
            0.0
        } else if d >= self.d_max {
            1.0
        } else {
            d * d / (self.d_max * self.d_max)
        }
    }

    fn support(&self) -> (f64, f64) {
        (0.0, self.d_max)
    }

    fn quantile(&self, q: f64) -> f64 {
        self.d_max * q.sqrt()
    }
}
