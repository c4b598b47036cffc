//! AP load statistics for the user-centric architecture.
//!
//! With users served by their `N_s` nearest APs, the number of users an AP
//! carries is random. Two reference points matter: the *typical AP* (a
//! uniformly random AP, relevant for fronthaul dimensioning) and the *tagged
//! APs* (the ranked serving APs of a randomly chosen user, which are biased
//! toward larger service regions). Exact load pmfs are intractable; this
//! module computes exact first and second moments by integrating Poisson
//! point-count probabilities over circle-intersection kernels, then fits a
//! negative binomial by moment matching.
//!
//! All integrals are evaluated in scaled coordinates (lengths in units of
//! `1/sqrt(pi lambda_r)`), which makes the integrands parameter-free apart
//! from the serving-set size; the density ratio enters only through the
//! prefactors.

use crate::geometry::{aoi2, aoi3, derived_radius, overlap_from_common_point, pair_angle_uxy};
use crate::numerics::{integrate_1d_split, integrate_qmc, QmcBox, QuadTol};
use statrs::function::gamma::ln_gamma;
use std::cell::Cell;
use std::f64::consts::PI;
use std::io::Write;
use thiserror::Error;

/// Largest supported serving-set size for the moment integrals.
pub const MAX_NS: u32 = 12;

#[derive(Debug, Error, PartialEq)]
pub enum LoadError {
    #[error("underdispersed: variance {variance} does not exceed mean {mean}")]
    Underdispersed { mean: f64, variance: f64 },
    #[error("unconverged: {0}")]
    Unconverged(&'static str),
    #[error("invalid-target: SCNR target must be positive, got {0}")]
    InvalidTarget(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// First two raw moments of a load distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadMoments {
    pub m1: f64,
    pub m2: f64,
}

impl LoadMoments {
    pub fn variance(&self) -> f64 {
        self.m2 - self.m1 * self.m1
    }
}

/// Second-moment estimate with its QMC standard error.
#[derive(Debug, Clone, Copy)]
pub struct MomentEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Tolerances and budgets for the moment computations.
#[derive(Debug, Clone, Copy)]
pub struct LoadComputeConfig {
    pub quad_tol: QuadTol,
    pub qmc_budget: u64,
    pub qmc_randomizations: usize,
    pub qmc_seed: u32,
}

impl Default for LoadComputeConfig {
    fn default() -> Self {
        Self {
            quad_tol: QuadTol::default(),
            qmc_budget: 1 << 20,
            qmc_randomizations: 8,
            qmc_seed: 0x10ad,
        }
    }
}

// --- Poisson tables ----------------------------------------------------------

// Load integrands need pmf(k, mu) and cmf(k, mu) only for k <= N_s, so an
// upward recurrence beats log-gamma evaluation by an order of magnitude.
const TABLE_K: usize = (MAX_NS as usize) + 1;

#[derive(Clone, Copy)]
struct PoissonTable {
    pmf: [f64; TABLE_K],
    cmf: [f64; TABLE_K],
}

impl PoissonTable {
    fn new(mu: f64) -> Self {
        debug_assert!(mu >= -1e-9);
        let mu = mu.max(0.0);
        let mut pmf = [0.0; TABLE_K];
        let mut cmf = [0.0; TABLE_K];
        let mut p = (-mu).exp();
        let mut c = 0.0;
        for k in 0..TABLE_K {
            if k > 0 {
                p *= mu / k as f64;
            }
            c += p;
            pmf[k] = p;
            cmf[k] = c.min(1.0);
        }
        Self { pmf, cmf }
    }

    #[inline]
    fn pmf(&self, k: i64) -> f64 {
        if (0..TABLE_K as i64).contains(&k) {
            self.pmf[k as usize]
        } else {
            0.0
        }
    }

    #[inline]
    fn cmf(&self, k: i64) -> f64 {
        if k < 0 {
            0.0
        } else if k >= TABLE_K as i64 {
            1.0
        } else {
            self.cmf[k as usize]
        }
    }
}

// --- integrands in scaled coordinates ---------------------------------------

/// Joint probability that an AP at scaled distance `s` from the typical user
/// is its rank-`n`-th server and also serves a user at (t, v).
fn h_tag_m1(s: f64, t: f64, v: f64, rank: u32, n_s: u32) -> f64 {
    if s <= 0.0 || t <= 0.0 {
        return 0.0;
    }
    let lens = aoi2(s, t, v) / PI;
    let rho_x_sq = s * s + t * t - 2.0 * s * t * v.cos();
    let in_lens = PoissonTable::new(lens);
    let o_only = PoissonTable::new(s * s - lens);
    let x_only = PoissonTable::new(rho_x_sq - lens);
    let mut h = 0.0;
    for n in 0..rank as i64 {
        h += in_lens.pmf(n)
            * o_only.pmf(rank as i64 - n - 1)
            * x_only.cmf(n_s as i64 - n - 1);
    }
    h
}

/// Pair probability that two users at scaled radii (s, t) with angle `u`
/// between them are both served by the typical AP at the origin.
fn h_typ_m2(s: f64, t: f64, u: f64, n_s: u32) -> f64 {
    if s <= 0.0 || t <= 0.0 {
        return 0.0;
    }
    let lens = overlap_from_common_point(s, t, u) / PI;
    let in_lens = PoissonTable::new(lens);
    let x_only = PoissonTable::new(s * s - lens);
    let y_only = PoissonTable::new(t * t - lens);
    let mut h = 0.0;
    for l in 0..n_s as i64 {
        h += in_lens.pmf(l) * x_only.cmf(n_s as i64 - l - 1) * y_only.cmf(n_s as i64 - l - 1);
    }
    h
}

/// Pair probability that the typical user's rank-`rank` AP at scaled
/// distance `s` serves both users at (t_x, v_x) and (t_y, v_y).
fn h_tag_m2(s: f64, t_x: f64, t_y: f64, v_x: f64, v_y: f64, rank: u32, n_s: u32) -> f64 {
    if s <= 0.0 || t_x <= 0.0 || t_y <= 0.0 {
        return 0.0;
    }
    let rho_x = derived_radius(s, t_x, v_x);
    let rho_y = derived_radius(s, t_y, v_y);
    if rho_x <= 0.0 || rho_y <= 0.0 {
        return 0.0;
    }
    let l_ox = aoi2(s, t_x, v_x);
    let l_oy = aoi2(s, t_y, v_y);
    let Ok(u_xy) = pair_angle_uxy(s, t_x, t_y, v_x, v_y) else {
        return 0.0;
    };
    let l_xy = overlap_from_common_point(rho_x, rho_y, u_xy);
    // Angles of the two user directions at the AP, measured from the AP->o
    // axis with half-plane signs.
    let Ok(a_x) = crate::geometry::half_angle_u(t_x, s, v_x) else {
        return 0.0;
    };
    let Ok(a_y) = crate::geometry::half_angle_u(t_y, s, v_y) else {
        return 0.0;
    };
    let sign = |v: f64| if v.rem_euclid(2.0 * PI) <= PI { 1.0 } else { -1.0 };
    let a3 = match aoi3(s, rho_x, rho_y, sign(v_x) * a_x, sign(v_y) * a_y) {
        Ok(a) => a,
        Err(_) => return 0.0,
    };

    // Poisson means of the seven disjoint regions, in units of 1/(pi lambda).
    let mu_a3 = (a3 / PI).max(0.0);
    let mu_ox = ((l_ox - a3) / PI).max(0.0);
    let mu_oy = ((l_oy - a3) / PI).max(0.0);
    let mu_o_rest = (s * s - (l_ox + l_oy - a3) / PI).max(0.0);
    let mu_xy = ((l_xy - a3) / PI).max(0.0);
    let mu_x_rest = (rho_x * rho_x - (l_ox + l_xy - a3) / PI).max(0.0);
    let mu_y_rest = (rho_y * rho_y - (l_oy + l_xy - a3) / PI).max(0.0);

    let t_a3 = PoissonTable::new(mu_a3);
    let t_ox = PoissonTable::new(mu_ox);
    let t_oy = PoissonTable::new(mu_oy);
    let t_o_rest = PoissonTable::new(mu_o_rest);
    let t_xy = PoissonTable::new(mu_xy);
    let t_x_rest = PoissonTable::new(mu_x_rest);
    let t_y_rest = PoissonTable::new(mu_y_rest);

    let rank = rank as i64;
    let n_s = n_s as i64;
    let mut h = 0.0;
    for n in 0..rank {
        let pn = t_a3.pmf(n);
        if pn == 0.0 {
            continue;
        }
        for m in 0..rank - n {
            let pm = t_ox.pmf(m);
            if pm == 0.0 {
                continue;
            }
            for p in 0..rank - n - m {
                let pp = t_oy.pmf(p) * t_o_rest.pmf(rank - n - m - p - 1);
                if pp == 0.0 {
                    continue;
                }
                let q_max = (n_s - n - m - 1).min(n_s - n - p - 1);
                let mut inner = 0.0;
                for q in 0..=q_max {
                    inner += t_xy.pmf(q)
                        * t_x_rest.cmf(n_s - n - m - q - 1)
                        * t_y_rest.cmf(n_s - n - p - q - 1);
                }
                h += pn * pm * pp * inner;
            }
        }
    }
    h
}

// --- nested quadrature helpers -----------------------------------------------

fn breaks(hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| hi * i as f64 / n as f64).collect()
}

/// Nested adaptive integral over s in [0, s_max], t in [0, t_max], angle in
/// [0, pi] (doubled for the reflection symmetry of the angular integrand).
fn nested3(
    f: impl Fn(f64, f64, f64) -> f64,
    s_max: f64,
    t_max: f64,
    tol: QuadTol,
) -> Result<f64, LoadError> {
    let failed = Cell::new(false);
    let mid_tol = QuadTol {
        abs_tol: tol.abs_tol * 0.1,
        rel_tol: tol.rel_tol * 0.25,
        max_subdivisions: tol.max_subdivisions,
    };
    let inner_tol = QuadTol {
        abs_tol: tol.abs_tol * 0.01,
        rel_tol: tol.rel_tol * 0.1,
        max_subdivisions: tol.max_subdivisions,
    };
    // Pre-split coarse grids so narrow bumps cannot hide from the first
    // Gauss-Kronrod pass.
    let s_breaks = breaks(s_max, 8);
    let t_breaks = breaks(t_max, 12);
    let v_breaks = breaks(PI, 4);
    let outer = integrate_1d_split(
        |s| {
            let mid = integrate_1d_split(
                |t| {
                    let inner = integrate_1d_split(|v| f(s, t, v), &v_breaks, inner_tol);
                    if !inner.converged {
                        failed.set(true);
                    }
                    2.0 * inner.value * t
                },
                &t_breaks,
                mid_tol,
            );
            if !mid.converged {
                failed.set(true);
            }
            mid.value * s
        },
        &s_breaks,
        tol,
    );
    if !outer.converged || failed.get() {
        return Err(LoadError::Unconverged("nested load-moment quadrature"));
    }
    Ok(outer.value)
}

fn validate_rank(rank: u32, n_s: u32) -> Result<(), LoadError> {
    if n_s == 0 || n_s > MAX_NS {
        return Err(LoadError::InvalidParameter("n_s must be in 1..=MAX_NS"));
    }
    if rank == 0 || rank > n_s {
        return Err(LoadError::InvalidParameter("rank must be in 1..=n_s"));
    }
    Ok(())
}

fn radial_bounds(n_s: u32) -> (f64, f64) {
    // The integrands decay like exp(-s^2) (times polynomials of degree up to
    // n_s) in the scaled radius, and in t only once the user sits more than
    // the serving radius beyond the AP.
    let s_max = (n_s as f64 + 60.0).sqrt();
    let t_max = s_max + (n_s as f64 + 60.0).sqrt();
    (s_max, t_max)
}

/// Mean number of users (excluding the typical user) served by the typical
/// user's rank-`rank` nearest AP.
pub fn tagged_load_m1(
    rank: u32,
    lambda_r: f64,
    lambda_u: f64,
    n_s: u32,
    tol: QuadTol,
) -> Result<f64, LoadError> {
    validate_rank(rank, n_s)?;
    if !(lambda_r > 0.0) || !(lambda_u > 0.0) {
        return Err(LoadError::InvalidParameter("densities must be positive"));
    }
    let (s_max, t_max) = radial_bounds(n_s);
    let integral = nested3(|s, t, v| h_tag_m1(s, t, v, rank, n_s), s_max, t_max, tol)?;
    Ok(2.0 * lambda_u / (PI * lambda_r) * integral)
}

/// Second moment of the rank-`rank` tagged AP load, by randomized QMC over
/// the five-dimensional pair integral plus the diagonal (mean) term.
pub fn tagged_load_m2(
    rank: u32,
    lambda_r: f64,
    lambda_u: f64,
    n_s: u32,
    m1: f64,
    cfg: &LoadComputeConfig,
) -> Result<MomentEstimate, LoadError> {
    validate_rank(rank, n_s)?;
    if !(lambda_r > 0.0) || !(lambda_u > 0.0) {
        return Err(LoadError::InvalidParameter("densities must be positive"));
    }
    let (s_max, t_max) = radial_bounds(n_s);
    let domain = QmcBox::new(
        &[
            (0.0, s_max),
            (0.0, t_max),
            (0.0, t_max),
            (0.0, 2.0 * PI),
            (0.0, 2.0 * PI),
        ],
        cfg.qmc_budget,
    )
    .map_err(|_| LoadError::InvalidParameter("bad QMC configuration"))?;
    let est = integrate_qmc(
        |x| h_tag_m2(x[0], x[1], x[2], x[3], x[4], rank, n_s) * x[0] * x[1] * x[2],
        &domain,
        cfg.qmc_randomizations,
        cfg.qmc_seed ^ rank,
    );
    let scale = 2.0 * lambda_u * lambda_u / (PI * PI * lambda_r * lambda_r);
    Ok(MomentEstimate {
        value: scale * est.value + m1,
        std_error: scale * est.std_error,
    })
}

/// Both moments of the rank-`rank` tagged AP load.
pub fn tagged_load_moments(
    rank: u32,
    lambda_r: f64,
    lambda_u: f64,
    n_s: u32,
    cfg: &LoadComputeConfig,
) -> Result<(LoadMoments, f64), LoadError> {
    let m1 = tagged_load_m1(rank, lambda_r, lambda_u, n_s, cfg.quad_tol)?;
    let m2 = tagged_load_m2(rank, lambda_r, lambda_u, n_s, m1, cfg)?;
    Ok((LoadMoments { m1, m2: m2.value }, m2.std_error))
}

/// Moments of the typical AP's load. The mean is exact in closed form:
/// `n_s * lambda_u / lambda_r`.
pub fn typical_load_moments(
    lambda_r: f64,
    lambda_u: f64,
    n_s: u32,
    tol: QuadTol,
) -> Result<LoadMoments, LoadError> {
    if n_s == 0 || n_s > MAX_NS {
        return Err(LoadError::InvalidParameter("n_s must be in 1..=MAX_NS"));
    }
    if !(lambda_r > 0.0) || !(lambda_u > 0.0) {
        return Err(LoadError::InvalidParameter("densities must be positive"));
    }
    let m1 = n_s as f64 * lambda_u / lambda_r;
    let (s_max, _) = radial_bounds(n_s);
    let integral = nested3(|s, t, u| h_typ_m2(s, t, u, n_s), s_max, s_max, tol)?;
    let pair = 2.0 * lambda_u * lambda_u / (PI * lambda_r * lambda_r) * integral;
    Ok(LoadMoments { m1, m2: pair + m1 })
}

// --- negative binomial fit ----------------------------------------------------

/// Negative binomial parameters (shape `r`, success probability `p`) with
/// pmf Gamma(k+r) / (k! Gamma(r)) p^r (1-p)^k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegBinParams {
    pub r: f64,
    pub p: f64,
}

impl NegBinParams {
    pub fn mean(&self) -> f64 {
        (1.0 - self.p) * self.r / self.p
    }

    pub fn second_moment(&self) -> f64 {
        let q = (1.0 - self.p) * self.r;
        q * (1.0 + q) / (self.p * self.p)
    }

    pub fn pmf(&self, k: u64) -> f64 {
        let k_f = k as f64;
        (ln_gamma(k_f + self.r) - ln_gamma(k_f + 1.0) - ln_gamma(self.r)
            + self.r * self.p.ln()
            + k_f * (1.0 - self.p).ln())
        .exp()
    }
}

/// Moment-match a negative binomial: p = m1 / v, r = m1^2 / (v - m1).
/// Requires over-dispersion (v > m1).
pub fn fit_negbin(m: &LoadMoments) -> Result<NegBinParams, LoadError> {
    let v = m.variance();
    if !(m.m1 > 0.0) || !v.is_finite() {
        return Err(LoadError::InvalidParameter(
            "moments must be finite with positive mean",
        ));
    }
    if v <= m.m1 {
        return Err(LoadError::Underdispersed {
            mean: m.m1,
            variance: v,
        });
    }
    Ok(NegBinParams {
        r: m.m1 * m.m1 / (v - m.m1),
        p: m.m1 / v,
    })
}

/// Fitted load distribution, with fallbacks for moment pairs a negative
/// binomial cannot represent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoadDistribution {
    NegativeBinomial(NegBinParams),
    /// Fallback for (numerically) underdispersed moments.
    Poisson(f64),
    /// Zero mean: all mass at k = 0.
    DegenerateZero,
}

impl LoadDistribution {
    pub fn pmf(&self, k: u64) -> f64 {
        match self {
            LoadDistribution::NegativeBinomial(nb) => nb.pmf(k),
            LoadDistribution::Poisson(mu) => crate::numerics::poisson_pmf(k as i64, *mu),
            LoadDistribution::DegenerateZero => {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Negative-binomial fit with a Poisson fallback when the moment pair is
/// underdispersed (possible through QMC noise at small serving sets).
pub fn fit_load_distribution(m: &LoadMoments) -> LoadDistribution {
    if m.m1 <= 0.0 {
        return LoadDistribution::DegenerateZero;
    }
    match fit_negbin(m) {
        Ok(nb) => LoadDistribution::NegativeBinomial(nb),
        Err(_) => {
            log::warn!(
                "load moments underdispersed (m1={}, m2={}); falling back to Poisson",
                m.m1,
                m.m2
            );
            LoadDistribution::Poisson(m.m1)
        }
    }
}

/// Tabulated load pmf over k = 0..=k_cap with tail mass below `tail_eps`.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct LoadPmf {
    probs: Vec<f64>,
    tail_eps: f64,
}

impl LoadPmf {
    /// Tabulate a distribution until the residual mass drops under
    /// `tail_eps` (the cap is the smallest such k).
    pub fn from_distribution(dist: &LoadDistribution, tail_eps: f64) -> Self {
        let mut probs = Vec::new();
        let mut mass = 0.0;
        for k in 0..1_000_000u64 {
            let p = dist.pmf(k);
            probs.push(p);
            mass += p;
            if 1.0 - mass < tail_eps {
                break;
            }
        }
        Self { probs, tail_eps }
    }

    /// Empirical pmf from a histogram of counts.
    pub fn from_counts(counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        assert!(total > 0, "empty histogram");
        Self {
            probs: counts.iter().map(|&c| c as f64 / total as f64).collect(),
            tail_eps: 0.0,
        }
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn k_cap(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn tail_eps(&self) -> f64 {
        self.tail_eps
    }

    /// P[K <= k]; negative arguments give 0.
    pub fn cdf_at(&self, k: i64) -> f64 {
        if k < 0 {
            return 0.0;
        }
        let upto = (k as usize).min(self.probs.len() - 1);
        self.probs[..=upto].iter().sum::<f64>().min(1.0)
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }

    /// Total-variation distance, treating both pmfs as zero beyond their
    /// caps.
    pub fn tv_distance(&self, other: &LoadPmf) -> f64 {
        let n = self.probs.len().max(other.probs.len());
        0.5 * (0..n)
            .map(|k| (self.prob(k) - other.prob(k)).abs())
            .sum::<f64>()
    }

    /// CSV export: `k,probability` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,probability")?;
        for (k, p) in self.probs.iter().enumerate() {
            writeln!(w, "{k},{p}")?;
        }
        Ok(())
    }
}

/// Probability that the typical AP's SCNR meets the target `t_s` under the
/// fitted load pmf: P[K <= c_f / log2(1 + t_s)].
pub fn scnr_coverage(c_f: f64, t_s: f64, pmf: &LoadPmf) -> Result<f64, LoadError> {
    if !(t_s > 0.0) {
        return Err(LoadError::InvalidTarget(t_s));
    }
    if !(c_f > 0.0) {
        return Err(LoadError::InvalidParameter("c_f must be positive"));
    }
    let threshold = (c_f / (1.0 + t_s).log2()).floor() as i64;
    Ok(pmf.cdf_at(threshold))
}

/// Smallest fronthaul capacity whose SCNR coverage reaches `target_prob`.
pub fn required_cf_for_target(t_s: f64, pmf: &LoadPmf, target_prob: f64) -> Result<f64, LoadError> {
    if !(t_s > 0.0) {
        return Err(LoadError::InvalidTarget(t_s));
    }
    let per_user = (1.0 + t_s).log2();
    let mut k = 0i64;
    while pmf.cdf_at(k) < target_prob {
        k += 1;
        if k as usize > pmf.k_cap() + 1 {
            return Err(LoadError::InvalidParameter(
                "target probability unreachable within pmf support",
            ));
        }
    }
    Ok(k as f64 * per_user)
}

/// Effective mean schedule contribution of the rank-`i` serving AP:
/// 1 + E[min(K_i, k_max)] under the fitted pmf of K_i. Used for ranks >= 2,
/// where the typical user's own slot accounts for the leading 1.
pub fn effective_mean_load(i_rank: u32, k_max: u32, pmf: &LoadPmf) -> f64 {
    debug_assert!(i_rank >= 2, "rank-1 load is handled exactly");
    debug_assert!(k_max >= 1);
    let _ = i_rank;
    let capped: f64 = pmf
        .probs
        .iter()
        .enumerate()
        .map(|(k, p)| (k as f64).min(k_max as f64) * p)
        .sum();
    1.0 + capped
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LAMBDA: f64 = 1e-4;

    #[test]
    fn tagged_m1_linear_in_user_density() {
        let tol = QuadTol::with_rel_tol(1e-5);
        let a = tagged_load_m1(1, LAMBDA, LAMBDA, 3, tol).unwrap();
        let b = tagged_load_m1(1, LAMBDA, 2.0 * LAMBDA, 3, tol).unwrap();
        assert!((b / a - 2.0).abs() < 1e-4, "ratio {}", b / a);
    }

    #[test]
    fn tagged_m1_rank_ordering() {
        let tol = QuadTol::with_rel_tol(1e-5);
        let m: Vec<f64> = (1..=3)
            .map(|rank| tagged_load_m1(rank, LAMBDA, LAMBDA, 5, tol).unwrap())
            .collect();
        assert!(m[0] > m[1] && m[1] > m[2], "rank means {m:?}");
        assert!(m.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn tagged_m1_matches_zero_cell_constant() {
        // With one serving AP the rank-1 tagged AP is the zero-cell owner;
        // its mean extra load is the zero-cell area ratio 1.2802.
        let tol = QuadTol::with_rel_tol(1e-6);
        let m1 = tagged_load_m1(1, LAMBDA, LAMBDA, 1, tol).unwrap();
        assert!((m1 - 1.2802).abs() < 2e-3, "got {m1}");
    }

    #[test]
    fn tagged_m1_qmc_agrees_with_quadrature() {
        // Same 3D integral through the QMC engine, for a small serving set.
        for n_s in 1..=3u32 {
            let quad = tagged_load_m1(1, LAMBDA, LAMBDA, n_s, QuadTol::default()).unwrap();
            let (s_max, t_max) = radial_bounds(n_s);
            let domain = QmcBox::new(
                &[(0.0, s_max), (0.0, t_max), (0.0, 2.0 * PI)],
                1 << 18,
            )
            .unwrap();
            let est = integrate_qmc(
                |x| h_tag_m1(x[0], x[1], x[2], 1, n_s) * x[0] * x[1],
                &domain,
                8,
                99,
            );
            let qmc = 2.0 / PI * est.value;
            let band = 3.0 * (2.0 / PI * est.std_error) + 1e-5 * quad;
            assert!(
                (qmc - quad).abs() <= band,
                "n_s={n_s}: qmc {qmc} vs quad {quad} (band {band})"
            );
        }
    }

    #[test]
    fn typical_moments_mean_exact_and_remark_constant() {
        let m = typical_load_moments(LAMBDA, LAMBDA, 1, QuadTol::with_rel_tol(1e-6)).unwrap();
        assert!((m.m1 - 1.0).abs() < 1e-12);
        // For a single serving AP the load is the typical-cell user count:
        // E[K^2] = m1^2 + 1.2802 exactly.
        let expect = 1.0 + 1.2802;
        assert!(
            (m.m2 - expect).abs() / expect < 0.005,
            "m2 {} vs {expect}",
            m.m2
        );
    }

    #[test]
    fn typical_mean_formula() {
        let m = typical_load_moments(1e-4, 2e-4, 4, QuadTol::with_rel_tol(1e-4)).unwrap();
        assert_eq!(m.m1, 4.0 * 2e-4 / 1e-4);
    }

    #[test]
    fn fit_negbin_hand_example() {
        let nb = fit_negbin(&LoadMoments { m1: 2.0, m2: 8.0 }).unwrap();
        assert!((nb.p - 0.5).abs() < 1e-15);
        assert!((nb.r - 2.0).abs() < 1e-15);
        assert!((nb.mean() - 2.0).abs() < 1e-15);
        assert!((nb.second_moment() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn fit_negbin_rejects_underdispersion() {
        let err = fit_negbin(&LoadMoments { m1: 2.0, m2: 5.5 }).unwrap_err();
        assert!(matches!(err, LoadError::Underdispersed { .. }));
        // Fallback keeps the mean.
        let dist = fit_load_distribution(&LoadMoments { m1: 2.0, m2: 5.5 });
        assert_eq!(dist, LoadDistribution::Poisson(2.0));
        assert_eq!(
            fit_load_distribution(&LoadMoments { m1: 0.0, m2: 0.0 }),
            LoadDistribution::DegenerateZero
        );
    }

    proptest! {
        #[test]
        fn fit_negbin_roundtrips_moments(m1 in 0.05f64..50.0, excess in 0.01f64..30.0) {
            let v = m1 * (1.0 + excess);
            let m = LoadMoments { m1, m2: v + m1 * m1 };
            let nb = fit_negbin(&m).unwrap();
            prop_assert!((nb.mean() - m.m1).abs() <= 1e-9 * m.m1);
            prop_assert!((nb.second_moment() - m.m2).abs() <= 1e-9 * m.m2);
        }
    }

    #[test]
    fn load_pmf_tabulation_and_moments() {
        let nb = fit_negbin(&LoadMoments { m1: 5.0, m2: 31.4 }).unwrap();
        let pmf = LoadPmf::from_distribution(&LoadDistribution::NegativeBinomial(nb), 1e-6);
        let total: f64 = (0..=pmf.k_cap()).map(|k| pmf.prob(k)).sum();
        assert!((total - 1.0).abs() <= 1e-6);
        assert!((pmf.mean() - 5.0).abs() < 1e-3);
        assert!((pmf.cdf_at(pmf.k_cap() as i64) - 1.0).abs() <= 1e-6);
        assert_eq!(pmf.cdf_at(-1), 0.0);
    }

    #[test]
    fn scnr_coverage_limits() {
        let nb = fit_negbin(&LoadMoments { m1: 5.0, m2: 31.4 }).unwrap();
        let pmf = LoadPmf::from_distribution(&LoadDistribution::NegativeBinomial(nb), 1e-6);
        // Vanishing target: threshold blows up, probability 1.
        let p = scnr_coverage(20.0, 1e-12, &pmf).unwrap();
        assert!((p - 1.0).abs() < 1e-6);
        // Monotone non-increasing in the target.
        let mut prev = 1.0;
        for i in 0..60 {
            let t_s = 10f64.powf(-2.0 + 4.0 * i as f64 / 59.0);
            let p = scnr_coverage(20.0, t_s, &pmf).unwrap();
            assert!(p <= prev + 1e-12);
            prev = p;
        }
        assert!(matches!(
            scnr_coverage(20.0, 0.0, &pmf),
            Err(LoadError::InvalidTarget(_))
        ));
    }

    #[test]
    fn effective_mean_load_limits() {
        let nb = fit_negbin(&LoadMoments { m1: 5.0, m2: 31.4 }).unwrap();
        let pmf = LoadPmf::from_distribution(&LoadDistribution::NegativeBinomial(nb), 1e-9);
        // Uncapped: 1 + mean.
        let big = effective_mean_load(2, 1_000_000, &pmf);
        assert!((big - (1.0 + pmf.mean())).abs() < 1e-6);
        // Cap 1: 1 + P[K >= 1].
        let one = effective_mean_load(2, 1, &pmf);
        assert!((one - (1.0 + (1.0 - pmf.prob(0)))).abs() < 1e-9);
        // Direct truncated-sum oracle at a middling cap.
        let k_max = 8u32;
        let direct: f64 = (0..=pmf.k_cap())
            .map(|k| (k.min(k_max as usize)) as f64 * pmf.prob(k))
            .sum::<f64>()
            + 1.0;
        assert!((effective_mean_load(2, k_max, &pmf) - direct).abs() < 1e-12);
    }

    #[test]
    fn required_cf_is_consistent_with_coverage() {
        let nb = fit_negbin(&LoadMoments { m1: 5.0, m2: 31.4 }).unwrap();
        let pmf = LoadPmf::from_distribution(&LoadDistribution::NegativeBinomial(nb), 1e-9);
        let t_s = 10f64.powf(1.5);
        let c = required_cf_for_target(t_s, &pmf, 0.95).unwrap();
        assert!(scnr_coverage(c, t_s, &pmf).unwrap() >= 0.95);
        // A slightly smaller capacity must fail the target.
        let eps = (1.0 + t_s).log2() * 0.5;
        if c > eps {
            assert!(scnr_coverage(c - eps, t_s, &pmf).unwrap() < 0.95);
        }
    }
}
