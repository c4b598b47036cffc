//! Path loss, MMSE channel-estimation quality, and the fronthaul
//! compression split.
//!
//! Large-scale gain is distance-only: beta(d) = 1 / l(d) with the bounded
//! power law l(d) = (d / d_ref)^alpha for d > d_ref and 1 otherwise. Channel
//! estimates come from pilot-based MMSE estimation; the per-user compression
//! noise at an AP follows from splitting unit symbol power across the
//! information part and the compression error so that the fronthaul link of
//! capacity `c_f` is fully used by the `k` users the AP serves.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PropagationError {
    /// An AP without scheduled users has no compression split; skip it.
    #[error("no-load: compression split undefined for zero users")]
    NoLoad,
    /// Nonpositive SCNR target would allow an unbounded schedule.
    #[error("invalid-target: SCNR target must be positive, got {0}")]
    InvalidTarget(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Radio-layer parameters. SNRs are stored in linear units; use
/// [`RadioParams::from_db`] when configuring from decibel values.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RadioParams {
    /// Antennas per AP.
    pub n_antennas: u32,
    /// Downlink transmit SNR (linear).
    pub rho_d: f64,
    /// Pilot symbol SNR (linear).
    pub rho_p: f64,
    /// Pilot sequence length in symbols.
    pub tau_p: u32,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Reference distance below which there is no path loss, meters.
    pub d_ref: f64,
}

impl RadioParams {
    pub fn from_db(n_antennas: u32, rho_d_db: f64, rho_p_db: f64, tau_p: u32, alpha: f64) -> Self {
        let p = Self {
            n_antennas,
            rho_d: db_to_linear(rho_d_db),
            rho_p: db_to_linear(rho_p_db),
            tau_p,
            alpha,
            d_ref: 1.0,
        };
        p.validate().expect("valid radio parameters");
        p
    }

    pub fn validate(&self) -> Result<(), PropagationError> {
        if self.n_antennas == 0 {
            return Err(PropagationError::InvalidParameter("n_antennas must be >= 1"));
        }
        if !(self.rho_d > 0.0) || !(self.rho_p > 0.0) {
            return Err(PropagationError::InvalidParameter("SNRs must be positive"));
        }
        if self.tau_p == 0 {
            return Err(PropagationError::InvalidParameter("tau_p must be >= 1"));
        }
        if !(self.alpha > 0.0) || !(self.d_ref > 0.0) {
            return Err(PropagationError::InvalidParameter(
                "alpha and d_ref must be positive",
            ));
        }
        Ok(())
    }
}

/// Fronthaul link parameters with the derived cap on scheduled users.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FronthaulParams {
    /// Per-link fronthaul capacity, bits/s/Hz.
    pub c_f: f64,
    /// SCNR target (linear).
    pub t_s: f64,
    /// Maximum number of users an AP schedules on one resource.
    pub k_max: u32,
}

impl FronthaulParams {
    /// Derive `k_max` from the capacity and SCNR target.
    pub fn from_capacity_and_target(c_f: f64, t_s: f64) -> Result<Self, PropagationError> {
        let k_max = max_scheduled_users(c_f, t_s)?;
        if k_max == 0 {
            return Err(PropagationError::InvalidParameter(
                "capacity below one user at the SCNR target",
            ));
        }
        Ok(Self { c_f, t_s, k_max })
    }

    /// Same, but with the target given in dB.
    pub fn from_capacity_and_target_db(c_f: f64, t_s_db: f64) -> Result<Self, PropagationError> {
        Self::from_capacity_and_target(c_f, db_to_linear(t_s_db))
    }

    /// Explicit cap; `t_s` recorded as the SCNR implied by a full schedule.
    pub fn with_explicit_cap(c_f: f64, k_max: u32) -> Result<Self, PropagationError> {
        if !(c_f > 0.0) || k_max == 0 {
            return Err(PropagationError::InvalidParameter(
                "need c_f > 0 and k_max >= 1",
            ));
        }
        Ok(Self {
            c_f,
            t_s: (c_f / k_max as f64).exp2() - 1.0,
            k_max,
        })
    }
}

/// Bounded power-law path loss l(d) >= 1 (so gain beta = 1/l(d) <= 1).
pub fn path_loss(d: f64, params: &RadioParams) -> f64 {
    debug_assert!(d >= 0.0);
    if d <= params.d_ref {
        1.0
    } else {
        (d / params.d_ref).powf(params.alpha)
    }
}

/// Large-scale channel gain beta(d) = 1 / l(d).
pub fn channel_gain(d: f64, params: &RadioParams) -> f64 {
    1.0 / path_loss(d, params)
}

/// Per-antenna variance of the MMSE channel estimate:
/// gamma = tau_p rho_p beta^2 / (1 + tau_p rho_p (beta + copilot sum)).
///
/// `copilot_beta_sum` is the total gain of the *other* users sharing the
/// pilot (this user's own beta is added internally). Pass 0 for orthogonal
/// pilots or for the pilot-contamination-free operating regime.
pub fn estimation_variance(beta_k: f64, copilot_beta_sum: f64, params: &RadioParams) -> f64 {
    debug_assert!(beta_k >= 0.0 && copilot_beta_sum >= 0.0);
    if beta_k == 0.0 {
        return 0.0;
    }
    let tr = params.tau_p as f64 * params.rho_p;
    tr * beta_k * beta_k / (1.0 + tr * (beta_k + copilot_beta_sum))
}

/// Split of unit symbol power between information and compression error for
/// an AP serving `k` users over a link of capacity `c_f`:
/// rho_q = 1 - 2^{-c_f/k}, rho_qtilde = 2^{-c_f/k}.
///
/// The two parts sum to one exactly, and their ratio (the SCNR) is
/// 2^{c_f/k} - 1.
pub fn compression_split(c_f: f64, k: u32) -> Result<(f64, f64), PropagationError> {
    if k == 0 {
        return Err(PropagationError::NoLoad);
    }
    debug_assert!(c_f > 0.0);
    let rho_qtilde = (-c_f / k as f64).exp2();
    Ok((1.0 - rho_qtilde, rho_qtilde))
}

/// Signal-to-compression-noise ratio 2^{c_f/k} - 1 for an AP serving `k`
/// users.
pub fn scnr(c_f: f64, k: u32) -> Result<f64, PropagationError> {
    if k == 0 {
        return Err(PropagationError::NoLoad);
    }
    Ok((c_f / k as f64).exp2() - 1.0)
}

/// Largest schedule size keeping the per-user SCNR at or above `t_s`:
/// floor(c_f / log2(1 + t_s)).
pub fn max_scheduled_users(c_f: f64, t_s: f64) -> Result<u32, PropagationError> {
    if !(t_s > 0.0) {
        return Err(PropagationError::InvalidTarget(t_s));
    }
    debug_assert!(c_f > 0.0);
    Ok((c_f / (1.0 + t_s).log2()).floor() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radio() -> RadioParams {
        RadioParams::from_db(4, 100.0, 100.0, 80, 3.7)
    }

    #[test]
    fn path_loss_flat_below_reference() {
        assert_eq!(path_loss(0.5, &radio()), 1.0);
        assert_eq!(path_loss(0.0, &radio()), 1.0);
    }

    #[test]
    fn edge_snr_matches_link_budget() {
        // Received SNR at 500 m with rho_d = 100 dB and alpha = 3.7:
        // 100 - 10 * 3.7 * log10(500) dB.
        let r = radio();
        let rx_db = linear_to_db(r.rho_d * channel_gain(500.0, &r));
        assert!((rx_db - 0.1381).abs() < 1e-3, "edge SNR {rx_db} dB");
    }

    #[test]
    fn path_loss_monotone_and_continuous_at_reference() {
        let r = radio();
        assert!(path_loss(2.0, &r) < path_loss(3.0, &r));
        let below = path_loss(1.0 - 1e-12, &r);
        let above = path_loss(1.0 + 1e-12, &r);
        assert!((below - 1.0).abs() < 1e-9 && (above - 1.0).abs() < 1e-9);
    }

    #[test]
    fn estimation_variance_limits() {
        let r = radio();
        assert_eq!(estimation_variance(0.0, 0.0, &r), 0.0);

        // Perfect-CSI limit: huge pilot SNR drives gamma to beta.
        let mut hi = r;
        hi.rho_p = 1e12;
        let beta = 1e-3;
        let gamma = estimation_variance(beta, 0.0, &hi);
        assert!((gamma - beta).abs() / beta < 1e-6);

        // Direct arithmetic check at tau_p * rho_p = 80e8.
        let mut p = r;
        p.rho_p = 1e8;
        p.tau_p = 80;
        let tr = 80.0 * 1e8;
        let expect = tr * beta * beta / (1.0 + tr * beta);
        assert!((estimation_variance(beta, 0.0, &p) - expect).abs() < 1e-18);
    }

    #[test]
    fn estimation_variance_bounded_and_monotone() {
        let r = radio();
        for &beta in &[1e-8, 1e-5, 1e-2, 1.0] {
            for &copilot in &[0.0, 1e-6, 1e-3] {
                let g = estimation_variance(beta, copilot, &r);
                assert!(g >= 0.0 && g <= beta);
                // Decreasing in the copilot sum.
                assert!(estimation_variance(beta, copilot + 1e-3, &r) < g + 1e-30);
            }
            // Increasing in pilot SNR.
            let mut lo = r;
            lo.rho_p = r.rho_p / 10.0;
            assert!(estimation_variance(beta, 0.0, &lo) <= estimation_variance(beta, 0.0, &r));
        }
    }

    #[test]
    fn compression_split_halves_at_unit_ratio() {
        let (q, qt) = compression_split(8.0, 8).unwrap();
        assert_eq!(q, 0.5);
        assert_eq!(qt, 0.5);
    }

    #[test]
    fn compression_split_sums_to_one_bit_exact() {
        for k in 1..200u32 {
            for &c_f in &[0.5, 1.0, 20.0, 45.0, 1000.0] {
                let (q, qt) = compression_split(c_f, k).unwrap();
                assert_eq!(q + qt, 1.0, "c_f={c_f}, k={k}");
            }
        }
    }

    #[test]
    fn scnr_examples_and_monotonicity() {
        assert!((scnr(20.0, 4).unwrap() - 31.0).abs() < 1e-12);
        // Large-k limit: compression error takes all the power.
        let (_, qt) = compression_split(20.0, 1_000_000).unwrap();
        assert!((qt - 1.0).abs() < 1e-4);
        assert!(scnr(20.0, 1_000_000).unwrap() < 1e-4);
        // Strictly decreasing in k, increasing in c_f.
        for k in 1..40u32 {
            assert!(scnr(20.0, k).unwrap() > scnr(20.0, k + 1).unwrap());
        }
        for c in 1..40 {
            assert!(scnr(c as f64, 4).unwrap() < scnr((c + 1) as f64, 4).unwrap());
        }
        assert_eq!(compression_split(20.0, 0).unwrap_err(), PropagationError::NoLoad);
    }

    #[test]
    fn max_scheduled_users_examples() {
        let t_s = 10f64.powf(1.5); // 15 dB
        assert_eq!(max_scheduled_users(20.0, t_s).unwrap(), 3);
        assert_eq!(max_scheduled_users(45.0, t_s).unwrap(), 8);
        // Exact boundary: capacity equal to one user's requirement.
        let l = (1.0 + t_s).log2();
        assert_eq!(max_scheduled_users(l, t_s).unwrap(), 1);
        assert!(matches!(
            max_scheduled_users(20.0, 0.0),
            Err(PropagationError::InvalidTarget(_))
        ));
    }
}
