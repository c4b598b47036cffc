//! Conditional SINR of a selected user, given AP/user positions.
//!
//! With conjugate beamforming from MMSE channel estimates, equal power
//! allocation 1/K_max, and per-AP fronthaul compression, the achievable-rate
//! SINR of a user conditioned on all positions is
//!
//! ```text
//!            rho_d N_a ( sum_{l in serving} sqrt(gamma_l (1 - x_l) / K_max) )^2
//! SINR = ---------------------------------------------------------------------------
//!        rho_d N_a sum_serving gamma_l x_l / K_max  +  rho_d sum_all beta_l
//!          + rho_d N_a sum_copilot ( sum_{l in serving_i} sqrt(gamma_l / K_max) )^2  + 1
//! ```
//!
//! where `x_l = 2^{-c_f / k_l}` is the compression-error share at an AP
//! scheduling `k_l` users. [`sinr_traditional`] is the finite-network special
//! case where every AP serves all `K` users with orthogonal pilots.
//!
//! [`term_variances`] exposes the underlying per-signal variance
//! decomposition as a diagnostic. The inter-user and non-serving-AP terms
//! are reported at their schedule-size upper bounds (each AP contributes its
//! full power share), and the copilot term is the coherent part; under those
//! conventions the identity `T1 / (T2 + ... + T7 + 1)` reproduces the SINR
//! expression above exactly.

use crate::geometry::NetworkRealization;
use crate::propagation::{
    channel_gain, compression_split, estimation_variance, FronthaulParams, RadioParams,
};

/// Serving, load, scheduling, and pilot structure of one realization.
///
/// `serving_sets[u]` lists the AP indices serving user `u`, nearest first.
/// `loads[l]` counts the users associated with AP `l`; `scheduled[l]` is the
/// subset actually scheduled on the evaluated resource (at most `k_max`).
/// `pilot_plan[u]` is the pilot index of user `u`.
#[derive(Debug, Clone, Default)]
pub struct Association {
    pub serving_sets: Vec<Vec<usize>>,
    pub loads: Vec<u32>,
    pub scheduled: Vec<Vec<usize>>,
    pub pilot_plan: Vec<u32>,
}

impl Association {
    /// Check the structural invariants; used by tests and debug builds.
    pub fn validate(&self, realization: &NetworkRealization, k_max: u32) -> Result<(), String> {
        if self.serving_sets.len() != realization.users.len() {
            return Err("serving_sets length != user count".into());
        }
        let mut loads = vec![0u32; realization.aps.len()];
        for (u, set) in self.serving_sets.iter().enumerate() {
            let pos = &realization.users[u];
            for w in set.windows(2) {
                let d0 = realization.aps[w[0]].distance(pos);
                let d1 = realization.aps[w[1]].distance(pos);
                if d0 > d1 + 1e-9 {
                    return Err(format!("serving set of user {u} not sorted by distance"));
                }
            }
            for &l in set {
                loads[l] += 1;
            }
        }
        if loads != self.loads {
            return Err("loads inconsistent with serving sets".into());
        }
        for (l, sched) in self.scheduled.iter().enumerate() {
            if sched.len() as u32 > k_max {
                return Err(format!("AP {l} schedules more than k_max users"));
            }
            if sched.len() as u32 > self.loads[l] {
                return Err(format!("AP {l} schedules users it does not serve"));
            }
        }
        Ok(())
    }

    /// Users sharing `user`'s pilot (excluding `user` itself).
    pub fn copilot_users(&self, user: usize) -> Vec<usize> {
        let pilot = self.pilot_plan[user];
        (0..self.pilot_plan.len())
            .filter(|&j| j != user && self.pilot_plan[j] == pilot)
            .collect()
    }
}

/// Per-term variances of the received-signal decomposition.
///
/// `t1` desired signal, `t2` beamforming uncertainty, `t3` compression
/// error, `t4` channel-estimation error, `t5` inter-user interference at
/// serving APs (upper bound with the (K_max - 1)/K_max factor), `t6`
/// non-serving-AP interference (upper bound: full power share per AP), `t7`
/// coherent pilot contamination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermVariances {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub t5: f64,
    pub t6: f64,
    pub t7: f64,
}

impl TermVariances {
    /// SINR implied by the decomposition: T1 / (T2 + ... + T7 + 1).
    pub fn sinr(&self) -> f64 {
        self.t1 / (self.t2 + self.t3 + self.t4 + self.t5 + self.t6 + self.t7 + 1.0)
    }
}

/// Estimation variance of `user`'s channel at AP `l`, including pilot
/// contamination from the given copilot users.
fn gamma_at(
    user: usize,
    ap: usize,
    copilots: &[usize],
    realization: &NetworkRealization,
    radio: &RadioParams,
) -> f64 {
    let ap_pos = &realization.aps[ap];
    let beta = channel_gain(ap_pos.distance(&realization.users[user]), radio);
    let copilot_sum: f64 = copilots
        .iter()
        .map(|&j| channel_gain(ap_pos.distance(&realization.users[j]), radio))
        .sum();
    estimation_variance(beta, copilot_sum, radio)
}

/// Conditional SINR of `user` in a user-centric realization.
///
/// The user must be scheduled at every AP of its serving set; an empty
/// serving set yields SINR 0. This is a direct evaluation of the closed
/// form in the module docs; [`term_variances`] reaches the same value
/// through a different grouping and serves as its cross-check.
pub fn sinr_user_centric(
    user: usize,
    realization: &NetworkRealization,
    assoc: &Association,
    radio: &RadioParams,
    fh: &FronthaulParams,
) -> f64 {
    let serving = &assoc.serving_sets[user];
    if serving.is_empty() {
        return 0.0;
    }
    let rho_na = radio.rho_d * radio.n_antennas as f64;
    let k_max = fh.k_max as f64;
    let user_pos = &realization.users[user];
    let copilots = assoc.copilot_users(user);

    let mut sig_amp = 0.0;
    let mut compression = 0.0;
    for &l in serving {
        debug_assert!(
            assoc.scheduled[l].contains(&user),
            "user must be scheduled at every serving AP"
        );
        let k_l = assoc.scheduled[l].len() as u32;
        let (rho_q, rho_qtilde) = compression_split(fh.c_f, k_l).expect("serving AP has load >= 1");
        let gamma = gamma_at(user, l, &copilots, realization, radio);
        sig_amp += (gamma * rho_q / k_max).sqrt();
        compression += gamma * rho_qtilde / k_max;
    }

    let beta_all: f64 = realization
        .aps
        .iter()
        .map(|ap| channel_gain(ap.distance(user_pos), radio))
        .sum();

    let mut pilot = 0.0;
    for &i in &copilots {
        let inner: f64 = assoc.serving_sets[i]
            .iter()
            .map(|&l| (gamma_at(user, l, &copilots, realization, radio) / k_max).sqrt())
            .sum();
        pilot += inner * inner;
    }

    let num = rho_na * sig_amp * sig_amp;
    let den = rho_na * compression + radio.rho_d * beta_all + rho_na * pilot + 1.0;
    num / den
}

/// Signal-decomposition variances for `user`; see the module docs for the
/// bound conventions that make `TermVariances::sinr` match the closed form.
pub fn term_variances(
    user: usize,
    realization: &NetworkRealization,
    assoc: &Association,
    radio: &RadioParams,
    fh: &FronthaulParams,
) -> TermVariances {
    let serving = &assoc.serving_sets[user];
    let rho_d = radio.rho_d;
    let n_a = radio.n_antennas as f64;
    let k_max = fh.k_max as f64;
    let user_pos = &realization.users[user];
    let copilots = assoc.copilot_users(user);

    if serving.is_empty() {
        return TermVariances {
            t1: 0.0,
            t2: 0.0,
            t3: 0.0,
            t4: 0.0,
            t5: 0.0,
            t6: 0.0,
            t7: 0.0,
        };
    }

    let mut sig_amp = 0.0; // sum of sqrt(gamma (1 - x) / K_max)
    let mut t2 = 0.0;
    let mut t3 = 0.0;
    let mut t4 = 0.0;
    let mut t5 = 0.0;
    let mut beta_serving = 0.0;
    for &l in serving {
        debug_assert!(
            assoc.scheduled[l].contains(&user),
            "user must be scheduled at every serving AP"
        );
        let k_l = assoc.scheduled[l].len() as u32;
        let (_, x_l) = compression_split(fh.c_f, k_l).expect("serving AP has load >= 1");
        let gamma = gamma_at(user, l, &copilots, realization, radio);
        let beta = channel_gain(realization.aps[l].distance(user_pos), radio);
        sig_amp += (gamma * (1.0 - x_l) / k_max).sqrt();
        t2 += rho_d * gamma * (1.0 - x_l) / k_max;
        t3 += rho_d * (n_a + 1.0) * gamma * x_l / k_max;
        t4 += rho_d * (beta - gamma) / k_max;
        t5 += rho_d * (k_max - 1.0) / k_max * beta;
        beta_serving += beta;
    }
    let t1 = rho_d * n_a * sig_amp * sig_amp;

    let beta_all: f64 = realization
        .aps
        .iter()
        .map(|ap| channel_gain(ap.distance(user_pos), radio))
        .sum();
    let t6 = rho_d * (beta_all - beta_serving);

    let mut t7 = 0.0;
    for &i in &copilots {
        let inner: f64 = assoc.serving_sets[i]
            .iter()
            .map(|&l| (gamma_at(user, l, &copilots, realization, radio) / k_max).sqrt())
            .sum();
        t7 += rho_d * n_a * inner * inner;
    }

    TermVariances {
        t1,
        t2,
        t3,
        t4,
        t5,
        t6,
        t7,
    }
}

/// Conditional SINR of a user in the traditional finite network: all APs
/// serve all `k_users` users, pilots are orthogonal, and power splits
/// equally 1/K across users.
pub fn sinr_traditional(
    user_to_ap_distances: &[f64],
    radio: &RadioParams,
    c_f: f64,
    k_users: u32,
) -> f64 {
    assert!(k_users >= 1 && !user_to_ap_distances.is_empty());
    let (_, x) = compression_split(c_f, k_users).expect("k_users >= 1");
    let k = k_users as f64;
    let n_a = radio.n_antennas as f64;

    let mut i1 = 0.0;
    let mut i2 = 0.0;
    let mut i3 = 0.0;
    for &d in user_to_ap_distances {
        let beta = channel_gain(d, radio);
        let gamma = estimation_variance(beta, 0.0, radio);
        i1 += gamma.sqrt();
        i2 += gamma;
        i3 += beta;
    }

    let num = radio.rho_d * n_a / k * (1.0 - x) * i1 * i1;
    let den = radio.rho_d * n_a / k * x * i2 + radio.rho_d * i3 + 1.0;
    num / den
}
