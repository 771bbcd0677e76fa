//! Event-level simulation of the two-sub-slot protocol.
//!
//! Every trial draws the eight squared channel magnitudes once (they are
//! stationary over the slot) and decides the outage events from the SINR
//! expressions directly. No closed form from [`crate::analytic`] is used
//! here.
//!
//! Trial `i` always reads its randomness from ChaCha8 stream `i` under a key
//! derived from the master seed, so the result depends only on
//! `(seed, trials, scenario, α, scheme)` and never on how trials are split
//! across workers. Reduction is by integer counting.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::analytic::User;
use crate::error::{Error, Result};
use crate::system::{derive, DerivedParams, Link, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Proposed,
    NonCooperative,
    /// Relay forwards only the secondary signal while PT keeps transmitting.
    RelayAssistedSecondary,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Proposed, Scheme::NonCooperative, Scheme::RelayAssistedSecondary];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::NonCooperative => "noncooperative",
            Scheme::RelayAssistedSecondary => "relay_assisted_secondary",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(Scheme::Proposed),
            "noncooperative" | "noncoop" => Ok(Scheme::NonCooperative),
            "relay_assisted_secondary" | "ras" => Ok(Scheme::RelayAssistedSecondary),
            _ => Err(Error::invalid(format!("unknown scheme '{s}'"))),
        }
    }
}

/// Squared channel magnitudes |h_ab|² of one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    pub g: [f64; 8],
}

impl ChannelDraw {
    pub fn get(&self, link: Link) -> f64 {
        self.g[link.index()]
    }
}

/// Each |h_ab|² is exponential with mean σ²_ab.
pub fn sample_channels<R: Rng + ?Sized>(rng: &mut R, params: &SystemParams) -> ChannelDraw {
    let mut g = [0.0; 8];
    for (slot, link) in g.iter_mut().zip(Link::ALL) {
        let e: f64 = rng.sample(Exp1);
        *slot = e * params.link_vars.get(link);
    }
    ChannelDraw { g }
}

/// Outcome of the relay's SIC attempt in the first sub-slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelayDecision {
    /// A_p ∩ B_p ∩ C_p: x_p decoded first, then x_s.
    pub primary_first: bool,
    /// A_s ∩ B_s ∩ C_s.
    pub secondary_first: bool,
    /// Which SINR was larger at the relay (event C_p vs C_s).
    pub stronger: User,
}

impl RelayDecision {
    pub fn active(&self) -> bool {
        self.primary_first || self.secondary_first
    }
}

pub fn relay_decision(draw: &ChannelDraw, d: &DerivedParams) -> RelayDecision {
    let at_r_p = d.snr_p * draw.get(Link::PR);
    let at_r_s = d.snr_s * draw.get(Link::SR);
    let c_p = at_r_p > at_r_s;
    // A_i: decode i while the other signal interferes; B_i: decode the other
    // one cleanly after cancellation.
    let a_p = at_r_p / (at_r_s + 1.0) >= d.lambda_p;
    let b_p = at_r_s >= d.lambda_s;
    let a_s = at_r_s / (at_r_p + 1.0) >= d.lambda_s;
    let b_s = at_r_p >= d.lambda_p;
    RelayDecision {
        primary_first: a_p && b_p && c_p,
        secondary_first: a_s && b_s && !c_p,
        stronger: if c_p { User::Primary } else { User::Secondary },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotOutcome {
    pub relay_active: bool,
    pub pri_outage: bool,
    pub sec_outage: bool,
}

/// SINRs of the first sub-slot direct links (interference from the other
/// transmitter treated as noise).
fn direct_sinrs(draw: &ChannelDraw, d: &DerivedParams) -> (f64, f64) {
    let pri = d.snr_p * draw.get(Link::PP) / (d.snr_s * draw.get(Link::SP) + 1.0);
    let sec = d.snr_s * draw.get(Link::SS) / (d.snr_p * draw.get(Link::PS) + 1.0);
    (pri, sec)
}

/// Combined SINRs when PT and ST repeat their symbols.
fn repeat_sinrs(draw: &ChannelDraw, d: &DerivedParams) -> (f64, f64) {
    let (p, s) = direct_sinrs(draw, d);
    (2.0 * p, 2.0 * s)
}

/// Combined SINRs when the relay forwards both signals with split α.
fn relay_sinrs(draw: &ChannelDraw, d: &DerivedParams, alpha: f64) -> (f64, f64) {
    let (p, s) = direct_sinrs(draw, d);
    let w_p = d.snr_r * draw.get(Link::RP);
    let w_s = d.snr_r * draw.get(Link::RS);
    let pri = p + alpha * w_p / ((1.0 - alpha) * w_p + 1.0);
    let sec = s + (1.0 - alpha) * w_s / (alpha * w_s + 1.0);
    (pri, sec)
}

/// Proposed scheme: D from the relay's SIC, then the matching second
/// sub-slot and MRC at both destinations.
pub fn simulate_slot(draw: &ChannelDraw, d: &DerivedParams, alpha: f64) -> SlotOutcome {
    let active = relay_decision(draw, d).active();
    let (pri, sec) = if active {
        relay_sinrs(draw, d, alpha)
    } else {
        repeat_sinrs(draw, d)
    };
    SlotOutcome {
        relay_active: active,
        pri_outage: pri < d.lambda_p,
        sec_outage: sec < d.lambda_s,
    }
}

/// Single-slot transmission without relay, thresholds Θ.
pub fn simulate_noncoop(draw: &ChannelDraw, d: &DerivedParams) -> SlotOutcome {
    let (pri, sec) = direct_sinrs(draw, d);
    SlotOutcome {
        relay_active: false,
        pri_outage: pri < d.theta_p,
        sec_outage: sec < d.theta_s,
    }
}

/// Relay-assisted secondary baseline.
///
/// The relay decodes x_s treating x_p as noise. When it succeeds it sends
/// x_s at full power in the second sub-slot while PT repeats x_p, so each
/// destination sees the other transmitter as interference. Otherwise PT and
/// ST both repeat as in the D = 0 case of the proposed scheme.
pub fn simulate_relay_assisted_secondary(draw: &ChannelDraw, d: &DerivedParams) -> SlotOutcome {
    let at_r_p = d.snr_p * draw.get(Link::PR);
    let at_r_s = d.snr_s * draw.get(Link::SR);
    let active = d.snr_r > 0.0 && at_r_s / (at_r_p + 1.0) >= d.lambda_s;
    let (pri, sec) = if active {
        let (p, s) = direct_sinrs(draw, d);
        let pp = d.snr_p * draw.get(Link::PP);
        let pri = p + pp / (d.snr_r * draw.get(Link::RP) + 1.0);
        let sec = s + d.snr_r * draw.get(Link::RS) / (d.snr_p * draw.get(Link::PS) + 1.0);
        (pri, sec)
    } else {
        repeat_sinrs(draw, d)
    };
    SlotOutcome {
        relay_active: active,
        pri_outage: pri < d.lambda_p,
        sec_outage: sec < d.lambda_s,
    }
}

pub fn simulate_scheme(draw: &ChannelDraw, d: &DerivedParams, alpha: f64, scheme: Scheme) -> SlotOutcome {
    match scheme {
        Scheme::Proposed => simulate_slot(draw, d, alpha),
        Scheme::NonCooperative => simulate_noncoop(draw, d),
        Scheme::RelayAssistedSecondary => simulate_relay_assisted_secondary(draw, d),
    }
}

/// Counter-based source of per-trial random streams.
#[derive(Debug, Clone)]
pub struct TrialStreams {
    key: <ChaCha8Rng as SeedableRng>::Seed,
}

impl TrialStreams {
    pub fn new(seed: u64) -> Self {
        TrialStreams {
            key: ChaCha8Rng::seed_from_u64(seed).get_seed(),
        }
    }

    pub fn stream(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(trial);
        rng
    }
}

/// Binomial estimate of a probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub successes: u64,
    pub trials: u64,
    pub seed: u64,
}

impl OutageEstimate {
    pub fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        let (p_hat, std_err) = if trials == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let n = trials as f64;
            let p = successes as f64 / n;
            (p, (p * (1.0 - p) / n).sqrt())
        };
        OutageEstimate {
            p_hat,
            std_err,
            successes,
            trials,
            seed,
        }
    }

    /// Wilson score interval at `z` standard deviations.
    pub fn wilson(&self, z: f64) -> (f64, f64) {
        let n = self.trials as f64;
        let p = self.p_hat;
        let z2 = z * z;
        let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        ((center - half).max(0.0), (center + half).min(1.0))
    }

    /// True when the normal approximation is doubtful (fewer than ten events
    /// on either side).
    pub fn rare(&self) -> bool {
        self.successes < 10 || self.trials - self.successes < 10
    }

    /// Standardised distance to a reference probability `p`, using the
    /// binomial variance under `p`.
    pub fn z_score(&self, p: f64) -> f64 {
        let n = self.trials as f64;
        let var = p * (1.0 - p) / n;
        let diff = self.p_hat - p;
        if var > 0.0 {
            diff / var.sqrt()
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeEstimate {
    pub scheme: Scheme,
    pub pri: OutageEstimate,
    pub sec: OutageEstimate,
    /// Only reported for the proposed scheme.
    pub p_d1: Option<OutageEstimate>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidAlpha {
            alpha,
            expected: "[0, 1]",
        })
    }
}

/// Runs `per_trial` over trial indices `0..trials` on `workers` threads and
/// sums the integer counters it returns.
pub fn run_trials<const N: usize, F>(trials: u64, seed: u64, workers: usize, per_trial: F) -> [u64; N]
where
    F: Fn(&mut ChaCha8Rng) -> [u64; N] + Sync,
{
    const BLOCK: u64 = 4096;
    let streams = TrialStreams::new(seed);
    let add = |mut a: [u64; N], b: [u64; N]| {
        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        a
    };
    let body = || {
        (0..trials.div_ceil(BLOCK))
            .into_par_iter()
            .map(|block| {
                let end = ((block + 1) * BLOCK).min(trials);
                (block * BLOCK..end).fold([0u64; N], |acc, i| add(acc, per_trial(&mut streams.stream(i))))
            })
            .reduce(|| [0u64; N], add)
    };
    if workers == 0 {
        return body();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(body),
        Err(_) => body(),
    }
}

/// Monte Carlo outage estimates for one scheme. `workers = 0` uses the
/// global rayon pool.
pub fn estimate(
    params: &SystemParams,
    alpha: f64,
    trials: u64,
    seed: u64,
    scheme: Scheme,
    workers: usize,
) -> Result<SchemeEstimate> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    check_alpha(alpha)?;
    let d = derive(params)?;
    let [pri, sec, d1] = run_trials(trials, seed, workers, |rng| {
        let draw = sample_channels(rng, params);
        let o = simulate_scheme(&draw, &d, alpha, scheme);
        [
            u64::from(o.pri_outage),
            u64::from(o.sec_outage),
            u64::from(o.relay_active),
        ]
    });
    Ok(SchemeEstimate {
        scheme,
        pri: OutageEstimate::from_counts(pri, trials, seed),
        sec: OutageEstimate::from_counts(sec, trials, seed),
        p_d1: (scheme == Scheme::Proposed).then(|| OutageEstimate::from_counts(d1, trials, seed)),
    })
}

/// Per-event estimates of every quantity the closed forms predict, taken
/// from one set of trials. Conditional outages count only the trials where
/// the relay decision took the conditioning value.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleEstimates {
    pub trials: u64,
    pub seed: u64,
    pub alpha: f64,
    pub p_d1: OutageEstimate,
    /// Frequency of C_p (primary stronger at the relay).
    pub primary_stronger: OutageEstimate,
    pub sec_d0: OutageEstimate,
    pub pri_d0: OutageEstimate,
    /// D = 1 conditionals at the requested α.
    pub pri_d1: OutageEstimate,
    pub sec_d1: OutageEstimate,
    /// D = 1 conditionals with all relay power on one signal.
    pub pri_d1_alpha0: OutageEstimate,
    pub pri_d1_alpha1: OutageEstimate,
    pub sec_d1_alpha0: OutageEstimate,
    pub sec_d1_alpha1: OutageEstimate,
    pub total_pri: OutageEstimate,
    pub total_sec: OutageEstimate,
    pub noncoop_pri: OutageEstimate,
    pub noncoop_sec: OutageEstimate,
    /// Trials where both SIC orders succeeded at once; always zero.
    pub both_orders_fired: u64,
}

pub fn estimate_oracle(
    params: &SystemParams,
    alpha: f64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<OracleEstimates> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    check_alpha(alpha)?;
    let d = derive(params)?;
    let c = run_trials::<16, _>(trials, seed, workers, |rng| {
        let draw = sample_channels(rng, params);
        let dec = relay_decision(&draw, &d);
        let active = dec.active();
        let (rep_p, rep_s) = repeat_sinrs(&draw, &d);
        let (rel_p, rel_s) = relay_sinrs(&draw, &d, alpha);
        let (p0, s0) = relay_sinrs(&draw, &d, 0.0);
        let (p1, s1) = relay_sinrs(&draw, &d, 1.0);
        let nc = simulate_noncoop(&draw, &d);
        let b = |x: bool| u64::from(x);
        let on = |x: bool| b(active && x);
        let off = |x: bool| b(!active && x);
        let (lp, ls) = (d.lambda_p, d.lambda_s);
        [
            b(active),
            b(dec.stronger == User::Primary),
            off(rep_s < ls),
            off(rep_p < lp),
            on(rel_p < lp),
            on(rel_s < ls),
            on(p0 < lp),
            on(p1 < lp),
            on(s0 < ls),
            on(s1 < ls),
            off(rep_p < lp) + on(rel_p < lp),
            off(rep_s < ls) + on(rel_s < ls),
            b(nc.pri_outage),
            b(nc.sec_outage),
            b(dec.primary_first && dec.secondary_first),
            0,
        ]
    });
    let n_d1 = c[0];
    let n_d0 = trials - n_d1;
    let est = |k: u64, n: u64| OutageEstimate::from_counts(k, n, seed);
    Ok(OracleEstimates {
        trials,
        seed,
        alpha,
        p_d1: est(n_d1, trials),
        primary_stronger: est(c[1], trials),
        sec_d0: est(c[2], n_d0),
        pri_d0: est(c[3], n_d0),
        pri_d1: est(c[4], n_d1),
        sec_d1: est(c[5], n_d1),
        pri_d1_alpha0: est(c[6], n_d1),
        pri_d1_alpha1: est(c[7], n_d1),
        sec_d1_alpha0: est(c[8], n_d1),
        sec_d1_alpha1: est(c[9], n_d1),
        total_pri: est(c[10], trials),
        total_sec: est(c[11], trials),
        noncoop_pri: est(c[12], trials),
        noncoop_sec: est(c[13], trials),
        both_orders_fired: c[14],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::db_to_linear;

    fn table1() -> SystemParams {
        SystemParams::table1(0.04)
    }

    #[test]
    fn exponential_draws_have_the_right_mean_and_tail() {
        let p = table1();
        let streams = TrialStreams::new(11);
        let n = 1_000_000u64;
        let (mut sum_pp, mut tail_sp) = (0.0, 0u64);
        let (mut s_ss, mut s_pp2, mut s_ss2, mut s_cross) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let draw = sample_channels(&mut streams.stream(i), &p);
            let (a, b) = (draw.get(Link::PP), draw.get(Link::SS));
            sum_pp += a;
            s_ss += b;
            s_pp2 += a * a;
            s_ss2 += b * b;
            s_cross += a * b;
            tail_sp += u64::from(draw.get(Link::SP) > 0.2);
            assert!(draw.g.iter().all(|&g| g >= 0.0));
        }
        let nf = n as f64;
        let mean_pp = sum_pp / nf;
        assert!((mean_pp - 1.0).abs() < 0.003, "{mean_pp}");
        let tail = tail_sp as f64 / nf;
        assert!((tail - (-2.0f64).exp()).abs() < 0.0015, "{tail}");
        let mean_ss = s_ss / nf;
        let cov = s_cross / nf - mean_pp * mean_ss;
        let r = cov / ((s_pp2 / nf - mean_pp.powi(2)).sqrt() * (s_ss2 / nf - mean_ss.powi(2)).sqrt());
        assert!(r.abs() < 0.005, "correlation {r}");
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let s = TrialStreams::new(3);
        let a: u64 = s.stream(5).random();
        let b: u64 = s.stream(5).random();
        let c: u64 = s.stream(6).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, TrialStreams::new(4).stream(5).random::<u64>());
    }

    fn draw_with(values: &[(Link, f64)]) -> ChannelDraw {
        let mut g = [1.0; 8];
        for &(l, v) in values {
            g[l.index()] = v;
        }
        ChannelDraw { g }
    }

    #[test]
    fn dead_relay_links_keep_relay_silent() {
        let d = derive(&table1()).unwrap();
        let draw = draw_with(&[(Link::PR, 0.0), (Link::SR, 0.0)]);
        assert!(!relay_decision(&draw, &d).active());
    }

    #[test]
    fn strong_relay_links_activate_primary_first() {
        let d = derive(&table1()).unwrap();
        let draw = draw_with(&[(Link::PR, 1e6), (Link::SR, 1e3)]);
        let dec = relay_decision(&draw, &d);
        assert!(dec.primary_first && !dec.secondary_first);
        assert_eq!(dec.stronger, User::Primary);
    }

    #[test]
    fn full_primary_split_removes_relay_term_for_secondary() {
        let d = derive(&table1()).unwrap();
        let draw = draw_with(&[(Link::PR, 1e6), (Link::SR, 1e3), (Link::RS, 50.0)]);
        let (_, sec) = relay_sinrs(&draw, &d, 1.0);
        let (_, direct) = direct_sinrs(&draw, &d);
        assert_eq!(sec, direct);
    }

    #[test]
    fn relay_term_saturates_for_interior_split() {
        let d = derive(&table1()).unwrap();
        let alpha = 0.6;
        let draw = draw_with(&[(Link::RP, 1e12), (Link::PP, 0.0)]);
        let (pri, _) = relay_sinrs(&draw, &d, alpha);
        assert!((pri - alpha / (1.0 - alpha)).abs() < 1e-9);
        let (pri_full, _) = relay_sinrs(&draw, &d, 1.0);
        assert!(pri_full > 1e12);
        let strong = draw_with(&[(Link::PR, 1e6), (Link::SR, 1e3), (Link::RP, 1e9), (Link::PP, 0.0)]);
        assert!(!simulate_slot(&strong, &d, 1.0).pri_outage);
    }

    #[test]
    fn rejects_zero_trials_and_bad_alpha() {
        assert!(estimate(&table1(), 0.5, 0, 1, Scheme::Proposed, 1).is_err());
        assert!(estimate(&table1(), 1.5, 10, 1, Scheme::Proposed, 1).is_err());
        assert!(estimate_oracle(&table1(), 0.5, 0, 1, 1).is_err());
    }

    #[test]
    fn estimate_is_independent_of_worker_count() {
        let p = table1();
        let a = estimate(&p, 0.5, 50_000, 99, Scheme::Proposed, 1).unwrap();
        let b = estimate(&p, 0.5, 50_000, 99, Scheme::Proposed, 4).unwrap();
        let c = estimate(&p, 0.5, 50_000, 99, Scheme::Proposed, 8).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let d = estimate(&p, 0.5, 50_000, 100, Scheme::Proposed, 4).unwrap();
        assert_ne!(
            (a.pri.successes, a.sec.successes, a.p_d1.unwrap().successes),
            (d.pri.successes, d.sec.successes, d.p_d1.unwrap().successes)
        );
    }

    #[test]
    fn no_secondary_means_secondary_always_in_outage() {
        let p = SystemParams::fig3(8.0);
        assert_eq!(derive(&p).unwrap().snr_s, 0.0);
        for scheme in Scheme::ALL {
            let e = estimate(&p, 0.5, 5_000, 1, scheme, 0).unwrap();
            assert_eq!(e.sec.p_hat, 1.0, "{scheme}");
        }
    }

    #[test]
    fn zero_relay_power_approaches_d0_behaviour() {
        let mut p = table1();
        p.snr_r = 0.0;
        p.link_vars = p.link_vars.with_mu1(1e-9).with_mu2(1e-9);
        let e = estimate_oracle(&p, 0.5, 200_000, 5, 0).unwrap();
        assert_eq!(e.p_d1.successes, 0);
        assert_eq!(e.total_sec.successes, e.sec_d0.successes);
    }

    #[test]
    fn oracle_branches_never_fire_together() {
        let mut p = table1();
        p.snr_p = db_to_linear(25.0);
        let e = estimate_oracle(&p, 0.5, 100_000, 17, 0).unwrap();
        assert_eq!(e.both_orders_fired, 0);
        assert!(e.p_d1.p_hat > 0.5);
    }

    #[test]
    fn wilson_interval_contains_estimate() {
        let e = OutageEstimate::from_counts(3, 1_000_000, 0);
        let (lo, hi) = e.wilson(3.0);
        assert!(lo <= e.p_hat && e.p_hat <= hi);
        assert!(e.rare());
        assert_eq!(OutageEstimate::from_counts(0, 10, 0).z_score(0.0), 0.0);
    }
}
