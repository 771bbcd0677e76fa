//! Scenario description and the deterministic quantities derived from it.
//!
//! All SNRs are linear power ratios. Decibels only appear at the edges
//! (config files and CLI flags) through [`db_to_linear`] / [`linear_to_db`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Directed link between two of the nodes PT (`p`), ST (`s`) and the relay (`r`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Link {
    PP,
    SP,
    PS,
    SS,
    PR,
    SR,
    RP,
    RS,
}

impl Link {
    pub const ALL: [Link; 8] = [
        Link::PP,
        Link::SP,
        Link::PS,
        Link::SS,
        Link::PR,
        Link::SR,
        Link::RP,
        Link::RS,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn name(self) -> &'static str {
        match self {
            Link::PP => "pp",
            Link::SP => "sp",
            Link::PS => "ps",
            Link::SS => "ss",
            Link::PR => "pr",
            Link::SR => "sr",
            Link::RP => "rp",
            Link::RS => "rs",
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Link {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Link::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown link '{s}'")))
    }
}

/// Channel variance σ²_ab for each of the eight directed links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkVars([f64; 8]);

impl LinkVars {
    pub const fn uniform(var: f64) -> Self {
        LinkVars([var; 8])
    }

    pub fn get(&self, link: Link) -> f64 {
        self.0[link.index()]
    }

    pub fn set(&mut self, link: Link, var: f64) {
        self.0[link.index()] = var;
    }

    pub fn with(mut self, link: Link, var: f64) -> Self {
        self.set(link, var);
        self
    }

    /// Sets σ²_pr = σ²_rp = μ1.
    pub fn with_mu1(self, mu1: f64) -> Self {
        self.with(Link::PR, mu1).with(Link::RP, mu1)
    }

    /// Sets σ²_sr = σ²_rs = μ2.
    pub fn with_mu2(self, mu2: f64) -> Self {
        self.with(Link::SR, mu2).with(Link::RS, mu2)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Link, f64)> + '_ {
        Link::ALL.into_iter().map(|l| (l, self.get(l)))
    }
}

/// Complete scenario: rates, transmit SNRs, primary outage threshold and
/// channel variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Primary spectral efficiency R_p (bits/s/Hz).
    pub rate_p: f64,
    /// Secondary spectral efficiency R_s (bits/s/Hz).
    pub rate_s: f64,
    /// Primary transmit SNR γ_p (linear).
    pub snr_p: f64,
    /// Relay SNR γ_r (linear).
    pub snr_r: f64,
    /// Primary outage threshold ε.
    pub epsilon: f64,
    pub link_vars: LinkVars,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        positive("rate_p", self.rate_p)?;
        positive("rate_s", self.rate_s)?;
        positive("snr_p", self.snr_p)?;
        if !(self.snr_r.is_finite() && self.snr_r >= 0.0) {
            return Err(Error::invalid(format!(
                "snr_r must be finite and >= 0, got {}",
                self.snr_r
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        for (link, var) in self.link_vars.iter() {
            positive(&format!("link_vars.{link}"), var)?;
        }
        Ok(())
    }

    /// Scenario used for the ε-sweep of the allocation table: R_p = 0.4,
    /// R_s = 0.2, γ_p = 20 dB, γ_r = 10 dB, unit variances except the two
    /// cross links at 0.1.
    pub fn table1(epsilon: f64) -> Self {
        SystemParams {
            rate_p: 0.4,
            rate_s: 0.2,
            snr_p: db_to_linear(20.0),
            snr_r: db_to_linear(10.0),
            epsilon,
            link_vars: LinkVars::uniform(1.0).with(Link::PS, 0.1).with(Link::SP, 0.1),
        }
    }

    /// Scenario of the γ_p sweeps: ε = 0.03, otherwise as [`Self::table1`].
    pub fn fig3(snr_p_db: f64) -> Self {
        SystemParams {
            snr_p: db_to_linear(snr_p_db),
            ..Self::table1(0.03)
        }
    }

    pub fn with_snr_r(self, snr_r: f64) -> Self {
        SystemParams { snr_r, ..self }
    }
}

/// Mean link SNRs γ̃_ab = γ_a σ²_ab.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    pub pp: f64,
    pub sp: f64,
    pub ps: f64,
    pub ss: f64,
    pub pr: f64,
    pub sr: f64,
    pub rp: f64,
    pub rs: f64,
}

/// Everything that follows deterministically from a [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// One-slot thresholds Θ = 2^R − 1.
    pub theta_p: f64,
    pub theta_s: f64,
    /// Two-sub-slot thresholds Λ = 2^{2R} − 1.
    pub lambda_p: f64,
    pub lambda_s: f64,
    pub snr_p: f64,
    /// Secondary SNR admitted by the primary outage constraint.
    pub snr_s: f64,
    pub snr_r: f64,
    pub epsilon: f64,
    pub gain: Gains,
    pub link_vars: LinkVars,
}

impl DerivedParams {
    /// Same scenario with a different relay SNR. Only γ̃_rp and γ̃_rs change.
    pub fn with_snr_r(&self, snr_r: f64) -> Self {
        let mut d = *self;
        d.snr_r = snr_r;
        d.gain.rp = snr_r * self.link_vars.get(Link::RP);
        d.gain.rs = snr_r * self.link_vars.get(Link::RS);
        d
    }

    pub fn secondary_admitted(&self) -> bool {
        self.snr_s > 0.0
    }
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// 2^{slots·rate} − 1.
pub fn sinr_threshold(rate: f64, slots: u32) -> f64 {
    (f64::from(slots) * rate).exp2() - 1.0
}

/// Secondary SNR allowed by the primary outage constraint,
/// γ_s = γ_p σ²_pp / (Θ_p σ²_sp) · max(0, ρ) with
/// ρ = e^{−Θ_p/(γ_p σ²_pp)} / (1 − ε) − 1.
pub fn admissible_secondary_snr(params: &SystemParams) -> f64 {
    let theta_p = sinr_threshold(params.rate_p, 1);
    let var_pp = params.link_vars.get(Link::PP);
    let var_sp = params.link_vars.get(Link::SP);
    let rho = (-theta_p / (params.snr_p * var_pp)).exp() / (1.0 - params.epsilon) - 1.0;
    params.snr_p * var_pp / (theta_p * var_sp) * rho.max(0.0)
}

pub fn derive(params: &SystemParams) -> Result<DerivedParams> {
    params.validate()?;
    let v = &params.link_vars;
    let snr_p = params.snr_p;
    let snr_s = admissible_secondary_snr(params);
    let snr_r = params.snr_r;
    let gain = Gains {
        pp: snr_p * v.get(Link::PP),
        ps: snr_p * v.get(Link::PS),
        pr: snr_p * v.get(Link::PR),
        sp: snr_s * v.get(Link::SP),
        ss: snr_s * v.get(Link::SS),
        sr: snr_s * v.get(Link::SR),
        rp: snr_r * v.get(Link::RP),
        rs: snr_r * v.get(Link::RS),
    };
    Ok(DerivedParams {
        theta_p: sinr_threshold(params.rate_p, 1),
        theta_s: sinr_threshold(params.rate_s, 1),
        lambda_p: sinr_threshold(params.rate_p, 2),
        lambda_s: sinr_threshold(params.rate_s, 2),
        snr_p,
        snr_s,
        snr_r,
        epsilon: params.epsilon,
        gain,
        link_vars: *v,
    })
}

/// Primary SNR below which no secondary power is admitted (root of ρ = 0):
/// Θ_p / (−σ²_pp ln(1 − ε)).
pub fn secondary_cutoff_snr(rate_p: f64, epsilon: f64, var_pp: f64) -> Result<f64> {
    if !(rate_p > 0.0 && var_pp > 0.0 && epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!(
            "cutoff needs rate_p > 0, var_pp > 0, 0 < epsilon < 1 (got {rate_p}, {var_pp}, {epsilon})"
        )));
    }
    Ok(sinr_threshold(rate_p, 1) / (-var_pp * (-epsilon).ln_1p()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn db_conversion() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((db_to_linear(20.0) - 100.0).abs() < 1e-12);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
        assert!((linear_to_db(db_to_linear(13.7)) - 13.7).abs() < 1e-12);
    }

    #[test]
    fn thresholds_for_rate_0_4() {
        let d = derive(&SystemParams::table1(0.04)).unwrap();
        assert!((d.theta_p - 0.319507910772894).abs() < 1e-12);
        assert!((d.lambda_p - 0.741101126592248).abs() < 1e-12);
        assert!((d.lambda_p - d.theta_p * (d.theta_p + 2.0)).abs() < 1e-15);
    }

    #[test]
    fn secondary_snr_table1_eps_0_04() {
        let d = derive(&SystemParams::table1(0.04)).unwrap();
        assert!((d.snr_s - 120.0).abs() < 0.05, "snr_s = {}", d.snr_s);
        assert!((d.gain.sp - 12.0).abs() < 0.005);
    }

    // Independent check of the admission rule: the single-slot primary
    // outage with the admitted γ_s must equal ε.
    #[test]
    fn secondary_snr_enforces_epsilon_by_sampling() {
        let p = SystemParams::table1(0.04);
        let d = derive(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 400_000;
        let mut hits = 0u32;
        for _ in 0..n {
            let g_pp: f64 = -(1.0 - rng.random::<f64>()).ln() * p.link_vars.get(Link::PP);
            let g_sp: f64 = -(1.0 - rng.random::<f64>()).ln() * p.link_vars.get(Link::SP);
            if d.snr_p * g_pp / (d.snr_s * g_sp + 1.0) < d.theta_p {
                hits += 1;
            }
        }
        let p_hat = f64::from(hits) / f64::from(n);
        let se = (0.04 * 0.96 / f64::from(n)).sqrt();
        assert!((p_hat - 0.04).abs() < 3.0 * se, "p_hat = {p_hat}");
    }

    #[test]
    fn tiny_epsilon_blocks_secondary() {
        let d = derive(&SystemParams::table1(1e-9)).unwrap();
        assert_eq!(d.snr_s, 0.0);
        assert!(!d.secondary_admitted());
        assert_eq!(d.gain.ss, 0.0);
    }

    #[test]
    fn cutoff_for_fig3_parameters() {
        let c = secondary_cutoff_snr(0.4, 0.03, 1.0).unwrap();
        assert!((c - 10.4897).abs() < 1e-3, "cutoff = {c}");
        assert!((linear_to_db(c) - 10.2077).abs() < 1e-3);

        let below = derive(&SystemParams {
            snr_p: c * (1.0 - 1e-9),
            ..SystemParams::fig3(0.0)
        })
        .unwrap();
        let above = derive(&SystemParams {
            snr_p: c * (1.0 + 1e-6),
            ..SystemParams::fig3(0.0)
        })
        .unwrap();
        assert_eq!(below.snr_s, 0.0);
        assert!(above.snr_s > 0.0);
    }

    #[test]
    fn cutoff_vanishes_as_epsilon_approaches_one() {
        let c = secondary_cutoff_snr(0.4, 1.0 - 1e-12, 1.0).unwrap();
        assert!(c < 0.02);
        assert!(secondary_cutoff_snr(0.4, 1.0, 1.0).is_err());
    }

    #[test]
    fn validation_rejects_bad_values() {
        let good = SystemParams::table1(0.04);
        assert!(good.validate().is_ok());
        assert!(SystemParams { rate_p: 0.0, ..good }.validate().is_err());
        assert!(SystemParams { snr_r: -1.0, ..good }.validate().is_err());
        assert!(SystemParams { snr_r: 0.0, ..good }.validate().is_ok());
        assert!(SystemParams { epsilon: 1.0, ..good }.validate().is_err());
        let mut bad_var = good;
        bad_var.link_vars.set(Link::RS, 0.0);
        assert!(derive(&bad_var).is_err());
    }

    #[test]
    fn with_snr_r_only_touches_relay_gains() {
        let d = derive(&SystemParams::table1(0.05)).unwrap();
        let e = d.with_snr_r(33.0);
        assert_eq!(e.gain.rp, 33.0);
        assert_eq!(e.gain.rs, 33.0);
        assert_eq!(e.gain.pp, d.gain.pp);
        let f = derive(&SystemParams::table1(0.05).with_snr_r(33.0)).unwrap();
        assert_eq!(e, f);
    }

    #[test]
    fn link_names_round_trip() {
        for l in Link::ALL {
            assert_eq!(l.name().parse::<Link>().unwrap(), l);
        }
        assert!("xx".parse::<Link>().is_err());
    }

    proptest! {
        #[test]
        fn lambda_is_theta_times_theta_plus_two(rate in 1e-6f64..=4.0) {
            let theta = sinr_threshold(rate, 1);
            let lambda = sinr_threshold(rate, 2);
            prop_assert!((lambda - theta * (theta + 2.0)).abs() <= 8.0 * f64::EPSILON * lambda.max(1.0));
        }

        #[test]
        fn secondary_snr_non_decreasing_in_epsilon(
            snr_p_db in 0.0f64..40.0, e1 in 0.001f64..0.5, de in 0.0f64..0.4,
        ) {
            let base = SystemParams::fig3(snr_p_db);
            let lo = admissible_secondary_snr(&SystemParams { epsilon: e1, ..base });
            let hi = admissible_secondary_snr(&SystemParams { epsilon: e1 + de, ..base });
            prop_assert!(lo >= 0.0);
            prop_assert!(hi >= lo);
        }

        #[test]
        fn below_cutoff_means_no_secondary(eps in 0.001f64..0.5, frac in 0.01f64..0.999) {
            let cutoff = secondary_cutoff_snr(0.4, eps, 1.0).unwrap();
            let p = SystemParams { snr_p: cutoff * frac, epsilon: eps, ..SystemParams::fig3(0.0) };
            prop_assert_eq!(admissible_secondary_snr(&p), 0.0);
        }
    }
}
