//! Simulator against closed forms on scenarios not covered by the unit tests.

use cr_relay::analytic::{
    conditional_outages, primary_bound, prob_relay_active, prob_relay_active_exact, secondary_bound,
    total_secondary_outage,
};
use cr_relay::montecarlo::{estimate, estimate_oracle, OutageEstimate, Scheme};
use cr_relay::numerics::QuadratureSpec;
use cr_relay::system::{derive, Link, SystemParams};

fn assert_z(name: &str, p: f64, e: &OutageEstimate) {
    let z = e.z_score(p);
    assert!(
        z.abs() <= 3.0,
        "{name}: closed form {p}, MC {} over {} trials, z = {z}",
        e.p_hat,
        e.trials
    );
}

/// γ̃_pr = γ̃_sr = 10 and R_p = R_s = 0.2.
fn symmetric() -> SystemParams {
    let mut p = SystemParams::table1(0.04);
    p.rate_p = 0.2;
    p.rate_s = 0.2;
    p.link_vars.set(Link::PR, 10.0 / p.snr_p);
    let d = derive(&p).unwrap();
    p.link_vars.set(Link::SR, 10.0 / d.snr_s);
    p
}

#[test]
fn symmetric_activation_frequency() {
    let p = symmetric();
    let d = derive(&p).unwrap();
    assert!((d.gain.pr - 10.0).abs() < 1e-9 && (d.gain.sr - 10.0).abs() < 1e-9);
    let e = estimate(&p, 0.5, 1_000_000, 3, Scheme::Proposed, 0)
        .unwrap()
        .p_d1
        .unwrap();
    let exact = prob_relay_active_exact(&d).unwrap();
    assert_z("exact P(D=1)", exact, &e);
    // The product form sits about 0.0094 below the event frequency.
    let product = prob_relay_active(&d).unwrap();
    assert!((product - 0.928_57).abs() < 1e-5);
    assert!(e.p_hat - product > 0.008, "{}", e.p_hat);
}

#[test]
fn secondary_outage_at_zero_split_matches_mixture() {
    let p = SystemParams::table1(0.04);
    let d = derive(&p).unwrap();
    let q = QuadratureSpec::default();
    let e = estimate(&p, 0.0, 1_000_000, 4, Scheme::Proposed, 0).unwrap();
    let parts = conditional_outages(&d, 0.0, &q).unwrap();
    let p1 = prob_relay_active_exact(&d).unwrap();
    assert_z(
        "exact-weight mixture",
        (1.0 - p1) * parts.sec_d0 + p1 * parts.sec_d1,
        &e.sec,
    );
    let s = total_secondary_outage(&d, 0.0, &q).unwrap();
    assert!(!s.bound);
    // The product-form weight shifts the mixture by a few 1e-5 here.
    assert!((s.total_sec - e.sec.p_hat).abs() < 1e-4);
}

#[test]
fn conditionals_stay_under_bounds_over_alpha() {
    for p in [SystemParams::table1(0.04), SystemParams::fig3(25.0)] {
        let d = derive(&p).unwrap();
        for k in 1..=19 {
            let alpha = 0.05 * k as f64;
            let mc = estimate_oracle(&p, alpha, 100_000, 10 + k, 0).unwrap();
            let up = primary_bound(&d, alpha).unwrap();
            let us = secondary_bound(&d, alpha).unwrap();
            assert!(
                mc.pri_d1.p_hat <= up + 3.0 * mc.pri_d1.std_err,
                "alpha {alpha}: {} > {up}",
                mc.pri_d1.p_hat
            );
            assert!(
                mc.sec_d1.p_hat <= us + 3.0 * mc.sec_d1.std_err,
                "alpha {alpha}: {} > {us}",
                mc.sec_d1.p_hat
            );
        }
    }
}

#[test]
fn noncooperative_primary_meets_epsilon_exactly() {
    for (eps, db) in [(0.03, 12.0), (0.05, 20.0), (0.1, 30.0)] {
        let mut p = SystemParams::fig3(db);
        p.epsilon = eps;
        let e = estimate(&p, 0.5, 1_000_000, 21, Scheme::NonCooperative, 0).unwrap();
        assert_z("noncoop primary", eps, &e.pri);
    }
}

#[test]
fn relay_assisted_baseline_sits_between_the_others() {
    let p = SystemParams::fig3(20.0);
    let est = |s| estimate(&p, 0.5, 200_000, 8, s, 0).unwrap().sec.p_hat;
    let (pr, ras, nc) = (
        est(Scheme::Proposed),
        est(Scheme::RelayAssistedSecondary),
        est(Scheme::NonCooperative),
    );
    assert!(pr < ras && ras < nc, "{pr} {ras} {nc}");
}
