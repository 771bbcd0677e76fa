//! Closed-form outage probabilities of the relay-aided scheme.
//!
//! Notation follows [`DerivedParams`]: `gain.xy` is the mean link SNR γ̃_xy,
//! Λ the two-sub-slot threshold and Θ the one-slot threshold. Every
//! conditional outage here has the shape
//! `P(direct·E₁ / (cross·E₂ + 1) + relay term < threshold)` with unit-mean
//! exponentials E₁, E₂.

use crate::error::{Error, Result};
use crate::numerics::{gamma_integral_params, integrate_shifted_exp_over_x, QuadratureSpec};
use crate::system::DerivedParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum User {
    Primary,
    Secondary,
}

impl User {
    pub fn other(self) -> Self {
        match self {
            User::Primary => User::Secondary,
            User::Secondary => User::Primary,
        }
    }
}

/// Outage conditioned on the relay decision D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalOutage {
    pub pri_d1: f64,
    pub sec_d1: f64,
    pub sec_d0: f64,
    pub pri_d0: f64,
    /// `false` when `pri_d1` is an upper bound rather than the exact value.
    pub pri_d1_exact: bool,
    pub sec_d1_exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageSummary {
    /// P(D = 1).
    pub p_d1: f64,
    /// Secondary outage, or its upper bound U′_s when `bound` is set.
    pub total_sec: f64,
    /// Primary outage mixture built the same way from `parts`.
    pub total_pri: f64,
    pub bound: bool,
    pub parts: ConditionalOutage,
}

/// P(direct·E₁ / (cross·E₂ + 1) < threshold) for independent unit-mean
/// exponentials, i.e. `1 − direct·e^{−t/direct} / (direct + t·cross)`.
///
/// Written as `t·cross/(direct + t·cross) + r·(1 − e^{−t/direct})` so small
/// probabilities keep their relative precision.
pub fn interference_outage(direct: f64, cross: f64, threshold: f64) -> f64 {
    if threshold <= 0.0 {
        return 0.0;
    }
    if direct <= 0.0 {
        return 1.0;
    }
    let denom = direct + threshold * cross;
    let r = direct / denom;
    threshold * cross / denom + r * -(-threshold / direct).exp_m1()
}

fn require_secondary(d: &DerivedParams, what: &'static str) -> Result<()> {
    if d.secondary_admitted() {
        Ok(())
    } else {
        Err(Error::NoSecondaryAccess(what))
    }
}

fn check_gain(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive, got {v}")))
    }
}

/// P(C_i): the relay sees user `first` stronger than the other one.
///
/// The secondary share is computed as the complement of the primary share,
/// so the two orders sum to exactly 1.
pub fn prob_decode_order(d: &DerivedParams, first: User) -> Result<f64> {
    check_gain("gain.pr", d.gain.pr)?;
    require_secondary(d, "decode order needs a transmitting secondary")?;
    check_gain("gain.sr", d.gain.sr)?;
    let p_first = d.gain.pr / (d.gain.pr + d.gain.sr);
    Ok(match first {
        User::Primary => p_first,
        User::Secondary => 1.0 - p_first,
    })
}

/// P(D = 1): the relay SIC-decodes both signals in one of the two orders.
pub fn prob_relay_active(d: &DerivedParams) -> Result<f64> {
    require_secondary(d, "relay activation assumes an interfering secondary")?;
    let (lp, ls) = (d.lambda_p, d.lambda_s);
    let m_p = (lp * (1.0 + ls)).max(ls);
    let m_s = (ls * (1.0 + lp)).max(lp);
    let c_p = prob_decode_order(d, User::Primary)?;
    let c_s = prob_decode_order(d, User::Secondary)?;
    let g = &d.gain;
    Ok(c_p * (-m_p / g.pr - ls / g.sr).exp() + c_s * (-m_s / g.sr - lp / g.pr).exp())
}

/// P(A_i ∩ B_i ∩ C_i) for X ~ Exp(mean `a`) decoded first against
/// Y ~ Exp(mean `b`): ∫_{lo}^∞ e^{−y/b}/b · e^{−max(li(y+1), y)/a} dy.
fn sic_order_success(a: f64, b: f64, li: f64, lo: f64) -> f64 {
    let k_inner = 1.0 / b + li / a;
    let k_outer = 1.0 / b + 1.0 / a;
    // li(y+1) ≥ y exactly when y ≤ li/(1−li) (always when li ≥ 1).
    let switch = if li < 1.0 { li / (1.0 - li) } else { f64::INFINITY };
    let y1 = switch.max(lo);
    let inner = (-li / a).exp() / (b * k_inner) * ((-lo * k_inner).exp() - (-y1 * k_inner).exp());
    let outer = if y1.is_finite() {
        (-y1 * k_outer).exp() / (b * k_outer)
    } else {
        0.0
    };
    inner + outer
}

/// P(D = 1) evaluated without treating the decode order as independent of
/// the SIC events. [`prob_relay_active`] multiplies P(C_i) by
/// P(A_i ∩ B_i), which is not the same event probability: the two differ
/// by about 0.003 at γ̃_pr = 100, γ̃_sr = 120, and the simulator follows
/// this exact value.
pub fn prob_relay_active_exact(d: &DerivedParams) -> Result<f64> {
    require_secondary(d, "relay activation assumes an interfering secondary")?;
    check_gain("gain.pr", d.gain.pr)?;
    check_gain("gain.sr", d.gain.sr)?;
    let (a, b) = (d.gain.pr, d.gain.sr);
    Ok(sic_order_success(a, b, d.lambda_p, d.lambda_s) + sic_order_success(b, a, d.lambda_s, d.lambda_p))
}

/// Secondary outage when PT and ST repeat their symbols (D = 0); the two
/// copies at SD are combined into an SINR of 2γ_s|h_ss|²/(γ_p|h_ps|² + 1).
pub fn cond_sec_outage_d0(d: &DerivedParams) -> Result<f64> {
    require_secondary(d, "secondary outage needs gain.ss > 0")?;
    Ok(interference_outage(2.0 * d.gain.ss, d.gain.ps, d.lambda_s))
}

/// Primary counterpart of [`cond_sec_outage_d0`] with p and s exchanged.
pub fn cond_pri_outage_d0(d: &DerivedParams) -> Result<f64> {
    check_gain("gain.pp", d.gain.pp)?;
    Ok(interference_outage(2.0 * d.gain.pp, d.gain.sp, d.lambda_p))
}

/// Outage of the first-sub-slot direct link of `user` against the
/// two-sub-slot threshold. This is the D = 1 outage when the relay gives the
/// user no power, and the α-independent branch of the D = 1 bounds.
pub fn direct_link_outage(d: &DerivedParams, user: User) -> Result<f64> {
    let g = &d.gain;
    match user {
        User::Primary => {
            check_gain("gain.pp", g.pp)?;
            Ok(interference_outage(g.pp, g.sp, d.lambda_p))
        }
        User::Secondary => {
            require_secondary(d, "secondary outage needs gain.ss > 0")?;
            Ok(interference_outage(g.ss, g.ps, d.lambda_s))
        }
    }
}

/// P(v + w < Λ) where v = direct·E₁/(cross·E₂ + 1) and w = relay·E₃.
fn full_relay_outage(
    user: User,
    d: &DerivedParams,
    direct: f64,
    cross: f64,
    relay: f64,
    lambda: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if lambda <= 0.0 {
        return Ok(0.0);
    }
    if relay <= 0.0 {
        return Ok(interference_outage(direct, cross, lambda));
    }
    if cross <= 0.0 {
        // Interference-free: sum of two independent exponentials.
        let (a, b) = (direct, relay);
        if ((a - b) / a).abs() < 1e-6 {
            let m = 0.5 * (a + b);
            return Ok(-(-lambda / m).exp_m1() - (lambda / m) * (-lambda / m).exp());
        }
        return Ok(1.0 - (a * (-lambda / a).exp() - b * (-lambda / b).exp()) / (a - b));
    }
    // e^{−γ̃_dir·c}·Γ is evaluated directly as ∫ e^{c(x − γ̃_dir)}/x dx.
    let (c, lo, hi) = gamma_integral_params(user, d)?;
    let scaled_gamma = integrate_shifted_exp_over_x(c, direct, lo, hi, quad)?;
    let survive = (-lambda / relay).exp();
    let p = 1.0 - survive * (1.0 + direct / (cross * relay) * scaled_gamma);
    Ok(p.clamp(0.0, 1.0))
}

fn endpoint_alpha(alpha: f64) -> Result<bool> {
    if alpha == 0.0 {
        Ok(false)
    } else if alpha == 1.0 {
        Ok(true)
    } else {
        Err(Error::InvalidAlpha {
            alpha,
            expected: "{0, 1}",
        })
    }
}

/// Exact D = 1 outage when the relay spends all its power on one signal
/// (α = 1: primary only, α = 0: secondary only).
pub fn cond_outage_d1_exact(d: &DerivedParams, user: User, alpha: f64, quad: &QuadratureSpec) -> Result<f64> {
    let all_to_primary = endpoint_alpha(alpha)?;
    let g = &d.gain;
    match user {
        User::Primary if !all_to_primary => direct_link_outage(d, User::Primary),
        User::Primary => {
            check_gain("gain.pp", g.pp)?;
            full_relay_outage(user, d, g.pp, g.sp, g.rp, d.lambda_p, quad)
        }
        User::Secondary if all_to_primary => direct_link_outage(d, User::Secondary),
        User::Secondary => {
            require_secondary(d, "secondary outage needs gain.ss > 0")?;
            full_relay_outage(user, d, g.ss, g.ps, g.rs, d.lambda_s, quad)
        }
    }
}

/// α at or below which the primary bound no longer depends on α.
pub fn primary_branch_boundary(lambda_p: f64) -> f64 {
    lambda_p / (1.0 + lambda_p)
}

/// α at or above which the secondary bound no longer depends on α.
pub fn secondary_branch_boundary(lambda_s: f64) -> f64 {
    1.0 / (1.0 + lambda_s)
}

/// U_p evaluated on the closed interval [0, 1]. At the endpoints this is
/// still a valid bound (tight at α = 0).
pub fn primary_bound(d: &DerivedParams, alpha: f64) -> Result<f64> {
    let x = direct_link_outage(d, User::Primary)?;
    let lp = d.lambda_p;
    if alpha <= primary_branch_boundary(lp) {
        return Ok(x);
    }
    let t = lp / (d.gain.rp * (alpha - (1.0 - alpha) * lp));
    Ok(x * -(-t).exp_m1())
}

/// U_s evaluated on the closed interval [0, 1] (tight at α = 1).
pub fn secondary_bound(d: &DerivedParams, alpha: f64) -> Result<f64> {
    let y = direct_link_outage(d, User::Secondary)?;
    let ls = d.lambda_s;
    if alpha >= secondary_branch_boundary(ls) {
        return Ok(y);
    }
    let t = ls / (d.gain.rs * (1.0 - alpha - alpha * ls));
    Ok(y * -(-t).exp_m1())
}

/// Upper bound on the D = 1 conditional outage for a split 0 < α < 1.
pub fn upper_bound_d1(d: &DerivedParams, user: User, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha {
            alpha,
            expected: "(0, 1)",
        });
    }
    match user {
        User::Primary => primary_bound(d, alpha),
        User::Secondary => secondary_bound(d, alpha),
    }
}

/// All four conditionals at split α: exact at α ∈ {0, 1}, bounds otherwise.
pub fn conditional_outages(d: &DerivedParams, alpha: f64, quad: &QuadratureSpec) -> Result<ConditionalOutage> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha {
            alpha,
            expected: "[0, 1]",
        });
    }
    let endpoint = alpha == 0.0 || alpha == 1.0;
    let pri_d0 = cond_pri_outage_d0(d)?;
    let pri_d1 = if endpoint {
        cond_outage_d1_exact(d, User::Primary, alpha, quad)?
    } else {
        upper_bound_d1(d, User::Primary, alpha)?
    };
    let (sec_d0, sec_d1) = if d.secondary_admitted() {
        let sec_d1 = if endpoint {
            cond_outage_d1_exact(d, User::Secondary, alpha, quad)?
        } else {
            upper_bound_d1(d, User::Secondary, alpha)?
        };
        (cond_sec_outage_d0(d)?, sec_d1)
    } else {
        (1.0, 1.0)
    };
    Ok(ConditionalOutage {
        pri_d1,
        sec_d1,
        sec_d0,
        pri_d0,
        pri_d1_exact: endpoint,
        sec_d1_exact: endpoint,
    })
}

/// Secondary outage P_out_sec at α ∈ {0, 1}, or its bound U′_s for interior α,
/// together with the primary mixture built from the same conditionals.
///
/// Without secondary access the relay never activates and the secondary is
/// always in outage.
pub fn total_secondary_outage(d: &DerivedParams, alpha: f64, quad: &QuadratureSpec) -> Result<OutageSummary> {
    let parts = conditional_outages(d, alpha, quad)?;
    let p_d1 = if d.secondary_admitted() {
        prob_relay_active(d)?
    } else {
        0.0
    };
    let p_d0 = 1.0 - p_d1;
    Ok(OutageSummary {
        p_d1,
        total_sec: p_d0 * parts.sec_d0 + p_d1 * parts.sec_d1,
        total_pri: p_d0 * parts.pri_d0 + p_d1 * parts.pri_d1,
        bound: !(parts.pri_d1_exact && parts.sec_d1_exact),
        parts,
    })
}

/// Non-cooperative secondary outage: one slot, threshold Θ_s, no combining.
pub fn noncoop_secondary_outage(d: &DerivedParams) -> Result<f64> {
    require_secondary(d, "secondary outage needs gain.ss > 0")?;
    Ok(interference_outage(d.gain.ss, d.gain.ps, d.theta_s))
}

/// Non-cooperative primary outage; equals ε whenever the secondary is admitted.
pub fn noncoop_primary_outage(d: &DerivedParams) -> Result<f64> {
    check_gain("gain.pp", d.gain.pp)?;
    Ok(interference_outage(d.gain.pp, d.gain.sp, d.theta_p))
}
