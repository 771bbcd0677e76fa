//! Relay power split α and relay SNR γ_r selection.
//!
//! The problem is `min U′_s(α, γ_r)` subject to `U_p(α, γ_r) ≤ ε`. On the
//! α-dependent branch of U_p the constraint can be inverted in closed form,
//! either for α at fixed γ_r or for γ_r at fixed α; [`allocate`] seeds a grid
//! search with that closed-form α.

use rayon::prelude::*;

use crate::analytic::{
    cond_sec_outage_d0, direct_link_outage, primary_bound, primary_branch_boundary, prob_relay_active, secondary_bound,
    secondary_branch_boundary, User,
};
use crate::error::{Error, Result};
use crate::system::{db_to_linear, derive, DerivedParams, Link, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationResult {
    pub alpha: f64,
    pub snr_r: f64,
    pub u_p: f64,
    /// U′_s at `(alpha, snr_r)`; 1 when no feasible point exists.
    pub u_s_total: f64,
    pub p_d1: f64,
    pub feasible: bool,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("epsilon must lie in (0, 1), got {epsilon}")))
    }
}

/// ln(1 / (1 − ε/X)), the exponent the α-dependent branch must reach.
fn required_exponent(x: f64, epsilon: f64) -> f64 {
    -(-epsilon / x).ln_1p()
}

/// Smallest α with U_p(α, γ_r) ≤ ε on the α-dependent branch.
///
/// Returns the branch boundary Λ_p/(1 + Λ_p) when ε is already met without
/// relay help, and [`Error::Infeasible`] when the required α exceeds 1.
pub fn alpha_for_primary_bound(d: &DerivedParams, epsilon: f64, snr_r: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if snr_r.is_nan() || snr_r <= 0.0 {
        return Err(Error::invalid(format!("snr_r must be positive, got {snr_r}")));
    }
    let x = direct_link_outage(d, User::Primary)?;
    let lp = d.lambda_p;
    let boundary = primary_branch_boundary(lp);
    if epsilon >= x {
        return Ok(boundary);
    }
    let relay_gain = snr_r * d.link_vars.get(Link::RP);
    let l = required_exponent(x, epsilon);
    let alpha = (lp + lp / (relay_gain * l)) / (1.0 + lp);
    if alpha > 1.0 {
        return Err(Error::Infeasible(format!(
            "epsilon = {epsilon} needs alpha = {alpha:.6} > 1 at snr_r = {snr_r}"
        )));
    }
    Ok(alpha)
}

/// Smallest γ_r with U_p(α, γ_r) ≤ ε for a fixed split on the α-dependent
/// branch. Zero when ε is met without relay help.
pub fn min_snr_r_for_epsilon(d: &DerivedParams, alpha: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let lp = d.lambda_p;
    let boundary = primary_branch_boundary(lp);
    if !(alpha > boundary && alpha <= 1.0) {
        return Err(Error::InvalidAlpha {
            alpha,
            expected: "(Λ_p/(1+Λ_p), 1]",
        });
    }
    let x = direct_link_outage(d, User::Primary)?;
    if epsilon >= x {
        return Ok(0.0);
    }
    let l = required_exponent(x, epsilon);
    let relay_gain = lp / ((alpha - (1.0 - alpha) * lp) * l);
    Ok(relay_gain / d.link_vars.get(Link::RP))
}

/// U′_s = P(D=0)·P_sec(out|D=0) + P(D=1)·U_s, with U_s taken on [0, 1].
pub fn secondary_objective(d: &DerivedParams, alpha: f64) -> Result<f64> {
    if !d.secondary_admitted() {
        return Ok(1.0);
    }
    let p1 = prob_relay_active(d)?;
    Ok((1.0 - p1) * cond_sec_outage_d0(d)? + p1 * secondary_bound(d, alpha)?)
}

/// Nudges α upwards by a few ulps until the re-evaluated bound meets ε.
fn settle_on_constraint(d: &DerivedParams, alpha: f64, epsilon: f64) -> Result<Option<(f64, f64)>> {
    let mut a = alpha;
    for _ in 0..64 {
        let u_p = primary_bound(d, a)?;
        if u_p <= epsilon {
            return Ok(Some((a, u_p)));
        }
        if a >= 1.0 {
            break;
        }
        a = a.next_up().min(1.0);
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    u_s: f64,
    snr_r: f64,
    alpha: f64,
    u_p: f64,
}

/// Default α grid: step 0.005 from the primary branch boundary up to 1.
pub fn default_alpha_grid(lambda_p: f64) -> Vec<f64> {
    let start = primary_branch_boundary(lambda_p);
    let steps = ((1.0 - start) / 0.005).floor() as usize;
    let mut grid: Vec<f64> = (0..=steps).map(|i| start + i as f64 * 0.005).collect();
    if grid.last().is_some_and(|&a| a < 1.0) {
        grid.push(1.0);
    }
    grid
}

/// Default γ_r grid: −10 dB to 30 dB in 0.25 dB steps (linear values).
pub fn default_snr_r_grid() -> Vec<f64> {
    (0..=160).map(|i| db_to_linear(-10.0 + 0.25 * i as f64)).collect()
}

/// Grid search for `min U′_s s.t. U_p ≤ ε`, with ε taken from `params`.
///
/// At each γ_r the closed-form α is added to the grid when it lies within
/// the grid's span. Ties go to the smaller
/// γ_r, then the smaller α.
pub fn allocate(params: &SystemParams, snr_r_grid: &[f64], alpha_grid: &[f64]) -> Result<AllocationResult> {
    if snr_r_grid.is_empty() || alpha_grid.is_empty() {
        return Err(Error::invalid("allocation grids must be nonempty"));
    }
    let base = derive(params)?;
    let epsilon = params.epsilon;
    if !base.secondary_admitted() {
        return Ok(AllocationResult {
            alpha: 0.0,
            snr_r: 0.0,
            u_p: primary_bound(&base, 0.0)?,
            u_s_total: 1.0,
            p_d1: 0.0,
            feasible: false,
        });
    }
    let p_d1 = prob_relay_active(&base)?;
    // The closed-form seed is only used inside the span of the given grid.
    let grid_lo = alpha_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let grid_hi = alpha_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let per_snr: Vec<Result<Vec<Candidate>>> = snr_r_grid
        .par_iter()
        .map(|&snr_r| {
            let d = base.with_snr_r(snr_r);
            let mut alphas: Vec<f64> = alpha_grid.iter().copied().filter(|a| (0.0..=1.0).contains(a)).collect();
            if snr_r > 0.0 {
                if let Ok(a) = alpha_for_primary_bound(&d, epsilon, snr_r) {
                    if (grid_lo..=grid_hi).contains(&a) {
                        alphas.push(a);
                    }
                }
            }
            let mut out = Vec::new();
            for a in alphas {
                if let Some((alpha, u_p)) = settle_on_constraint(&d, a, epsilon)? {
                    out.push(Candidate {
                        u_s: secondary_objective(&d, alpha)?,
                        snr_r,
                        alpha,
                        u_p,
                    });
                }
            }
            Ok(out)
        })
        .collect();

    let mut best: Option<Candidate> = None;
    for cands in per_snr {
        for c in cands? {
            let better = match best {
                None => true,
                Some(b) => c
                    .u_s
                    .total_cmp(&b.u_s)
                    .then(c.snr_r.total_cmp(&b.snr_r))
                    .then(c.alpha.total_cmp(&b.alpha))
                    .is_lt(),
            };
            if better {
                best = Some(c);
            }
        }
    }

    Ok(match best {
        Some(c) => AllocationResult {
            alpha: c.alpha,
            snr_r: c.snr_r,
            u_p: c.u_p,
            u_s_total: c.u_s,
            p_d1,
            feasible: true,
        },
        None => {
            // Report the least-violating primary bound over the grid.
            let mut u_p = f64::INFINITY;
            for &snr_r in snr_r_grid {
                let d = base.with_snr_r(snr_r);
                for &a in alpha_grid {
                    u_p = u_p.min(primary_bound(&d, a.clamp(0.0, 1.0))?);
                }
            }
            AllocationResult {
                alpha: 0.0,
                snr_r: 0.0,
                u_p,
                u_s_total: 1.0,
                p_d1,
                feasible: false,
            }
        }
    })
}

/// Common α band `[Λ_p/(1+Λ_p), 1/(1+Λ_s)]`, or `None` when it is empty.
pub fn common_alpha_band(rate_p: f64, rate_s: f64) -> Option<(f64, f64)> {
    let lo = primary_branch_boundary(crate::system::sinr_threshold(rate_p, 2));
    let hi = secondary_branch_boundary(crate::system::sinr_threshold(rate_s, 2));
    (lo <= hi).then_some((lo, hi))
}

/// R_s whose secondary branch switch sits exactly at `alpha`: ½ log₂(1/α).
pub fn rate_s_at_boundary(alpha: f64) -> f64 {
    0.5 * (1.0 / alpha).log2()
}

/// R_p whose primary branch switch sits exactly at `alpha`: ½ log₂(1/(1−α)).
pub fn rate_p_at_boundary(alpha: f64) -> f64 {
    0.5 * (1.0 / (1.0 - alpha)).log2()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionCell {
    pub rate: f64,
    pub alpha: f64,
    /// With `rate` read as R_p: α is on the α-dependent branch of U_p.
    pub region1: bool,
    /// With `rate` read as R_s: α is on the α-dependent branch of U_s.
    pub region2: bool,
}

impl RegionCell {
    pub fn common(&self) -> bool {
        self.region1 && self.region2
    }
}

/// Rate-versus-α map of where each bound can still be improved by α and γ_r.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    pub cells: Vec<RegionCell>,
}

impl RegionMap {
    pub fn common_cells(&self) -> impl Iterator<Item = &RegionCell> {
        self.cells.iter().filter(|c| c.common())
    }
}

pub fn feasibility_region(rate_grid: &[f64], alpha_grid: &[f64]) -> RegionMap {
    let mut cells = Vec::with_capacity(rate_grid.len() * alpha_grid.len());
    for &rate in rate_grid {
        let lambda = crate::system::sinr_threshold(rate, 2);
        for &alpha in alpha_grid {
            cells.push(RegionCell {
                rate,
                alpha,
                region1: alpha >= primary_branch_boundary(lambda),
                region2: alpha <= secondary_branch_boundary(lambda),
            });
        }
    }
    RegionMap { cells }
}
