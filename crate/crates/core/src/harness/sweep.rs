//! One-dimensional parameter sweeps over analytic and simulated outages.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use super::format::{opt, sig9};
use crate::allocator::min_snr_r_for_epsilon;
use crate::analytic::{
    direct_link_outage, noncoop_primary_outage, noncoop_secondary_outage, total_secondary_outage, User,
};
use crate::error::{Error, Result};
use crate::montecarlo::{estimate, OutageEstimate, Scheme};
use crate::numerics::QuadratureSpec;
use crate::system::{db_to_linear, derive, linear_to_db, Link, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    SnrPDb,
    SnrRDb,
    Alpha,
    Epsilon,
    RateP,
    RateS,
    /// Scales σ²_pr and σ²_rp.
    Mu1,
    /// Scales σ²_sr and σ²_rs.
    Mu2,
    LinkVar(Link),
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepAxis::SnrPDb => f.write_str("snr_p_db"),
            SweepAxis::SnrRDb => f.write_str("snr_r_db"),
            SweepAxis::Alpha => f.write_str("alpha"),
            SweepAxis::Epsilon => f.write_str("epsilon"),
            SweepAxis::RateP => f.write_str("rate_p"),
            SweepAxis::RateS => f.write_str("rate_s"),
            SweepAxis::Mu1 => f.write_str("mu1"),
            SweepAxis::Mu2 => f.write_str("mu2"),
            SweepAxis::LinkVar(l) => write!(f, "link_vars.{l}"),
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "snr_p_db" => SweepAxis::SnrPDb,
            "snr_r_db" => SweepAxis::SnrRDb,
            "alpha" => SweepAxis::Alpha,
            "epsilon" => SweepAxis::Epsilon,
            "rate_p" => SweepAxis::RateP,
            "rate_s" => SweepAxis::RateS,
            "mu1" => SweepAxis::Mu1,
            "mu2" => SweepAxis::Mu2,
            _ => match s.strip_prefix("link_vars.") {
                Some(l) => SweepAxis::LinkVar(l.parse()?),
                None => return Err(Error::invalid(format!("unknown sweep axis '{s}'"))),
            },
        })
    }
}

/// Inclusive arithmetic range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl AxisRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        AxisRange { start, stop, step }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step > 0.0 && self.stop >= self.start) {
            return Err(Error::invalid(format!(
                "sweep range needs start <= stop and step > 0, got {}:{}:{}",
                self.start, self.stop, self.step
            )));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        if n > 1_000_000 {
            return Err(Error::invalid("sweep range has more than a million points"));
        }
        Ok((0..=n).map(|i| self.start + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    MonteCarlo,
    Both,
}

impl Mode {
    fn analytic(self) -> bool {
        self != Mode::MonteCarlo
    }

    fn simulated(self) -> bool {
        self != Mode::Analytic
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "montecarlo" | "mc" => Ok(Mode::MonteCarlo),
            "both" => Ok(Mode::Both),
            _ => Err(Error::invalid(format!("unknown mode '{s}'"))),
        }
    }
}

/// How γ_r is chosen at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelayPower {
    /// γ_r from the scenario (or the axis, when sweeping `snr_r_db`).
    Fixed,
    /// Smallest γ_r that keeps the primary bound at ε for the given α.
    MinForEpsilon,
}

impl FromStr for RelayPower {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(RelayPower::Fixed),
            "min" | "min_for_epsilon" => Ok(RelayPower::MinForEpsilon),
            _ => Err(Error::invalid(format!("unknown relay power policy '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scenario: SystemParams,
    pub axis: SweepAxis,
    pub range: AxisRange,
    pub schemes: Vec<Scheme>,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
    pub alpha: f64,
    pub relay_power: RelayPower,
    /// 0 uses the global rayon pool.
    pub workers: usize,
    pub quad: QuadratureSpec,
}

impl SweepSpec {
    pub fn new(scenario: SystemParams, axis: SweepAxis, range: AxisRange) -> Self {
        SweepSpec {
            scenario,
            axis,
            range,
            schemes: Scheme::ALL.to_vec(),
            mode: Mode::Analytic,
            trials: 100_000,
            seed: 1,
            alpha: 0.5,
            relay_power: RelayPower::Fixed,
            workers: 0,
            quad: QuadratureSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    /// Free-form label used by multi-family outputs; empty otherwise.
    pub family: String,
    pub axis_value: f64,
    pub scheme: Scheme,
    pub alpha: f64,
    pub snr_s: f64,
    pub snr_r: f64,
    pub analytic_sec: Option<f64>,
    /// True when `analytic_sec` and `analytic_pri` are upper bounds.
    pub analytic_is_bound: bool,
    pub analytic_pri: Option<f64>,
    pub p_d1: Option<f64>,
    pub mc_sec: Option<OutageEstimate>,
    pub mc_pri: Option<OutageEstimate>,
    pub error: Option<String>,
}

impl ResultRow {
    fn empty(axis_value: f64, scheme: Scheme, alpha: f64) -> Self {
        ResultRow {
            family: String::new(),
            axis_value,
            scheme,
            alpha,
            snr_s: f64::NAN,
            snr_r: f64::NAN,
            analytic_sec: None,
            analytic_is_bound: false,
            analytic_pri: None,
            p_d1: None,
            mc_sec: None,
            mc_pri: None,
            error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub axis: String,
    pub rows: Vec<ResultRow>,
}

const COLUMNS: [&str; 17] = [
    "family",
    "axis",
    "scheme",
    "alpha",
    "snr_s_db",
    "snr_r_db",
    "analytic_sec",
    "analytic_is_bound",
    "analytic_pri",
    "p_d1",
    "mc_sec",
    "mc_sec_se",
    "mc_pri",
    "mc_pri_se",
    "trials",
    "seed",
    "error",
];

fn db_or_empty(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        sig9(linear_to_db(x))
    }
}

impl ResultTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = COLUMNS.map(String::from);
        header[1] = self.axis.clone();
        w.write_record(&header)?;
        for r in &self.rows {
            let mc = r.mc_sec.or(r.mc_pri);
            w.write_record([
                r.family.clone(),
                sig9(r.axis_value),
                r.scheme.to_string(),
                sig9(r.alpha),
                db_or_empty(r.snr_s),
                db_or_empty(r.snr_r),
                opt(r.analytic_sec),
                if r.analytic_sec.is_some() {
                    r.analytic_is_bound.to_string()
                } else {
                    String::new()
                },
                opt(r.analytic_pri),
                opt(r.p_d1),
                opt(r.mc_sec.map(|e| e.p_hat)),
                opt(r.mc_sec.map(|e| e.std_err)),
                opt(r.mc_pri.map(|e| e.p_hat)),
                opt(r.mc_pri.map(|e| e.std_err)),
                mc.map(|e| e.trials.to_string()).unwrap_or_default(),
                mc.map(|e| e.seed.to_string()).unwrap_or_default(),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Rows of one scheme, in axis order.
    pub fn scheme_rows(&self, scheme: Scheme) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }
}

/// Applies the axis value to a copy of the scenario. Returns the α to use.
pub fn apply_axis(params: &SystemParams, axis: SweepAxis, value: f64, alpha: f64) -> (SystemParams, f64) {
    let mut p = *params;
    let mut a = alpha;
    match axis {
        SweepAxis::SnrPDb => p.snr_p = db_to_linear(value),
        SweepAxis::SnrRDb => p.snr_r = db_to_linear(value),
        SweepAxis::Alpha => a = value,
        SweepAxis::Epsilon => p.epsilon = value,
        SweepAxis::RateP => p.rate_p = value,
        SweepAxis::RateS => p.rate_s = value,
        SweepAxis::Mu1 => p.link_vars = p.link_vars.with_mu1(value),
        SweepAxis::Mu2 => p.link_vars = p.link_vars.with_mu2(value),
        SweepAxis::LinkVar(l) => p.link_vars.set(l, value),
    }
    (p, a)
}

/// Evaluates one sweep point for one scheme. Errors local to the point end
/// up in the `error` column.
pub fn evaluate_point(spec: &SweepSpec, value: f64, scheme: Scheme) -> ResultRow {
    let (params, alpha) = apply_axis(&spec.scenario, spec.axis, value, spec.alpha);
    let mut row = ResultRow::empty(value, scheme, alpha);
    if let Err(e) = fill_row(spec, params, &mut row) {
        row.error = Some(e.to_string());
    }
    row
}

fn fill_row(spec: &SweepSpec, mut params: SystemParams, row: &mut ResultRow) -> Result<()> {
    let alpha = row.alpha;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha {
            alpha,
            expected: "[0, 1]",
        });
    }
    let mut d = derive(&params)?;
    row.snr_s = d.snr_s;

    if spec.relay_power == RelayPower::MinForEpsilon
        && spec.axis != SweepAxis::SnrRDb
        && row.scheme != Scheme::NonCooperative
    {
        match min_snr_r_for_epsilon(&d, alpha, params.epsilon) {
            Ok(snr_r) => params.snr_r = snr_r,
            Err(Error::InvalidAlpha { .. }) if direct_link_outage(&d, User::Primary)? <= params.epsilon => {
                params.snr_r = 0.0
            }
            Err(Error::InvalidAlpha { .. }) if row.scheme == Scheme::Proposed => {
                // No relay power can meet ε on this side of the boundary.
                if spec.mode.analytic() {
                    row.analytic_sec = Some(1.0);
                    row.analytic_is_bound = true;
                }
                return Err(Error::Infeasible(format!(
                    "alpha = {alpha} is below the primary branch boundary"
                )));
            }
            Err(Error::InvalidAlpha { .. }) => {}
            Err(e) => return Err(e),
        }
        d = d.with_snr_r(params.snr_r);
    }
    row.snr_r = params.snr_r;

    if spec.mode.analytic() {
        match row.scheme {
            Scheme::Proposed => {
                let s = total_secondary_outage(&d, alpha, &spec.quad)?;
                row.analytic_sec = Some(s.total_sec);
                row.analytic_pri = Some(s.total_pri);
                row.analytic_is_bound = s.bound;
                row.p_d1 = Some(s.p_d1);
            }
            Scheme::NonCooperative => {
                row.analytic_pri = Some(noncoop_primary_outage(&d)?);
                row.analytic_sec = Some(if d.secondary_admitted() {
                    noncoop_secondary_outage(&d)?
                } else {
                    1.0
                });
            }
            Scheme::RelayAssistedSecondary => {
                if !d.secondary_admitted() {
                    row.analytic_sec = Some(1.0);
                }
            }
        }
    }
    if spec.mode.simulated() {
        let est = estimate(&params, alpha, spec.trials, spec.seed, row.scheme, 0)?;
        row.mc_sec = Some(est.sec);
        row.mc_pri = Some(est.pri);
        if row.p_d1.is_none() {
            row.p_d1 = est.p_d1.map(|e| e.p_hat);
        }
    }
    Ok(())
}

/// Runs every (axis value, scheme) pair. All points share the seed, so
/// neighbouring points use common random numbers. The output does not depend
/// on `spec.workers`.
pub fn run_sweep(spec: &SweepSpec) -> Result<ResultTable> {
    spec.scenario.validate()?;
    spec.quad.validate()?;
    if spec.schemes.is_empty() {
        return Err(Error::invalid("sweep needs at least one scheme"));
    }
    if spec.mode.simulated() && spec.trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let values = spec.range.values()?;
    let points: Vec<(f64, Scheme)> = values
        .iter()
        .flat_map(|&v| spec.schemes.iter().map(move |&s| (v, s)))
        .collect();
    let body = || {
        points
            .par_iter()
            .map(|&(v, s)| evaluate_point(spec, v, s))
            .collect::<Vec<_>>()
    };
    let rows = if spec.workers == 0 {
        body()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(spec.workers)
            .build()
            .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))?
            .install(body)
    };
    Ok(ResultTable {
        axis: spec.axis.to_string(),
        rows,
    })
}
