//! Reproduction targets for the reference table and figures.
//!
//! Each target writes `<target>.csv`, a plain-text `<target>_report.txt` that
//! lists every comparison with its produced value, reference value,
//! tolerance and verdict, and for the figures an optional gnuplot script.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::format::sig9;
use super::sweep::{run_sweep, AxisRange, Mode, RelayPower, ResultRow, ResultTable, SweepAxis, SweepSpec};
use crate::allocator::{allocate, common_alpha_band, default_alpha_grid, feasibility_region, rate_s_at_boundary};
use crate::analytic::{primary_branch_boundary, secondary_branch_boundary};
use crate::error::{Error, Result};
use crate::montecarlo::Scheme;
use crate::numerics::QuadratureSpec;
use crate::system::{derive, linear_to_db, secondary_cutoff_snr, sinr_threshold, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Table1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl Target {
    pub const ALL: [Target; 6] = [
        Target::Table1,
        Target::Fig2,
        Target::Fig3,
        Target::Fig4,
        Target::Fig5,
        Target::Fig6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::Table1 => "table1",
            Target::Fig2 => "fig2",
            Target::Fig3 => "fig3",
            Target::Fig4 => "fig4",
            Target::Fig5 => "fig5",
            Target::Fig6 => "fig6",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown reproduction target '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported for context only.
    Info,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub produced: f64,
    pub reference: Option<f64>,
    pub tolerance: Option<f64>,
    pub verdict: Verdict,
    pub note: String,
}

impl Check {
    /// Passes when |produced − reference| ≤ tolerance.
    pub fn compare(name: impl Into<String>, produced: f64, reference: f64, tolerance: f64) -> Self {
        let ok = (produced - reference).abs() <= tolerance;
        Check {
            name: name.into(),
            produced,
            reference: Some(reference),
            tolerance: Some(tolerance),
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            note: String::new(),
        }
    }

    pub fn condition(name: impl Into<String>, produced: f64, ok: bool, note: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            produced,
            reference: None,
            tolerance: None,
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            note: note.into(),
        }
    }

    pub fn info(name: impl Into<String>, produced: f64, reference: Option<f64>, note: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            produced,
            reference,
            tolerance: None,
            verdict: Verdict::Info,
            note: note.into(),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub out_dir: PathBuf,
    /// Trials per Monte Carlo point.
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub quad: QuadratureSpec,
    pub plot_scripts: bool,
}

impl ReproduceOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        ReproduceOptions {
            out_dir: out_dir.into(),
            trials: 100_000,
            seed: 1,
            workers: 0,
            quad: QuadratureSpec::default(),
            plot_scripts: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Reproduction {
    pub target: Target,
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
}

impl Reproduction {
    /// No check failed. Informational lines never fail.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "target: {}", self.target);
        let _ = writeln!(
            s,
            "{:<46} {:>14} {:>14} {:>10}  verdict  note",
            "check", "produced", "reference", "tolerance"
        );
        for c in &self.checks {
            let verdict = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Info => "info",
            };
            let _ = writeln!(
                s,
                "{:<46} {:>14} {:>14} {:>10}  {:<7}  {}",
                c.name,
                sig9(c.produced),
                c.reference.map(sig9).unwrap_or_else(|| "-".into()),
                c.tolerance.map(sig9).unwrap_or_else(|| "-".into()),
                verdict,
                c.note
            );
        }
        let fails = self.checks.iter().filter(|c| c.verdict == Verdict::Fail).count();
        let _ = writeln!(s, "{} checks, {} failed", self.checks.len(), fails);
        s
    }
}

pub const TABLE1_EPSILON: [f64; 6] = [0.04, 0.05, 0.06, 0.07, 0.08, 0.09];
pub const TABLE1_ALPHA: [f64; 6] = [0.488, 0.489, 0.489, 0.488, 0.488, 0.487];
pub const TABLE1_U_S: [f64; 6] = [0.021, 0.016, 0.012, 0.010, 0.009, 0.007];
pub const TABLE1_ALPHA_TOL: f64 = 0.015;
pub const TABLE1_U_S_TOL: f64 = 0.005;

/// Published common band for (R_p, R_s) = (0.4, 0.2).
pub const FIG2_BAND: (f64, f64) = (0.43, 0.75);
/// Published cutoff read off the secondary outage curves.
pub const FIG3_CUTOFF_DB: f64 = 12.0;
pub const MU_FAMILIES: [f64; 3] = [1.0, 0.5, 0.1];
pub const FIG6_ALPHAS: [f64; 4] = [0.43, 0.5, 0.76, 1.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub epsilon: f64,
    pub alpha: f64,
    pub u_s_total: f64,
    pub snr_r: f64,
    pub feasible: bool,
}

/// Allocator output for the table scenario at every ε of the table.
pub fn table1_rows() -> Result<Vec<Table1Row>> {
    TABLE1_EPSILON
        .iter()
        .map(|&eps| {
            let params = SystemParams::table1(eps);
            let d = derive(&params)?;
            let r = allocate(&params, &[params.snr_r], &default_alpha_grid(d.lambda_p))?;
            Ok(Table1Row {
                epsilon: eps,
                alpha: r.alpha,
                u_s_total: r.u_s_total,
                snr_r: r.snr_r,
                feasible: r.feasible,
            })
        })
        .collect()
}

pub fn reproduce(target: Target, opts: &ReproduceOptions) -> Result<Reproduction> {
    fs::create_dir_all(&opts.out_dir)?;
    let mut rep = Reproduction {
        target,
        files: Vec::new(),
        checks: Vec::new(),
    };
    match target {
        Target::Table1 => table1(opts, &mut rep)?,
        Target::Fig2 => fig2(opts, &mut rep)?,
        Target::Fig3 => fig3(opts, &mut rep)?,
        Target::Fig4 | Target::Fig5 => fig45(target, opts, &mut rep)?,
        Target::Fig6 => fig6(opts, &mut rep)?,
    }
    let report = opts.out_dir.join(format!("{target}_report.txt"));
    fs::write(&report, rep.report())?;
    rep.files.push(report);
    Ok(rep)
}

fn write_file(rep: &mut Reproduction, path: PathBuf, contents: &[u8]) -> Result<()> {
    fs::write(&path, contents)?;
    rep.files.push(path);
    Ok(())
}

fn write_table(opts: &ReproduceOptions, rep: &mut Reproduction, table: &ResultTable) -> Result<()> {
    let path = opts.out_dir.join(format!("{}.csv", rep.target));
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    write_file(rep, path, &buf)
}

fn table1(opts: &ReproduceOptions, rep: &mut Reproduction) -> Result<()> {
    let rows = table1_rows()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["epsilon", "alpha_eps", "alpha_ref", "u_s_total", "u_s_ref", "pass"])?;
    let mut offset = 0.0;
    for (i, r) in rows.iter().enumerate() {
        let a = Check::compare(
            format!("alpha_eps(eps={})", r.epsilon),
            r.alpha,
            TABLE1_ALPHA[i],
            TABLE1_ALPHA_TOL,
        );
        let u = Check::compare(
            format!("u_s_total(eps={})", r.epsilon),
            r.u_s_total,
            TABLE1_U_S[i],
            TABLE1_U_S_TOL,
        );
        let pass = a.verdict == Verdict::Pass && u.verdict == Verdict::Pass;
        w.write_record([
            sig9(r.epsilon),
            sig9(r.alpha),
            sig9(TABLE1_ALPHA[i]),
            sig9(r.u_s_total),
            sig9(TABLE1_U_S[i]),
            pass.to_string(),
        ])?;
        offset += r.alpha - TABLE1_ALPHA[i];
        rep.checks.push(a);
        rep.checks.push(u);
    }
    let offset = offset / rows.len() as f64;
    rep.checks.push(Check::info(
        "mean alpha offset",
        offset,
        None,
        format!(
            "systematic: exact inversion of the primary bound sits above the published alpha at every epsilon ({} at the first)",
            sig9(rows[0].alpha - TABLE1_ALPHA[0])
        ),
    ));
    let buf = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_file(rep, opts.out_dir.join("table1.csv"), &buf)
}

fn fig2(opts: &ReproduceOptions, rep: &mut Reproduction) -> Result<()> {
    let rates: Vec<f64> = (1..=200).map(|i| i as f64 * 0.01).collect();
    let alphas: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();
    let map = feasibility_region(&rates, &alphas);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rate", "alpha", "region1", "region2", "common"])?;
    for c in &map.cells {
        w.write_record([
            sig9(c.rate),
            sig9(c.alpha),
            u8::from(c.region1).to_string(),
            u8::from(c.region2).to_string(),
            u8::from(c.common()).to_string(),
        ])?;
    }
    let buf = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_file(rep, opts.out_dir.join("fig2.csv"), &buf)?;

    // Boundary curves R_p(α) and R_s(α), the usual way to draw the regions.
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha", "rate_p_boundary", "rate_s_boundary"])?;
    for i in 1..100 {
        let a = i as f64 * 0.01;
        w.write_record([
            sig9(a),
            sig9(crate::allocator::rate_p_at_boundary(a)),
            sig9(rate_s_at_boundary(a)),
        ])?;
    }
    let buf = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_file(rep, opts.out_dir.join("fig2_boundaries.csv"), &buf)?;
    if opts.plot_scripts {
        let script = "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'alpha'\nset ylabel 'rate (bits/s/Hz)'\n\
plot 'fig2_boundaries.csv' using 1:2 with lines title 'R_p boundary', \\\n     '' using 1:3 with lines title 'R_s boundary'\n";
        write_file(rep, opts.out_dir.join("fig2.gp"), script.as_bytes())?;
    }

    let lo = primary_branch_boundary(sinr_threshold(0.4, 2));
    let hi = secondary_branch_boundary(sinr_threshold(0.2, 2));
    let band_ok = common_alpha_band(0.4, 0.2) == Some((lo, hi));
    rep.checks.push(
        Check::compare("band lower (0.4, 0.2)", lo, FIG2_BAND.0, 0.01)
            .with_note("two-decimal agreement, |diff| < 0.01"),
    );
    rep.checks.push(
        Check::compare("band upper (0.4, 0.2)", hi, FIG2_BAND.1, 0.01)
            .with_note("two-decimal agreement, |diff| < 0.01"),
    );
    rep.checks.push(Check::condition(
        "band nonempty (0.4, 0.2)",
        hi - lo,
        band_ok && lo < hi,
        "width of the common band",
    ));
    rep.checks.push(Check::compare(
        "R_s at alpha = 0.76",
        rate_s_at_boundary(0.76),
        0.2,
        0.005,
    ));
    Ok(())
}

fn gp_sweep_script(csv: &str, ylabel: &str, ycol: usize, log: bool, series: &[(String, usize, String)]) -> String {
    let mut s = String::from("set datafile separator ','\nset xlabel 'gamma_p (dB)'\n");
    let _ = writeln!(s, "set ylabel '{ylabel}'");
    if log {
        s.push_str("set logscale y\n");
    }
    let parts: Vec<String> = series
        .iter()
        .enumerate()
        .map(|(i, (title, col, value))| {
            let file = if i == 0 { format!("'{csv}'") } else { "''".to_string() };
            format!("{file} using 2:(strcol({col}) eq '{value}' ? ${ycol} : 1/0) with linespoints title '{title}'")
        })
        .collect();
    let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    s
}

fn snr_p_sweep(
    opts: &ReproduceOptions,
    scenario: SystemParams,
    alpha: f64,
    schemes: Vec<Scheme>,
    mode: Mode,
) -> SweepSpec {
    SweepSpec {
        scenario,
        axis: SweepAxis::SnrPDb,
        range: AxisRange::new(5.0, 30.0, 1.0),
        schemes,
        mode,
        trials: opts.trials,
        seed: opts.seed,
        alpha,
        relay_power: RelayPower::MinForEpsilon,
        workers: opts.workers,
        quad: opts.quad,
    }
}

fn row_at<'a>(rows: &'a [ResultRow], family: &str, scheme: Scheme, snr_p_db: f64) -> Option<&'a ResultRow> {
    rows.iter()
        .find(|r| r.family == family && r.scheme == scheme && (r.axis_value - snr_p_db).abs() < 1e-9)
}

fn fig3(opts: &ReproduceOptions, rep: &mut Reproduction) -> Result<()> {
    let scenario = SystemParams::fig3(20.0);
    let table = run_sweep(&snr_p_sweep(opts, scenario, 0.5, Scheme::ALL.to_vec(), Mode::Both))?;
    write_table(opts, rep, &table)?;
    if opts.plot_scripts {
        let mut series = Vec::new();
        for s in Scheme::ALL {
            series.push((format!("{s} (MC)"), 3, s.to_string()));
        }
        let mut script = gp_sweep_script("fig3.csv", "secondary outage", 11, true, &series);
        script.push_str("replot 'fig3.csv' using 2:(strcol(3) eq 'proposed' ? $7 : 1/0) with lines title 'proposed (bound)', \\\n     '' using 2:(strcol(3) eq 'noncooperative' ? $7 : 1/0) with lines title 'noncooperative (analytic)'\n");
        write_file(rep, opts.out_dir.join("fig3.gp"), script.as_bytes())?;
    }

    let cutoff_db = linear_to_db(secondary_cutoff_snr(scenario.rate_p, scenario.epsilon, 1.0)?);
    rep.checks.push(Check::info(
        "cutoff gamma_p (dB)",
        cutoff_db,
        Some(FIG3_CUTOFF_DB),
        "root of the admissible-SNR condition; the published curves are read off a plot",
    ));
    let below: Vec<&ResultRow> = table.rows.iter().filter(|r| r.axis_value < cutoff_db).collect();
    let silent = below
        .iter()
        .all(|r| r.snr_s == 0.0 && r.mc_sec.is_some_and(|e| e.p_hat == 1.0) && r.analytic_sec.is_none_or(|a| a == 1.0));
    rep.checks.push(Check::condition(
        "outage = 1 below cutoff",
        below.len() as f64,
        silent && !below.is_empty(),
        "rows below the cutoff, all schemes",
    ));

    let mut worst = f64::NEG_INFINITY;
    for r in table.scheme_rows(Scheme::Proposed) {
        if let (Some(bound), Some(mc)) = (r.analytic_sec, r.mc_sec) {
            if mc.std_err > 0.0 {
                worst = worst.max((mc.p_hat - bound) / mc.std_err);
            } else if mc.p_hat > bound {
                worst = f64::INFINITY;
            }
        }
    }
    rep.checks.push(Check::condition(
        "proposed MC above bound (max se)",
        worst,
        worst <= 3.0,
        "largest (MC - bound)/se over the sweep",
    ));

    let mut max_z: f64 = 0.0;
    for r in table.scheme_rows(Scheme::NonCooperative) {
        if let (Some(a), Some(mc)) = (r.analytic_sec, r.mc_sec) {
            if a < 1.0 {
                max_z = max_z.max(mc.z_score(a).abs());
            }
        }
    }
    rep.checks.push(Check::info(
        "noncooperative max |z|",
        max_z,
        None,
        "MC vs closed form over the sweep",
    ));

    let at = |s| row_at(&table.rows, "", s, 20.0).and_then(|r| r.mc_sec);
    if let (Some(p), Some(r), Some(n)) = (
        at(Scheme::Proposed),
        at(Scheme::RelayAssistedSecondary),
        at(Scheme::NonCooperative),
    ) {
        let gap1 = (r.p_hat - p.p_hat) / (r.std_err.powi(2) + p.std_err.powi(2)).sqrt();
        let gap2 = (n.p_hat - r.p_hat) / (n.std_err.powi(2) + r.std_err.powi(2)).sqrt();
        rep.checks.push(Check::condition(
            "ordering at 20 dB: proposed < relay-assisted",
            gap1,
            gap1 > 3.0,
            "gap in combined se",
        ));
        rep.checks.push(Check::condition(
            "ordering at 20 dB: relay-assisted < noncoop",
            gap2,
            gap2 > 3.0,
            "gap in combined se",
        ));
    }
    Ok(())
}

fn family_label(mu1: f64, mu2: f64) -> String {
    format!("mu1={},mu2={}", sig9(mu1), sig9(mu2))
}

/// (μ1, μ2) pairs: μ1 varied at μ2 = 1, then μ2 varied at μ1 = 1.
pub fn mu_families() -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = MU_FAMILIES.iter().map(|&m| (m, 1.0)).collect();
    v.extend(MU_FAMILIES.iter().skip(1).map(|&m| (1.0, m)));
    v
}

fn fig45(target: Target, opts: &ReproduceOptions, rep: &mut Reproduction) -> Result<()> {
    let mut rows = Vec::new();
    for (mu1, mu2) in mu_families() {
        let mut scenario = SystemParams::fig3(20.0);
        scenario.link_vars = scenario.link_vars.with_mu1(mu1).with_mu2(mu2);
        let t = run_sweep(&snr_p_sweep(
            opts,
            scenario,
            0.5,
            vec![Scheme::Proposed],
            Mode::Analytic,
        ))?;
        let label = family_label(mu1, mu2);
        rows.extend(t.rows.into_iter().map(|mut r| {
            r.family = label.clone();
            r
        }));
    }
    let table = ResultTable {
        axis: SweepAxis::SnrPDb.to_string(),
        rows,
    };
    write_table(opts, rep, &table)?;
    let csv = format!("{target}.csv");
    let series: Vec<(String, usize, String)> = mu_families()
        .into_iter()
        .map(|(a, b)| (family_label(a, b), 1, family_label(a, b)))
        .collect();
    if opts.plot_scripts {
        let script = if target == Target::Fig4 {
            gp_sweep_script(&csv, "secondary outage bound", 7, true, &series)
        } else {
            gp_sweep_script(&csv, "gamma_r (dB)", 6, false, &series)
        };
        write_file(rep, opts.out_dir.join(format!("{target}.gp")), script.as_bytes())?;
    }

    let value = |mu1: f64, mu2: f64| -> f64 {
        row_at(&table.rows, &family_label(mu1, mu2), Scheme::Proposed, 20.0)
            .map(|r| {
                if target == Target::Fig4 {
                    r.analytic_sec.unwrap_or(f64::NAN)
                } else {
                    r.snr_r
                }
            })
            .unwrap_or(f64::NAN)
    };
    let note = "trend-only, mu values are a harness choice";
    let mu1_vals: Vec<f64> = MU_FAMILIES.iter().map(|&m| value(m, 1.0)).collect();
    let mu2_vals: Vec<f64> = MU_FAMILIES.iter().map(|&m| value(1.0, m)).collect();
    let strictly = |v: &[f64], up: bool| v.windows(2).all(|w| if up { w[1] > w[0] } else { w[1] < w[0] });
    if target == Target::Fig4 {
        rep.checks.push(Check::condition(
            "U's falls as mu1 decreases (20 dB)",
            mu1_vals[2],
            strictly(&mu1_vals, false),
            note,
        ));
        rep.checks.push(Check::condition(
            "U's rises as mu2 decreases (20 dB)",
            mu2_vals[2],
            strictly(&mu2_vals, true),
            note,
        ));
    } else {
        rep.checks.push(Check::condition(
            "gamma_r rises as mu1 decreases (20 dB)",
            linear_to_db(mu1_vals[2]),
            strictly(&mu1_vals, true),
            note,
        ));
        rep.checks.push(Check::condition(
            "gamma_r independent of mu2 (20 dB)",
            linear_to_db(mu2_vals[2]),
            mu2_vals.iter().all(|&v| v == mu2_vals[0]),
            note,
        ));
    }
    Ok(())
}

fn fig6(opts: &ReproduceOptions, rep: &mut Reproduction) -> Result<()> {
    let scenario = SystemParams::fig3(20.0);
    let boundary = primary_branch_boundary(sinr_threshold(scenario.rate_p, 2));
    let mut rows = Vec::new();
    let below = (boundary * 100.0).floor() / 100.0;
    for alpha in std::iter::once(below).chain(FIG6_ALPHAS) {
        let t = run_sweep(&snr_p_sweep(
            opts,
            scenario,
            alpha,
            vec![Scheme::Proposed],
            Mode::Analytic,
        ))?;
        let label = format!("alpha={}", sig9(alpha));
        rows.extend(t.rows.into_iter().map(|mut r| {
            r.family = label.clone();
            r
        }));
    }
    let table = ResultTable {
        axis: SweepAxis::SnrPDb.to_string(),
        rows,
    };
    write_table(opts, rep, &table)?;
    if opts.plot_scripts {
        let series: Vec<(String, usize, String)> = FIG6_ALPHAS
            .iter()
            .map(|&a| {
                let l = format!("alpha={}", sig9(a));
                (l.clone(), 1, l)
            })
            .collect();
        let script = gp_sweep_script("fig6.csv", "secondary outage bound", 7, true, &series);
        write_file(rep, opts.out_dir.join("fig6.gp"), script.as_bytes())?;
    }

    let value = |alpha: f64| {
        row_at(&table.rows, &format!("alpha={}", sig9(alpha)), Scheme::Proposed, 20.0).and_then(|r| r.analytic_sec)
    };
    let vals: Vec<f64> = FIG6_ALPHAS.iter().map(|&a| value(a).unwrap_or(f64::NAN)).collect();
    let non_increasing = vals.windows(2).all(|w| w[0] <= w[1]);
    rep.checks.push(Check::condition(
        "U's non-decreasing in alpha (20 dB)",
        vals[0],
        non_increasing,
        "alpha in {0.43, 0.5, 0.76, 1}",
    ));
    rep.checks.push(Check::condition(
        "U's(0.43) < U's(1) (20 dB)",
        vals[0] / vals[3],
        vals[0] < vals[3],
        "ratio shown",
    ));
    let ls = sinr_threshold(scenario.rate_s, 2);
    rep.checks.push(Check::info(
        "U's(0.76) / U's(1) (20 dB)",
        vals[2] / vals[3],
        Some(1.0),
        format!(
            "flat for alpha >= {:.4}, where the secondary bound is alpha-independent",
            secondary_branch_boundary(ls)
        ),
    ));
    let below_rows: Vec<&ResultRow> = table
        .rows
        .iter()
        .filter(|r| r.family == format!("alpha={}", sig9(below)))
        .collect();
    let infeasible = below_rows
        .iter()
        .filter(|r| r.snr_s > 0.0)
        .all(|r| r.analytic_sec == Some(1.0) && r.error.is_some());
    rep.checks.push(Check::condition(
        format!("alpha = {} infeasible", sig9(below)),
        below,
        infeasible,
        "below the primary branch boundary",
    ));
    Ok(())
}

/// Convenience wrapper used by the CLI.
pub fn reproduce_all(opts: &ReproduceOptions) -> Result<Vec<Reproduction>> {
    Target::ALL.into_iter().map(|t| reproduce(t, opts)).collect()
}

pub fn out_path(dir: &Path, target: Target) -> PathBuf {
    dir.join(format!("{target}.csv"))
}
