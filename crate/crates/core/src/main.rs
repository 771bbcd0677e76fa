use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cr_relay::allocator::{allocate, common_alpha_band, default_alpha_grid, default_snr_r_grid};
use cr_relay::analytic::{noncoop_primary_outage, noncoop_secondary_outage, total_secondary_outage};
use cr_relay::harness::config::{apply_key, default_scenario, load_scenario};
use cr_relay::harness::reproduce::{reproduce, ReproduceOptions, Target};
use cr_relay::harness::sweep::{run_sweep, AxisRange, Mode, RelayPower, SweepAxis, SweepSpec};
use cr_relay::harness::verify::compare_analytic_mc;
use cr_relay::montecarlo::{estimate, Scheme};
use cr_relay::numerics::QuadratureSpec;
use cr_relay::system::{derive, linear_to_db, secondary_cutoff_snr, SystemParams};
use cr_relay::{Error, Result};

#[derive(Parser)]
#[command(
    name = "cr-relay",
    version,
    about = "Outage analysis and simulation of a relay shared by a primary and a secondary link"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Scenario file (key = value lines); flags below override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Monte Carlo trials per point [default: 10^6, 10^5 for sweeps].
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true, env = "CR_RELAY_OUT_DIR", default_value = "out")]
    out_dir: PathBuf,
    /// Absolute and relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    quad_tol: f64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[arg(long, global = true)]
    rate_p: Option<f64>,
    #[arg(long, global = true)]
    rate_s: Option<f64>,
    #[arg(long, global = true)]
    snr_p_db: Option<f64>,
    #[arg(long, global = true)]
    snr_r_db: Option<f64>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Any scenario key, e.g. --set link_vars.rp=0.5 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form outages of every scheme.
    Analytic {
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
    },
    /// Monte Carlo outage estimates.
    Simulate {
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// proposed, noncooperative, relay_assisted_secondary or all.
        #[arg(long, default_value = "all")]
        scheme: String,
    },
    /// Choose α (and optionally γ_r) minimising the secondary bound under
    /// the primary constraint.
    Allocate {
        /// Search γ_r over -10..30 dB instead of keeping the scenario value.
        /// The bound falls with γ_r, so the search ends at the top of the grid.
        #[arg(long)]
        search_snr_r: bool,
    },
    /// Common α band for a rate pair.
    Region,
    /// Sweep one parameter and write a CSV table.
    Sweep {
        /// snr_p_db, snr_r_db, alpha, epsilon, rate_p, rate_s, mu1, mu2 or link_vars.<ab>.
        #[arg(long)]
        axis: String,
        #[arg(long)]
        start: f64,
        #[arg(long)]
        stop: f64,
        #[arg(long)]
        step: f64,
        /// Comma-separated schemes, or all.
        #[arg(long, default_value = "all")]
        schemes: String,
        /// analytic, montecarlo or both.
        #[arg(long, default_value = "analytic")]
        mode: String,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// fixed or min (smallest γ_r meeting ε at the given α).
        #[arg(long, default_value = "fixed")]
        relay_power: String,
        /// Output file; defaults to <out-dir>/sweep_<axis>.csv, "-" for stdout.
        #[arg(long)]
        output: Option<String>,
    },
    /// Regenerate a reference table or figure with a deviation report.
    Reproduce {
        /// table1, fig2, fig3, fig4, fig5, fig6 or all.
        target: String,
        #[arg(long)]
        no_plots: bool,
    },
    /// Compare every closed form with the simulator.
    Verify {
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
    },
}

enum Outcome {
    Ok,
    CheckFailed,
}

fn scenario(g: &Global) -> Result<SystemParams> {
    let mut p = match &g.config {
        Some(path) => load_scenario(path, default_scenario())?,
        None => default_scenario(),
    };
    for (key, v) in [
        ("rate_p", g.rate_p),
        ("rate_s", g.rate_s),
        ("snr_p_db", g.snr_p_db),
        ("snr_r_db", g.snr_r_db),
        ("epsilon", g.epsilon),
    ] {
        if let Some(v) = v {
            apply_key(&mut p, key, v)?;
        }
    }
    for kv in &g.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidParams(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParams(format!("--set {k}: not a number")))?;
        apply_key(&mut p, k.trim(), v)?;
    }
    p.validate()?;
    Ok(p)
}

fn quad(g: &Global) -> Result<QuadratureSpec> {
    let q = QuadratureSpec::with_tol(g.quad_tol);
    q.validate()?;
    Ok(q)
}

fn parse_schemes(s: &str) -> Result<Vec<Scheme>> {
    if s == "all" {
        return Ok(Scheme::ALL.to_vec());
    }
    s.split(',').map(|x| x.trim().parse()).collect()
}

fn print_scenario(out: &mut impl Write, p: &SystemParams) -> io::Result<()> {
    let d = derive(p).map_err(io::Error::other)?;
    writeln!(
        out,
        "R_p = {}, R_s = {}, gamma_p = {:.3} dB, gamma_r = {:.3} dB, epsilon = {}",
        p.rate_p,
        p.rate_s,
        linear_to_db(p.snr_p),
        linear_to_db(p.snr_r),
        p.epsilon
    )?;
    let gs = if d.snr_s > 0.0 {
        format!("{:.3} dB", linear_to_db(d.snr_s))
    } else {
        "0 (no access)".into()
    };
    writeln!(
        out,
        "gamma_s = {gs}, Lambda_p = {:.6}, Lambda_s = {:.6}",
        d.lambda_p, d.lambda_s
    )?;
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome> {
    let g = &cli.global;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Analytic { alpha } => {
            let p = scenario(g)?;
            let d = derive(&p)?;
            print_scenario(&mut out, &p)?;
            let s = total_secondary_outage(&d, alpha, &quad(g)?)?;
            let kind = if s.bound { "upper bound" } else { "exact" };
            writeln!(out, "alpha = {alpha}")?;
            writeln!(out, "P(D=1) = {:.9}", s.p_d1)?;
            writeln!(
                out,
                "proposed: secondary {:.9}, primary {:.9} ({kind})",
                s.total_sec, s.total_pri
            )?;
            let nc_sec = if d.secondary_admitted() {
                noncoop_secondary_outage(&d)?
            } else {
                1.0
            };
            writeln!(
                out,
                "noncooperative: secondary {:.9}, primary {:.9}",
                nc_sec,
                noncoop_primary_outage(&d)?
            )?;
            writeln!(
                out,
                "secondary cutoff: {:.4} dB",
                linear_to_db(secondary_cutoff_snr(
                    p.rate_p,
                    p.epsilon,
                    p.link_vars.get(cr_relay::system::Link::PP)
                )?)
            )?;
        }
        Command::Simulate { alpha, scheme } => {
            let p = scenario(g)?;
            print_scenario(&mut out, &p)?;
            let trials = g.trials.unwrap_or(1_000_000);
            for s in parse_schemes(&scheme)? {
                let e = estimate(&p, alpha, trials, g.seed, s, g.workers)?;
                write!(
                    out,
                    "{s}: secondary {:.6} ± {:.6}, primary {:.6} ± {:.6}",
                    e.sec.p_hat, e.sec.std_err, e.pri.p_hat, e.pri.std_err
                )?;
                if let Some(d1) = e.p_d1 {
                    write!(out, ", P(D=1) {:.6}", d1.p_hat)?;
                }
                writeln!(out, " [{trials} trials, seed {}]", g.seed)?;
            }
        }
        Command::Allocate { search_snr_r } => {
            let p = scenario(g)?;
            print_scenario(&mut out, &p)?;
            let d = derive(&p)?;
            let grid = if search_snr_r {
                default_snr_r_grid()
            } else {
                vec![p.snr_r]
            };
            let r = allocate(&p, &grid, &default_alpha_grid(d.lambda_p))?;
            if r.feasible {
                writeln!(
                    out,
                    "alpha = {:.6}, gamma_r = {:.3} dB, U_p = {:.6}, U's = {:.6}, P(D=1) = {:.6}",
                    r.alpha,
                    linear_to_db(r.snr_r),
                    r.u_p,
                    r.u_s_total,
                    r.p_d1
                )?;
            } else {
                writeln!(
                    out,
                    "infeasible: best primary bound {:.6} > epsilon {}",
                    r.u_p, p.epsilon
                )?;
                return Ok(Outcome::CheckFailed);
            }
        }
        Command::Region => {
            let p = scenario(g)?;
            match common_alpha_band(p.rate_p, p.rate_s) {
                Some((lo, hi)) => writeln!(
                    out,
                    "R_p = {}, R_s = {}: alpha in [{lo:.4}, {hi:.4}]",
                    p.rate_p, p.rate_s
                )?,
                None => writeln!(out, "R_p = {}, R_s = {}: no common alpha", p.rate_p, p.rate_s)?,
            }
        }
        Command::Sweep {
            axis,
            start,
            stop,
            step,
            schemes,
            mode,
            alpha,
            relay_power,
            output,
        } => {
            let axis: SweepAxis = axis.parse()?;
            let spec = SweepSpec {
                scenario: scenario(g)?,
                axis,
                range: AxisRange::new(start, stop, step),
                schemes: parse_schemes(&schemes)?,
                mode: mode.parse::<Mode>()?,
                trials: g.trials.unwrap_or(100_000),
                seed: g.seed,
                alpha,
                relay_power: relay_power.parse::<RelayPower>()?,
                workers: g.workers,
                quad: quad(g)?,
            };
            let table = run_sweep(&spec)?;
            match output.as_deref() {
                Some("-") => table.write_csv(&mut out)?,
                other => {
                    let path = match other {
                        Some(p) => PathBuf::from(p),
                        None => {
                            std::fs::create_dir_all(&g.out_dir)?;
                            g.out_dir.join(format!("sweep_{axis}.csv"))
                        }
                    };
                    table.write_csv(std::fs::File::create(&path)?)?;
                    writeln!(out, "wrote {} rows to {}", table.rows.len(), path.display())?;
                }
            }
        }
        Command::Reproduce { target, no_plots } => {
            let targets: Vec<Target> = if target == "all" {
                Target::ALL.to_vec()
            } else {
                vec![target.parse()?]
            };
            let opts = ReproduceOptions {
                out_dir: g.out_dir.clone(),
                trials: g.trials.unwrap_or(100_000),
                seed: g.seed,
                workers: g.workers,
                quad: quad(g)?,
                plot_scripts: !no_plots,
            };
            let mut all_ok = true;
            for t in targets {
                let rep = reproduce(t, &opts)?;
                write!(out, "{}", rep.report())?;
                for f in &rep.files {
                    writeln!(out, "  wrote {}", f.display())?;
                }
                all_ok &= rep.passed();
            }
            if !all_ok {
                return Ok(Outcome::CheckFailed);
            }
        }
        Command::Verify { alpha } => {
            let p = scenario(g)?;
            print_scenario(&mut out, &p)?;
            let r = compare_analytic_mc(&p, alpha, g.trials.unwrap_or(1_000_000), g.seed, g.workers, &quad(g)?)?;
            write!(out, "{}", r.render())?;
            if !r.passed() {
                return Ok(Outcome::CheckFailed);
            }
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
