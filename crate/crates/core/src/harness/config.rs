//! Scenario files.
//!
//! A scenario file is plain text with one `key = value` pair per line.
//! Blank lines and lines starting with `#` are ignored, and a trailing
//! `# comment` after a value is stripped. Recognised keys:
//!
//! | key               | meaning                                  |
//! |-------------------|------------------------------------------|
//! | `rate_p`          | primary rate R_p, bits/s/Hz              |
//! | `rate_s`          | secondary rate R_s, bits/s/Hz            |
//! | `snr_p_db`        | primary transmit SNR γ_p in dB           |
//! | `snr_r_db`        | relay SNR γ_r in dB                      |
//! | `epsilon`         | primary outage threshold ε               |
//! | `link_vars.<ab>`  | variance σ²_ab, `<ab>` one of pp, sp, ps, ss, pr, sr, rp, rs |
//!
//! Each key may appear at most once. Keys that are absent keep the value of
//! the base scenario the file is applied to ([`default_scenario`] for the
//! CLI). Unknown keys are an error.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::system::{db_to_linear, linear_to_db, Link, SystemParams};

/// γ_p = 20 dB, γ_r = 10 dB, R_p = 0.4, R_s = 0.2, ε = 0.03, unit variances
/// except σ²_ps = σ²_sp = 0.1.
pub fn default_scenario() -> SystemParams {
    SystemParams::fig3(20.0)
}

/// Applies a single `key`/`value` pair to `params`.
pub fn apply_key(params: &mut SystemParams, key: &str, value: f64) -> Result<()> {
    match key {
        "rate_p" => params.rate_p = value,
        "rate_s" => params.rate_s = value,
        "snr_p_db" => params.snr_p = db_to_linear(value),
        "snr_r_db" => params.snr_r = db_to_linear(value),
        "epsilon" => params.epsilon = value,
        _ => {
            let link = key
                .strip_prefix("link_vars.")
                .ok_or_else(|| Error::invalid(format!("unknown key '{key}'")))?
                .parse::<Link>()?;
            params.link_vars.set(link, value);
        }
    }
    Ok(())
}

pub fn parse_scenario(text: &str, base: SystemParams) -> Result<SystemParams> {
    let mut params = base;
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Config { line: line_no, msg };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
        let key = key.trim();
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| err(format!("value of '{key}' is not a number: '{}'", value.trim())))?;
        if !value.is_finite() {
            return Err(err(format!("value of '{key}' must be finite")));
        }
        if !seen.insert(key.to_string()) {
            return Err(err(format!("duplicate key '{key}'")));
        }
        apply_key(&mut params, key, value).map_err(|e| err(e.to_string()))?;
    }
    params.validate()?;
    Ok(params)
}

pub fn load_scenario(path: &Path, base: SystemParams) -> Result<SystemParams> {
    parse_scenario(&std::fs::read_to_string(path)?, base)
}

/// Serialises every key, so the output parses back to the same scenario on
/// any base.
pub fn write_scenario(params: &SystemParams) -> String {
    let mut out = String::new();
    out.push_str(&format!("rate_p = {:?}\n", params.rate_p));
    out.push_str(&format!("rate_s = {:?}\n", params.rate_s));
    out.push_str(&format!("snr_p_db = {:?}\n", linear_to_db(params.snr_p)));
    out.push_str(&format!("snr_r_db = {:?}\n", linear_to_db(params.snr_r)));
    out.push_str(&format!("epsilon = {:?}\n", params.epsilon));
    for (link, var) in params.link_vars.iter() {
        out.push_str(&format!("link_vars.{link} = {var:?}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_full_file() {
        let text = "\
# table scenario
rate_p = 0.4
rate_s = 0.2
snr_p_db = 20
snr_r_db = 10   # relay
epsilon = 0.04
link_vars.pp = 1
link_vars.sp = 0.1
link_vars.ps = 0.1
link_vars.ss = 1
link_vars.pr = 1
link_vars.sr = 1
link_vars.rp = 1
link_vars.rs = 1
";
        let p = parse_scenario(text, default_scenario()).unwrap();
        let want = SystemParams::table1(0.04);
        assert_eq!(p.rate_p, want.rate_p);
        assert!((p.snr_p - 100.0).abs() < 1e-12);
        assert!((p.snr_r - 10.0).abs() < 1e-12);
        assert_eq!(p.link_vars, want.link_vars);
    }

    #[test]
    fn partial_file_keeps_base_values() {
        let p = parse_scenario("link_vars.rp = 0.5\n", default_scenario()).unwrap();
        assert_eq!(p.link_vars.get(Link::RP), 0.5);
        assert_eq!(p.epsilon, 0.03);
    }

    #[test]
    fn rejects_bad_lines() {
        let base = default_scenario();
        for (text, line) in [
            ("rate_p = 0.4\nrate_p = 0.5\n", 2),
            ("bogus = 1\n", 1),
            ("link_vars.xx = 1\n", 1),
            ("\n\nrate_p 0.4\n", 3),
            ("epsilon = abc\n", 1),
        ] {
            match parse_scenario(text, base) {
                Err(Error::Config { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(matches!(
            parse_scenario("epsilon = 2\n", base),
            Err(Error::InvalidParams(_))
        ));
    }

    proptest! {
        #[test]
        fn written_scenario_parses_back(
            rp in 0.01f64..4.0, rs in 0.01f64..4.0, gp in -10.0f64..40.0, gr in -10.0f64..40.0,
            eps in 0.001f64..0.999, vars in proptest::array::uniform8(0.001f64..10.0),
        ) {
            let mut p = SystemParams {
                rate_p: rp, rate_s: rs, snr_p: db_to_linear(gp), snr_r: db_to_linear(gr), epsilon: eps,
                link_vars: crate::system::LinkVars::uniform(1.0),
            };
            for (l, v) in Link::ALL.into_iter().zip(vars) {
                p.link_vars.set(l, v);
            }
            let q = parse_scenario(&write_scenario(&p), SystemParams::table1(0.5)).unwrap();
            prop_assert_eq!(q.rate_p, p.rate_p);
            prop_assert_eq!(q.link_vars, p.link_vars);
            prop_assert!((q.snr_p / p.snr_p - 1.0).abs() < 1e-12);
            prop_assert!((q.snr_r / p.snr_r - 1.0).abs() < 1e-12);
        }
    }
}
