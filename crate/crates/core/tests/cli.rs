use std::fs;
use std::process::{Command, Output};

fn cli(args: &[&str], out_dir: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cr-relay"))
        .args(args)
        .env("CR_RELAY_OUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn analytic_prints_outages() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["analytic", "--alpha", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("(exact)"), "{s}");
    assert!(s.contains("secondary cutoff: 10.2076 dB"), "{s}");
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    fs::write(&cfg, "# table scenario\nepsilon = 0.04\nsnr_r_db = 10\n").unwrap();
    let o = cli(&["allocate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("alpha = 0.496374"), "{}", stdout(&o));

    let o = cli(
        &["allocate", "--config", cfg.to_str().unwrap(), "--epsilon", "0.09"],
        dir.path(),
    );
    assert!(stdout(&o).contains("alpha = 0.490608"), "{}", stdout(&o));
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "rate_p = 0.4\nrate_p = 0.5\n").unwrap();
    let o = cli(&["analytic", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("config line 2"));
    assert_eq!(
        cli(&["analytic", "--epsilon", "1.5"], dir.path()).status.code(),
        Some(1)
    );
    assert_eq!(
        cli(
            &["sweep", "--axis", "nope", "--start", "0", "--stop", "1", "--step", "1"],
            dir.path()
        )
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn sweep_writes_into_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(
        &[
            "sweep", "--axis", "snr_p_db", "--start", "10", "--stop", "20", "--step", "5", "--mode", "both",
            "--trials", "2000",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep_snr_p_db.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 3);
}

#[test]
fn reproduction_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["reproduce", "fig2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let o = cli(&["reproduce", "table1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAIL"));
    assert!(dir.path().join("table1_report.txt").exists());
}

#[test]
fn verify_flags_only_the_product_form_activation_probability() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(
        &["verify", "--alpha", "0.6", "--trials", "200000", "--epsilon", "0.04"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let s = stdout(&o);
    let flagged: Vec<&str> = s.lines().filter(|l| l.ends_with("FLAGGED")).collect();
    assert_eq!(flagged.len(), 1, "{s}");
    assert!(flagged[0].starts_with("p_d1 "), "{s}");
}
