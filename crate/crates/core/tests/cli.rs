use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use magband::cli::{self, CheckName, CheckStatus};

fn magband(config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magband"))
        .arg("--config")
        .arg(config)
        .arg("--out-dir")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

const FREE: &str = "[field]\nB = 1\n[potential]\nkind = \"zero\"\n[sweep]\np_steps = 7\ntol = 1e-7\n";

#[test]
fn free_run_writes_landau_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), FREE);
    let out = dir.path().join("out");
    let result = magband(&config, &out, &["--check", "landau,gaps", "--quiet"]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    assert!(result.stdout.is_empty());

    let csv = fs::read_to_string(out.join("bands.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "p,eps_0,eps_1,eps_2,eps_3,eps_4");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0][0], -6.0);
    for row in &rows {
        for (n, e) in row[1..].iter().enumerate() {
            assert!((e - (2 * n + 1) as f64).abs() < 1e-6, "{row:?}");
        }
    }
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("landau pass"));
    assert!(report.contains("gaps pass"));
    assert!(out.join("gaps.csv").exists() && out.join("bands.svg").exists());
}

#[test]
fn csv_digits_are_twelve_significant() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), FREE);
    let out = dir.path().join("out");
    assert!(magband(&config, &out, &["--quiet"]).status.success());
    let csv = fs::read_to_string(out.join("bands.csv")).unwrap();
    let field = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    let mantissa = field.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 12, "{field}");
}

#[test]
fn svg_can_be_disabled() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{FREE}[output]\nsvg = false\n"));
    let out = dir.path().join("out");
    assert!(magband(&config, &out, &["--quiet"]).status.success());
    assert!(!out.join("bands.svg").exists());
}

#[test]
fn invalid_config_exits_with_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[field]\nB = 1\n[potential]\nkind = \"lorentzian\"\nlambda = 1\na = -0.5\n",
    );
    let result = magband(&config, &dir.path().join("out"), &[]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("Lorentzian requires a > 0"), "{stderr}");

    let config = write_config(dir.path(), "[field]\nB = 1\ncolour = 3\n[potential]\nkind = \"zero\"\n");
    let result = magband(&config, &dir.path().join("out"), &[]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("line 3"));

    let config = write_config(dir.path(), FREE);
    let result = magband(&config, &dir.path().join("out"), &["--check", "bogus"]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn failed_check_gives_nonzero_exit_and_failure_list() {
    // a faint sine obstacle is not even, but its asymmetry stays below the
    // detection threshold, so `symmetry` fails
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[field]\nB = 1\n[potential]\nkind = \"sine\"\nlambda = 1e-9\na = 1\n\
         [sweep]\np_steps = 9\nbands = 1\ntol = 1e-6\nchecks = [\"symmetry\"]\n",
    );
    let result = magband(&config, &dir.path().join("out"), &["--quiet"]);
    assert_eq!(result.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.lines().all(|l| l.starts_with("FAIL symmetry ")), "{stderr}");
    assert!(stderr.contains("p="), "{stderr}");
    // the report is still written
    assert!(dir.path().join("out/report.txt").exists());
}

#[test]
fn check_examples() {
    let run = |text: &str, check: CheckName| {
        let mut cfg = cli::parse_config(text).unwrap();
        cfg.checks = vec![check];
        let outcome = cli::compute(&cfg).unwrap();
        outcome.checks[0].clone()
    };
    let small = "[sweep]\np_steps = 9\nbands = 3\n";

    let landau = run(&format!("[field]\nB = 1\n[potential]\nkind = \"zero\"\n{small}"), CheckName::Landau);
    assert_eq!(landau.status, CheckStatus::Pass);

    let gaps = run(
        &format!("[field]\nB = 1\n[potential]\nkind = \"sine\"\nlambda = 0.5\na = 1\n{small}"),
        CheckName::Gaps,
    );
    assert_eq!(gaps.status, CheckStatus::Pass, "{}", gaps.summary);

    let sym = run(
        &format!("[field]\nB = 1\n[potential]\nkind = \"sine\"\nlambda = 1\na = 1\n{small}"),
        CheckName::Symmetry,
    );
    assert_eq!(sym.status, CheckStatus::Pass);
    assert_eq!(sym.witnesses.len(), 1);
    let w = &sym.witnesses[0];
    assert!((w.values[0] - w.values[1]).abs() > 1e-5);

    let minimax = run(
        &format!("[field]\nB = 1\n[potential]\nkind = \"sine\"\nlambda = 1\na = 1\n{small}"),
        CheckName::Minimax,
    );
    assert_eq!(minimax.status, CheckStatus::NotApplicable);

    let fh = run(
        &format!(
            "[field]\nB = 1\n[potential]\nkind = \"tabulated\"\nx = [-1, 0, 1]\nv = [0, 1, 0]\n{small}"
        ),
        CheckName::Fh,
    );
    assert_eq!(fh.status, CheckStatus::NotApplicable);
}

#[test]
fn all_checks_pass_on_repulsive_lorentzian() {
    let text = "[field]\nB = 1\n[potential]\nkind = \"lorentzian\"\nlambda = 1\na = 0.5\n\
                [sweep]\np_min = -5\np_max = 5\np_steps = 11\nbands = 2\ntol = 1e-6\n";
    let mut cfg = cli::parse_config(text).unwrap();
    cfg.checks = CheckName::ALL.to_vec();
    let outcome = cli::compute(&cfg).unwrap();
    for c in &outcome.checks {
        assert_eq!(c.status, CheckStatus::Pass, "{} {}: {:?}", c.name, c.summary, c.witnesses);
    }
    assert!(outcome.success());
}

#[test]
fn attractive_and_non_even_checks() {
    let text = "[field]\nB = 2\n[potential]\nkind = \"flat_well\"\nlambda = -1\na = 0.5\nb = 1\n\
                [sweep]\np_steps = 9\nbands = 2\ntol = 1e-6\nlambdas = [0.5, 1.0, 1.5]\n";
    let mut cfg = cli::parse_config(text).unwrap();
    cfg.checks = vec![CheckName::Minimax, CheckName::Monotone, CheckName::Gaps, CheckName::Asymptotes];
    let outcome = cli::compute(&cfg).unwrap();
    for c in &outcome.checks {
        assert_eq!(c.status, CheckStatus::Pass, "{} {}: {:?}", c.name, c.summary, c.witnesses);
    }

    let text = "[field]\nB = 1\n[potential]\nkind = \"linear\"\nalpha = 0.5\n\
                [sweep]\np_min = -2\np_max = 3\np_steps = 6\nbands = 2\n";
    let mut cfg = cli::parse_config(text).unwrap();
    cfg.checks = vec![CheckName::Symmetry, CheckName::Fh, CheckName::Asymptotes, CheckName::DeltaLimit];
    let outcome = cli::compute(&cfg).unwrap();
    let status: Vec<_> = outcome.checks.iter().map(|c| c.status).collect();
    assert_eq!(
        status,
        vec![CheckStatus::Pass, CheckStatus::Pass, CheckStatus::NotApplicable, CheckStatus::NotApplicable]
    );
}
