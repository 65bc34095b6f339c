//! Acceptance criteria, one line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so every verdict is printed
//! by `cargo test`; exits nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use magband::dispersion::{self, SweepConfig};
use magband::eigensolver::{lowest_eigenvalues, TridiagonalMatrix};
use magband::fiber::{self, FieldConfig, Grid};
use magband::oracles::{brute_dense_eigs, SolvableKind, SolvableModel};
use magband::{Error, Outside, PotentialSpec};

type Verdict = Result<String, String>;

fn unit_field() -> FieldConfig {
    FieldConfig::new(1.0).unwrap()
}

fn ensure(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn landau_baseline() -> Verdict {
    let zero = PotentialSpec::zero();
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for p in [0.0, 3.7, -5.0] {
        let start = Instant::now();
        let fe = fiber::solve_fiber(&zero, unit_field(), p, 6, 1e-6).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        for (n, e) in fe.eigenvalues.iter().enumerate() {
            worst = worst.max((e - (2 * n + 1) as f64).abs());
        }
    }
    ensure(
        worst <= 1e-6 && slowest < Duration::from_secs(1),
        format!("max |eps_n - (2n+1)| = {worst:.2e} for n <= 5, slowest fiber {slowest:.2?}"),
    )
}

fn oracle_grid(spec: &PotentialSpec, kind: SolvableKind) -> Verdict {
    let model = SolvableModel::new(kind, unit_field()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for p in -5..=5 {
        let p = p as f64;
        let fe = fiber::solve_fiber(spec, unit_field(), p, 4, 1e-6).map_err(|e| e.to_string())?;
        for n in 0..4 {
            let exact = model.exact_eigenvalue(n, p).unwrap();
            worst = worst.max((fe.eigenvalues[n] - exact).abs());
        }
    }
    ensure(worst <= 1e-5, format!("max deviation from closed form {worst:.2e} (n <= 3, p in -5..5)"))
}

fn linear_oracle() -> Verdict {
    oracle_grid(&PotentialSpec::linear(1.0).unwrap(), SolvableKind::Linear { alpha: 1.0 })
}

fn parabola_oracle() -> Verdict {
    let detail = oracle_grid(&PotentialSpec::parabola(0.5).unwrap(), SolvableKind::Parabola { beta: 0.5 })?;
    let strong = fiber::solve_fiber(&PotentialSpec::parabola(1.2).unwrap(), unit_field(), 0.0, 1, 1e-6);
    ensure(
        matches!(strong, Err(Error::UnboundedBelow(_))),
        format!("{detail}; beta = 1.2 gives {:?}", strong.map(|_| ()).map_err(|e| e.to_string())),
    )
}

fn feynman_hellmann() -> Verdict {
    let cases = [
        ("lorentzian", PotentialSpec::lorentzian(1.0, 1.0).unwrap()),
        ("sine", PotentialSpec::sine_obstacle(1.0, 1.0).unwrap()),
    ];
    let mut worst = 0.0f64;
    let mut details = Vec::new();
    for (name, spec) in &cases {
        let mut case_worst = 0.0f64;
        for p in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            for n in 0..3 {
                let fh = dispersion::fh_derivative_p(spec, unit_field(), p, n, 1e-6).map_err(|e| e.to_string())?;
                let fd = dispersion::fd_derivative_p(spec, unit_field(), p, n, 1e-6, None)
                    .map_err(|e| e.to_string())?;
                case_worst = case_worst.max((fh - fd).abs() / (1.0 + fd.abs()));
            }
        }
        worst = worst.max(case_worst);
        details.push(format!("{name} {case_worst:.2e}"));
    }
    ensure(
        worst <= 1e-4,
        format!("max |FH - FD| / (1 + |FD|): {} (allowed 1e-4)", details.join(", ")),
    )
}

/// Richardson-extrapolated eigenvalue `j` of `λ v` from two fixed grids.
fn extrapolated_level(spec: &PotentialSpec, p: f64, j: usize, lambda: f64, fine: &Grid, coarse: &Grid) -> Result<f64, String> {
    let scaled = spec.scale(lambda);
    let ef = fiber::solve_on_grid(&scaled, unit_field(), p, j + 1, fine).map_err(|e| e.to_string())?;
    let ec = fiber::solve_on_grid(&scaled, unit_field(), p, j + 1, coarse).map_err(|e| e.to_string())?;
    Ok((4.0 * ef.eigenvalues[j] - ec.eigenvalues[j]) / 3.0)
}

fn first_order_expansion() -> Verdict {
    let spec = PotentialSpec::lorentzian(1.0, 1.0).unwrap();
    let half_width = 12.0;
    let fine = Grid::symmetric(half_width, 4801).unwrap();
    let coarse = Grid::symmetric(half_width, 2401).unwrap();
    let mut ratios = Vec::new();
    for p in [0.0, 1.0] {
        for j in 0..3 {
            let residual = |lambda: f64| -> Result<f64, String> {
                let e = extrapolated_level(&spec, p, j, lambda, &fine, &coarse)?;
                let est = dispersion::first_order_estimate(&spec, unit_field(), p, j, lambda)
                    .map_err(|e| e.to_string())?;
                Ok(e - est)
            };
            let r2 = residual(0.02)?;
            let r1 = residual(0.01)?;
            ratios.push(r2 / r1);
        }
    }
    let ok = ratios.iter().all(|r| (3.0..=5.0).contains(r));
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    ensure(ok, format!("residual ratios r(0.02)/r(0.01) = [{}] (allowed 4 +- 25%)", shown.join(", ")))
}

fn minimax_ordering() -> Verdict {
    let spec = PotentialSpec::lorentzian(1.0, 1.0).unwrap();
    let tol = 1e-6;
    let cfg = SweepConfig::new(-6.0, 6.0, 25, 4, tol).unwrap();
    let mut sweeps = Vec::new();
    for lambda in [0.5, 1.0, 2.0] {
        sweeps.push(dispersion::sweep(&spec.scale(lambda), unit_field(), &cfg).map_err(|e| e.to_string())?);
    }
    let mut worst = f64::NEG_INFINITY;
    for pair in sweeps.windows(2) {
        for (lo, hi) in pair[0].energies.iter().zip(&pair[1].energies) {
            for (a, b) in lo.iter().zip(hi) {
                worst = worst.max(a - b);
            }
        }
    }
    ensure(
        worst <= 2.0 * tol,
        format!("max eps_n(p, lambda v) - eps_n(p, lambda' v) = {worst:.2e} over lambda in {{0.5, 1, 2}} (slack {:.0e})", 2.0 * tol),
    )
}

fn gap_bounds() -> Verdict {
    let tol = 1e-6;
    let cfg = SweepConfig::new(-6.0, 6.0, 25, 4, tol).unwrap();
    let field = unit_field();
    let cases = [
        ("sine, sup 0.5", PotentialSpec::sine_obstacle(0.5, 1.0).unwrap(), -0.5, 0.5),
        (
            "repulsive lorentzian, sup 1.5",
            PotentialSpec::lorentzian(1.5 * std::f64::consts::PI, 1.0).unwrap(),
            0.0,
            1.5,
        ),
        ("attractive flat well, sup 1.5", PotentialSpec::flat_well(-1.5, 1.0, 2.0).unwrap(), -1.5, 0.0),
    ];
    let mut details = Vec::new();
    let mut ok = true;
    for (name, spec, below, above) in &cases {
        let bs = dispersion::sweep(spec, field, &cfg).map_err(|e| e.to_string())?;
        let mut excess = f64::NEG_INFINITY;
        for n in 0..bs.band_count() {
            let level = field.landau_level(n);
            let (lo, hi) = bs.band_range(n);
            excess = excess.max((level + below) - lo).max(hi - (level + above));
        }
        let open = bs.gaps.iter().all(|g| g.open);
        ok &= excess <= 2.0 * tol && open;
        details.push(format!("{name}: max excess {excess:.2e}, gaps open {open}"));
    }
    ensure(ok, details.join("; "))
}

fn width_monotonicity() -> Verdict {
    let spec = PotentialSpec::lorentzian(1.0, 1.0).unwrap();
    let cfg = SweepConfig::new(-6.0, 6.0, 49, 1, 1e-6).unwrap();
    let ls = dispersion::lambda_sweep(&spec, unit_field(), &cfg, &[0.5, 1.0, 2.0]).map_err(|e| e.to_string())?;
    let w: Vec<f64> = ls.widths.iter().map(|w| w[0]).collect();
    ensure(
        w[0] < w[1] && w[1] < w[2] && ls.monotone == Some(true),
        format!("band-0 widths {:.6} < {:.6} < {:.6}", w[0], w[1], w[2]),
    )
}

fn asymptotics() -> Verdict {
    let step = PotentialSpec::tabulated(vec![-1.0, 1.0], vec![0.0, 0.5], Outside::Clamp).unwrap();
    let r = dispersion::asymptote_check(&step, unit_field(), 0, 40.0, 1e-6).map_err(|e| e.to_string())?;
    let e_plus = fiber::solve_fiber(&step, unit_field(), 40.0, 1, 1e-6).map_err(|e| e.to_string())?.eigenvalues[0];
    let e_minus = fiber::solve_fiber(&step, unit_field(), -40.0, 1, 1e-6).map_err(|e| e.to_string())?.eigenvalues[0];
    ensure(
        r.right < 1e-2 && r.left < 1e-2 && (e_plus - 1.0).abs() < 1e-2 && (e_minus - 1.5).abs() < 1e-2,
        format!("eps_0(+40) = {e_plus:.6} (-> 1), eps_0(-40) = {e_minus:.6} (-> 1.5)"),
    )
}

fn non_constancy() -> Verdict {
    let tol = 1e-6;
    let cfg = SweepConfig::new(-6.0, 6.0, 49, 1, tol).unwrap();
    let cases = [
        ("lorentzian", PotentialSpec::lorentzian(1.0, 1.0).unwrap()),
        ("flat well", PotentialSpec::flat_well(1.0, 1.0, 2.0).unwrap()),
        ("sine", PotentialSpec::sine_obstacle(1.0, 1.0).unwrap()),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    for (name, spec) in &cases {
        let bs = dispersion::sweep(spec, unit_field(), &cfg).map_err(|e| e.to_string())?;
        let width = bs.band_width(0);
        ok &= width > 10.0 * tol;
        details.push(format!("{name} width {width:.4}"));
        if *name == "sine" {
            let row = &bs.energies[0];
            let asym = (0..row.len())
                .map(|j| (row[j] - row[row.len() - 1 - j]).abs())
                .fold(0.0, f64::max);
            ok &= asym > 10.0 * tol;
            details.push(format!("sine max |eps_0(p) - eps_0(-p)| {asym:.4}"));
        }
    }
    ensure(ok, details.join(", "))
}

fn delta_trend() -> Verdict {
    let widths = [0.4, 0.2, 0.1, 0.05];
    let mut ok = true;
    let mut details = Vec::new();
    for lambda in [1.0, -1.0] {
        let s = dispersion::delta_limit_study(lambda, 0.0, &widths, unit_field(), 1e-7).map_err(|e| e.to_string())?;
        ok &= s.differences_decreasing();
        if lambda < 0.0 {
            ok &= s.energies.iter().all(|&e| e < 1.0);
        }
        let diffs: Vec<String> = s.differences.iter().map(|d| format!("{d:.3e}")).collect();
        details.push(format!("lambda {lambda}: differences [{}]", diffs.join(", ")));
    }
    ensure(ok, details.join("; "))
}

fn discretization_order() -> Verdict {
    let half_width = 8.0;
    let mut log_h = Vec::new();
    let mut log_err = Vec::new();
    for h in [0.08f64, 0.04, 0.02, 0.01] {
        let n_points = (2.0 * half_width / h).round() as usize + 1;
        let grid = Grid::symmetric(half_width, n_points).unwrap();
        let fe = fiber::solve_on_grid(&PotentialSpec::zero(), unit_field(), 0.0, 1, &grid).map_err(|e| e.to_string())?;
        log_h.push(h.ln());
        log_err.push((fe.eigenvalues[0] - 1.0).abs().ln());
    }
    let n = log_h.len() as f64;
    let mh = log_h.iter().sum::<f64>() / n;
    let me = log_err.iter().sum::<f64>() / n;
    let cov: f64 = log_h.iter().zip(&log_err).map(|(h, e)| (h - mh) * (e - me)).sum();
    let var: f64 = log_h.iter().map(|h| (h - mh).powi(2)).sum();
    let slope = cov / var;
    ensure((1.7..=2.3).contains(&slope), format!("log-log slope {slope:.4}"))
}

fn solver_cross_check() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let tol = 1e-10;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=50);
        let diag: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let off: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-2.0..2.0)).collect();
        let m = TridiagonalMatrix::new(diag, off).unwrap();
        let dense = brute_dense_eigs(&m).map_err(|e| e.to_string())?;
        let sturm = lowest_eigenvalues(&m, n, tol).map_err(|e| e.to_string())?;
        for (a, b) in dense.iter().zip(&sturm) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(
        worst <= 10.0 * tol,
        format!("100 random matrices, N <= 50: max deviation {worst:.2e} (allowed {:.0e})", 10.0 * tol),
    )
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn run_cli(config: &Path, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_magband"))
        .arg("--config")
        .arg(config)
        .arg("--out-dir")
        .arg(out)
        .arg("--quiet")
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("{} exited with {status}", config.display()))
    }
}

/// Shape of band 0 (columns: p, eps_0, ...) for each figure scenario.
fn figure_shape(name: &str, rows: &[Vec<f64>]) -> Result<(), String> {
    let eps0: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let mid = rows.len() / 2;
    let max_at = (0..eps0.len()).max_by(|&a, &b| eps0[a].total_cmp(&eps0[b])).unwrap();
    let min_at = (0..eps0.len()).min_by(|&a, &b| eps0[a].total_cmp(&eps0[b])).unwrap();
    let ok = match name {
        "repulsive_lorentzian" => {
            rows.iter().all(|r| r[1..].iter().enumerate().all(|(n, e)| *e >= (2 * n + 1) as f64 - 1e-5))
                && rows[max_at][0].abs() < 0.5
        }
        "attractive_lorentzian" => {
            rows.iter().all(|r| r[1..].iter().enumerate().all(|(n, e)| *e <= (2 * n + 1) as f64 + 1e-5))
                && rows[min_at][0].abs() < 0.5
        }
        "wide_flat_well" => (eps0[mid] - 0.0).abs() < 1e-3 && (eps0[0] - 1.0).abs() < 1e-2,
        "sine_obstacle" => (0..eps0.len()).any(|j| (eps0[j] - eps0[eps0.len() - 1 - j]).abs() > 1e-2),
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        Err(format!("{name}: unexpected band-0 shape"))
    }
}

fn end_to_end() -> Verdict {
    let names = ["repulsive_lorentzian", "attractive_lorentzian", "wide_flat_well", "sine_obstacle"];
    let first = tempfile::tempdir().map_err(|e| e.to_string())?;
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    for name in names {
        let config = configs_dir().join(format!("{name}.toml"));
        let (a, b) = (first.path().join(name), second.path().join(name));
        run_cli(&config, &a)?;
        run_cli(&config, &b)?;
        for file in ["bands.csv", "gaps.csv", "report.txt", "bands.svg"] {
            let x = std::fs::read(a.join(file)).map_err(|e| format!("{name}/{file}: {e}"))?;
            let y = std::fs::read(b.join(file)).map_err(|e| format!("{name}/{file}: {e}"))?;
            if x != y {
                return Err(format!("{name}/{file} differs between runs"));
            }
        }
        figure_shape(name, &read_csv(&a.join("bands.csv")))?;
    }
    Ok("four figure scenarios: byte-identical CSV/SVG/report over two runs, expected band shapes".into())
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 14] = [
        ("landau baseline", landau_baseline),
        ("linear-potential oracle", linear_oracle),
        ("parabola oracle", parabola_oracle),
        ("feynman-hellmann vs finite differences", feynman_hellmann),
        ("first-order expansion", first_order_expansion),
        ("min-max ordering", minimax_ordering),
        ("gap bounds", gap_bounds),
        ("width monotonicity", width_monotonicity),
        ("asymptotics", asymptotics),
        ("non-constancy witnesses", non_constancy),
        ("delta-approximant trend", delta_trend),
        ("discretization order", discretization_order),
        ("solver cross-check", solver_cross_check),
        ("end-to-end cli", end_to_end),
    ];
    let suite = Instant::now();
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = check();
        let elapsed = start.elapsed();
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL {name}: {detail} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    let total = suite.elapsed();
    let fast = total < Duration::from_secs(120);
    println!(
        "suite time {total:.2?}: {}",
        if fast { "PASS (< 2 min)" } else { "FAIL (>= 2 min)" }
    );
    if !fast {
        failures += 1;
    }
    println!("{} of 14 criteria passed", 14 - failures.min(14));
    if failures > 0 {
        std::process::exit(1);
    }
}
