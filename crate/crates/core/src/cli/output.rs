//! Text artifacts of a run: band CSV, gap CSV, report and SVG plot.
//!
//! Every writer formats numbers with fixed precision so that repeated runs
//! produce byte-identical files.

use std::fmt::Write as _;

use crate::dispersion::BandStructure;
use crate::potentials::{PotentialSpec, SignClass};

use super::checks::{CheckOutcome, CheckStatus};
use super::config::RunConfig;

/// Twelve significant digits.
fn num(v: f64) -> String {
    format!("{v:.11e}")
}

/// `p,eps_0,...,eps_{k-1}` with one row per momentum.
pub fn bands_csv(bs: &BandStructure) -> String {
    let mut out = String::from("p");
    for n in 0..bs.band_count() {
        write!(out, ",eps_{n}").unwrap();
    }
    out.push('\n');
    for (j, &p) in bs.p_grid.iter().enumerate() {
        out.push_str(&num(p));
        for row in &bs.energies {
            out.push(',');
            out.push_str(&num(row[j]));
        }
        out.push('\n');
    }
    out
}

/// `n,lower,upper,open`: gap between band `n` and `n + 1`.
pub fn gaps_csv(bs: &BandStructure) -> String {
    let mut out = String::from("n,lower,upper,open\n");
    for g in &bs.gaps {
        writeln!(out, "{},{},{},{}", g.band, num(g.lower), num(g.upper), g.open).unwrap();
    }
    out
}

fn describe_potential(spec: &PotentialSpec) -> String {
    match spec {
        PotentialSpec::Sum(c) if c.is_empty() => "zero".into(),
        PotentialSpec::Lorentzian { lambda, a } => {
            format!("lorentzian lambda={lambda} a={a}: lambda a / (pi (x^2 + a^2))")
        }
        PotentialSpec::FlatWell { lambda, a, b } => {
            format!("flat_well lambda={lambda} a={a} b={b}: lambda on |x| < a, cosine shoulder to 0 at |x| = b")
        }
        PotentialSpec::SineObstacle { lambda, a } => {
            format!("sine lambda={lambda} a={a}: lambda sin(x/a) on |x| < a pi")
        }
        PotentialSpec::Linear { alpha } => format!("linear alpha={alpha}: alpha x"),
        PotentialSpec::Parabola { beta } => format!("parabola beta={beta}: -beta^2 x^2"),
        PotentialSpec::Tabulated(t) => format!(
            "tabulated, {} points on [{}, {}], {:?} outside",
            t.xs().len(),
            t.xs()[0],
            t.xs()[t.xs().len() - 1],
            t.outside()
        ),
        other => format!("{other:?}"),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no "
    }
}

/// Hypotheses met by the potential, the results they unlock, band and gap
/// summaries and check outcomes.
pub fn report(cfg: &RunConfig, bs: &BandStructure, checks: &[CheckOutcome]) -> String {
    let spec = &cfg.potential;
    let b = cfg.field.strength();
    let s = &cfg.sweep;
    let h = spec.hypotheses();
    let sign = spec.classify_sign();
    let norm = spec.sup_norm();
    let limits = spec.asymptotic_limits();
    let mut out = String::new();

    writeln!(out, "potential: {}", describe_potential(spec)).unwrap();
    writeln!(out, "field: B = {b}").unwrap();
    writeln!(
        out,
        "sweep: p in [{}, {}], {} points, {} bands, tol {:e}",
        s.p_min, s.p_max, s.p_steps, s.bands, s.tol
    )
    .unwrap();
    let sign_name = match sign {
        SignClass::NonNegative => "nonnegative",
        SignClass::NonPositive => "nonpositive",
        SignClass::Indefinite => "indefinite",
    };
    writeln!(out, "sign: {sign_name}; sup norm: {norm}").unwrap();

    out.push_str("\nhypotheses\n");
    let limits_text = match limits {
        Some((lo, hi)) => format!("finite limits v(-inf) = {lo}, v(+inf) = {hi}"),
        None => "finite limits at +-inf".into(),
    };
    let rows = [
        ("v1", h.v1, "positive part locally L2, negative part in L2 + Linf".to_string()),
        ("v2", h.v2, limits_text),
        ("v3", h.v3, "v in L2".to_string()),
        ("v4", h.v4, "v in C1 with v' in L2".to_string()),
        ("v5", h.v5, "a nonzero C1 bump fits under v+ or v-".to_string()),
    ];
    for (name, holds, text) in &rows {
        writeln!(out, "  {name} {} {text}", yes(*holds)).unwrap();
    }

    out.push_str("\napplicable results\n");
    let mut results = Vec::new();
    if h.v1 {
        results.push("every fiber has a purely discrete, simple spectrum; bands are real-analytic in p".to_string());
    }
    if let (true, Some((lo, hi))) = (h.v1 && h.v2, limits) {
        results.push(format!(
            "eps_n(p) -> B(2n+1) + {lo} as p -> +inf and B(2n+1) + {hi} as p -> -inf"
        ));
        if lo != hi {
            results.push("unequal limits at +-inf: no band is constant".into());
        }
    }
    if h.v3 {
        results.push("weak coupling: the lowest bands of lambda v are non-constant for small lambda".into());
    }
    if h.v3 && h.v4 {
        results.push(
            "slope formula eps_n'(p) = -(1/B) int v'(x - p/B) phi_n^2 dx: no band is constant".into(),
        );
    }
    if h.v3 && h.v5 && sign.is_definite() {
        results.push("sign-definite with a bump below it: no band is constant".into());
    }
    match sign {
        SignClass::NonNegative => results.push("eps_n(p) >= B(2n+1) and eps_n grows with lambda".into()),
        SignClass::NonPositive => results.push("eps_n(p) <= B(2n+1) and eps_n falls with lambda".into()),
        SignClass::Indefinite => {}
    }
    if sign.is_definite() {
        results.push("band widths of lambda v strictly increase with |lambda|".into());
    }
    if norm < b {
        results.push(format!("sup norm {norm} < B: |eps_n - B(2n+1)| <= sup norm, all gaps open"));
    } else if sign.is_definite() && norm < 2.0 * b {
        results.push(format!("sign-definite with sup norm {norm} < 2B: all gaps open"));
    }
    if results.is_empty() {
        out.push_str("  none\n");
    }
    for r in results {
        writeln!(out, "  - {r}").unwrap();
    }

    out.push_str("\nbands\n  n min max width max_abs_slope\n");
    for n in 0..bs.band_count() {
        let (lo, hi) = bs.band_range(n);
        let slope = bs.max_slope(n).map_or_else(|| "-".to_string(), num);
        writeln!(out, "  {n} {} {} {} {slope}", num(lo), num(hi), num(bs.widths[n])).unwrap();
    }
    let max_err = bs.est_errors.iter().fold(0.0f64, |m, &e| m.max(e));
    writeln!(out, "  largest fiber error estimate: {max_err:.3e}").unwrap();

    out.push_str("\ngaps\n  n lower upper open\n");
    for g in &bs.gaps {
        writeln!(out, "  {} {} {} {}", g.band, num(g.lower), num(g.upper), g.open).unwrap();
    }

    out.push_str("\nchecks\n");
    if checks.is_empty() {
        out.push_str("  none requested\n");
    }
    for c in checks {
        writeln!(out, "  {} {}: {}", c.name, c.status, c.summary).unwrap();
        for w in &c.witnesses {
            writeln!(out, "    witness {w}").unwrap();
        }
    }
    out
}

/// One line per failed check: `FAIL <check> <witness>` (or the summary
/// when there is no witness).
pub fn failure_list(checks: &[CheckOutcome]) -> String {
    let mut out = String::new();
    for c in checks.iter().filter(|c| c.status == CheckStatus::Fail) {
        if c.witnesses.is_empty() {
            writeln!(out, "FAIL {} {}", c.name, c.summary).unwrap();
        }
        for w in &c.witnesses {
            writeln!(out, "FAIL {} {w}", c.name).unwrap();
        }
    }
    out
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Dispersion curves as one polyline per band; dashed lines mark the
/// Landau levels inside the plotted range.
pub fn bands_svg(bs: &BandStructure) -> String {
    let p_lo = bs.p_grid[0];
    let p_hi = bs.p_grid[bs.p_grid.len() - 1];
    let (mut e_lo, mut e_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in 0..bs.band_count() {
        let (lo, hi) = bs.band_range(n);
        e_lo = e_lo.min(lo);
        e_hi = e_hi.max(hi);
    }
    let pad = 0.05 * (e_hi - e_lo).max(1e-3 * bs.field.strength());
    e_lo -= pad;
    e_hi += pad;
    let sx = |p: f64| LEFT + (p - p_lo) / (p_hi - p_lo) * (WIDTH - LEFT - RIGHT);
    let sy = |e: f64| HEIGHT - BOTTOM - (e - e_lo) / (e_hi - e_lo) * (HEIGHT - TOP - BOTTOM);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    writeln!(
        out,
        r#"<path d="M{x0:.2} {y1:.2} L{x0:.2} {y0:.2} L{x1:.2} {y0:.2}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    for i in 0..=4 {
        let p = p_lo + (p_hi - p_lo) * i as f64 / 4.0;
        let x = sx(p);
        writeln!(out, r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0).unwrap();
        writeln!(out, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{p:.3}</text>"#, y0 + 20.0).unwrap();
        let e = e_lo + (e_hi - e_lo) * i as f64 / 4.0;
        let y = sy(e);
        writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0).unwrap();
        writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{e:.3}</text>"#, x0 - 8.0, y + 4.0).unwrap();
    }
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">p</text>"#,
        0.5 * (x0 + x1),
        HEIGHT - 15.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="20" y="{:.2}" text-anchor="middle" font-size="14">ε</text>"#,
        0.5 * (y0 + y1)
    )
    .unwrap();
    let mut n = 0;
    loop {
        let level = bs.field.landau_level(n);
        if level > e_hi {
            break;
        }
        if level >= e_lo {
            let y = sy(level);
            writeln!(
                out,
                r##"<line x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="#999999" stroke-dasharray="4 4"/>"##
            )
            .unwrap();
        }
        n += 1;
    }
    for (n, row) in bs.energies.iter().enumerate() {
        let points: Vec<String> = bs
            .p_grid
            .iter()
            .zip(row)
            .map(|(&p, &e)| format!("{:.2},{:.2}", sx(p), sy(e)))
            .collect();
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"><title>n = {n}</title></polyline>"#,
            COLORS[n % COLORS.len()],
            points.join(" ")
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{sweep, SweepConfig};
    use crate::fiber::FieldConfig;

    fn free() -> BandStructure {
        let cfg = SweepConfig::new(-1.0, 1.0, 3, 2, 1e-6).unwrap();
        sweep(&PotentialSpec::zero(), FieldConfig::new(1.0).unwrap(), &cfg).unwrap()
    }

    #[test]
    fn csv_layout() {
        let csv = bands_csv(&free());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "p,eps_0,eps_1");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("-1.00000000000e0,"));
        let fields: Vec<f64> = lines[2].split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields[0], 0.0);
        assert!((fields[1] - 1.0).abs() < 1e-6 && (fields[2] - 3.0).abs() < 1e-6);

        let gaps = gaps_csv(&free());
        assert!(gaps.starts_with("n,lower,upper,open\n0,"));
        assert!(gaps.trim_end().ends_with(",true"));
    }

    #[test]
    fn svg_has_one_polyline_per_band_and_axis_labels() {
        let svg = bands_svg(&free());
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">p</text>") && svg.contains(">ε</text>"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
