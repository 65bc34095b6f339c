//! Dispersion curves `p ↦ ε_n(p)` and the quantities derived from them.
//!
//! Bands are tracked by eigenvalue order: fibers have simple spectra, so
//! branches never touch. Band widths are taken over the sampled momenta and
//! are therefore lower bounds of the true widths; the largest sampled
//! Feynman–Hellmann slope is kept alongside to bound what the grid may miss.
//! All integrals use the trapezoid rule on the fiber grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fiber::{self, FiberEigenpairs, FieldConfig, Grid};
use crate::oracles::quadrature_integral;
use crate::potentials::{PotentialSpec, SignClass};

pub const DEFAULT_TOL: f64 = 1e-6;

/// Momentum grid and solver settings of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub p_min: f64,
    pub p_max: f64,
    pub p_steps: usize,
    pub bands: usize,
    pub tol: f64,
}

impl SweepConfig {
    pub fn new(p_min: f64, p_max: f64, p_steps: usize, bands: usize, tol: f64) -> Result<Self> {
        let cfg = SweepConfig {
            p_min,
            p_max,
            p_steps,
            bands,
            tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_min < self.p_max) || !self.p_min.is_finite() || !self.p_max.is_finite() {
            return Err(Error::Validation(format!(
                "sweep requires p_min < p_max, got [{}, {}]",
                self.p_min, self.p_max
            )));
        }
        if self.p_steps < 2 {
            return Err(Error::Validation("sweep requires p_steps >= 2".into()));
        }
        if self.bands == 0 {
            return Err(Error::Validation("sweep requires bands >= 1".into()));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::Validation("sweep requires tol > 0".into()));
        }
        Ok(())
    }

    /// Uniform momenta from `p_min` to `p_max` inclusive.
    pub fn p_grid(&self) -> Vec<f64> {
        let last = self.p_steps - 1;
        let dp = (self.p_max - self.p_min) / last as f64;
        (0..self.p_steps)
            .map(|j| {
                if j == last {
                    self.p_max
                } else {
                    self.p_min + j as f64 * dp
                }
            })
            .collect()
    }
}

/// Gap between band `n` and band `n + 1` over the sampled momenta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub band: usize,
    /// `max_p ε_n(p)`
    pub lower: f64,
    /// `min_p ε_{n+1}(p)`
    pub upper: f64,
    pub open: bool,
}

/// Dispersion curves sampled on a momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    pub potential: PotentialSpec,
    pub field: FieldConfig,
    pub tol: f64,
    pub p_grid: Vec<f64>,
    /// `energies[n][j] = ε_n(p_j)`
    pub energies: Vec<Vec<f64>>,
    /// Feynman–Hellmann slopes `ε_n'(p_j)`, when the potential has a derivative.
    pub slopes: Option<Vec<Vec<f64>>>,
    pub est_errors: Vec<f64>,
    pub widths: Vec<f64>,
    pub gaps: Vec<Gap>,
}

impl BandStructure {
    pub fn band_count(&self) -> usize {
        self.energies.len()
    }

    /// `max - min` of band `n` over the grid.
    pub fn band_width(&self, n: usize) -> f64 {
        self.widths[n]
    }

    pub fn gaps(&self) -> &[Gap] {
        &self.gaps
    }

    pub fn band_range(&self, n: usize) -> (f64, f64) {
        let row = &self.energies[n];
        (
            row.iter().copied().fold(f64::INFINITY, f64::min),
            row.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    /// Largest sampled `|ε_n'(p)|`.
    pub fn max_slope(&self, n: usize) -> Option<f64> {
        self.slopes
            .as_ref()
            .map(|s| s[n].iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }

    /// Adjacent samples `(n, j)` whose difference exceeds what the largest
    /// sampled slope allows (`1.5 C Δp + 2 tol`). `None` without slopes.
    pub fn continuity_violations(&self) -> Option<Vec<(usize, usize)>> {
        let slopes = self.slopes.as_ref()?;
        let mut out = Vec::new();
        for (n, row) in self.energies.iter().enumerate() {
            let c = slopes[n].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for j in 0..row.len() - 1 {
                let dp = self.p_grid[j + 1] - self.p_grid[j];
                if (row[j + 1] - row[j]).abs() > 1.5 * c * dp + 2.0 * self.tol {
                    out.push((n, j));
                }
            }
        }
        Some(out)
    }
}

/// Solve every fiber of the momentum grid.
pub fn sweep(spec: &PotentialSpec, field: FieldConfig, cfg: &SweepConfig) -> Result<BandStructure> {
    cfg.validate()?;
    spec.validate()?;
    let p_grid = cfg.p_grid();
    let with_slopes = spec.has_derivative();
    let columns: Vec<(Vec<f64>, Option<Vec<f64>>, f64)> = p_grid
        .par_iter()
        .map(|&p| {
            let fe = fiber::solve_fiber(spec, field, p, cfg.bands, cfg.tol)
                .map_err(|e| e.at_momentum(p))?;
            let slopes = if with_slopes {
                Some(
                    (0..cfg.bands)
                        .map(|n| fh_from_eigenpairs(&fe, spec, field, n))
                        .collect::<Result<Vec<_>>>()?,
                )
            } else {
                None
            };
            Ok((fe.eigenvalues, slopes, fe.est_error))
        })
        .collect::<Result<_>>()?;

    let k = cfg.bands;
    let mut energies = vec![Vec::with_capacity(p_grid.len()); k];
    let mut slopes = with_slopes.then(|| vec![Vec::with_capacity(p_grid.len()); k]);
    let mut est_errors = Vec::with_capacity(p_grid.len());
    for (eigs, col_slopes, err) in columns {
        for n in 0..k {
            energies[n].push(eigs[n]);
        }
        if let (Some(all), Some(col)) = (slopes.as_mut(), col_slopes) {
            for n in 0..k {
                all[n].push(col[n]);
            }
        }
        est_errors.push(err);
    }
    Ok(build(spec.clone(), field, cfg.tol, p_grid, energies, slopes, est_errors))
}

fn build(
    potential: PotentialSpec,
    field: FieldConfig,
    tol: f64,
    p_grid: Vec<f64>,
    energies: Vec<Vec<f64>>,
    slopes: Option<Vec<Vec<f64>>>,
    est_errors: Vec<f64>,
) -> BandStructure {
    let mut bs = BandStructure {
        potential,
        field,
        tol,
        p_grid,
        energies,
        slopes,
        est_errors,
        widths: Vec::new(),
        gaps: Vec::new(),
    };
    bs.widths = (0..bs.band_count())
        .map(|n| {
            let (lo, hi) = bs.band_range(n);
            hi - lo
        })
        .collect();
    bs.gaps = (0..bs.band_count().saturating_sub(1))
        .map(|n| {
            let lower = bs.band_range(n).1;
            let upper = bs.band_range(n + 1).0;
            Gap {
                band: n,
                lower,
                upper,
                open: lower < upper,
            }
        })
        .collect();
    bs
}

/// `x_i - p/B` and `φ_n(x_i)²` on the grid of `fe`.
fn shifted_density(fe: &FiberEigenpairs, field: FieldConfig, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let phi = fe.eigenvectors.get(n).ok_or_else(|| {
        Error::InvalidArgument(format!("band {n} not computed ({} bands)", fe.band_count()))
    })?;
    let shift = fe.p / field.strength();
    let xs = fe.grid.points().into_iter().map(|x| x - shift).collect();
    let rho = phi.iter().map(|v| v * v).collect();
    Ok((xs, rho))
}

/// `-(1/B) ∫ v'(x - p/B) φ_n(x)² dx` for already solved eigenpairs.
pub fn fh_from_eigenpairs(
    fe: &FiberEigenpairs,
    spec: &PotentialSpec,
    field: FieldConfig,
    n: usize,
) -> Result<f64> {
    let (xs, rho) = shifted_density(fe, field, n)?;
    let mut integrand = Vec::with_capacity(xs.len());
    for (x, r) in xs.iter().zip(&rho) {
        let dv = spec.eval_derivative(*x).ok_or(Error::DerivativeUnavailable)?;
        integrand.push(dv * r);
    }
    Ok(-quadrature_integral(&integrand, fe.grid.spacing()) / field.strength())
}

/// Feynman–Hellmann slope `ε_n'(p)`.
///
/// Fails with [`Error::DerivativeUnavailable`] for profiles without an
/// analytic derivative; use [`fd_derivative_p`] then.
pub fn fh_derivative_p(
    spec: &PotentialSpec,
    field: FieldConfig,
    p: f64,
    n: usize,
    tol: f64,
) -> Result<f64> {
    if !spec.has_derivative() {
        return Err(Error::DerivativeUnavailable);
    }
    let fe = fiber::solve_fiber(spec, field, p, n + 1, tol)?;
    fh_from_eigenpairs(&fe, spec, field, n)
}

/// Default finite-difference step `1e-3 · max(1, |p|)`.
pub fn default_delta_p(p: f64) -> f64 {
    1e-3 * p.abs().max(1.0)
}

/// Central difference `(ε_n(p+δ) - ε_n(p-δ)) / 2δ`.
///
/// Both sides are solved on the converged grid of the fiber at `p`, so the
/// discretization error, smooth in `p`, cancels to second order.
pub fn fd_derivative_p(
    spec: &PotentialSpec,
    field: FieldConfig,
    p: f64,
    n: usize,
    tol: f64,
    delta_p: Option<f64>,
) -> Result<f64> {
    let delta = delta_p.unwrap_or_else(|| default_delta_p(p));
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    let center = fiber::solve_fiber(spec, field, p, n + 1, tol)?;
    let plus = fiber::solve_on_grid(spec, field, p + delta, n + 1, &center.grid)?;
    let minus = fiber::solve_on_grid(spec, field, p - delta, n + 1, &center.grid)?;
    Ok((plus.eigenvalues[n] - minus.eigenvalues[n]) / (2.0 * delta))
}

/// `dε_n/dλ (p, λv) = ∫ v(x - p/B) φ_n(x; λv)² dx`.
pub fn fh_derivative_lambda(
    spec: &PotentialSpec,
    field: FieldConfig,
    p: f64,
    n: usize,
    lambda: f64,
    tol: f64,
) -> Result<f64> {
    let fe = fiber::solve_fiber(&spec.scale(lambda), field, p, n + 1, tol)?;
    lambda_derivative_from_eigenpairs(&fe, spec, field, n)
}

/// `∫ v(x - p/B) φ_n(x)² dx` for already solved eigenpairs.
pub fn lambda_derivative_from_eigenpairs(
    fe: &FiberEigenpairs,
    spec: &PotentialSpec,
    field: FieldConfig,
    n: usize,
) -> Result<f64> {
    let (xs, rho) = shifted_density(fe, field, n)?;
    let integrand: Vec<f64> = xs.iter().zip(&rho).map(|(x, r)| spec.eval(*x) * r).collect();
    Ok(quadrature_integral(&integrand, fe.grid.spacing()))
}

/// `I_j(p) = ∫ v(x - p/B) φ_j(x)² dx` with the exact oscillator eigenfunction.
pub fn first_order_integral(spec: &PotentialSpec, field: FieldConfig, p: f64, j: usize) -> Result<f64> {
    spec.validate()?;
    let b = field.strength();
    let half_width = ((2 * j + 1) as f64 / b).sqrt() + 8.0 / b.sqrt();
    let mut h = 0.005 / b.sqrt();
    if let Some(scale) = spec.feature_scale() {
        h = h.min(scale / 50.0);
    }
    let cells = (half_width / h).ceil() as usize;
    let grid = Grid::symmetric(half_width, 2 * cells + 1)?;
    let shift = p / b;
    let integrand: Vec<f64> = grid
        .points()
        .into_iter()
        .map(|x| {
            let phi = fiber::hermite_function(j, field, x);
            spec.eval(x - shift) * phi * phi
        })
        .collect();
    Ok(quadrature_integral(&integrand, grid.spacing()))
}

/// First-order perturbation estimate `B(2j+1) + λ I_j(p)` of `ε_j(p; λv)`.
pub fn first_order_estimate(
    spec: &PotentialSpec,
    field: FieldConfig,
    p: f64,
    j: usize,
    lambda: f64,
) -> Result<f64> {
    let level = field.landau_level(j);
    if lambda == 0.0 {
        return Ok(level);
    }
    Ok(level + lambda * first_order_integral(spec, field, p, j)?)
}

/// Distance of `ε_n(±P)` from the shifted Landau levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoteResiduals {
    /// `|ε_n(-P) - B(2n+1) - v_+|`
    pub left: f64,
    /// `|ε_n(+P) - B(2n+1) - v_-|`
    pub right: f64,
}

/// Compare `ε_n(±P)` with their limits.
///
/// In the shifted fiber the potential is evaluated at `x - p/B`, so large
/// positive `p` probes `v_-` (the limit at `-∞`) and large negative `p`
/// probes `v_+`.
pub fn asymptote_check(
    spec: &PotentialSpec,
    field: FieldConfig,
    n: usize,
    big_p: f64,
    tol: f64,
) -> Result<AsymptoteResiduals> {
    let (v_minus, v_plus) = spec.asymptotic_limits().ok_or_else(|| {
        Error::DomainError("potential has no finite limits at infinity".into())
    })?;
    let level = field.landau_level(n);
    let at_plus = fiber::solve_fiber(spec, field, big_p.abs(), n + 1, tol)?;
    let at_minus = fiber::solve_fiber(spec, field, -big_p.abs(), n + 1, tol)?;
    Ok(AsymptoteResiduals {
        left: (at_minus.eigenvalues[n] - level - v_plus).abs(),
        right: (at_plus.eigenvalues[n] - level - v_minus).abs(),
    })
}

/// Radius beyond which the profile is negligible: `50a` for the slowly
/// decaying Lorentzian, the support edge for compact profiles, the table
/// range for tabulated ones. Infinite for unbounded profiles.
pub fn support_radius(spec: &PotentialSpec) -> f64 {
    match spec {
        PotentialSpec::Lorentzian { a, .. } => 50.0 * a,
        PotentialSpec::FlatWell { b, .. } => *b,
        PotentialSpec::SineObstacle { a, .. } => std::f64::consts::PI * a,
        PotentialSpec::Linear { .. } | PotentialSpec::Parabola { .. } => f64::INFINITY,
        PotentialSpec::Tabulated(table) => {
            let xs = table.xs();
            xs[0].abs().max(xs[xs.len() - 1].abs())
        }
        PotentialSpec::Scaled { lambda, inner } => {
            if *lambda == 0.0 {
                0.0
            } else {
                support_radius(inner)
            }
        }
        PotentialSpec::Sum(children) => children.iter().map(support_radius).fold(0.0, f64::max),
    }
}

/// Momentum far enough out that a compactly supported profile of radius
/// `support` no longer reaches the low fibers: `40 √B max(1, support·B)`.
pub fn asymptotic_momentum(field: FieldConfig, support: f64) -> f64 {
    let b = field.strength();
    40.0 * b.sqrt() * (support * b).max(1.0)
}

/// Band widths of `λ v` for several couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSweep {
    pub lambdas: Vec<f64>,
    /// `widths[i][n]`: width of band `n` at coupling `lambdas[i]`.
    pub widths: Vec<Vec<f64>>,
    /// For sign-definite profiles: whether every band width strictly grows
    /// with `|λ|` (separately for each sign of `λ`).
    pub monotone: Option<bool>,
}

pub fn lambda_sweep(
    spec: &PotentialSpec,
    field: FieldConfig,
    cfg: &SweepConfig,
    lambdas: &[f64],
) -> Result<LambdaSweep> {
    let widths = lambdas
        .iter()
        .map(|&l| Ok(sweep(&spec.scale(l), field, cfg)?.widths))
        .collect::<Result<Vec<_>>>()?;
    let monotone = spec
        .classify_sign()
        .is_definite()
        .then(|| widths_monotone_in_abs_lambda(lambdas, &widths));
    Ok(LambdaSweep {
        lambdas: lambdas.to_vec(),
        widths,
        monotone,
    })
}

fn widths_monotone_in_abs_lambda(lambdas: &[f64], widths: &[Vec<f64>]) -> bool {
    let bands = widths.first().map_or(0, Vec::len);
    [1.0, -1.0].iter().all(|&sign| {
        let mut side: Vec<(f64, &Vec<f64>)> = lambdas
            .iter()
            .zip(widths)
            .filter(|(l, _)| **l * sign >= 0.0)
            .map(|(l, w)| (l.abs(), w))
            .collect();
        side.sort_by(|a, b| a.0.total_cmp(&b.0));
        side.windows(2).all(|w| {
            w[0].0 == w[1].0 || (0..bands).all(|n| w[1].1[n] > w[0].1[n])
        })
    })
}

/// Ground fiber energy `ε_0(p)` of Lorentzian approximants of a point
/// interaction of strength `λ`, for a sequence of widths.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaLimitStudy {
    pub lambda: f64,
    pub p: f64,
    pub widths: Vec<f64>,
    pub energies: Vec<f64>,
    /// `|ε_0(a_i) - ε_0(a_{i+1})|`
    pub differences: Vec<f64>,
}

impl DeltaLimitStudy {
    /// Every successive difference is smaller than the one before.
    pub fn differences_decreasing(&self) -> bool {
        self.differences.len() < 2
            || self.differences[1..]
                .iter()
                .zip(&self.differences)
                .all(|(next, prev)| next < prev)
    }
}

pub fn delta_limit_study(
    lambda: f64,
    p: f64,
    widths: &[f64],
    field: FieldConfig,
    tol: f64,
) -> Result<DeltaLimitStudy> {
    let energies = widths
        .iter()
        .map(|&a| {
            let spec = PotentialSpec::lorentzian(lambda, a)?;
            Ok(fiber::solve_fiber(&spec, field, p, 1, tol)?.eigenvalues[0])
        })
        .collect::<Result<Vec<_>>>()?;
    let differences = energies.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
    Ok(DeltaLimitStudy {
        lambda,
        p,
        widths: widths.to_vec(),
        energies,
        differences,
    })
}

/// Band interval allowed by the sup-norm bound: two-sided
/// `[B(2n+1) - ‖v‖, B(2n+1) + ‖v‖]`, or one-sided for sign-definite `v`.
pub fn perturbation_interval(spec: &PotentialSpec, field: FieldConfig, n: usize) -> (f64, f64) {
    let level = field.landau_level(n);
    let norm = spec.sup_norm();
    match spec.classify_sign() {
        SignClass::NonNegative => (level, level + norm),
        SignClass::NonPositive => (level - norm, level),
        SignClass::Indefinite => (level - norm, level + norm),
    }
}

/// Whether the gap-persistence bound applies: `‖v‖ < B`, or `‖v‖ < 2B`
/// for sign-definite `v`.
pub fn gap_bound_applies(spec: &PotentialSpec, field: FieldConfig) -> bool {
    let norm = spec.sup_norm();
    let b = field.strength();
    norm < b || (spec.classify_sign().is_definite() && norm < 2.0 * b)
}
