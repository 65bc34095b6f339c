//! The shifted fiber operator `-∂²ₓ + B²x² + v(x - p/B)` and its lowest
//! eigenpairs.
//!
//! The oscillator well stays at the origin for every momentum `p`; only the
//! potential window moves. The operator is discretized by second-order
//! central differences with Dirichlet ends on a symmetric grid `[-L, L]`,
//! and the grid is refined until the requested eigenvalues settle.

use crate::eigensolver::{self, TridiagonalMatrix};
use crate::error::{Error, Result};
use crate::potentials::PotentialSpec;

/// Largest grid the adaptive loop may create.
pub const MAX_GRID_POINTS: usize = (1 << 21) + 1;
const MAX_WIDTH_DOUBLINGS: usize = 8;

/// Homogeneous magnetic field of strength `B > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig {
    b: f64,
}

impl FieldConfig {
    pub fn new(b: f64) -> Result<Self> {
        if b > 0.0 && b.is_finite() {
            Ok(FieldConfig { b })
        } else {
            Err(Error::InvalidArgument(format!(
                "field strength must be positive and finite, got {b}"
            )))
        }
    }

    pub fn strength(&self) -> f64 {
        self.b
    }

    /// Landau level `B(2n+1)`.
    pub fn landau_level(&self, n: usize) -> f64 {
        self.b * (2 * n + 1) as f64
    }
}

/// Uniform grid on `[x_min, x_max]`; the two end points carry the Dirichlet
/// condition and only interior points are unknowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid needs x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 16 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 16 points, got {n_points}"
            )));
        }
        Ok(Grid {
            x_min,
            x_max,
            n_points,
        })
    }

    /// Symmetric grid on `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Grid::new(-half_width, half_width, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        // from the nearer end, so mirrored nodes of a symmetric grid are exact negatives
        let h = self.spacing();
        if 2 * i < self.n_points {
            self.x_min + i as f64 * h
        } else {
            self.x_max - (self.n_points - 1 - i) as f64 * h
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    fn halved_spacing(&self) -> Self {
        Grid {
            n_points: 2 * (self.n_points - 1) + 1,
            ..*self
        }
    }

    fn doubled_width(&self) -> Self {
        let mid = 0.5 * (self.x_min + self.x_max);
        let half = 0.5 * (self.x_max - self.x_min);
        Grid {
            x_min: mid - 2.0 * half,
            x_max: mid + 2.0 * half,
            n_points: 2 * (self.n_points - 1) + 1,
        }
    }
}

/// Converged lowest eigenpairs of one fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberEigenpairs {
    pub p: f64,
    /// Strictly ascending.
    pub eigenvalues: Vec<f64>,
    /// Grid functions on all grid points (zero at both ends), normalized so
    /// that `Σ φ² h = 1`.
    pub eigenvectors: Vec<Vec<f64>>,
    pub grid: Grid,
    /// Largest eigenvalue change over the last refinement.
    pub est_error: f64,
    pub refinement_steps: usize,
    /// Eigenvalues on the grid with twice the spacing, when a refinement happened.
    pub coarse_eigenvalues: Option<Vec<f64>>,
}

impl FiberEigenpairs {
    pub fn band_count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Richardson extrapolation `(4 ε_h - ε_2h)/3` of the eigenvalues from
    /// the last two spacings. Never applied to `eigenvalues` itself.
    pub fn extrapolated_eigenvalues(&self) -> Option<Vec<f64>> {
        self.coarse_eigenvalues.as_ref().map(|coarse| {
            self.eigenvalues
                .iter()
                .zip(coarse)
                .map(|(f, c)| (4.0 * f - c) / 3.0)
                .collect()
        })
    }

    /// Sign changes of eigenvector `n`, ignoring entries below `1e-8` of its
    /// maximum (numerical noise in the decaying tails).
    pub fn sign_changes(&self, n: usize) -> usize {
        let v = &self.eigenvectors[n];
        let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut last = 0.0f64;
        let mut changes = 0;
        for &x in v {
            if x.abs() <= 1e-8 * max {
                continue;
            }
            if last != 0.0 && (x > 0.0) != (last > 0.0) {
                changes += 1;
            }
            last = x;
        }
        changes
    }
}

/// Discrete `h̃_v(p)` on the interior nodes of `grid`.
pub fn assemble(
    spec: &PotentialSpec,
    field: FieldConfig,
    p: f64,
    grid: &Grid,
) -> Result<TridiagonalMatrix> {
    let b = field.strength();
    let h = grid.spacing();
    let kinetic = 1.0 / (h * h);
    let shift = p / b;
    let interior = grid.n_points() - 2;
    let diag = (1..=interior)
        .map(|i| {
            let x = grid.x(i);
            2.0 * kinetic + b * b * x * x + spec.eval(x - shift)
        })
        .collect();
    TridiagonalMatrix::new(diag, vec![-kinetic; interior - 1])
}

/// Lowest `k` eigenpairs of the fiber at momentum `p`, to within `tol`.
///
/// The half-width is doubled until no eigenvalue moves by `tol/4` (keeping
/// the last width that passed), then the spacing is halved until no
/// eigenvalue moves by `tol/4`.
pub fn solve_fiber(
    spec: &PotentialSpec,
    field: FieldConfig,
    p: f64,
    k: usize,
    tol: f64,
) -> Result<FiberEigenpairs> {
    check_args(spec, p, k, tol)?;
    let mut grid = initial_grid(spec, field, p, k)?;
    let bisect_tol = tol * 1e-4;
    let mut ev = eigenvalues_on_grid(spec, field, p, k, &grid, bisect_tol, None)?;
    let mut steps = 0;

    for doubling in 0.. {
        if doubling == MAX_WIDTH_DOUBLINGS {
            return Err(Error::NonConvergence(format!(
                "eigenvalues still depend on the domain width at L = {}",
                grid.x_max()
            )));
        }
        let wide = grid.doubled_width();
        ensure_size(&wide)?;
        let hints = hints_from(&ev, tol);
        let ev_wide = eigenvalues_on_grid(spec, field, p, k, &wide, bisect_tol, Some(&hints))?;
        steps += 1;
        let change = max_change(&ev, &ev_wide);
        if change < tol / 4.0 {
            break;
        }
        grid = wide;
        ev = ev_wide;
    }

    let mut last_change = f64::INFINITY;
    let coarse = loop {
        let fine = grid.halved_spacing();
        ensure_size(&fine)?;
        let radius = if last_change.is_finite() {
            last_change
        } else {
            tol
        };
        let hints = hints_from(&ev, radius);
        let ev_fine = eigenvalues_on_grid(spec, field, p, k, &fine, bisect_tol, Some(&hints))?;
        steps += 1;
        last_change = max_change(&ev, &ev_fine);
        let previous = std::mem::replace(&mut ev, ev_fine);
        grid = fine;
        if last_change < tol / 4.0 {
            break previous;
        }
    };

    let mut fe = eigenpairs_from(spec, field, p, &grid, ev)?;
    fe.est_error = last_change;
    fe.refinement_steps = steps;
    fe.coarse_eigenvalues = Some(coarse);
    Ok(fe)
}

/// Lowest `k` eigenpairs on a fixed grid, without refinement.
pub fn solve_on_grid(
    spec: &PotentialSpec,
    field: FieldConfig,
    p: f64,
    k: usize,
    grid: &Grid,
) -> Result<FiberEigenpairs> {
    check_args(spec, p, k, 1.0)?;
    check_bounded_below(spec, field)?;
    let ev = eigenvalues_on_grid(spec, field, p, k, grid, 0.0, None)?;
    eigenpairs_from(spec, field, p, grid, ev)
}

fn check_args(spec: &PotentialSpec, p: f64, k: usize, tol: f64) -> Result<()> {
    spec.validate()?;
    if k == 0 {
        return Err(Error::InvalidArgument("band count must be at least 1".into()));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !p.is_finite() {
        return Err(Error::InvalidArgument(format!("momentum must be finite, got {p}")));
    }
    Ok(())
}

/// Effective oscillator frequency `ω = √(B² + q)` after absorbing the
/// quadratic part `q x²` of the potential.
fn check_bounded_below(spec: &PotentialSpec, field: FieldConfig) -> Result<f64> {
    let b = field.strength();
    let (q, _) = spec.polynomial_part();
    let omega2 = b * b + q;
    if omega2 <= 0.0 {
        return Err(Error::UnboundedBelow(format!(
            "inverted parabola with beta^2 = {} >= B^2 = {}: the fiber has no eigenvalues",
            -q,
            b * b
        )));
    }
    Ok(omega2.sqrt())
}

/// Starting grid from the completed square `ω²(x - c)² + const` of the
/// polynomial part plus the sup-norm of the bounded remainder.
fn initial_grid(spec: &PotentialSpec, field: FieldConfig, p: f64, k: usize) -> Result<Grid> {
    let omega = check_bounded_below(spec, field)?;
    let (q, l) = spec.polynomial_part();
    let shift = p / field.strength();
    let center = (2.0 * q * shift - l) / (2.0 * omega * omega);
    let vb = spec.bounded_sup();
    let levels = (2 * k + 1) as f64;
    let half_width =
        center.abs() + 1.5 * (levels / omega + vb / (omega * omega)).sqrt() + 6.0 / omega.sqrt();

    let mut h = 0.25 / (omega * levels + vb).sqrt();
    if let Some(scale) = spec.feature_scale() {
        h = h.min(scale / 4.0);
    }
    let cells = (half_width / h).ceil().max(8.0) as usize;
    let grid = Grid::symmetric(half_width, 2 * cells + 1)?;
    ensure_size(&grid)?;
    Ok(grid)
}

fn ensure_size(grid: &Grid) -> Result<()> {
    if grid.n_points() > MAX_GRID_POINTS {
        return Err(Error::NonConvergence(format!(
            "refinement needs {} grid points, limit is {MAX_GRID_POINTS}",
            grid.n_points()
        )));
    }
    Ok(())
}

fn hints_from(ev: &[f64], radius: f64) -> Vec<(f64, f64)> {
    ev.iter().map(|&e| (e, 2.0 * radius)).collect()
}

fn max_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn eigenvalues_on_grid(
    spec: &PotentialSpec,
    field: FieldConfig,
    p: f64,
    k: usize,
    grid: &Grid,
    bisect_tol: f64,
    hints: Option<&[(f64, f64)]>,
) -> Result<Vec<f64>> {
    let m = assemble(spec, field, p, grid)?;
    if k > m.len() {
        return Err(Error::InvalidArgument(format!(
            "{k} bands requested on a grid with {} unknowns",
            m.len()
        )));
    }
    let tol = bisect_tol.max(f64::MIN_POSITIVE);
    eigensolver::lowest_eigenvalues_bracketed(&m, k, tol, hints)
}

fn eigenpairs_from(
    spec: &PotentialSpec,
    field: FieldConfig,
    p: f64,
    grid: &Grid,
    eigenvalues: Vec<f64>,
) -> Result<FiberEigenpairs> {
    let m = assemble(spec, field, p, grid)?;
    let scale = grid.spacing().sqrt().recip();
    let eigenvectors = eigensolver::eigenvectors(&m, &eigenvalues)?
        .into_iter()
        .map(|v| {
            let mut full = Vec::with_capacity(grid.n_points());
            full.push(0.0);
            full.extend(v.into_iter().map(|x| x * scale));
            full.push(0.0);
            full
        })
        .collect();
    Ok(FiberEigenpairs {
        p,
        eigenvalues,
        eigenvectors,
        grid: *grid,
        est_error: 0.0,
        refinement_steps: 0,
        coarse_eigenvalues: None,
    })
}

/// Normalized eigenfunction `φ_j` of `-∂² + B²x²` at `x`, via the
/// three-term recurrence of the normalized Hermite functions.
pub fn hermite_function(j: usize, field: FieldConfig, x: f64) -> f64 {
    let b = field.strength();
    let xi = b.sqrt() * x;
    let phi0 = (b / std::f64::consts::PI).powf(0.25) * (-0.5 * xi * xi).exp();
    if j == 0 {
        return phi0;
    }
    let mut prev = phi0;
    let mut cur = std::f64::consts::SQRT_2 * xi * phi0;
    for n in 1..j {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * xi * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Probability current density `p φ_n(x)²` on the fiber grid.
pub fn current_density(fe: &FiberEigenpairs, n: usize) -> Result<Vec<f64>> {
    let phi = fe.eigenvectors.get(n).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "band {n} requested, only {} computed",
            fe.band_count()
        ))
    })?;
    Ok(phi.iter().map(|v| fe.p * v * v).collect())
}
