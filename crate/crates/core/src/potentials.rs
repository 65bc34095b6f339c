//! Obstacle profiles `v(x)`.
//!
//! Every profile is an immutable value with exact pointwise evaluation and
//! the analytic metadata the solver and the property checks need: derivative,
//! sup-norm, limits at `±∞`, sign class and parity.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// How a tabulated profile continues outside its abscissa range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Outside {
    /// `v = 0` outside the table.
    #[default]
    Zero,
    /// `v` keeps the first/last tabulated value.
    Clamp,
}

/// Piecewise-linear profile through `(xs[i], values[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    xs: Vec<f64>,
    values: Vec<f64>,
    outside: Outside,
}

impl Table {
    pub fn new(xs: Vec<f64>, values: Vec<f64>, outside: Outside) -> Result<Self> {
        let table = Table { xs, values, outside };
        table.validate()?;
        Ok(table)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn outside(&self) -> Outside {
        self.outside
    }

    fn validate(&self) -> Result<()> {
        if self.xs.len() != self.values.len() {
            return Err(Error::InvalidPotential(
                "Tabulated requires as many values as abscissae".into(),
            ));
        }
        if self.xs.len() < 2 {
            return Err(Error::InvalidPotential(
                "Tabulated requires at least two points".into(),
            ));
        }
        if self.xs.iter().chain(&self.values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential(
                "Tabulated requires finite abscissae and values".into(),
            ));
        }
        if self.xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPotential(
                "Tabulated requires strictly increasing abscissae".into(),
            ));
        }
        Ok(())
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return match self.outside {
                Outside::Zero => 0.0,
                Outside::Clamp if x < self.xs[0] => self.values[0],
                Outside::Clamp => self.values[n - 1],
            };
        }
        // first index with xs[i] > x, clamped so that [i-1, i] is a valid cell
        let i = self.xs.partition_point(|&t| t <= x).clamp(1, n - 1);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        let t = (x - x0) / (x1 - x0);
        v0 + t * (v1 - v0)
    }

    fn min_spacing(&self) -> f64 {
        self.xs
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Sign class of a profile, deciding which one-sided bounds apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignClass {
    NonNegative,
    NonPositive,
    Indefinite,
}

impl SignClass {
    pub fn is_definite(self) -> bool {
        !matches!(self, SignClass::Indefinite)
    }

    fn flip(self) -> SignClass {
        match self {
            SignClass::NonNegative => SignClass::NonPositive,
            SignClass::NonPositive => SignClass::NonNegative,
            SignClass::Indefinite => SignClass::Indefinite,
        }
    }
}

/// Which of the standing hypotheses on the profile hold.
///
/// * `v1`: `v_+` locally square integrable and `v_-` in `L² + L^∞`;
/// * `v2`: finite limits `v_±` at `±∞` exist;
/// * `v3`: `v ∈ L²`;
/// * `v4`: `v ∈ C¹` with `v' ∈ L²`;
/// * `v5`: a nonzero `C¹` bump fits under `v_+` or `v_-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hypotheses {
    pub v1: bool,
    pub v2: bool,
    pub v3: bool,
    pub v4: bool,
    pub v5: bool,
}

/// Symbolic obstacle profile.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    /// `λ/π · a/(x² + a²)`, a δ-approximant of strength `λ` as `a → 0`.
    Lorentzian { lambda: f64, a: f64 },
    /// Flat bottom `λ` on `|x| < a` with cosine edges reaching zero at `|x| = b`.
    FlatWell { lambda: f64, a: f64, b: f64 },
    /// `λ sin(x/a)` on `|x| < aπ`, zero outside.
    SineObstacle { lambda: f64, a: f64 },
    /// `αx`
    Linear { alpha: f64 },
    /// `-β²x²`
    Parabola { beta: f64 },
    Tabulated(Table),
    Scaled { lambda: f64, inner: Box<PotentialSpec> },
    Sum(Vec<PotentialSpec>),
}

impl PotentialSpec {
    pub fn zero() -> Self {
        PotentialSpec::Sum(Vec::new())
    }

    pub fn lorentzian(lambda: f64, a: f64) -> Result<Self> {
        PotentialSpec::Lorentzian { lambda, a }.validated()
    }

    pub fn flat_well(lambda: f64, a: f64, b: f64) -> Result<Self> {
        PotentialSpec::FlatWell { lambda, a, b }.validated()
    }

    pub fn sine_obstacle(lambda: f64, a: f64) -> Result<Self> {
        PotentialSpec::SineObstacle { lambda, a }.validated()
    }

    pub fn linear(alpha: f64) -> Result<Self> {
        PotentialSpec::Linear { alpha }.validated()
    }

    pub fn parabola(beta: f64) -> Result<Self> {
        PotentialSpec::Parabola { beta }.validated()
    }

    pub fn tabulated(xs: Vec<f64>, values: Vec<f64>, outside: Outside) -> Result<Self> {
        Ok(PotentialSpec::Tabulated(Table::new(xs, values, outside)?))
    }

    pub fn sum(children: Vec<PotentialSpec>) -> Result<Self> {
        PotentialSpec::Sum(children).validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Check the parameter invariants of this profile and all nested ones.
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, vals: &[f64]| {
            if vals.iter().all(|v| v.is_finite()) {
                Ok(())
            } else {
                Err(Error::InvalidPotential(format!(
                    "{name} requires finite parameters"
                )))
            }
        };
        match self {
            PotentialSpec::Lorentzian { lambda, a } => {
                finite("Lorentzian", &[*lambda, *a])?;
                if *a <= 0.0 {
                    return Err(Error::InvalidPotential("Lorentzian requires a > 0".into()));
                }
            }
            PotentialSpec::FlatWell { lambda, a, b } => {
                finite("FlatWell", &[*lambda, *a, *b])?;
                if !(0.0 < *a && a < b) {
                    return Err(Error::InvalidPotential("FlatWell requires 0 < a < b".into()));
                }
            }
            PotentialSpec::SineObstacle { lambda, a } => {
                finite("SineObstacle", &[*lambda, *a])?;
                if *a <= 0.0 {
                    return Err(Error::InvalidPotential(
                        "SineObstacle requires a > 0".into(),
                    ));
                }
            }
            PotentialSpec::Linear { alpha } => finite("Linear", &[*alpha])?,
            PotentialSpec::Parabola { beta } => finite("Parabola", &[*beta])?,
            PotentialSpec::Tabulated(table) => table.validate()?,
            PotentialSpec::Scaled { lambda, inner } => {
                finite("Scaled", &[*lambda])?;
                inner.validate()?;
            }
            PotentialSpec::Sum(children) => {
                for child in children {
                    child.validate()?;
                }
            }
        }
        Ok(())
    }

    /// `v(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::Lorentzian { lambda, a } => lambda / PI * a / (x * x + a * a),
            PotentialSpec::FlatWell { lambda, a, b } => {
                let r = x.abs();
                if r < *a {
                    *lambda
                } else if r <= *b {
                    lambda * (FRAC_PI_2 * (r - a) / (b - a)).cos()
                } else {
                    0.0
                }
            }
            PotentialSpec::SineObstacle { lambda, a } => {
                if x.abs() < a * PI {
                    lambda * (x / a).sin()
                } else {
                    0.0
                }
            }
            PotentialSpec::Linear { alpha } => alpha * x,
            PotentialSpec::Parabola { beta } => -beta * beta * x * x,
            PotentialSpec::Tabulated(table) => table.eval(x),
            PotentialSpec::Scaled { lambda, inner } => {
                if *lambda == 0.0 {
                    0.0
                } else {
                    lambda * inner.eval(x)
                }
            }
            PotentialSpec::Sum(children) => children.iter().map(|c| c.eval(x)).sum(),
        }
    }

    /// `v'(x)`; `None` for tabulated data.
    ///
    /// At the kinks of the flat well (`|x| = b`) and the sine obstacle
    /// (`|x| = aπ`) the right limit `v'(x + 0)` is returned.
    pub fn eval_derivative(&self, x: f64) -> Option<f64> {
        let d = match self {
            PotentialSpec::Lorentzian { lambda, a } => {
                let den = x * x + a * a;
                -lambda / PI * 2.0 * a * x / (den * den)
            }
            PotentialSpec::FlatWell { lambda, a, b } => {
                let k = FRAC_PI_2 / (b - a);
                if x >= *b || (x >= -a && x < *a) || x < -b {
                    0.0
                } else if x >= *a {
                    -lambda * k * (k * (x - a)).sin()
                } else {
                    lambda * k * (k * (-x - a)).sin()
                }
            }
            PotentialSpec::SineObstacle { lambda, a } => {
                if x >= -a * PI && x < a * PI {
                    lambda / a * (x / a).cos()
                } else {
                    0.0
                }
            }
            PotentialSpec::Linear { alpha } => *alpha,
            PotentialSpec::Parabola { beta } => -2.0 * beta * beta * x,
            PotentialSpec::Tabulated(_) => return None,
            PotentialSpec::Scaled { lambda, inner } => lambda * inner.eval_derivative(x)?,
            PotentialSpec::Sum(children) => {
                let mut acc = 0.0;
                for c in children {
                    acc += c.eval_derivative(x)?;
                }
                acc
            }
        };
        Some(d)
    }

    /// Whether `eval_derivative` returns values for this profile.
    pub fn has_derivative(&self) -> bool {
        match self {
            PotentialSpec::Tabulated(_) => false,
            PotentialSpec::Scaled { inner, .. } => inner.has_derivative(),
            PotentialSpec::Sum(children) => children.iter().all(|c| c.has_derivative()),
            _ => true,
        }
    }

    /// `(v_-, v_+)`, the limits at `-∞` and `+∞`, when both exist.
    pub fn asymptotic_limits(&self) -> Option<(f64, f64)> {
        match self {
            PotentialSpec::Lorentzian { .. }
            | PotentialSpec::FlatWell { .. }
            | PotentialSpec::SineObstacle { .. } => Some((0.0, 0.0)),
            PotentialSpec::Linear { alpha } => (*alpha == 0.0).then_some((0.0, 0.0)),
            PotentialSpec::Parabola { beta } => (*beta == 0.0).then_some((0.0, 0.0)),
            PotentialSpec::Tabulated(table) => match table.outside {
                Outside::Zero => Some((0.0, 0.0)),
                Outside::Clamp => Some((table.values[0], table.values[table.values.len() - 1])),
            },
            PotentialSpec::Scaled { lambda, inner } => {
                if *lambda == 0.0 {
                    return Some((0.0, 0.0));
                }
                inner
                    .asymptotic_limits()
                    .map(|(lo, hi)| (lambda * lo, lambda * hi))
            }
            PotentialSpec::Sum(children) => {
                children.iter().try_fold((0.0, 0.0), |(lo, hi), c| {
                    c.asymptotic_limits().map(|(l, h)| (lo + l, hi + h))
                })
            }
        }
    }

    /// `‖v‖_∞`, or `f64::INFINITY` for unbounded profiles.
    ///
    /// Exact for the catalog kinds; for sums this is the sum of the
    /// children's norms, an upper bound.
    pub fn sup_norm(&self) -> f64 {
        match self {
            PotentialSpec::Lorentzian { lambda, a } => lambda.abs() / (PI * a),
            PotentialSpec::FlatWell { lambda, .. } | PotentialSpec::SineObstacle { lambda, .. } => {
                lambda.abs()
            }
            PotentialSpec::Linear { alpha } => {
                if *alpha == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            PotentialSpec::Parabola { beta } => {
                if *beta == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            PotentialSpec::Tabulated(table) => {
                table.values.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
            }
            PotentialSpec::Scaled { lambda, inner } => {
                if *lambda == 0.0 {
                    0.0
                } else {
                    lambda.abs() * inner.sup_norm()
                }
            }
            PotentialSpec::Sum(children) => children.iter().map(|c| c.sup_norm()).sum(),
        }
    }

    pub fn classify_sign(&self) -> SignClass {
        use SignClass::*;
        if self.is_zero() {
            return NonNegative;
        }
        match self {
            PotentialSpec::Lorentzian { lambda, .. } | PotentialSpec::FlatWell { lambda, .. } => {
                if *lambda >= 0.0 {
                    NonNegative
                } else {
                    NonPositive
                }
            }
            PotentialSpec::SineObstacle { .. } | PotentialSpec::Linear { .. } => Indefinite,
            PotentialSpec::Parabola { .. } => NonPositive,
            PotentialSpec::Tabulated(table) => {
                if table.values.iter().all(|&v| v >= 0.0) {
                    NonNegative
                } else if table.values.iter().all(|&v| v <= 0.0) {
                    NonPositive
                } else {
                    Indefinite
                }
            }
            PotentialSpec::Scaled { lambda, inner } => {
                let s = inner.classify_sign();
                if *lambda < 0.0 {
                    s.flip()
                } else {
                    s
                }
            }
            PotentialSpec::Sum(children) => {
                let classes: Vec<_> = children
                    .iter()
                    .filter(|c| !c.is_zero())
                    .map(|c| c.classify_sign())
                    .collect();
                if classes.iter().all(|&c| c == NonNegative) {
                    NonNegative
                } else if classes.iter().all(|&c| c == NonPositive) {
                    NonPositive
                } else {
                    Indefinite
                }
            }
        }
    }

    /// `λ·v` as a new profile; the base profile is not modified.
    pub fn scale(&self, lambda: f64) -> PotentialSpec {
        PotentialSpec::Scaled {
            lambda,
            inner: Box::new(self.clone()),
        }
    }

    /// Structurally identically zero.
    pub fn is_zero(&self) -> bool {
        match self {
            PotentialSpec::Lorentzian { lambda, .. }
            | PotentialSpec::FlatWell { lambda, .. }
            | PotentialSpec::SineObstacle { lambda, .. } => *lambda == 0.0,
            PotentialSpec::Linear { alpha } => *alpha == 0.0,
            PotentialSpec::Parabola { beta } => *beta == 0.0,
            PotentialSpec::Tabulated(table) => table.values.iter().all(|&v| v == 0.0),
            PotentialSpec::Scaled { lambda, inner } => *lambda == 0.0 || inner.is_zero(),
            PotentialSpec::Sum(children) => children.iter().all(|c| c.is_zero()),
        }
    }

    /// `Some(true)` if `v(-x) = v(x)`, `Some(false)` if a witness of
    /// asymmetry is known, `None` when undecided.
    pub fn is_even(&self) -> Option<bool> {
        if self.is_zero() {
            return Some(true);
        }
        match self {
            PotentialSpec::Lorentzian { .. }
            | PotentialSpec::FlatWell { .. }
            | PotentialSpec::Parabola { .. } => Some(true),
            PotentialSpec::SineObstacle { .. } | PotentialSpec::Linear { .. } => Some(false),
            PotentialSpec::Tabulated(table) => {
                // both v(x) and v(-x) are linear between the mirrored breakpoints
                let mut points: Vec<f64> = table.xs.iter().flat_map(|&x| [x, -x]).collect();
                let n = points.len();
                for i in 0..n {
                    for j in (i + 1)..n {
                        points.push(0.5 * (points[i] + points[j]));
                    }
                    if points.len() > 20_000 {
                        break;
                    }
                }
                Some(points.iter().all(|&x| table.eval(x) == table.eval(-x)))
            }
            PotentialSpec::Scaled { inner, .. } => inner.is_even(),
            PotentialSpec::Sum(children) => {
                let nonzero: Vec<_> = children.iter().filter(|c| !c.is_zero()).collect();
                if nonzero.iter().all(|c| c.is_even() == Some(true)) {
                    Some(true)
                } else if nonzero.len() == 1 {
                    nonzero[0].is_even()
                } else {
                    None
                }
            }
        }
    }

    pub fn hypotheses(&self) -> Hypotheses {
        let (quad, lin) = self.polynomial_part();
        let v1 = !(quad < 0.0 || (quad == 0.0 && lin != 0.0));
        Hypotheses {
            v1,
            v2: self.asymptotic_limits().is_some(),
            v3: self.in_l2(),
            v4: self.c1_with_l2_derivative(),
            v5: !self.is_zero(),
        }
    }

    fn in_l2(&self) -> bool {
        match self {
            PotentialSpec::Lorentzian { .. }
            | PotentialSpec::FlatWell { .. }
            | PotentialSpec::SineObstacle { .. } => true,
            PotentialSpec::Linear { alpha } => *alpha == 0.0,
            PotentialSpec::Parabola { beta } => *beta == 0.0,
            PotentialSpec::Tabulated(table) => match table.outside {
                Outside::Zero => true,
                Outside::Clamp => {
                    table.values[0] == 0.0 && table.values[table.values.len() - 1] == 0.0
                }
            },
            PotentialSpec::Scaled { lambda, inner } => *lambda == 0.0 || inner.in_l2(),
            PotentialSpec::Sum(children) => children.iter().all(|c| c.in_l2()),
        }
    }

    fn c1_with_l2_derivative(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        match self {
            PotentialSpec::Lorentzian { .. } => true,
            PotentialSpec::Scaled { inner, .. } => inner.c1_with_l2_derivative(),
            PotentialSpec::Sum(children) => children.iter().all(|c| c.c1_with_l2_derivative()),
            _ => false,
        }
    }

    /// Coefficients `(q, l)` of the unbounded polynomial part `q x² + l x`.
    pub(crate) fn polynomial_part(&self) -> (f64, f64) {
        match self {
            PotentialSpec::Linear { alpha } => (0.0, *alpha),
            PotentialSpec::Parabola { beta } => (-beta * beta, 0.0),
            PotentialSpec::Scaled { lambda, inner } => {
                let (q, l) = inner.polynomial_part();
                (lambda * q, lambda * l)
            }
            PotentialSpec::Sum(children) => children.iter().fold((0.0, 0.0), |(q, l), c| {
                let (cq, cl) = c.polynomial_part();
                (q + cq, l + cl)
            }),
            _ => (0.0, 0.0),
        }
    }

    /// Sup-norm of everything except the polynomial part.
    pub(crate) fn bounded_sup(&self) -> f64 {
        match self {
            PotentialSpec::Linear { .. } | PotentialSpec::Parabola { .. } => 0.0,
            PotentialSpec::Scaled { lambda, inner } => lambda.abs() * inner.bounded_sup(),
            PotentialSpec::Sum(children) => children.iter().map(|c| c.bounded_sup()).sum(),
            other => other.sup_norm(),
        }
    }

    /// Smallest length over which the profile changes appreciably.
    pub(crate) fn feature_scale(&self) -> Option<f64> {
        match self {
            PotentialSpec::Lorentzian { a, .. } | PotentialSpec::SineObstacle { a, .. } => Some(*a),
            PotentialSpec::FlatWell { a, b, .. } => Some(a.min(b - a)),
            PotentialSpec::Linear { .. } | PotentialSpec::Parabola { .. } => None,
            PotentialSpec::Tabulated(table) => Some(table.min_spacing()),
            PotentialSpec::Scaled { lambda, inner } => {
                if *lambda == 0.0 {
                    None
                } else {
                    inner.feature_scale()
                }
            }
            PotentialSpec::Sum(children) => children
                .iter()
                .filter_map(|c| c.feature_scale())
                .reduce(f64::min),
        }
    }

    /// Lower-case name of the top-level kind.
    pub fn kind_name(&self) -> &'static str {
        match self {
            PotentialSpec::Lorentzian { .. } => "lorentzian",
            PotentialSpec::FlatWell { .. } => "flat_well",
            PotentialSpec::SineObstacle { .. } => "sine",
            PotentialSpec::Linear { .. } => "linear",
            PotentialSpec::Parabola { .. } => "parabola",
            PotentialSpec::Tabulated(_) => "tabulated",
            PotentialSpec::Scaled { .. } => "scaled",
            PotentialSpec::Sum(_) => "sum",
        }
    }
}
