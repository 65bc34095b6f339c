//! Named property checks on a configured problem.
//!
//! Each check reads the swept band structure (and solves extra fibers where
//! it needs them) and reports pass, fail or not-applicable together with
//! witnesses `(p, n, values)`. A check is not applicable when the potential
//! lacks the property the check is about, e.g. `minimax` on an indefinite
//! profile.

use std::cell::RefCell;
use std::fmt;

use crate::dispersion::{self, BandStructure, SweepConfig};
use crate::error::Result;
use crate::fiber;
use crate::potentials::{PotentialSpec, SignClass};

use super::config::{CheckName, RunConfig};

/// Witnesses kept per check.
const MAX_WITNESSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::NotApplicable => "n/a",
        })
    }
}

/// A sample supporting a check verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// `None` for witnesses that are not tied to one momentum.
    pub p: Option<f64>,
    pub n: usize,
    pub values: Vec<f64>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let values: Vec<String> = self.values.iter().map(|v| format!("{v:.9e}")).collect();
        match self.p {
            Some(p) => write!(f, "p={p:.6} ")?,
            None => write!(f, "p=- ")?,
        }
        write!(f, "n={} values={}", self.n, values.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: CheckName,
    pub status: CheckStatus,
    pub summary: String,
    pub witnesses: Vec<Witness>,
}

impl CheckOutcome {
    fn new(name: CheckName, status: CheckStatus, summary: impl Into<String>) -> Self {
        CheckOutcome {
            name,
            status,
            summary: summary.into(),
            witnesses: Vec::new(),
        }
    }

    fn with_witnesses(mut self, mut witnesses: Vec<Witness>) -> Self {
        witnesses.truncate(MAX_WITNESSES);
        self.witnesses = witnesses;
        self
    }
}

/// Run `names` in order.
pub fn run_checks(cfg: &RunConfig, bs: &BandStructure, names: &[CheckName]) -> Vec<CheckOutcome> {
    let ctx = Context {
        cfg,
        bs,
        scaled: RefCell::new(Vec::new()),
    };
    names
        .iter()
        .map(|&name| {
            let result = match name {
                CheckName::Landau => ctx.landau(),
                CheckName::Fh => ctx.fh(),
                CheckName::Minimax => ctx.minimax(),
                CheckName::Gaps => ctx.gaps(),
                CheckName::Monotone => ctx.monotone(),
                CheckName::Asymptotes => ctx.asymptotes(),
                CheckName::DeltaLimit => ctx.delta_limit(),
                CheckName::Symmetry => ctx.symmetry(),
            };
            result.unwrap_or_else(|e| CheckOutcome::new(name, CheckStatus::Fail, format!("error: {e}")))
        })
        .collect()
}

struct Context<'a> {
    cfg: &'a RunConfig,
    bs: &'a BandStructure,
    /// Sweeps of `λ v` already computed, keyed by `λ`.
    scaled: RefCell<Vec<(f64, BandStructure)>>,
}

fn verdict(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

/// Five evenly spaced momenta across the sweep range.
fn sample_momenta(sweep: &SweepConfig) -> Vec<f64> {
    SweepConfig {
        p_steps: 5,
        ..sweep.clone()
    }
    .p_grid()
}

impl Context<'_> {
    fn tol(&self) -> f64 {
        self.cfg.sweep.tol
    }

    fn spec(&self) -> &PotentialSpec {
        &self.cfg.potential
    }

    fn scaled_sweep(&self, lambda: f64) -> Result<BandStructure> {
        if lambda == 1.0 {
            return Ok(self.bs.clone());
        }
        if let Some((_, bs)) = self.scaled.borrow().iter().find(|(l, _)| *l == lambda) {
            return Ok(bs.clone());
        }
        let bs = dispersion::sweep(&self.spec().scale(lambda), self.cfg.field, &self.cfg.sweep)?;
        self.scaled.borrow_mut().push((lambda, bs.clone()));
        Ok(bs)
    }

    /// Multipliers sorted ascending, with duplicates removed.
    fn lambdas(&self) -> Vec<f64> {
        let mut l = self.cfg.lambdas_or_default();
        l.sort_by(f64::total_cmp);
        l.dedup();
        l
    }

    /// Free fibers reproduce `B(2n+1)`: the swept bands for `v = 0`, three
    /// extra fibers otherwise.
    fn landau(&self) -> Result<CheckOutcome> {
        let field = self.cfg.field;
        let slack = 2.0 * self.tol();
        let mut witnesses = Vec::new();
        let mut worst = 0.0f64;
        let mut record = |p: f64, n: usize, e: f64| {
            let err = (e - field.landau_level(n)).abs();
            worst = worst.max(err);
            if err > slack {
                witnesses.push(Witness {
                    p: Some(p),
                    n,
                    values: vec![e, field.landau_level(n)],
                });
            }
        };
        let source = if self.spec().is_zero() {
            for (n, row) in self.bs.energies.iter().enumerate() {
                for (&p, &e) in self.bs.p_grid.iter().zip(row) {
                    record(p, n, e);
                }
            }
            "swept bands"
        } else {
            let s = &self.cfg.sweep;
            for p in [s.p_min, 0.5 * (s.p_min + s.p_max), s.p_max] {
                let fe = fiber::solve_fiber(&PotentialSpec::zero(), field, p, s.bands, s.tol)?;
                for (n, &e) in fe.eigenvalues.iter().enumerate() {
                    record(p, n, e);
                }
            }
            "free fibers at the configured field"
        };
        Ok(CheckOutcome::new(
            CheckName::Landau,
            verdict(witnesses.is_empty()),
            format!("{source}: max |eps_n - B(2n+1)| = {worst:.3e} (allowed {slack:.1e})"),
        )
        .with_witnesses(witnesses))
    }

    /// Feynman–Hellmann slopes against central differences at five momenta.
    fn fh(&self) -> Result<CheckOutcome> {
        let spec = self.spec();
        if !spec.has_derivative() {
            return Ok(CheckOutcome::new(
                CheckName::Fh,
                CheckStatus::NotApplicable,
                "potential has no analytic derivative",
            ));
        }
        let field = self.cfg.field;
        let tol = self.tol();
        let bands = self.cfg.sweep.bands.min(3);
        let mut witnesses = Vec::new();
        let mut worst = 0.0f64;
        for p in sample_momenta(&self.cfg.sweep) {
            for n in 0..bands {
                let fh = dispersion::fh_derivative_p(spec, field, p, n, tol)?;
                let fd = dispersion::fd_derivative_p(spec, field, p, n, tol, None)?;
                let rel = (fh - fd).abs() / (1.0 + fd.abs());
                worst = worst.max(rel);
                if rel > 1e-4 {
                    witnesses.push(Witness {
                        p: Some(p),
                        n,
                        values: vec![fh, fd],
                    });
                }
            }
        }
        Ok(CheckOutcome::new(
            CheckName::Fh,
            verdict(witnesses.is_empty()),
            format!("max |FH - FD| / (1 + |FD|) = {worst:.3e} (allowed 1e-4)"),
        )
        .with_witnesses(witnesses))
    }

    /// Eigenvalues of `λ v` move monotonically with `λ` for sign-definite `v`.
    fn minimax(&self) -> Result<CheckOutcome> {
        let direction = match self.spec().classify_sign() {
            SignClass::NonNegative => 1.0,
            SignClass::NonPositive => -1.0,
            SignClass::Indefinite => {
                return Ok(CheckOutcome::new(
                    CheckName::Minimax,
                    CheckStatus::NotApplicable,
                    "potential is not sign-definite",
                ))
            }
        };
        let lambdas = self.lambdas();
        let slack = 2.0 * self.tol();
        let mut witnesses = Vec::new();
        let mut previous: Option<(f64, BandStructure)> = None;
        for &lambda in &lambdas {
            let bs = self.scaled_sweep(lambda)?;
            if let Some((_, prev)) = &previous {
                for (n, (lo, hi)) in prev.energies.iter().zip(&bs.energies).enumerate() {
                    for (j, (&e_lo, &e_hi)) in lo.iter().zip(hi).enumerate() {
                        if direction * (e_lo - e_hi) > slack {
                            witnesses.push(Witness {
                                p: Some(bs.p_grid[j]),
                                n,
                                values: vec![e_lo, e_hi],
                            });
                        }
                    }
                }
            }
            previous = Some((lambda, bs));
        }
        let trend = if direction > 0.0 { "nondecreasing" } else { "nonincreasing" };
        Ok(CheckOutcome::new(
            CheckName::Minimax,
            verdict(witnesses.is_empty()),
            format!("eps_n(p, lambda v) {trend} in lambda over {lambdas:?} (slack {slack:.1e})"),
        )
        .with_witnesses(witnesses))
    }

    /// Bands stay within `‖v‖` of their Landau level and gaps stay open.
    fn gaps(&self) -> Result<CheckOutcome> {
        let spec = self.spec();
        let field = self.cfg.field;
        let norm = spec.sup_norm();
        if !dispersion::gap_bound_applies(spec, field) {
            return Ok(CheckOutcome::new(
                CheckName::Gaps,
                CheckStatus::NotApplicable,
                format!(
                    "sup norm {norm:.6} is not below B = {} (or 2B for sign-definite potentials)",
                    field.strength()
                ),
            ));
        }
        let slack = 2.0 * self.tol();
        let mut witnesses = Vec::new();
        for (n, row) in self.bs.energies.iter().enumerate() {
            let (lo, hi) = dispersion::perturbation_interval(spec, field, n);
            for (&p, &e) in self.bs.p_grid.iter().zip(row) {
                if e < lo - slack || e > hi + slack {
                    witnesses.push(Witness {
                        p: Some(p),
                        n,
                        values: vec![e, lo, hi],
                    });
                }
            }
        }
        let closed: Vec<_> = self.bs.gaps.iter().filter(|g| !g.open).collect();
        for g in &closed {
            witnesses.push(Witness {
                p: None,
                n: g.band,
                values: vec![g.lower, g.upper],
            });
        }
        Ok(CheckOutcome::new(
            CheckName::Gaps,
            verdict(witnesses.is_empty()),
            format!(
                "sup norm {norm:.6}; {} of {} gaps open",
                self.bs.gaps.len() - closed.len(),
                self.bs.gaps.len()
            ),
        )
        .with_witnesses(witnesses))
    }

    /// Band widths grow strictly with `|λ|` for sign-definite `v`.
    fn monotone(&self) -> Result<CheckOutcome> {
        if !self.spec().classify_sign().is_definite() {
            return Ok(CheckOutcome::new(
                CheckName::Monotone,
                CheckStatus::NotApplicable,
                "potential is not sign-definite",
            ));
        }
        let lambdas = self.lambdas();
        let mut witnesses = Vec::new();
        for side in [1.0, -1.0] {
            let mut chain: Vec<f64> = lambdas.iter().copied().filter(|l| l * side > 0.0).collect();
            chain.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
            let mut previous: Option<Vec<f64>> = None;
            for &lambda in &chain {
                let widths = self.scaled_sweep(lambda)?.widths;
                if let Some(prev) = &previous {
                    for (n, (w_lo, w_hi)) in prev.iter().zip(&widths).enumerate() {
                        if w_hi <= w_lo {
                            witnesses.push(Witness {
                                p: None,
                                n,
                                values: vec![lambda, *w_lo, *w_hi],
                            });
                        }
                    }
                }
                previous = Some(widths);
            }
        }
        Ok(CheckOutcome::new(
            CheckName::Monotone,
            verdict(witnesses.is_empty()),
            format!("band widths strictly increasing in |lambda| over {lambdas:?}"),
        )
        .with_witnesses(witnesses))
    }

    /// `ε_n(±P)` approach `B(2n+1) + v_∓`.
    fn asymptotes(&self) -> Result<CheckOutcome> {
        let spec = self.spec();
        let Some((v_minus, v_plus)) = spec.asymptotic_limits() else {
            return Ok(CheckOutcome::new(
                CheckName::Asymptotes,
                CheckStatus::NotApplicable,
                "potential has no finite limits at infinity",
            ));
        };
        let field = self.cfg.field;
        let big_p = dispersion::asymptotic_momentum(field, dispersion::support_radius(spec));
        let threshold = 1e-3;
        let mut witnesses = Vec::new();
        let mut worst = 0.0f64;
        for n in 0..self.cfg.sweep.bands {
            let r = dispersion::asymptote_check(spec, field, n, big_p, self.tol())?;
            worst = worst.max(r.left).max(r.right);
            if r.right > threshold {
                witnesses.push(Witness {
                    p: Some(big_p),
                    n,
                    values: vec![r.right, v_minus],
                });
            }
            if r.left > threshold {
                witnesses.push(Witness {
                    p: Some(-big_p),
                    n,
                    values: vec![r.left, v_plus],
                });
            }
        }
        Ok(CheckOutcome::new(
            CheckName::Asymptotes,
            verdict(witnesses.is_empty()),
            format!(
                "at P = {big_p}: eps_n(+P) -> B(2n+1) + {v_minus}, eps_n(-P) -> B(2n+1) + {v_plus}; \
                 max residual {worst:.3e} (allowed {threshold:.0e})"
            ),
        )
        .with_witnesses(witnesses))
    }

    /// Ground energies of narrowing Lorentzians at the same coupling settle.
    fn delta_limit(&self) -> Result<CheckOutcome> {
        let PotentialSpec::Lorentzian { lambda, .. } = *self.spec() else {
            return Ok(CheckOutcome::new(
                CheckName::DeltaLimit,
                CheckStatus::NotApplicable,
                "only Lorentzian profiles approximate a point interaction",
            ));
        };
        let field = self.cfg.field;
        let study = dispersion::delta_limit_study(
            lambda,
            0.0,
            &[0.4, 0.2, 0.1, 0.05],
            field,
            self.tol().min(1e-7),
        )?;
        let mut witnesses = Vec::new();
        let settling = study.differences_decreasing();
        if !settling {
            witnesses.push(Witness {
                p: Some(0.0),
                n: 0,
                values: study.differences.clone(),
            });
        }
        let below = lambda >= 0.0 || study.energies.iter().all(|&e| e < field.landau_level(0));
        if !below {
            witnesses.push(Witness {
                p: Some(0.0),
                n: 0,
                values: study.energies.clone(),
            });
        }
        Ok(CheckOutcome::new(
            CheckName::DeltaLimit,
            verdict(settling && below),
            format!(
                "widths {:?}: eps_0(0) = {:?}, successive differences {:?}",
                study.widths, study.energies, study.differences
            ),
        )
        .with_witnesses(witnesses))
    }

    /// Even potentials give `ε_n(p) = ε_n(-p)`; for the others the check
    /// passes by finding an asymmetry witness.
    fn symmetry(&self) -> Result<CheckOutcome> {
        let Some(even) = self.spec().is_even() else {
            return Ok(CheckOutcome::new(
                CheckName::Symmetry,
                CheckStatus::NotApplicable,
                "parity of the potential is unknown",
            ));
        };
        let s = &self.cfg.sweep;
        let mirrored: Vec<Vec<f64>> = if s.p_min == -s.p_max {
            self.bs
                .energies
                .iter()
                .map(|row| row.iter().rev().copied().collect())
                .collect()
        } else {
            let cfg = SweepConfig {
                p_min: -s.p_max,
                p_max: -s.p_min,
                ..s.clone()
            };
            dispersion::sweep(self.spec(), self.cfg.field, &cfg)?
                .energies
                .into_iter()
                .map(|row| row.into_iter().rev().collect())
                .collect()
        };
        let mut worst: Option<Witness> = None;
        let mut worst_gap = -1.0;
        let mut violations = Vec::new();
        let slack = 2.0 * self.tol();
        for (n, (row, mirror)) in self.bs.energies.iter().zip(&mirrored).enumerate() {
            for (j, (&e, &m)) in row.iter().zip(mirror).enumerate() {
                let d = (e - m).abs();
                let w = Witness {
                    p: Some(self.bs.p_grid[j]),
                    n,
                    values: vec![e, m],
                };
                if d > worst_gap {
                    worst_gap = d;
                    worst = Some(w.clone());
                }
                if even && d > slack {
                    violations.push(w);
                }
            }
        }
        if even {
            Ok(CheckOutcome::new(
                CheckName::Symmetry,
                verdict(violations.is_empty()),
                format!("even potential: max |eps_n(p) - eps_n(-p)| = {worst_gap:.3e} (allowed {slack:.1e})"),
            )
            .with_witnesses(violations))
        } else {
            let threshold = 10.0 * self.tol();
            let found = worst_gap > threshold;
            Ok(CheckOutcome::new(
                CheckName::Symmetry,
                verdict(found),
                format!(
                    "potential is not even: max |eps_n(p) - eps_n(-p)| = {worst_gap:.3e} \
                     (asymmetry witness needs > {threshold:.1e})"
                ),
            )
            .with_witnesses(worst.into_iter().collect()))
        }
    }
}
