//! Independent ground truth for the numerical paths.
//!
//! Nothing here touches the Sturm/inverse-iteration solver or the fiber
//! discretization: the solvable models use completed squares, the dense
//! solver uses cyclic Jacobi rotations.

use crate::eigensolver::TridiagonalMatrix;
use crate::error::{Error, Result};
use crate::fiber::FieldConfig;

/// Largest matrix accepted by [`brute_dense_eigs`].
pub const DENSE_LIMIT: usize = 400;

/// Fiber models with closed-form spectra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolvableKind {
    /// `v = 0`
    FreeLandau,
    /// `v(x) = αx`
    Linear { alpha: f64 },
    /// `v(x) = -β²x²`, requires `β < B`.
    Parabola { beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolvableModel {
    pub kind: SolvableKind,
    pub field: FieldConfig,
}

impl SolvableModel {
    pub fn new(kind: SolvableKind, field: FieldConfig) -> Result<Self> {
        if let SolvableKind::Parabola { beta } = kind {
            if beta.abs() >= field.strength() {
                return Err(Error::DomainError(format!(
                    "parabola needs |beta| < B, got beta = {beta}, B = {}: \
                     no states are transported along the barrier",
                    field.strength()
                )));
            }
        }
        Ok(SolvableModel { kind, field })
    }

    /// Exact `ε_n(p)` from completing the square in `(p + Bx)² + v(x)`.
    ///
    /// Linear: `B(2n+1) - αp/B - α²/(4B²)`.
    /// Parabola: `ω(2n+1) - β²p²/ω²` with `ω = √(B² - β²)`.
    pub fn exact_eigenvalue(&self, n: usize, p: f64) -> Result<f64> {
        let b = self.field.strength();
        let level = (2 * n + 1) as f64;
        match self.kind {
            SolvableKind::FreeLandau => Ok(b * level),
            SolvableKind::Linear { alpha } => {
                Ok(b * level - alpha * p / b - alpha * alpha / (4.0 * b * b))
            }
            SolvableKind::Parabola { beta } => {
                let omega2 = b * b - beta * beta;
                if omega2 <= 0.0 {
                    return Err(Error::DomainError(
                        "parabola needs |beta| < B".into(),
                    ));
                }
                Ok(omega2.sqrt() * level - beta * beta * p * p / omega2)
            }
        }
    }
}

/// Full ascending spectrum by cyclic Jacobi rotations on the dense matrix.
pub fn brute_dense_eigs(m: &TridiagonalMatrix) -> Result<Vec<f64>> {
    let n = m.len();
    if n > DENSE_LIMIT {
        return Err(Error::SizeExceeded {
            size: n,
            limit: DENSE_LIMIT,
        });
    }
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = m.diag()[i];
        if i + 1 < n {
            a[i][i + 1] = m.offdiag()[i];
            a[i + 1][i] = m.offdiag()[i];
        }
    }
    let off_norm = |a: &[Vec<f64>]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };
    let scale = m.norm_inf().max(1.0);
    for _sweep in 0..100 {
        if off_norm(&a) < 1e-12 * scale {
            let mut eigs: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
            eigs.sort_by(f64::total_cmp);
            return Ok(eigs);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(Error::NonConvergence(
        "Jacobi rotations did not converge in 100 sweeps".into(),
    ))
}

/// Trapezoid rule for samples `f` with spacing `h`.
pub fn quadrature_integral(f: &[f64], h: f64) -> f64 {
    match f.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * (f[0] + f[n - 1]) + f[1..n - 1].iter().sum::<f64>()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn field(b: f64) -> FieldConfig {
        FieldConfig::new(b).unwrap()
    }

    #[test]
    fn exact_eigenvalue_examples() {
        let free = SolvableModel::new(SolvableKind::FreeLandau, field(2.0)).unwrap();
        assert_eq!(free.exact_eigenvalue(1, 0.3).unwrap(), 6.0);

        let flat = SolvableModel::new(SolvableKind::Linear { alpha: 0.0 }, field(1.0)).unwrap();
        for n in 0..4 {
            assert_eq!(flat.exact_eigenvalue(n, 3.7).unwrap(), (2 * n + 1) as f64);
        }

        let lin = SolvableModel::new(SolvableKind::Linear { alpha: 1.0 }, field(1.0)).unwrap();
        assert_eq!(lin.exact_eigenvalue(0, 1.0).unwrap(), -0.25);

        let para = SolvableModel::new(SolvableKind::Parabola { beta: 0.6 }, field(1.0)).unwrap();
        assert!((para.exact_eigenvalue(0, 1.0).unwrap() - 0.2375).abs() < 1e-15);
    }

    #[test]
    fn parabola_domain_error() {
        assert!(matches!(
            SolvableModel::new(SolvableKind::Parabola { beta: 1.2 }, field(1.0)),
            Err(Error::DomainError(_))
        ));
        assert!(SolvableModel::new(SolvableKind::Parabola { beta: 1.0 }, field(1.0)).is_err());
    }

    #[test]
    fn linear_oracle_is_affine_in_p() {
        let lin = SolvableModel::new(SolvableKind::Linear { alpha: 0.75 }, field(1.5)).unwrap();
        let h = 0.25;
        let slope = -0.75 / 1.5;
        for i in -10..10 {
            let p = i as f64 * h;
            let d = (lin.exact_eigenvalue(2, p + h).unwrap() - lin.exact_eigenvalue(2, p).unwrap()) / h;
            assert!((d - slope).abs() < 1e-13);
        }
    }

    #[test]
    fn parabola_oracle_is_even_and_concave() {
        let para = SolvableModel::new(SolvableKind::Parabola { beta: 0.5 }, field(1.0)).unwrap();
        let e = |p: f64| para.exact_eigenvalue(1, p).unwrap();
        for i in 0..20 {
            let p = 0.3 * i as f64;
            assert_eq!(e(p), e(-p));
            assert!(e(p + 0.1) - 2.0 * e(p) + e(p - 0.1) < 0.0);
        }
    }

    #[test]
    fn dense_eigs_small_cases() {
        let m = TridiagonalMatrix::new(vec![2.0, 2.0], vec![1.0]).unwrap();
        let e = brute_dense_eigs(&m).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] - 3.0).abs() < 1e-12);

        let n = 20;
        let m = TridiagonalMatrix::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        let e = brute_dense_eigs(&m).unwrap();
        for (k, v) in e.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / 21.0).cos();
            assert!((v - exact).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_eigs_size_guard() {
        let n = DENSE_LIMIT + 1;
        let m = TridiagonalMatrix::new(vec![1.0; n], vec![0.5; n - 1]).unwrap();
        assert_eq!(
            brute_dense_eigs(&m),
            Err(Error::SizeExceeded {
                size: n,
                limit: DENSE_LIMIT
            })
        );
    }

    #[test]
    fn trapezoid_examples() {
        assert!((quadrature_integral(&[1.0; 11], 0.1) - 1.0).abs() < 1e-15);
        let xs: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        assert!((quadrature_integral(&xs, 0.1) - 0.5).abs() < 1e-15);
        let h = 0.01;
        let g: Vec<f64> = (0..=1600)
            .map(|i| {
                let x = -8.0 + i as f64 * h;
                (-x * x).exp()
            })
            .collect();
        assert!((quadrature_integral(&g, h) - PI.sqrt()).abs() < 1e-8);
        assert_eq!(quadrature_integral(&[3.0], 0.1), 0.0);
    }
}
