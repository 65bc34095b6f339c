//! Symmetric tridiagonal eigenproblems.
//!
//! Lowest eigenvalues come from Sturm-sequence bisection; all open brackets
//! are advanced together so one sweep over the matrix evaluates several
//! shifts at once. Eigenvectors come from inverse iteration on a pivoted LU
//! factorization of `T - εI`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const MAX_BISECTION_PASSES: usize = 400;
const MAX_INVERSE_ITERATIONS: usize = 8;
const START_VECTOR_SEED: u64 = 0x5eed_f1be;

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.len() < 2 {
            return Err(Error::InvalidArgument(
                "tridiagonal matrix needs N >= 2".into(),
            ));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidArgument(format!(
                "off-diagonal length {} does not match N - 1 = {}",
                offdiag.len(),
                diag.len() - 1
            )));
        }
        if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "tridiagonal entries must be finite".into(),
            ));
        }
        Ok(TridiagonalMatrix { diag, offdiag })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// No vanishing off-diagonal entry, hence a simple spectrum.
    pub fn is_unreduced(&self) -> bool {
        self.offdiag.iter().all(|&e| e != 0.0)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// `y = T x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.offdiag[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.offdiag[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// `‖T x - ε x‖₂`
    pub fn residual_norm(&self, x: &[f64], eps: f64) -> f64 {
        self.apply(x)
            .iter()
            .zip(x)
            .map(|(y, xi)| (y - eps * xi).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn pivmin(&self) -> f64 {
        let emax = self.offdiag.iter().fold(1.0f64, |m, e| m.max(e * e));
        f64::MIN_POSITIVE * emax
    }
}

/// Number of eigenvalues strictly below `mu`.
pub fn sturm_count(m: &TridiagonalMatrix, mu: f64) -> usize {
    let mut out = [0usize];
    sturm_counts(m, &[mu], &mut out);
    out[0]
}

/// Sturm counts for several shifts in a single pass over the matrix.
///
/// A pivot smaller than `pivmin` in magnitude is replaced by `±pivmin`, with
/// an exact zero treated as positive, so a shift equal to an eigenvalue is
/// not counted.
fn sturm_counts(m: &TridiagonalMatrix, mus: &[f64], counts: &mut [usize]) {
    let pivmin = m.pivmin();
    let guard = |q: f64| {
        if q.abs() < pivmin {
            if q < 0.0 {
                -pivmin
            } else {
                pivmin
            }
        } else {
            q
        }
    };
    // small fixed-size lanes let the independent recurrences overlap
    const LANES: usize = 8;
    for (chunk_mu, chunk_count) in mus.chunks(LANES).zip(counts.chunks_mut(LANES)) {
        let k = chunk_mu.len();
        let mut q = [1.0f64; LANES];
        let mut c = [0usize; LANES];
        let d0 = m.diag[0];
        for j in 0..k {
            q[j] = guard(d0 - chunk_mu[j]);
            c[j] += (q[j] < 0.0) as usize;
        }
        for i in 1..m.diag.len() {
            let e2 = m.offdiag[i - 1] * m.offdiag[i - 1];
            let di = m.diag[i];
            for j in 0..k {
                q[j] = guard((di - chunk_mu[j]) - e2 / q[j]);
                c[j] += (q[j] < 0.0) as usize;
            }
        }
        chunk_count.copy_from_slice(&c[..k]);
    }
}

/// The `k` smallest eigenvalues in ascending order, each to within `tol`.
pub fn lowest_eigenvalues(m: &TridiagonalMatrix, k: usize, tol: f64) -> Result<Vec<f64>> {
    lowest_eigenvalues_bracketed(m, k, tol, None)
}

/// As [`lowest_eigenvalues`], starting bisection from approximate values.
///
/// `hints[i]` is a guess for eigenvalue `i` with an uncertainty radius; a
/// bracket that fails the Sturm test is widened until it holds, so bad hints
/// only cost time.
pub fn lowest_eigenvalues_bracketed(
    m: &TridiagonalMatrix,
    k: usize,
    tol: f64,
    hints: Option<&[(f64, f64)]>,
) -> Result<Vec<f64>> {
    let n = m.len();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "requested {k} eigenvalues of a {n}x{n} matrix"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let (glo, ghi) = m.gershgorin_bounds();
    let pad = 2.0 * f64::EPSILON * glo.abs().max(ghi.abs()) + m.pivmin();
    let (glo, ghi) = (glo - pad, ghi + pad);

    // invariant: count(lower[i]) <= i < count(upper[i])
    let mut lower = vec![glo; k];
    let mut upper = vec![ghi; k];

    if let Some(hints) = hints {
        let probes: Vec<f64> = hints
            .iter()
            .take(k)
            .flat_map(|&(c, r)| [c - r, c + r])
            .collect();
        let mut counts = vec![0; probes.len()];
        sturm_counts(m, &probes, &mut counts);
        absorb(&probes, &counts, &mut lower, &mut upper);
    }

    let converged = |lo: f64, hi: f64| {
        let width = hi - lo;
        width <= tol || width <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs())
    };

    let mut mids = Vec::with_capacity(k);
    let mut counts = Vec::with_capacity(k);
    for _ in 0..MAX_BISECTION_PASSES {
        mids.clear();
        for i in 0..k {
            if converged(lower[i], upper[i]) {
                continue;
            }
            let mid = 0.5 * (lower[i] + upper[i]);
            // brackets of neighbouring eigenvalues often coincide
            if mids.last() != Some(&mid) {
                mids.push(mid);
            }
        }
        if mids.is_empty() {
            return Ok((0..k).map(|i| 0.5 * (lower[i] + upper[i])).collect());
        }
        counts.resize(mids.len(), 0);
        sturm_counts(m, &mids, &mut counts);
        absorb(&mids, &counts, &mut lower, &mut upper);
    }
    Err(Error::NonConvergence(format!(
        "bisection did not bracket {k} eigenvalues within {MAX_BISECTION_PASSES} passes"
    )))
}

/// Tighten every bracket with the information from the probed counts.
fn absorb(probes: &[f64], counts: &[usize], lower: &mut [f64], upper: &mut [f64]) {
    for (&x, &c) in probes.iter().zip(counts) {
        for i in 0..lower.len() {
            if i < c {
                if x < upper[i] {
                    upper[i] = x;
                }
            } else if x > lower[i] {
                lower[i] = x;
            }
        }
    }
    // keep brackets ordered when a probe lands outside a stale hint bracket
    for i in 0..lower.len() {
        if lower[i] > upper[i] {
            lower[i] = upper[i];
        }
    }
}

/// Unit eigenvector for the eigenvalue approximated by `eps`.
///
/// The sign is fixed so that the entry of largest magnitude is positive.
pub fn eigenvector(m: &TridiagonalMatrix, eps: f64) -> Result<Vec<f64>> {
    let mut out = eigenvectors(m, &[eps])?;
    Ok(out.pop().expect("one eigenvector requested"))
}

/// Unit eigenvectors for ascending approximate eigenvalues.
///
/// Vectors whose eigenvalues lie within `1e-3·‖T‖` of each other are
/// orthogonalized against the earlier ones of the cluster.
pub fn eigenvectors(m: &TridiagonalMatrix, eigenvalues: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = m.len();
    let norm = m.norm_inf();
    let cluster_gap = 1e-3 * norm;
    let mut rng = ChaCha8Rng::seed_from_u64(START_VECTOR_SEED);
    let start: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();

    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(eigenvalues.len());
    for (idx, &eps) in eigenvalues.iter().enumerate() {
        let cluster_start = (0..idx)
            .rev()
            .take_while(|&j| (eigenvalues[j + 1] - eigenvalues[j]).abs() < cluster_gap)
            .last()
            .unwrap_or(idx);
        let lu = ShiftedLu::factor(m, eps, norm);
        let mut x = start.clone();
        normalize(&mut x);
        let mut prev = x.clone();
        let mut drift = f64::INFINITY;
        for iter in 0..MAX_INVERSE_ITERATIONS {
            lu.solve(&mut x);
            for v in &vectors[cluster_start..idx] {
                let dot: f64 = v.iter().zip(&x).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(v).for_each(|(xi, vi)| *xi -= dot * vi);
            }
            normalize(&mut x);
            let overlap: f64 = x.iter().zip(&prev).map(|(a, b)| a * b).sum();
            drift = 1.0 - overlap.abs();
            if iter >= 1 && drift < 1e-13 {
                break;
            }
            prev.copy_from_slice(&x);
        }
        if !(drift < 1e-13) {
            return Err(Error::NonConvergence(format!(
                "inverse iteration at {eps} did not settle (drift {drift:e})"
            )));
        }
        fix_sign(&mut x);
        vectors.push(x);
    }
    Ok(vectors)
}

fn normalize(x: &mut [f64]) {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return;
    }
    let norm = x.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt() * scale;
    x.iter_mut().for_each(|v| *v /= norm);
}

fn fix_sign(x: &mut [f64]) {
    let mut big = 0.0f64;
    for &v in x.iter() {
        if v.abs() > big.abs() {
            big = v;
        }
    }
    if big < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

/// LU factorization with partial pivoting of `T - εI`.
struct ShiftedLu {
    /// Unit lower multipliers.
    l: Vec<f64>,
    /// Upper bands: diagonal, first and second superdiagonal.
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(m: &TridiagonalMatrix, eps: f64, norm: f64) -> Self {
        let n = m.len();
        let tiny = f64::EPSILON * norm.max(f64::MIN_POSITIVE);
        let mut l = vec![0.0; n];
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut swapped = vec![false; n];

        // current pivot row: (a, b, c) at columns (i, i+1, i+2)
        let mut a = m.diag[0] - eps;
        let mut b = if n > 1 { m.offdiag[0] } else { 0.0 };
        for i in 0..n - 1 {
            let sub = m.offdiag[i];
            let next_d = m.diag[i + 1] - eps;
            let next_e = if i + 2 < n { m.offdiag[i + 1] } else { 0.0 };
            if sub.abs() > a.abs() {
                // swap the pivot row with row i+1
                swapped[i] = true;
                let mult = a / sub;
                l[i] = mult;
                u0[i] = sub;
                u1[i] = next_d;
                u2[i] = next_e;
                a = b - mult * next_d;
                b = -mult * next_e;
            } else {
                let piv = if a == 0.0 { tiny } else { a };
                let mult = sub / piv;
                l[i] = mult;
                u0[i] = piv;
                u1[i] = b;
                u2[i] = 0.0;
                a = next_d - mult * b;
                b = next_e;
            }
        }
        u0[n - 1] = if a.abs() < tiny {
            if a < 0.0 {
                -tiny
            } else {
                tiny
            }
        } else {
            a
        };
        for p in u0.iter_mut() {
            if p.abs() < tiny {
                *p = if *p < 0.0 { -tiny } else { tiny };
            }
        }
        ShiftedLu {
            l,
            u0,
            u1,
            u2,
            swapped,
        }
    }

    /// Overwrite `x` with `(T - εI)^{-1} x`.
    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.l[i] * x[i];
        }
        x[n - 1] /= self.u0[n - 1];
        if n >= 2 {
            x[n - 2] = (x[n - 2] - self.u1[n - 2] * x[n - 1]) / self.u0[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.u1[i] * x[i + 1] - self.u2[i] * x[i + 2]) / self.u0[i];
        }
        // rescale to avoid overflow on the next sweep
        let big = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if big > 1e100 {
            x.iter_mut().for_each(|v| *v /= big);
        }
    }
}
