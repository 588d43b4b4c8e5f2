//! Complex sparse systems and the two solvers used per time step: banded
//! Gaussian elimination (1D) and Jacobi-preconditioned BiCGStab (2D).

use num_complex::Complex64;
use thiserror::Error;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("numerically singular system (pivot {index} has modulus {modulus:e})")]
    Singular { index: usize, modulus: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Square complex sparse system in compressed-row form, one row per unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSystem {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
}

impl StepSystem {
    pub fn with_capacity(n: usize, nnz: usize) -> Self {
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        Self { n, row_ptr, cols: Vec::with_capacity(nnz), vals: Vec::with_capacity(nnz), rhs: Vec::with_capacity(n) }
    }

    /// Builds a system from dense rows (tests and small problems).
    pub fn from_dense(a: &[Vec<Complex64>], rhs: Vec<Complex64>) -> Self {
        let mut s = Self::with_capacity(a.len(), a.len() * 3);
        for (row, b) in a.iter().zip(&rhs) {
            let entries: Vec<_> =
                row.iter().enumerate().filter(|(_, v)| **v != ZERO).map(|(j, v)| (j, *v)).collect();
            s.push_row(&entries, *b);
        }
        s
    }

    /// Appends the next row; entries must have distinct column indices.
    pub fn push_row(&mut self, entries: &[(usize, Complex64)], rhs: Complex64) {
        for &(c, v) in entries {
            self.cols.push(c);
            self.vals.push(v);
        }
        self.row_ptr.push(self.cols.len());
        self.rhs.push(rhs);
    }

    pub fn n_unknowns(&self) -> usize {
        self.n
    }

    pub fn rows_pushed(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn is_complete(&self) -> bool {
        self.rows_pushed() == self.n
    }

    pub fn row(&self, i: usize) -> (&[usize], &[Complex64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Lower and upper bandwidths.
    pub fn bandwidths(&self) -> (usize, usize) {
        let (mut kl, mut ku) = (0, 0);
        for i in 0..self.rows_pushed() {
            for &c in self.row(i).0 {
                if c < i {
                    kl = kl.max(i - c);
                } else {
                    ku = ku.max(c - i);
                }
            }
        }
        (kl, ku)
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| {
                let (c, v) = self.row(i);
                c.iter().zip(v).filter(|(c, _)| **c == i).map(|(_, v)| *v).sum()
            })
            .collect()
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut acc = ZERO;
            for k in a..b {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    /// `||A x - b|| / ||b||` (absolute residual when `b = 0`).
    pub fn relative_residual(&self, x: &[Complex64]) -> f64 {
        let mut ax = vec![ZERO; self.n];
        self.matvec(x, &mut ax);
        let r = ax.iter().zip(&self.rhs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let bn = norm(&self.rhs);
        if bn > 0.0 {
            r / bn
        } else {
            r
        }
    }

    fn check(&self) -> Result<(), SolveError> {
        if !self.is_complete() {
            return Err(SolveError::Shape(format!("{} rows for {} unknowns", self.rows_pushed(), self.n)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Relative 2-norm residual `||Ax - b|| / ||b||`.
    pub residual_norm: f64,
    pub converged: bool,
    /// The Krylov iteration hit a breakdown (after its one restart).
    pub breakdown: bool,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Direct banded elimination with partial pivoting.
pub fn solve_banded(system: &StepSystem) -> Result<(Vec<Complex64>, SolveReport), SolveError> {
    system.check()?;
    let n = system.n;
    let (kl, ku) = system.bandwidths();
    let width = 2 * kl + ku + 1;
    // Row r stores columns r - kl ..= r + kl + ku at offset c + kl - r.
    let mut ab = vec![ZERO; n * width];
    let at = |r: usize, c: usize| r * width + (c + kl - r);
    for r in 0..n {
        let (cols, vals) = system.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            ab[at(r, c)] += v;
        }
    }
    let mut b = system.rhs.clone();

    for k in 0..n {
        let last_row = (k + kl).min(n - 1);
        let last_col = (k + kl + ku).min(n - 1);
        let (mut p, mut best) = (k, ab[at(k, k)].norm());
        for r in k + 1..=last_row {
            let m = ab[at(r, k)].norm();
            if m > best {
                p = r;
                best = m;
            }
        }
        if !(best >= 1e-300) {
            return Err(SolveError::Singular { index: k, modulus: best });
        }
        if p != k {
            for c in k..=last_col {
                ab.swap(at(k, c), at(p, c));
            }
            b.swap(k, p);
        }
        let pivot = ab[at(k, k)];
        for r in k + 1..=last_row {
            let f = ab[at(r, k)] / pivot;
            if f == ZERO {
                continue;
            }
            ab[at(r, k)] = ZERO;
            for c in k + 1..=last_col {
                let u = ab[at(k, c)];
                ab[at(r, c)] -= f * u;
            }
            let bk = b[k];
            b[r] -= f * bk;
        }
    }
    let mut x = vec![ZERO; n];
    for k in (0..n).rev() {
        let last_col = (k + kl + ku).min(n - 1);
        let mut acc = b[k];
        for c in k + 1..=last_col {
            acc -= ab[at(k, c)] * x[c];
        }
        x[k] = acc / ab[at(k, k)];
    }
    let residual_norm = system.relative_residual(&x);
    Ok((x, SolveReport { iterations: 0, residual_norm, converged: true, breakdown: false }))
}

/// Krylov solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 500 }
    }
}

enum Outcome {
    Converged(usize),
    Breakdown(usize),
    Exhausted(usize),
}

/// Right-Jacobi-preconditioned BiCGStab. The returned report always holds
/// the true relative residual of the returned iterate. A breakdown restarts
/// once from the zero vector.
pub fn solve_sparse(
    system: &StepSystem,
    cfg: KrylovConfig,
    guess: Option<&[Complex64]>,
) -> Result<(Vec<Complex64>, SolveReport), SolveError> {
    system.check()?;
    let n = system.n;
    if let Some(g) = guess {
        if g.len() != n {
            return Err(SolveError::Shape(format!("guess of length {} for {n} unknowns", g.len())));
        }
    }
    let inv_diag: Vec<Complex64> =
        system.diagonal().iter().map(|&d| if d.norm() > 0.0 { ONE / d } else { ONE }).collect();

    let mut x = guess.map_or_else(|| vec![ZERO; n], <[Complex64]>::to_vec);
    let (mut total, mut breakdown) = (0, false);
    for attempt in 0..2 {
        match bicgstab(system, &inv_diag, &mut x, cfg, total) {
            Outcome::Converged(it) => {
                total = it;
                breakdown = false;
                break;
            }
            Outcome::Exhausted(it) => {
                total = it;
                break;
            }
            Outcome::Breakdown(it) => {
                total = it;
                breakdown = true;
                if attempt == 0 {
                    x.iter_mut().for_each(|v| *v = ZERO);
                }
            }
        }
    }
    let residual_norm = system.relative_residual(&x);
    let converged = residual_norm.is_finite() && residual_norm <= cfg.tol;
    Ok((x, SolveReport { iterations: total, residual_norm, converged, breakdown: breakdown && !converged }))
}

fn bicgstab(
    a: &StepSystem,
    inv_diag: &[Complex64],
    x: &mut [Complex64],
    cfg: KrylovConfig,
    start_iter: usize,
) -> Outcome {
    let n = a.n;
    let bnorm = norm(&a.rhs);
    let scale = if bnorm > 0.0 { bnorm } else { 1.0 };
    let mut r = vec![ZERO; n];
    a.matvec(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(&a.rhs) {
        *ri = bi - *ri;
    }
    if norm(&r) / scale <= cfg.tol {
        return Outcome::Converged(start_iter);
    }
    let r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (ONE, ONE, ONE);
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    let mut y = vec![ZERO; n];
    let mut z = vec![ZERO; n];
    let mut s = vec![ZERO; n];
    let mut t = vec![ZERO; n];
    let tiny = 1e-300;

    let mut it = start_iter;
    while it < cfg.max_iter {
        it += 1;
        let rho_new = dot(&r_hat, &r);
        if rho_new.norm() < tiny || omega.norm() < tiny {
            return Outcome::Breakdown(it);
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            y[i] = inv_diag[i] * p[i];
        }
        a.matvec(&y, &mut v);
        let rv = dot(&r_hat, &v);
        if rv.norm() < tiny {
            return Outcome::Breakdown(it);
        }
        alpha = rho / rv;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        if norm(&s) / scale <= cfg.tol {
            for i in 0..n {
                x[i] += alpha * y[i];
            }
            return Outcome::Converged(it);
        }
        for i in 0..n {
            z[i] = inv_diag[i] * s[i];
        }
        a.matvec(&z, &mut t);
        let tt = dot(&t, &t);
        if tt.norm() < tiny {
            return Outcome::Breakdown(it);
        }
        omega = dot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        let rn = norm(&r) / scale;
        if !rn.is_finite() {
            return Outcome::Breakdown(it);
        }
        if rn <= cfg.tol {
            return Outcome::Converged(it);
        }
    }
    Outcome::Exhausted(it)
}
