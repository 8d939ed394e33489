//! Dense linear algebra: Hermitian eigensolver, complex LU solve, small real
//! matrix helpers and exact integer rank.
//!
//! The eigensolver reduces the matrix to real symmetric tridiagonal form with
//! Householder reflections (a diagonal phase fix-up turns the complex
//! subdiagonal real), then runs implicit QL with Wilkinson shifts. Purely real
//! input takes an all-`f64` path that is roughly four times cheaper.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::float::{hypot, sqrt};

trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    const ZERO: Self;
    const ONE: Self;
    fn conj(self) -> Self;
    fn abs_sqr(self) -> f64;
    fn re(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn abs_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    const ONE: Self = Complex64::new(1.0, 0.0);
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn abs_sqr(self) -> f64 {
        self.norm_sqr()
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// Dense Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    /// Builds from row-major data; the caller guarantees Hermitian symmetry.
    pub fn from_rows(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: data.len() });
        }
        Ok(Self { n, data })
    }

    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        Self::from_rows(n, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    /// Sets entry `(i, j)` and its mirror `(j, i)` to the conjugate.
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        if i == j {
            self.data[i * self.n + i] = Complex64::new(value.re, 0.0);
        } else {
            self.data[i * self.n + j] = value;
            self.data[j * self.n + i] = value.conj();
        }
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.n).all(|i| {
            (i..self.n).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol)
        })
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Eigen-decomposition with ascending eigenvalues; `vectors[j]` belongs to
/// `values[j]` and has unit norm.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

/// Reduces a Hermitian matrix (row-major, consumed) to tridiagonal form.
/// Returns `(diag, sub, q)` with `A = Q T Q^*`, `sub[k] = T[k+1][k]`.
fn tridiagonalize<S: Scalar>(
    n: usize,
    mut a: Vec<S>,
    accumulate: bool,
) -> (Vec<f64>, Vec<S>, Option<Vec<S>>) {
    let mut q = if accumulate {
        let mut q = vec![S::ZERO; n * n];
        for i in 0..n {
            q[i * n + i] = S::ONE;
        }
        Some(q)
    } else {
        None
    };
    let mut sub = vec![S::ZERO; n.saturating_sub(1)];
    let mut v = vec![S::ZERO; n];
    let mut p = vec![S::ZERO; n];
    for k in 0..n.saturating_sub(1) {
        let lo = k + 1;
        let xnorm_sqr: f64 = (lo..n).map(|i| a[i * n + k].abs_sqr()).sum();
        let x0 = a[lo * n + k];
        if lo == n - 1 || xnorm_sqr == 0.0 {
            sub[k] = x0;
            continue;
        }
        let xnorm = sqrt(xnorm_sqr);
        let x0abs = sqrt(x0.abs_sqr());
        let phase = if x0abs == 0.0 { S::ONE } else { x0.scale(1.0 / x0abs) };
        let alpha = phase.scale(-xnorm);
        // v = x - alpha e1, normalised
        let vnorm = sqrt(2.0 * xnorm * (xnorm + x0abs));
        let inv = 1.0 / vnorm;
        v[lo] = (x0 - alpha).scale(inv);
        for i in lo + 1..n {
            v[i] = a[i * n + k].scale(inv);
        }
        // p = A v on the trailing block, kappa = v^* p
        let mut kappa = 0.0;
        for i in lo..n {
            let row = &a[i * n + lo..i * n + n];
            let mut s = S::ZERO;
            for (aij, vj) in row.iter().zip(&v[lo..n]) {
                s = s + *aij * *vj;
            }
            p[i] = s;
            kappa += (v[i].conj() * s).re();
        }
        // w = p - kappa v; A <- A - 2 v w^* - 2 w v^*
        for i in lo..n {
            p[i] = p[i] - v[i].scale(kappa);
        }
        for i in lo..n {
            let vi2 = v[i].scale(2.0);
            let wi2 = p[i].scale(2.0);
            let row = &mut a[i * n + lo..i * n + n];
            for (j, aij) in row.iter_mut().enumerate() {
                let jj = lo + j;
                *aij = *aij - vi2 * p[jj].conj() - wi2 * v[jj].conj();
            }
        }
        sub[k] = alpha;
        if let Some(q) = q.as_mut() {
            // Q <- Q (I - 2 v v^*)
            for r in 0..n {
                let row = &mut q[r * n + lo..r * n + n];
                let mut s = S::ZERO;
                for (qrj, vj) in row.iter().zip(&v[lo..n]) {
                    s = s + *qrj * *vj;
                }
                let s2 = s.scale(2.0);
                for (qrj, vj) in row.iter_mut().zip(&v[lo..n]) {
                    *qrj = *qrj - s2 * vj.conj();
                }
            }
        }
    }
    let diag = (0..n).map(|i| a[i * n + i].re()).collect();
    (diag, sub, q)
}

/// Implicit QL on a real symmetric tridiagonal matrix.
///
/// `e[i]` is the subdiagonal entry between rows `i` and `i + 1` (length
/// `n - 1`). When `zt` is given it holds the transposed eigenvector matrix
/// (row `j` = eigenvector `j`) and is updated in place. Output is sorted.
fn tql(d: &mut [f64], e_in: &[f64], mut zt: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&e_in[..n - 1]);
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let max_iter = 60 * n.max(1);
    let mut iterations = 0usize;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                iterations += 1;
                if iterations > max_iter {
                    return Err(Error::ConvergenceFailure(format!(
                        "tridiagonal QL exceeded {max_iter} iterations"
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = zt.as_deref_mut() {
                        let (head, tail) = z.split_at_mut((i + 1) * n);
                        let zi = &mut head[i * n..(i + 1) * n];
                        let zi1 = &mut tail[..n];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let hk = *b;
                            *b = s * *a + c * hk;
                            *a = c * *a - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    // selection sort keeps the eigenvector permutation cheap to apply
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d.swap(i, k);
            if let Some(z) = zt.as_deref_mut() {
                for c in 0..n {
                    z.swap(i * n + c, k * n + c);
                }
            }
        }
    }
    Ok(())
}

/// Turns a complex Hermitian tridiagonal into a real one via a diagonal
/// unitary `D`: returns `(|sub|, phases)` with `T = D T_real D^*`.
fn real_subdiagonal<S: Scalar>(sub: &[S]) -> (Vec<f64>, Vec<Complex64>) {
    let n = sub.len() + 1;
    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    let mut e = vec![0.0; sub.len()];
    for k in 0..sub.len() {
        let z = sub[k].to_complex();
        let a = z.norm();
        e[k] = a;
        phases[k + 1] = if a == 0.0 { phases[k] } else { phases[k] * (z / a) };
    }
    (e, phases)
}

fn eigen_generic<S: Scalar>(n: usize, a: Vec<S>) -> Result<Eigen> {
    let (mut d, sub, q) = tridiagonalize(n, a, true);
    let q = q.expect("accumulated");
    let (e, phases) = real_subdiagonal(&sub);
    let mut zt = vec![0.0; n * n];
    for i in 0..n {
        zt[i * n + i] = 1.0;
    }
    tql(&mut d, &e, Some(&mut zt))?;
    // M = Q D, then eigenvector j = M z_j
    let m: Vec<Complex64> = (0..n * n)
        .map(|idx| q[idx].to_complex() * phases[idx % n])
        .collect();
    let vectors = (0..n)
        .map(|j| {
            let zj = &zt[j * n..(j + 1) * n];
            (0..n)
                .map(|r| {
                    let row = &m[r * n..(r + 1) * n];
                    let mut s = Complex64::new(0.0, 0.0);
                    for (mr, z) in row.iter().zip(zj) {
                        s += mr * z;
                    }
                    s
                })
                .collect()
        })
        .collect();
    Ok(Eigen { values: d, vectors })
}

fn eigvals_generic<S: Scalar>(n: usize, a: Vec<S>) -> Result<Vec<f64>> {
    let (mut d, sub, _) = tridiagonalize(n, a, false);
    let (e, _) = real_subdiagonal(&sub);
    tql(&mut d, &e, None)?;
    Ok(d)
}

/// Full eigen-decomposition of a Hermitian matrix.
pub fn eigh(m: &HermitianMatrix) -> Result<Eigen> {
    let n = m.n;
    if n == 0 {
        return Ok(Eigen { values: Vec::new(), vectors: Vec::new() });
    }
    if m.is_real() {
        eigen_generic(n, m.data.iter().map(|z| z.re).collect())
    } else {
        eigen_generic(n, m.data.clone())
    }
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &HermitianMatrix) -> Result<Vec<f64>> {
    let n = m.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    if m.is_real() {
        eigvals_generic(n, m.data.iter().map(|z| z.re).collect())
    } else {
        eigvals_generic(n, m.data.clone())
    }
}

/// Solves `A x = b` by LU with partial pivoting (`a` row-major, consumed).
pub fn solve_complex(n: usize, mut a: Vec<Complex64>, mut b: Vec<Complex64>) -> Result<Vec<Complex64>> {
    if a.len() != n * n || b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|i| (i, a[i * n + k].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pmax == 0.0 {
            return Err(Error::ConvergenceFailure("singular linear system".into()));
        }
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            b.swap(k, piv);
        }
        let inv = Complex64::new(1.0, 0.0) / a[k * n + k];
        for i in k + 1..n {
            let factor = a[i * n + k] * inv;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            a[i * n + k] = factor;
            let (top, bottom) = a.split_at_mut(i * n);
            let rk = &top[k * n + k + 1..k * n + n];
            let ri = &mut bottom[k + 1..n];
            for (x, y) in ri.iter_mut().zip(rk) {
                *x -= factor * y;
            }
            let bk = b[k];
            b[i] -= factor * bk;
        }
    }
    for k in (0..n).rev() {
        let mut s = b[k];
        for c in k + 1..n {
            s -= a[k * n + c] * b[c];
        }
        b[k] = s / a[k * n + k];
    }
    Ok(b)
}

/// Determinant and inverse of a small real square matrix (row-major).
pub fn real_inverse(n: usize, m: &[f64]) -> (f64, Option<Vec<f64>>) {
    let mut a = m.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    let mut det = 1.0;
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .unwrap_or(k);
        if a[piv * n + k] == 0.0 {
            return (0.0, None);
        }
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
                inv.swap(k * n + c, piv * n + c);
            }
            det = -det;
        }
        let p = a[k * n + k];
        det *= p;
        for c in 0..n {
            a[k * n + c] /= p;
            inv[k * n + c] /= p;
        }
        for i in 0..n {
            if i != k {
                let f = a[i * n + k];
                if f != 0.0 {
                    for c in 0..n {
                        a[i * n + c] -= f * a[k * n + c];
                        inv[i * n + c] -= f * inv[k * n + c];
                    }
                }
            }
        }
    }
    (det, Some(inv))
}

/// Exact rank of an integer matrix given as rows (fraction-free elimination).
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let (a, b) = (m[rank][c], m[r][c]);
                let g = gcd(a, b);
                let (fa, fb) = (b / g, a / g);
                for k in 0..cols {
                    m[r][k] = m[r][k] * fb - m[rank][k] * fa;
                }
                let rg = m[r].iter().fold(0i128, |acc, &x| gcd(acc, x));
                if rg > 1 {
                    for x in m[r].iter_mut() {
                        *x /= rg;
                    }
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
