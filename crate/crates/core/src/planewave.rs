//! Plane-wave Galerkin oracle for the Bloch operator `L_t = (-Δ)^l + q`.
//!
//! In the basis `e^{i(γ+t,x)}` the operator has diagonal `|γ+t|^{2l}` and
//! off-diagonal entries `q_{γ_i - γ_j}`. Matrices are assembled relative to an
//! energy origin (usually the energy of the studied plane wave) so that small
//! eigenvalue offsets keep full relative precision.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::float::{energy_diff, powi, sqrt};
use crate::lattice::{Boundary, LatticeModel, LatticeVector, QuasiMomentum};
use crate::linalg::{eigh, eigvalsh, solve_complex, HermitianMatrix};
use crate::potential::FourierPotential;

/// Gap below which neighbouring eigenvalues are flagged as one cluster.
pub const CLUSTER_GAP: f64 = 1e-9;
/// Relative eigenvalue drift tolerated between a window and its 1.5x refinement.
pub const REFINE_TOL: f64 = 1e-9;

/// Eigenpairs with less weight than this on the target are not certified by
/// refinement; they cannot win a dominant-weight match.
pub const CERTIFY_WEIGHT: f64 = 1e-12;

const UNIT_NORM_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisMode {
    FullBall,
    Window,
}

/// Ordered set of plane-wave indices `γ`.
#[derive(Debug, Clone)]
pub struct PlanewaveBasis {
    indices: Vec<LatticeVector>,
    lookup: BTreeMap<Vec<i64>, usize>,
    center: Vec<f64>,
    radius: f64,
    mode: BasisMode,
}

impl PlanewaveBasis {
    fn from_indices(indices: Vec<LatticeVector>, center: Vec<f64>, radius: f64, mode: BasisMode) -> Self {
        let lookup = indices.iter().enumerate().map(|(i, g)| (g.coords.clone(), i)).collect();
        Self { indices, lookup, center, radius, mode }
    }

    /// All `γ` with `|γ| < radius`, zero included.
    pub fn full_ball(lattice: &LatticeModel, radius: f64) -> Self {
        let indices = lattice.enumerate_ball(radius, false);
        Self::from_indices(indices, vec![0.0; lattice.dim()], radius, BasisMode::FullBall)
    }

    /// All `γ` with `|γ + t - center| ≤ radius`.
    pub fn window(lattice: &LatticeModel, t: &[f64], center: &[f64], radius: f64) -> Self {
        let shifted = crate::float::sub(center, t);
        let indices = lattice.enumerate_around(&shifted, radius, Boundary::Closed);
        Self::from_indices(indices, center.to_vec(), radius, BasisMode::Window)
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[LatticeVector] {
        &self.indices
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn mode(&self) -> BasisMode {
        self.mode
    }

    pub fn position(&self, coords: &[i64]) -> Option<usize> {
        self.lookup.get(coords).copied()
    }
}

/// Assembles `L_t` in `basis` with energies measured from `|reference|^{2l}`.
///
/// Diagonal entries are `|γ+t|^{2l} - |reference|^{2l}`, computed without
/// cancellation; with `reference = None` the origin is zero.
pub fn assemble_shifted(
    l: u32,
    q: &FourierPotential,
    t: &[f64],
    basis: &PlanewaveBasis,
    reference: Option<&[f64]>,
) -> HermitianMatrix {
    let n = basis.len();
    let mut h = HermitianMatrix::zeros(n);
    for (i, g) in basis.indices.iter().enumerate() {
        let k = crate::float::add(&g.embedding, t);
        let diag = match reference {
            Some(r) => energy_diff(&k, r, l),
            None => powi(crate::float::norm_sqr(&k), l),
        };
        h.set(i, i, Complex64::new(diag, 0.0));
    }
    let mut other = vec![0i64; q.dim()];
    for (i, g) in basis.indices.iter().enumerate() {
        for (s, value) in q.entries() {
            // column j with γ_i - γ_j = s
            for (o, (a, b)) in other.iter_mut().zip(g.coords.iter().zip(&s.coords)) {
                *o = a - b;
            }
            if let Some(j) = basis.position(&other) {
                if j != i {
                    h.set(i, j, *value);
                }
            }
        }
    }
    h
}

/// `L_t` in `basis` with absolute energies.
pub fn assemble(l: u32, q: &FourierPotential, t: &[f64], basis: &PlanewaveBasis) -> HermitianMatrix {
    assemble_shifted(l, q, t, basis, None)
}

/// Eigen-decomposition of an assembled Bloch matrix.
///
/// `offsets` are eigenvalues of the assembled matrix; the Bloch eigenvalues
/// are `origin + offsets[N]`. Row `N` of `coefficients` holds `b(N, γ)` in
/// basis order.
#[derive(Debug, Clone)]
pub struct BlochSpectrum {
    pub t: Vec<f64>,
    pub l: u32,
    pub origin: f64,
    pub offsets: Vec<f64>,
    pub coefficients: Vec<Vec<Complex64>>,
    pub residuals: Vec<f64>,
    pub clustered: Vec<bool>,
    pub basis: PlanewaveBasis,
    /// Index of the eigenpair refined by the Schur-complement iteration.
    pub polished: Option<usize>,
}

impl BlochSpectrum {
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn eigenvalue(&self, n: usize) -> f64 {
        self.origin + self.offsets[n]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.offsets.iter().map(|d| self.origin + d).collect()
    }

    pub fn coefficient(&self, n: usize, coords: &[i64]) -> Result<Complex64> {
        match self.basis.position(coords) {
            Some(i) => Ok(self.coefficients[n][i]),
            None => Err(Error::IndexOutsideWindow { index: coords.to_vec() }),
        }
    }

    /// `|b(N, γ)|²`, zero outside the basis.
    pub fn weight(&self, n: usize, coords: &[i64]) -> f64 {
        self.basis.position(coords).map_or(0.0, |i| self.coefficients[n][i].norm_sqr())
    }

    /// Eigenpair with the largest weight on `coords`.
    pub fn dominant(&self, coords: &[i64]) -> Result<(usize, f64)> {
        let i = self.basis.position(coords).ok_or_else(|| Error::IndexOutsideWindow { index: coords.to_vec() })?;
        let mut best = (0, -1.0);
        for (n, row) in self.coefficients.iter().enumerate() {
            let w = row[i].norm_sqr();
            if w > best.1 {
                best = (n, w);
            }
        }
        Ok(best)
    }
}

fn residual(h: &HermitianMatrix, x: &[Complex64], lambda: f64) -> f64 {
    let hx = h.mul_vec(x);
    sqrt(hx.iter().zip(x).map(|(a, b)| (a - b * lambda).norm_sqr()).sum())
}

fn cluster_flags(values: &[f64]) -> Vec<bool> {
    let n = values.len();
    (0..n)
        .map(|i| {
            (i > 0 && values[i] - values[i - 1] < CLUSTER_GAP)
                || (i + 1 < n && values[i + 1] - values[i] < CLUSTER_GAP)
        })
        .collect()
}

/// Diagonalizes `h` (assembled relative to `origin`) and certifies each
/// eigenpair: unit norm to 1e-10 and residual `≤ 1e-8 (1 + |Λ|)`.
pub fn diagonalize(
    h: &HermitianMatrix,
    basis: &PlanewaveBasis,
    t: &[f64],
    l: u32,
    origin: f64,
) -> Result<BlochSpectrum> {
    let eig = eigh(h)?;
    let mut residuals = Vec::with_capacity(eig.values.len());
    for (lambda, x) in eig.values.iter().zip(&eig.vectors) {
        let norm = sqrt(x.iter().map(|z| z.norm_sqr()).sum());
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::ConvergenceFailure(alloc::format!("eigenvector norm {norm}")));
        }
        let r = residual(h, x, *lambda);
        let absolute = origin + lambda;
        if r > RESIDUAL_TOL * (1.0 + absolute.abs()) {
            return Err(Error::ConvergenceFailure(alloc::format!("residual {r:e} at eigenvalue {absolute}")));
        }
        residuals.push(r);
    }
    let clustered = cluster_flags(&eig.values);
    Ok(BlochSpectrum {
        t: t.to_vec(),
        l,
        origin,
        offsets: eig.values,
        coefficients: eig.vectors,
        residuals,
        clustered,
        basis: basis.clone(),
        polished: None,
    })
}

/// Refines the eigenpair `n` by Newton iteration on the Schur complement
/// with respect to basis position `p`:
/// `f(λ) = λ - H_pp - h^*(λ - H_QQ)^{-1} h`, `f'(λ) = 1 + |(λ - H_QQ)^{-1} h|²`.
///
/// Returns the refined eigenvalue and eigenvector. Fails when `λ` hits the
/// spectrum of `H_QQ` (the state has no weight on `p`).
pub fn schur_polish(h: &HermitianMatrix, p: usize, start: f64) -> Result<(f64, Vec<Complex64>)> {
    let n = h.dim();
    if n == 1 {
        return Ok((h.get(0, 0).re, vec![Complex64::new(1.0, 0.0)]));
    }
    let others: Vec<usize> = (0..n).filter(|&i| i != p).collect();
    let m = others.len();
    let coupling: Vec<Complex64> = others.iter().map(|&i| h.get(i, p)).collect();
    let hpp = h.get(p, p).re;
    let mut lambda = start;
    let mut x = Vec::new();
    for _ in 0..12 {
        let mut a = vec![Complex64::new(0.0, 0.0); m * m];
        for (r, &i) in others.iter().enumerate() {
            for (c, &j) in others.iter().enumerate() {
                a[r * m + c] = -h.get(i, j);
            }
            a[r * m + r] += lambda;
        }
        x = solve_complex(m, a, coupling.clone())?;
        let hx: Complex64 = coupling.iter().zip(&x).map(|(c, v)| c.conj() * v).sum();
        let f = lambda - hpp - hx.re;
        let slope = 1.0 + x.iter().map(|v| v.norm_sqr()).sum::<f64>();
        let step = f / slope;
        lambda -= step;
        if step.abs() <= 1e-16 * (lambda.abs() + 1e-300) || step == 0.0 {
            break;
        }
    }
    // final eigenvector from the converged λ
    let mut vec_full = vec![Complex64::new(0.0, 0.0); n];
    vec_full[p] = Complex64::new(1.0, 0.0);
    for (r, &i) in others.iter().enumerate() {
        vec_full[i] = x[r];
    }
    let norm = sqrt(vec_full.iter().map(|z| z.norm_sqr()).sum());
    for z in vec_full.iter_mut() {
        *z /= norm;
    }
    Ok((lambda, vec_full))
}

/// Options for [`bloch_solve`].
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Re-solve with a 1.5x window and require eigenvalue agreement.
    pub refine: bool,
    /// Eigenvalues with `|Λ - |target+t|^{2l}|` below this are checked by
    /// the refinement certificate.
    pub match_halfwidth: f64,
    /// Polish the eigenpair dominated by the target plane wave.
    pub polish: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { refine: true, match_halfwidth: 1.0, polish: true }
    }
}

fn solve_window(
    lattice: &LatticeModel,
    l: u32,
    q: &FourierPotential,
    t: &[f64],
    center: &[f64],
    radius: f64,
    target: &[i64],
    polish: bool,
) -> Result<BlochSpectrum> {
    let basis = PlanewaveBasis::window(lattice, t, center, radius);
    let p = basis.position(target).ok_or_else(|| Error::IndexOutsideWindow { index: target.to_vec() })?;
    let reference = crate::float::add(&lattice.embed(target), t);
    let origin = powi(crate::float::norm_sqr(&reference), l);
    let h = assemble_shifted(l, q, t, &basis, Some(&reference));
    let mut spec = diagonalize(&h, &basis, t, l, origin)?;
    if polish && !q.is_zero() {
        let (n, weight) = spec.dominant(target)?;
        if weight > 0.0 {
            if let Ok((lambda, x)) = schur_polish(&h, p, spec.offsets[n]) {
                let r = residual(&h, &x, lambda);
                // accept only a refinement of the same eigenpair
                let others_ok = (n == 0 || spec.offsets[n - 1] < lambda)
                    && (n + 1 == spec.len() || lambda < spec.offsets[n + 1]);
                if others_ok && r <= spec.residuals[n].max(1e-300) * 10.0 + 1e-14 {
                    spec.offsets[n] = lambda;
                    spec.coefficients[n] = x;
                    spec.residuals[n] = r;
                    spec.polished = Some(n);
                }
            }
        }
    }
    Ok(spec)
}

/// Windowed ground truth near the plane wave `target + t`.
///
/// The basis is `{γ : |γ + t - center| ≤ radius}` and must contain `target`.
/// With `options.refine`, every eigenvalue within `match_halfwidth` of the
/// target energy that carries weight on the target (at least
/// [`CERTIFY_WEIGHT`], or the dominant one) must reappear within
/// `1e-9 (1 + |Λ|)` in a 1.5x window.
pub fn bloch_solve(
    lattice: &LatticeModel,
    l: u32,
    q: &FourierPotential,
    t: &QuasiMomentum,
    center: &[f64],
    radius: f64,
    target: &[i64],
    options: SolveOptions,
) -> Result<BlochSpectrum> {
    let tv = t.as_slice();
    let coarse = solve_window(lattice, l, q, tv, center, radius, target, options.polish)?;
    if options.refine {
        let fine = solve_window(lattice, l, q, tv, center, 1.5 * radius, target, options.polish)?;
        let (dominant, _) = coarse.dominant(target)?;
        for (n, &offset) in coarse.offsets.iter().enumerate() {
            let relevant = n == dominant || coarse.weight(n, target) >= CERTIFY_WEIGHT;
            if offset.abs() >= options.match_halfwidth || !relevant {
                continue;
            }
            let nearest = fine
                .offsets
                .iter()
                .map(|f| (f - offset).abs())
                .fold(f64::INFINITY, f64::min);
            let value = coarse.eigenvalue(n);
            if nearest > REFINE_TOL * (1.0 + value.abs()) {
                return Err(Error::WindowNotConverged { value, shift: nearest });
            }
        }
    }
    Ok(coarse)
}

/// Ascending eigenvalues of `L_t` in `basis` (no eigenvectors).
pub fn band_energies(l: u32, q: &FourierPotential, t: &[f64], basis: &PlanewaveBasis) -> Result<Vec<f64>> {
    eigvalsh(&assemble(l, q, t, basis))
}
