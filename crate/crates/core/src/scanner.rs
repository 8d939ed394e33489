//! Band functions on quasimomentum grids, spectral gaps, and Monte-Carlo
//! estimates of the resonance-class fractions on spheres.
//!
//! Grid points are `t = Σ_k (i_k / n_k) γ_k` for `0 ≤ i_k < n_k`, i.e. a
//! uniform grid over the dual cell spanned by the dual basis.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::cascade::ParameterCascade;
use crate::error::{Error, Result};
use crate::float::{norm, powf, scale, sqrt, sub};
use crate::lattice::LatticeModel;
use crate::planewave::{band_energies, PlanewaveBasis, REFINE_TOL};
use crate::potential::FourierPotential;
use crate::resonance::Classifier;

/// Uniform grid over the dual cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub counts: Vec<usize>,
}

impl GridSpec {
    pub fn uniform(d: usize, n: usize) -> Self {
        Self { counts: vec![n; d] }
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Each axis count doubled.
    pub fn doubled(&self) -> Self {
        Self { counts: self.counts.iter().map(|n| 2 * n).collect() }
    }

    /// Integer grid index of point `i` (first axis fastest).
    pub fn index(&self, mut i: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.counts.len());
        for &n in &self.counts {
            out.push(i % n);
            i /= n;
        }
        out
    }

    pub fn point(&self, lattice: &LatticeModel, i: usize) -> Vec<f64> {
        let idx = self.index(i);
        let mut t = vec![0.0; lattice.dim()];
        for (k, (&j, &n)) in idx.iter().zip(&self.counts).enumerate() {
            let f = j as f64 / n as f64;
            for (x, g) in t.iter_mut().zip(lattice.dual_vector(k)) {
                *x += f * g;
            }
        }
        t
    }

    pub fn points(&self, lattice: &LatticeModel) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(lattice, i)).collect()
    }
}

/// Plane-wave truncation for band computations: `{γ : |γ + t| ≤ radius}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSolver {
    pub l: u32,
    pub n_bands: usize,
    pub radius: f64,
}

impl BandSolver {
    /// Lowest `n_bands` eigenvalues of `L_t`.
    pub fn solve(&self, lattice: &LatticeModel, q: &FourierPotential, t: &[f64]) -> Result<Vec<f64>> {
        let origin = vec![0.0; lattice.dim()];
        let basis = PlanewaveBasis::window(lattice, t, &origin, self.radius);
        if basis.len() < self.n_bands {
            return Err(Error::InvalidArgument(alloc::format!(
                "basis of {} plane waves cannot hold {} bands",
                basis.len(),
                self.n_bands
            )));
        }
        let mut e = band_energies(self.l, q, t, &basis)?;
        e.truncate(self.n_bands);
        Ok(e)
    }

    /// Compares the bands at `t` against a solve with radius `radius + extra`.
    pub fn certify(&self, lattice: &LatticeModel, q: &FourierPotential, t: &[f64], extra: f64) -> Result<()> {
        let coarse = self.solve(lattice, q, t)?;
        let fine = BandSolver { radius: self.radius + extra, ..*self }.solve(lattice, q, t)?;
        for (a, b) in coarse.iter().zip(&fine) {
            let shift = (a - b).abs();
            if shift > REFINE_TOL * (1.0 + a.abs()) {
                return Err(Error::WindowNotConverged { value: *a, shift });
            }
        }
        Ok(())
    }
}

/// Smallest radius whose free truncation holds `n_bands` levels at every
/// `t` in the cell, padded by `margin`.
pub fn band_radius(lattice: &LatticeModel, n_bands: usize, margin: f64) -> f64 {
    // |γ| ≤ r  ⇒  |γ + t| ≤ r + |t|; the cell diameter bounds |t|
    let mut diam = 0.0;
    let d = lattice.dim();
    for corner in 0..(1usize << d) {
        let mut c = vec![0.0; d];
        for k in 0..d {
            if corner >> k & 1 == 1 {
                for (x, g) in c.iter_mut().zip(lattice.dual_vector(k)) {
                    *x += g;
                }
            }
        }
        diam = f64::max(diam, norm(&c));
    }
    let mut r = 1.0;
    while lattice.enumerate_ball(r, false).len() < n_bands {
        r *= 1.25;
    }
    r + diam + margin
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandTable {
    pub grid: GridSpec,
    /// `values[i][n]` is `Λ_{n+1}` at grid point `i`.
    pub values: Vec<Vec<f64>>,
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
    pub refinement: usize,
}

impl BandTable {
    /// Builds the table from per-point ascending band values.
    pub fn from_values(grid: GridSpec, values: Vec<Vec<f64>>, refinement: usize) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: values.len() });
        }
        let n = values.iter().map(Vec::len).min().unwrap_or(0);
        let mut mins = vec![f64::INFINITY; n];
        let mut maxs = vec![f64::NEG_INFINITY; n];
        for row in &values {
            for k in 0..n {
                mins[k] = mins[k].min(row[k]);
                maxs[k] = maxs[k].max(row[k]);
            }
        }
        Ok(Self { grid, values, mins, maxs, refinement })
    }

    pub fn n_bands(&self) -> usize {
        self.mins.len()
    }

    /// `(min, max)` for each band.
    pub fn ranges(&self) -> Vec<(f64, f64)> {
        self.mins.iter().copied().zip(self.maxs.iter().copied()).collect()
    }

    /// Table restricted to the lowest `n` bands.
    pub fn truncated(&self, n: usize) -> Self {
        let values = self.values.iter().map(|r| r[..n.min(r.len())].to_vec()).collect();
        Self::from_values(self.grid.clone(), values, self.refinement).expect("same grid")
    }

    /// Per band, the largest jump between grid neighbours divided by
    /// `step · 2l · ρ^{2l-1}` with `ρ = max(Λ, 1)^{1/(2l)}`.
    pub fn continuity_constants(&self, lattice: &LatticeModel, l: u32) -> Vec<f64> {
        let d = self.grid.counts.len();
        let mut out = vec![0.0f64; self.n_bands()];
        for i in 0..self.grid.len() {
            let idx = self.grid.index(i);
            for k in 0..d {
                let mut j_idx = idx.clone();
                j_idx[k] = (idx[k] + 1) % self.grid.counts[k];
                let j = flat(&self.grid, &j_idx);
                let step = norm(lattice.dual_vector(k)) / self.grid.counts[k] as f64;
                for n in 0..self.n_bands() {
                    let (a, b) = (self.values[i][n], self.values[j][n]);
                    let rho = powf(f64::max(a.abs().max(b.abs()), 1.0), 1.0 / (2.0 * l as f64));
                    let scale = step * 2.0 * l as f64 * powf(rho, 2.0 * l as f64 - 1.0);
                    out[n] = out[n].max((a - b).abs() / scale);
                }
            }
        }
        out
    }
}

fn flat(grid: &GridSpec, idx: &[usize]) -> usize {
    let mut i = 0;
    for (&j, &n) in idx.iter().zip(&grid.counts).rev() {
        i = i * n + j;
    }
    i
}

/// Evaluates the bands at every grid point (sequentially) after certifying
/// the truncation at the cell origin and the cell's far corner.
pub fn band_functions(
    lattice: &LatticeModel,
    q: &FourierPotential,
    solver: &BandSolver,
    grid: &GridSpec,
) -> Result<BandTable> {
    certify_grid(lattice, q, solver)?;
    let values: Result<Vec<Vec<f64>>> = (0..grid.len()).map(|i| solver.solve(lattice, q, &grid.point(lattice, i))).collect();
    BandTable::from_values(grid.clone(), values?, 0)
}

/// Refinement check at `t = 0` and `t = Σ γ_k / 2`.
pub fn certify_grid(lattice: &LatticeModel, q: &FourierPotential, solver: &BandSolver) -> Result<()> {
    let d = lattice.dim();
    let mut half = vec![0.0; d];
    for k in 0..d {
        for (x, g) in half.iter_mut().zip(lattice.dual_vector(k)) {
            *x += 0.5 * g;
        }
    }
    solver.certify(lattice, q, &vec![0.0; d], 2.0)?;
    solver.certify(lattice, q, &half, 2.0)
}

/// Open intervals of `[e_min, e_max]` missed by every range, sorted.
pub fn uncovered_intervals(ranges: &[(f64, f64)], e_min: f64, e_max: f64) -> Vec<(f64, f64)> {
    let mut r: Vec<(f64, f64)> = ranges.to_vec();
    r.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut gaps = Vec::new();
    let mut reach = e_min;
    for (lo, hi) in r {
        if lo > reach && reach < e_max {
            gaps.push((reach, lo.min(e_max)));
        }
        reach = reach.max(hi);
    }
    if reach < e_max {
        gaps.push((reach, e_max));
    }
    gaps
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub gaps: Vec<(f64, f64)>,
    pub e_min: f64,
    pub e_max: f64,
    /// Set once a finer table has been compared.
    pub stable: Option<bool>,
}

/// Gaps of the band union inside `[e_min, e_max]`.
pub fn gap_report(table: &BandTable, e_min: f64, e_max: f64) -> Result<GapReport> {
    let top_min = table.mins.last().copied().unwrap_or(f64::NEG_INFINITY);
    if top_min <= e_max {
        return Err(Error::InsufficientBands { needed: e_max, top_min });
    }
    Ok(GapReport { gaps: uncovered_intervals(&table.ranges(), e_min, e_max), e_min, e_max, stable: None })
}

/// Reports from two grids agree on the gap count and on every endpoint to
/// `rel_tol` relative.
pub fn gaps_agree(a: &GapReport, b: &GapReport, rel_tol: f64) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= rel_tol * x.abs().max(y.abs()).max(1e-300);
    a.gaps.len() == b.gaps.len() && a.gaps.iter().zip(&b.gaps).all(|(g, h)| close(g.0, h.0) && close(g.1, h.1))
}

/// Gap report of the finer table with its stability flag set against the
/// coarser one.
pub fn stable_gap_report(coarse: &BandTable, fine: &BandTable, e_min: f64, e_max: f64, rel_tol: f64) -> Result<GapReport> {
    let a = gap_report(coarse, e_min, e_max)?;
    let mut b = gap_report(fine, e_min, e_max)?;
    b.stable = Some(gaps_agree(&a, &b, rel_tol));
    Ok(b)
}

/// Uniform point on the sphere of radius `rho` by rejection from the cube.
pub fn sphere_point(rng: &mut ChaCha8Rng, d: usize, rho: f64) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..d).map(|_| 2.0 * unit_float(rng) - 1.0).collect();
        let r = norm(&u);
        if r > 1e-6 && r <= 1.0 {
            return scale(&u, rho / r);
        }
    }
}

fn unit_float(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `n` deterministic sphere samples for `seed`.
pub fn sphere_samples(d: usize, rho: f64, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| sphere_point(&mut rng, d, rho)).collect()
}

/// Class of one sample: `0` non-resonant, `k` for `E_k \ E_{k+1}`, `d` for
/// points in `d` independent zones.
pub fn sample_class(classifier: &Classifier<'_>, x: &[f64], d: usize) -> Result<usize> {
    match classifier.classify(x) {
        Ok(c) => Ok(c.level()),
        Err(Error::FullRankResonance { .. }) => Ok(d),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureEstimate {
    pub rho: f64,
    pub samples: usize,
    /// `counts[k]` samples of class `k`.
    pub counts: Vec<usize>,
    pub fractions: Vec<f64>,
    pub std_errors: Vec<f64>,
}

impl MeasureEstimate {
    pub fn from_classes(rho: f64, d: usize, classes: &[usize]) -> Self {
        let mut counts = vec![0usize; d + 1];
        for &c in classes {
            counts[c] += 1;
        }
        let n = classes.len();
        let fractions: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
        let std_errors = fractions.iter().map(|f| sqrt(f * (1.0 - f) / n as f64)).collect();
        Self { rho, samples: n, counts, fractions, std_errors }
    }

    pub fn non_resonant(&self) -> f64 {
        self.fractions[0]
    }

    /// `1 - fraction(U)` from the counts, with its standard error.
    pub fn resonant(&self) -> (f64, f64) {
        let r = (self.samples - self.counts[0]) as f64 / self.samples as f64;
        (r, self.std_errors[0])
    }
}

/// Classifies `n_samples` uniform points on `|x| = ρ` (sequentially).
pub fn measure_fraction(
    lattice: &LatticeModel,
    cascade: &ParameterCascade,
    n_samples: usize,
    seed: u64,
) -> Result<MeasureEstimate> {
    let d = lattice.dim();
    let classifier = Classifier::new(lattice, cascade);
    let classes: Result<Vec<usize>> =
        sphere_samples(d, cascade.rho, n_samples, seed).iter().map(|x| sample_class(&classifier, x, d)).collect();
    Ok(MeasureEstimate::from_classes(cascade.rho, d, &classes?))
}

/// Distance between two quasimomenta, for grid diagnostics.
pub fn grid_distance(a: &[f64], b: &[f64]) -> f64 {
    norm(&sub(a, b))
}
