//! Iterated non-resonant expansion.
//!
//! For a plane wave `v = γ + t` and trial energy `a`,
//!
//! `S_k(a, v) = Σ q_{γ_1}…q_{γ_k} q_{-(γ_1+…+γ_k)} / Π_{j=1..k} (a - |v - γ_1 - … - γ_j|^{2l})`
//!
//! over tuples from the potential support whose partial sums are all nonzero.
//! `A_s = S_1 + … + S_s`, and the corrections iterate as `F_0 = 0`,
//! `F_s = A_s(|v|^{2l} + F_{s-1})`.
//!
//! Energies are carried as offsets from `|v|^{2l}` so that denominators are
//! exact differences rather than differences of large numbers.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::cascade::{ParameterCascade, MAX_SERIES_ORDER};
use crate::error::{Error, Result};
use crate::float::{add, energy_diff, ln, norm_sqr, powi, sqrt, sub};
use crate::lattice::{LatticeModel, QuasiMomentum};
use crate::planewave::{bloch_solve, BlochSpectrum, SolveOptions};
use crate::potential::FourierPotential;

/// Denominators with `|den| ≤ SINGULAR_REL·(1 + |v|^{2l})` count as zero.
pub const SINGULAR_REL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, Default)]
pub struct SeriesOptions {
    /// Drop tuples with a vanishing denominator instead of failing.
    pub skip_singular: bool,
    /// Restrict the pool to support vectors with `|γ| < radius`.
    pub pool_radius: Option<f64>,
}

/// `S_1..S_k` at one trial energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesEvaluation {
    pub v: Vec<f64>,
    pub l: u32,
    /// Trial energy relative to `|v|^{2l}`.
    pub shift: f64,
    /// `values[j-1] = S_j`.
    pub values: Vec<f64>,
    /// Imaginary parts discarded from `S_j` (zero for Hermitian `q` up to roundoff).
    pub imag: Vec<f64>,
    /// Admissible tuples with nonzero numerator, per order.
    pub term_counts: Vec<usize>,
    /// Smallest `|a - |v - Σγ|^{2l}|` encountered.
    pub floor: f64,
    /// Tuples dropped because of a vanishing denominator.
    pub skipped: usize,
}

impl SeriesEvaluation {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `A_k = S_1 + … + S_k`.
    pub fn partial_sum(&self, k: usize) -> f64 {
        self.values[..k].iter().sum()
    }

    /// `(Σ|q_γ|)^{k+1} / floor^k`, an a-priori bound on `|S_k|`.
    pub fn magnitude_bound(&self, q: &FourierPotential, k: usize) -> f64 {
        let c = q.l1_norm();
        powi(c, k as u32 + 1) / powi(self.floor, k as u32)
    }
}

struct Walker<'a> {
    v: &'a [f64],
    l: u32,
    q: &'a FourierPotential,
    pool: Vec<(Vec<i64>, Vec<f64>, Complex64)>,
    reach: f64,
    shift: f64,
    singular: f64,
    skip_singular: bool,
    k: usize,
    sums: Vec<Complex64>,
    counts: Vec<usize>,
    floor: f64,
    skipped: usize,
    error: Option<Error>,
    path: Vec<Vec<i64>>,
}

impl Walker<'_> {
    fn descend(&mut self, depth: usize, sigma: &[i64], sigma_emb: &[f64], num: Complex64, den: f64) {
        for idx in 0..self.pool.len() {
            if self.error.is_some() {
                return;
            }
            let (coords, emb, qv) = {
                let e = &self.pool[idx];
                (e.0.clone(), e.1.clone(), e.2)
            };
            let s: Vec<i64> = sigma.iter().zip(&coords).map(|(a, b)| a + b).collect();
            if s.iter().all(|&c| c == 0) {
                continue;
            }
            let s_emb = add(sigma_emb, &emb);
            // remaining steps must be able to return to the origin
            let remaining = (self.k - depth) as f64 + 1.0;
            if sqrt(norm_sqr(&s_emb)) > remaining * self.reach + 1e-9 {
                continue;
            }
            let gap = self.shift + energy_diff(self.v, &sub(self.v, &s_emb), self.l);
            self.path.push(coords);
            if gap.abs() <= self.singular {
                if self.skip_singular {
                    self.skipped += 1;
                    self.path.pop();
                    continue;
                }
                self.error = Some(Error::SmallDenominator { tuple: self.path.clone(), value: gap });
                return;
            }
            self.floor = self.floor.min(gap.abs());
            let num_here = num * qv;
            let den_here = den * gap;
            let neg: Vec<i64> = s.iter().map(|c| -c).collect();
            let closing = self.q.coefficient(&neg);
            if closing != Complex64::new(0.0, 0.0) {
                self.sums[depth - 1] += num_here * closing / den_here;
                self.counts[depth - 1] += 1;
            }
            if depth < self.k {
                self.descend(depth + 1, &s, &s_emb, num_here, den_here);
            }
            self.path.pop();
        }
    }
}

/// `S_1..S_k` at trial energy `|v|^{2l} + shift`.
pub fn evaluate_series(
    v: &[f64],
    l: u32,
    q: &FourierPotential,
    k: usize,
    shift: f64,
    options: SeriesOptions,
) -> Result<SeriesEvaluation> {
    if k > MAX_SERIES_ORDER {
        return Err(Error::OrderCapExceeded { requested: k, cap: MAX_SERIES_ORDER });
    }
    if v.len() != q.dim() {
        return Err(Error::DimensionMismatch { expected: q.dim(), got: v.len() });
    }
    let pool: Vec<(Vec<i64>, Vec<f64>, Complex64)> = q
        .entries()
        .iter()
        .filter(|(g, _)| options.pool_radius.is_none_or(|r| sqrt(g.norm_sqr()) < r))
        .map(|(g, c)| (g.coords.clone(), g.embedding.clone(), *c))
        .collect();
    let reach = q.support_radius();
    let base = powi(norm_sqr(v), l);
    let mut w = Walker {
        v,
        l,
        q,
        pool,
        reach,
        shift,
        singular: SINGULAR_REL * (1.0 + base),
        skip_singular: options.skip_singular,
        k,
        sums: vec![Complex64::new(0.0, 0.0); k],
        counts: vec![0; k],
        floor: f64::INFINITY,
        skipped: 0,
        error: None,
        path: Vec::new(),
    };
    if k > 0 && !q.is_zero() {
        let zero = vec![0i64; v.len()];
        let zero_emb = vec![0.0; v.len()];
        w.descend(1, &zero, &zero_emb, Complex64::new(1.0, 0.0), 1.0);
    }
    if let Some(e) = w.error {
        return Err(e);
    }
    let mut values = Vec::with_capacity(k);
    let mut imag = Vec::with_capacity(k);
    for z in &w.sums {
        if z.im.abs() > 1e-12 * z.norm() + 1e-15 {
            return Err(Error::ComplexSeries { real: z.re, imag: z.im });
        }
        values.push(z.re);
        imag.push(z.im);
    }
    Ok(SeriesEvaluation {
        v: v.to_vec(),
        l,
        shift,
        values,
        imag,
        term_counts: w.counts,
        floor: w.floor,
        skipped: w.skipped,
    })
}

/// `S_k(a, v)` for an absolute trial energy `a`.
pub fn s_k(a: f64, v: &[f64], l: u32, q: &FourierPotential, k: usize, pool_radius: Option<f64>) -> Result<f64> {
    if k == 0 {
        return Ok(0.0);
    }
    let shift = a - powi(norm_sqr(v), l);
    let opts = SeriesOptions { pool_radius, ..Default::default() };
    Ok(evaluate_series(v, l, q, k, shift, opts)?.values[k - 1])
}

/// `F_0..F_{k_max}` at `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownPartExpansion {
    pub v: Vec<f64>,
    pub l: u32,
    /// `|v|^{2l}`.
    pub base: f64,
    /// `corrections[s] = F_s`.
    pub corrections: Vec<f64>,
    /// Denominator floor of the evaluation producing `F_s` (`F_0` has none).
    pub floors: Vec<f64>,
    /// Nominal accuracy exponents `3kα` of `P_k`, `k = 1..=k_max+1`.
    pub nominal_exponents: Vec<f64>,
}

impl KnownPartExpansion {
    /// `P_k = |v|^{2l} + F_{k-1}` for `1 ≤ k ≤ k_max + 1`.
    pub fn prediction(&self, k: usize) -> f64 {
        self.base + self.corrections[k - 1]
    }

    pub fn k_max(&self) -> usize {
        self.corrections.len() - 1
    }
}

/// Iterates `F_s = A_s(|v|^{2l} + F_{s-1})` for `s = 1..=k_max` (pure
/// evaluation; the caller is responsible for `v` being non-resonant).
pub fn known_part_corrections(
    v: &[f64],
    l: u32,
    q: &FourierPotential,
    k_max: usize,
    options: SeriesOptions,
) -> Result<KnownPartExpansion> {
    if k_max > MAX_SERIES_ORDER {
        return Err(Error::OrderCapExceeded { requested: k_max, cap: MAX_SERIES_ORDER });
    }
    let mut corrections = vec![0.0];
    let mut floors = vec![f64::INFINITY];
    for s in 1..=k_max {
        let ev = evaluate_series(v, l, q, s, corrections[s - 1], options)?;
        corrections.push(ev.partial_sum(s));
        floors.push(ev.floor);
    }
    Ok(KnownPartExpansion {
        v: v.to_vec(),
        l,
        base: powi(norm_sqr(v), l),
        corrections,
        floors,
        nominal_exponents: Vec::new(),
    })
}

/// [`known_part_corrections`] with `k_max ≤ min(k₁, cap)` enforced and the
/// nominal exponents filled in from the cascade.
pub fn known_part_sequence(
    v: &[f64],
    l: u32,
    q: &FourierPotential,
    cascade: &ParameterCascade,
    k_max: usize,
) -> Result<KnownPartExpansion> {
    let cap = cascade.k1.min(MAX_SERIES_ORDER);
    if k_max > cap {
        return Err(Error::OrderCapExceeded { requested: k_max, cap });
    }
    let mut exp = known_part_corrections(v, l, q, k_max, SeriesOptions::default())?;
    let a = cascade.effective_alpha();
    exp.nominal_exponents = (1..=k_max + 1).map(|k| 3.0 * k as f64 * a).collect();
    Ok(exp)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenMatch {
    pub n: usize,
    /// `Λ_N - prediction`.
    pub residual: f64,
    /// `|b(N, γ)|²`.
    pub weight: f64,
}

/// Eigenpair with the largest weight on `gamma` among those with
/// `|Λ_N - prediction| < halfwidth`; `prediction_offset` is measured from
/// `spectrum.origin`.
pub fn match_eigenvalue(
    spectrum: &BlochSpectrum,
    prediction_offset: f64,
    gamma: &[i64],
    halfwidth: f64,
) -> Result<EigenMatch> {
    let i = spectrum
        .basis
        .position(gamma)
        .ok_or_else(|| Error::IndexOutsideWindow { index: gamma.to_vec() })?;
    let mut best: Option<EigenMatch> = None;
    for (n, &off) in spectrum.offsets.iter().enumerate() {
        let residual = off - prediction_offset;
        if residual.abs() >= halfwidth {
            continue;
        }
        let weight = spectrum.coefficients[n][i].norm_sqr();
        if best.is_none_or(|b| weight > b.weight) {
            best = Some(EigenMatch { n, residual, weight });
        }
    }
    best.ok_or(Error::NoCandidate { prediction: spectrum.origin + prediction_offset, halfwidth })
}

/// Least-squares slope of `ln y` against `ln x`; `None` if any `y ≤ 0` or
/// fewer than two points.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() || ys.iter().any(|&y| !(y > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|&x| ln(x)).collect();
    let ly: Vec<f64> = ys.iter().map(|&y| ln(y)).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub rho: f64,
    /// Number of iterations `s`; the approximation is `|v|^{2l} + F_s`.
    pub iterations: usize,
    pub error: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// `(s, slope)` from a log-log fit of error against `ρ`.
    pub slopes: Vec<(usize, Option<f64>)>,
}

impl SweepTable {
    pub fn errors(&self, iterations: usize) -> Vec<f64> {
        self.rows.iter().filter(|r| r.iterations == iterations).map(|r| r.error).collect()
    }

    pub fn slope(&self, iterations: usize) -> Option<f64> {
        self.slopes.iter().find(|s| s.0 == iterations).and_then(|s| s.1)
    }
}

/// Oracle window used by [`order_sweep`].
#[derive(Debug, Clone, Copy)]
pub struct SweepOracle {
    pub window_radius: f64,
    pub refine: bool,
    pub match_halfwidth: f64,
}

/// Errors `|Λ_N - |v|^{2l} - F_s|` along a family of centres, for each
/// iteration count in `iterations`, plus log-log slopes against `|v|`.
pub fn order_sweep(
    lattice: &LatticeModel,
    centers: &[Vec<f64>],
    l: u32,
    q: &FourierPotential,
    iterations: &[usize],
    oracle: SweepOracle,
) -> Result<SweepTable> {
    let s_max = iterations.iter().copied().max().unwrap_or(0);
    let mut rows = Vec::new();
    for c in centers {
        let (gamma, t) = lattice.reduce(c)?;
        let v = add(&gamma.embedding, t.as_slice());
        let rho = sqrt(norm_sqr(&v));
        let exp = known_part_corrections(&v, l, q, s_max, SeriesOptions::default())?;
        let opts = SolveOptions { refine: oracle.refine, match_halfwidth: oracle.match_halfwidth, polish: true };
        let spec = bloch_solve(lattice, l, q, &QuasiMomentum::new(t.reduced.clone()), &v, oracle.window_radius, &gamma.coords, opts)?;
        let m = match_eigenvalue(&spec, 0.0, &gamma.coords, oracle.match_halfwidth)?;
        for &s in iterations {
            let err = (spec.offsets[m.n] - exp.corrections[s]).abs();
            rows.push(SweepRow { rho, iterations: s, error: err, weight: m.weight });
        }
    }
    let slopes = iterations
        .iter()
        .map(|&s| {
            let pts: Vec<&SweepRow> = rows.iter().filter(|r| r.iterations == s).collect();
            let xs: Vec<f64> = pts.iter().map(|r| r.rho).collect();
            let ys: Vec<f64> = pts.iter().map(|r| r.error).collect();
            (s, loglog_slope(&xs, &ys))
        })
        .collect();
    Ok(SweepTable { rows, slopes })
}
