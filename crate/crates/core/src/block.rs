//! Resonance blocks: the plane waves strongly coupled to a resonant `v`.
//!
//! For directions `γ_1..γ_k` the inner set is
//! `B = {b = Σ n_i γ_i : |b| < r_b}` and the block indices are the distinct
//! offsets `b + a` with `|a| < r_a`. The block matrix has diagonal
//! `|h_i + t|^{2l}` and couplings `q_{h_i - h_j}`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::cascade::ParameterCascade;
use crate::error::{Error, Result};
use crate::float::{add, energy_diff, floor, norm_sqr, powi, sqrt};
use crate::lattice::{LatticeModel, LatticeVector};
use crate::linalg::{eigvalsh, integer_rank, real_inverse, HermitianMatrix};
use crate::planewave::BlochSpectrum;
use crate::potential::FourierPotential;

#[derive(Debug, Clone)]
pub struct ResonantIndexSet {
    /// Lattice index of the centre: `v = gamma + t`.
    pub gamma: LatticeVector,
    pub t: Vec<f64>,
    pub directions: Vec<LatticeVector>,
    /// Inner combinations `b`, sorted by `(|b|², coords)`.
    pub inner: Vec<LatticeVector>,
    /// Distinct offsets `b + a`, sorted by `(|offset|², coords)`; the first
    /// is always zero.
    pub offsets: Vec<LatticeVector>,
}

impl ResonantIndexSet {
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn center(&self) -> Vec<f64> {
        add(&self.gamma.embedding, &self.t)
    }

    /// Absolute lattice indices `gamma + offset`.
    pub fn indices(&self) -> Vec<Vec<i64>> {
        self.offsets
            .iter()
            .map(|o| o.coords.iter().zip(&self.gamma.coords).map(|(a, b)| a + b).collect())
            .collect()
    }

    pub fn contains_offset(&self, coords: &[i64]) -> bool {
        self.offsets.iter().any(|o| o.coords == coords)
    }
}

/// Integer combinations `Σ n_i γ_i` with `|Σ n_i γ_i| < radius`.
fn inner_combinations(lattice: &LatticeModel, directions: &[LatticeVector], radius: f64) -> Vec<LatticeVector> {
    let k = directions.len();
    let mut gram = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            gram[i * k + j] = crate::float::dot(&directions[i].embedding, &directions[j].embedding);
        }
    }
    let (_, inv) = real_inverse(k, &gram);
    let inv = inv.unwrap_or_else(|| vec![0.0; k * k]);
    // |n_i| ≤ radius · sqrt((G⁻¹)_ii)
    let bounds: Vec<i64> = (0..k).map(|i| floor(radius * sqrt(inv[i * k + i].max(0.0)) + 1e-9) as i64).collect();
    let d = lattice.dim();
    let mut out = Vec::new();
    let mut n: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        let mut coords = vec![0i64; d];
        for (ni, g) in n.iter().zip(directions) {
            for (c, gc) in coords.iter_mut().zip(&g.coords) {
                *c += ni * gc;
            }
        }
        let v = lattice.vector(&coords);
        if sqrt(v.norm_sqr()) < radius {
            out.push(v);
        }
        let mut i = 0;
        loop {
            if i == k {
                out.sort_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()).then_with(|| a.coords.cmp(&b.coords)));
                out.dedup_by(|a, b| a.coords == b.coords);
                return out;
            }
            n[i] += 1;
            if n[i] <= bounds[i] {
                break;
            }
            n[i] = -bounds[i];
            i += 1;
        }
    }
}

/// Builds the index set with explicit radii `r_b` (inner) and `r_a`
/// (translations).
pub fn build_index_set_with_radii(
    lattice: &LatticeModel,
    gamma: &[i64],
    t: &[f64],
    directions: &[LatticeVector],
    b_radius: f64,
    a_radius: f64,
) -> Result<ResonantIndexSet> {
    if directions.is_empty() {
        return Err(Error::EmptyDirections);
    }
    let rows: Vec<Vec<i64>> = directions.iter().map(|d| d.coords.clone()).collect();
    if integer_rank(&rows) < directions.len() {
        return Err(Error::DependentDirections);
    }
    let inner = inner_combinations(lattice, directions, b_radius);
    let ball = lattice.enumerate_ball(a_radius, false);
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut offsets = Vec::new();
    let mut base: Vec<&LatticeVector> = inner.iter().collect();
    if base.is_empty() {
        return Err(Error::InvalidArgument("inner radius excludes the origin".into()));
    }
    base.sort_by(|a, b| a.coords.cmp(&b.coords));
    for b in &base {
        for a in &ball {
            let c: Vec<i64> = b.coords.iter().zip(&a.coords).map(|(x, y)| x + y).collect();
            if seen.insert(c.clone()) {
                offsets.push(lattice.vector(&c));
            }
        }
    }
    if !seen.contains(&vec![0i64; lattice.dim()]) {
        return Err(Error::InvalidArgument("block radii exclude the centre".into()));
    }
    offsets.sort_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()).then_with(|| a.coords.cmp(&b.coords)));
    Ok(ResonantIndexSet {
        gamma: lattice.vector(gamma),
        t: t.to_vec(),
        directions: directions.to_vec(),
        inner,
        offsets,
    })
}

/// Index set with the cascade radii `ρ^{α_{k+1}/2}/2` and `p₁ρ^α`.
pub fn build_index_set(
    lattice: &LatticeModel,
    gamma: &[i64],
    t: &[f64],
    directions: &[LatticeVector],
    cascade: &ParameterCascade,
) -> Result<ResonantIndexSet> {
    let k = directions.len();
    if k == 0 {
        return Err(Error::EmptyDirections);
    }
    build_index_set_with_radii(lattice, gamma, t, directions, cascade.block_b_radius(k), cascade.block_a_radius())
}

/// Block matrix and its eigenvalues, stored relative to `origin = |v|^{2l}`.
#[derive(Debug, Clone)]
pub struct ResonantBlock {
    pub matrix: HermitianMatrix,
    pub origin: f64,
    /// Ascending `λ_j - origin`.
    pub offsets: Vec<f64>,
}

impl ResonantBlock {
    pub fn eigenvalue(&self, j: usize) -> f64 {
        self.origin + self.offsets[j]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.offsets.iter().map(|o| self.origin + o).collect()
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Every eigenvalue lies within the largest off-diagonal row sum of the
    /// diagonal range.
    pub fn gershgorin_holds(&self) -> bool {
        let n = self.matrix.dim();
        let mut radius: f64 = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let row = self.matrix.row(i);
            let r: f64 = row.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, z)| z.norm()).sum();
            radius = radius.max(r);
            lo = lo.min(row[i].re);
            hi = hi.max(row[i].re);
        }
        let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        self.offsets.iter().all(|&x| x >= lo - radius - slack && x <= hi + radius + slack)
    }
}

/// Entries per definition: `c_ii = |h_i+t|^{2l}`, `c_ij = q_{h_i - h_j}`.
pub fn assemble_block(set: &ResonantIndexSet, l: u32, q: &FourierPotential) -> Result<ResonantBlock> {
    let n = set.len();
    let v = set.center();
    let origin = powi(norm_sqr(&v), l);
    let mut m = HermitianMatrix::zeros(n);
    for (i, oi) in set.offsets.iter().enumerate() {
        let hi = add(&v, &oi.embedding);
        m.set(i, i, Complex64::new(energy_diff(&hi, &v, l), 0.0));
        for (j, oj) in set.offsets.iter().enumerate().skip(i + 1) {
            let diff: Vec<i64> = oi.coords.iter().zip(&oj.coords).map(|(a, b)| a - b).collect();
            let c = q.coefficient(&diff);
            if c != Complex64::new(0.0, 0.0) {
                m.set(i, j, c);
            }
        }
    }
    let offsets = eigvalsh(&m)?;
    Ok(ResonantBlock { matrix: m, origin, offsets })
}

/// Eigenpair of `spectrum` with the largest summed weight `Σ_i |b(N, h_i)|²`
/// over the block indices.
pub fn dominant_over_set(spectrum: &BlochSpectrum, set: &ResonantIndexSet) -> (usize, f64) {
    let positions: Vec<usize> = set.indices().iter().filter_map(|c| spectrum.basis.position(c)).collect();
    let mut best = (0, -1.0);
    for (n, row) in spectrum.coefficients.iter().enumerate() {
        let w: f64 = positions.iter().map(|&p| row[p].norm_sqr()).sum();
        if w > best.1 {
            best = (n, w);
        }
    }
    best
}

/// `j` minimizing `|Λ_N - λ_j|` and the signed deviation `Λ_N - λ_j`.
pub fn match_resonant(spectrum: &BlochSpectrum, block: &ResonantBlock, n: usize) -> (usize, f64) {
    let shift = spectrum.origin - block.origin;
    let target = spectrum.offsets[n] + shift;
    let mut best = (0, f64::INFINITY);
    for (j, &mu) in block.offsets.iter().enumerate() {
        let dev = target - mu;
        if dev.abs() < best.1.abs() {
            best = (j, dev);
        }
    }
    best
}

/// Energy separation of plane waves one hop outside the block.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    pub checked: usize,
    pub violations: usize,
    pub min_gap: f64,
    pub bound: f64,
}

/// For every block offset `h` and support vector `s` with `h - s` outside
/// the block, compares `||v|^{2l} - |v + h - s|^{2l}|` with `bound`.
/// Violations are diagnostics, not errors.
pub fn exit_separation(set: &ResonantIndexSet, l: u32, q: &FourierPotential, lattice: &LatticeModel, bound: f64) -> SeparationReport {
    let v = set.center();
    let members: BTreeSet<Vec<i64>> = set.offsets.iter().map(|o| o.coords.clone()).collect();
    let mut checked = 0;
    let mut violations = 0;
    let mut min_gap = f64::INFINITY;
    let mut visited: BTreeSet<Vec<i64>> = BTreeSet::new();
    for h in &set.offsets {
        for (s, _) in q.entries() {
            let c: Vec<i64> = h.coords.iter().zip(&s.coords).map(|(a, b)| a - b).collect();
            if members.contains(&c) || !visited.insert(c.clone()) {
                continue;
            }
            let w = add(&v, &lattice.embed(&c));
            let gap = energy_diff(&v, &w, l).abs();
            checked += 1;
            min_gap = min_gap.min(gap);
            if gap <= bound {
                violations += 1;
            }
        }
    }
    SeparationReport { checked, violations, min_gap, bound }
}
