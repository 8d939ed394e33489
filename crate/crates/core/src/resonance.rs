//! Resonance classification of quasimomenta.
//!
//! `V_b(T) = {x : ||x|^{2l} - |x+b|^{2l}| < T}` restricted to the shell
//! `ρ/2 < |x| < 3ρ/2`. A point is at level `k` when `k` linearly independent
//! pool directions `b` have `x ∈ V_b(ρ^{α_k})`; level 0 is the
//! non-resonance domain.

use alloc::vec::Vec;

use crate::cascade::ParameterCascade;
use crate::error::{Error, Result};
use crate::float::{add, dot, energy_diff, norm, powf, scale, sqrt, sub};
use crate::lattice::{LatticeModel, LatticeVector};
use crate::linalg::integer_rank;

/// `(member, margin)` for `x ∈ V_b(threshold)`; `margin` is
/// `||x|^{2l} - |x+b|^{2l}| - threshold`. Shell membership uses the open
/// interval `(inner, outer)`.
pub fn in_v(x: &[f64], b: &LatticeVector, l: u32, threshold: f64, shell: (f64, f64)) -> (bool, f64) {
    let margin = energy_diff(x, &add(x, &b.embedding), l).abs() - threshold;
    let r = norm(x);
    (margin < 0.0 && r > shell.0 && r < shell.1, margin)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    NonResonant,
    Resonant { level: usize, directions: Vec<LatticeVector> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceClass {
    pub verdict: Verdict,
    /// Non-resonant: smallest level-1 margin over the pool (positive).
    /// Resonant: margin of each witness direction (negative).
    pub margins: Vec<f64>,
}

impl ResonanceClass {
    pub fn level(&self) -> usize {
        match &self.verdict {
            Verdict::NonResonant => 0,
            Verdict::Resonant { level, .. } => *level,
        }
    }

    pub fn is_resonant(&self) -> bool {
        self.level() > 0
    }

    pub fn directions(&self) -> &[LatticeVector] {
        match &self.verdict {
            Verdict::NonResonant => &[],
            Verdict::Resonant { directions, .. } => directions,
        }
    }
}

/// First nonzero coordinate made positive.
fn canonical_sign(coords: &[i64]) -> Vec<i64> {
    let flip = coords.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0);
    coords.iter().map(|&c| if flip { -c } else { c }).collect()
}

/// Classifier with a precomputed direction pool `Γ(pρ^α)`.
#[derive(Debug, Clone)]
pub struct Classifier<'a> {
    lattice: &'a LatticeModel,
    cascade: &'a ParameterCascade,
    pool: Vec<LatticeVector>,
}

impl<'a> Classifier<'a> {
    pub fn new(lattice: &'a LatticeModel, cascade: &'a ParameterCascade) -> Self {
        let pool = lattice.enumerate_ball(cascade.pool_radius(), true);
        Self { lattice, cascade, pool }
    }

    pub fn pool(&self) -> &[LatticeVector] {
        &self.pool
    }

    pub fn shell(&self) -> (f64, f64) {
        (self.cascade.rho / 2.0, 1.5 * self.cascade.rho)
    }

    fn check_shell(&self, x: &[f64]) -> Result<()> {
        let (inner, outer) = self.shell();
        let r = norm(x);
        if !(r > inner && r < outer) {
            return Err(Error::ShellViolation { norm: r, inner, outer });
        }
        Ok(())
    }

    /// `|x|^{2l} - |x+b|^{2l}` for every pool direction.
    fn gaps(&self, x: &[f64]) -> Vec<f64> {
        let l = self.cascade.l;
        self.pool.iter().map(|b| energy_diff(x, &add(x, &b.embedding), l)).collect()
    }

    /// Greedy lexicographic independent set among canonical directions with
    /// `|gap| < threshold`; returns `(directions, margins)`.
    fn witnesses(&self, gaps: &[f64], threshold: f64) -> (Vec<LatticeVector>, Vec<f64>) {
        let mut cand: Vec<(Vec<i64>, f64)> = Vec::new();
        for (b, g) in self.pool.iter().zip(gaps) {
            let margin = g.abs() - threshold;
            if margin < 0.0 {
                let c = canonical_sign(&b.coords);
                match cand.iter_mut().find(|e| e.0 == c) {
                    Some(e) => e.1 = e.1.min(margin),
                    None => cand.push((c, margin)),
                }
            }
        }
        cand.sort_by(|a, b| a.0.cmp(&b.0));
        let mut chosen: Vec<Vec<i64>> = Vec::new();
        let mut margins = Vec::new();
        for (c, m) in cand {
            if chosen.len() == self.lattice.dim() {
                break;
            }
            chosen.push(c);
            if integer_rank(&chosen) < chosen.len() {
                chosen.pop();
            } else {
                margins.push(m);
            }
        }
        (chosen.iter().map(|c| self.lattice.vector(c)).collect(), margins)
    }

    /// Number of independent pool directions with `x ∈ V_b(threshold)`.
    pub fn resonance_rank(&self, x: &[f64], threshold: f64) -> usize {
        self.witnesses(&self.gaps(x), threshold).0.len()
    }

    /// Largest `k` with `x ∈ E_k` (threshold `ρ^{α_k}`); 0 means non-resonant.
    /// A point in `E_d` is reported as [`Error::FullRankResonance`].
    pub fn classify(&self, x: &[f64]) -> Result<ResonanceClass> {
        self.check_shell(x)?;
        let d = self.lattice.dim();
        let gaps = self.gaps(x);
        for k in (1..=d).rev() {
            let (dirs, margins) = self.witnesses(&gaps, self.cascade.threshold(k));
            if dirs.len() >= k {
                if k == d {
                    return Err(Error::FullRankResonance { level: d });
                }
                let directions: Vec<LatticeVector> = dirs.into_iter().take(k).collect();
                let margins = margins.into_iter().take(k).collect();
                return Ok(ResonanceClass { verdict: Verdict::Resonant { level: k, directions }, margins });
            }
        }
        let t1 = self.cascade.threshold(1);
        let min_margin = gaps.iter().map(|g| g.abs() - t1).fold(f64::INFINITY, f64::min);
        Ok(ResonanceClass { verdict: Verdict::NonResonant, margins: alloc::vec![min_margin] })
    }
}

/// One-off classification (builds the pool each call).
pub fn classify(x: &[f64], lattice: &LatticeModel, cascade: &ParameterCascade) -> Result<ResonanceClass> {
    Classifier::new(lattice, cascade).classify(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    /// Coordinates of the projection of `x` onto the span of the directions,
    /// in the Gram–Schmidt orthonormal frame of the directions (in order).
    pub components: Vec<f64>,
    /// `c · ρ^{α_k + (k-1)α}`.
    pub bound: f64,
    pub within: bool,
}

/// Projection of `x` onto the span of `directions`, compared with
/// `c·ρ^{α_k + (k-1)α}` for `k = directions.len()`.
pub fn projection_bound(x: &[f64], directions: &[LatticeVector], cascade: &ParameterCascade) -> Result<ProjectionReport> {
    if directions.is_empty() {
        return Err(Error::EmptyDirections);
    }
    let mut frame: Vec<Vec<f64>> = Vec::new();
    for b in directions {
        let mut u = b.embedding.clone();
        for e in &frame {
            u = sub(&u, &scale(e, dot(&u, e)));
        }
        let n = norm(&u);
        if n <= 1e-12 * norm(&b.embedding) {
            return Err(Error::DependentDirections);
        }
        frame.push(scale(&u, 1.0 / n));
    }
    let components: Vec<f64> = frame.iter().map(|e| dot(x, e)).collect();
    let k = directions.len();
    let exponent = cascade.effective_level(k) + (k as f64 - 1.0) * cascade.effective_alpha();
    let bound = cascade.constants[0] * powf(cascade.rho, exponent);
    let within = components.iter().all(|c| c.abs() <= bound);
    Ok(ProjectionReport { components, bound, within })
}

/// Euclidean distance from `x` to the bisector plane `|y| = |y + b|`.
pub fn plane_distance(x: &[f64], b: &LatticeVector) -> f64 {
    let bb = dot(&b.embedding, &b.embedding);
    (2.0 * dot(x, &b.embedding) + bb).abs() / (2.0 * sqrt(bb))
}
