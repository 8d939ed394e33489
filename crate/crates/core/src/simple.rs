//! Known parts, simplicity tests, Bloch-coefficient checks and isoenergetic
//! sampling for non-resonant plane waves.
//!
//! The known part of `v = γ + t` is `F(v) = |v|^{2l} + F_s(v)` with `s` taken
//! from the cascade. It is kept as the pair `(|v|^{2l}, F_s)` so that
//! differences between nearby known parts do not cancel.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::block::{assemble_block, build_index_set};
use crate::cascade::ParameterCascade;
use crate::error::{Error, Result};
use crate::float::{add, energy_diff, norm, norm_sqr, pow_diff, powf, powi, scale};
use crate::lattice::{Boundary, LatticeModel, LatticeVector};
use crate::planewave::BlochSpectrum;
use crate::potential::FourierPotential;
use crate::resonance::{Classifier, ResonanceClass};
use crate::series::{known_part_corrections, SeriesOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct KnownPart {
    pub v: Vec<f64>,
    pub l: u32,
    /// `|v|^{2l}`.
    pub base: f64,
    /// `F_s(v)`.
    pub correction: f64,
    pub iterations: usize,
}

impl KnownPart {
    pub fn value(&self) -> f64 {
        self.base + self.correction
    }

    /// `F(self) - F(other)` without cancellation.
    pub fn difference(&self, other: &KnownPart) -> f64 {
        energy_diff(&self.v, &other.v, self.l) + (self.correction - other.correction)
    }
}

/// `|v|^{2l} + F_s(v)` for an explicit iteration count `s`.
pub fn known_part_with(v: &[f64], l: u32, q: &FourierPotential, iterations: usize) -> Result<KnownPart> {
    let exp = known_part_corrections(v, l, q, iterations, SeriesOptions::default())?;
    Ok(KnownPart { v: v.to_vec(), l, base: exp.base, correction: exp.corrections[iterations], iterations })
}

/// Known part with the cascade's iteration count.
pub fn known_part(v: &[f64], q: &FourierPotential, cascade: &ParameterCascade) -> Result<KnownPart> {
    known_part_with(v, cascade.l, q, cascade.known_part_index())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KEntry {
    pub gamma: LatticeVector,
    /// `None` when the point lies in `d` independent zones at once.
    pub class: Option<ResonanceClass>,
}

/// `{γ' : |F(v) - |γ'+t|^{2l}| < window}`; a zero window selects exact ties.
pub fn k_set_with_window(
    lattice: &LatticeModel,
    t: &[f64],
    known: &KnownPart,
    window: f64,
    classifier: &Classifier<'_>,
) -> Result<Vec<KEntry>> {
    let l = known.l;
    let top = known.value() + window;
    if top <= 0.0 {
        return Ok(Vec::new());
    }
    let radius = powf(top, 1.0 / (2.0 * l as f64)) * (1.0 + 1e-12) + 1e-12;
    let center: Vec<f64> = t.iter().map(|x| -x).collect();
    let mut out = Vec::new();
    for g in lattice.enumerate_around(&center, radius, Boundary::Closed) {
        let w = add(&g.embedding, t);
        let gap = energy_diff(&w, &known.v, l) - known.correction;
        let inside = if window > 0.0 { gap.abs() < window } else { gap == 0.0 };
        if inside {
            let class = match classifier.classify(&w) {
                Ok(c) => Some(c),
                Err(Error::FullRankResonance { .. }) => None,
                Err(e) => return Err(e),
            };
            out.push(KEntry { gamma: g, class });
        }
    }
    Ok(out)
}

/// K set with window `ρ^{α₁}/3`.
pub fn k_set(
    lattice: &LatticeModel,
    t: &[f64],
    known: &KnownPart,
    cascade: &ParameterCascade,
    classifier: &Classifier<'_>,
) -> Result<Vec<KEntry>> {
    k_set_with_window(lattice, t, known, cascade.threshold(1) / 3.0, classifier)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Known parts of two non-resonant plane waves are `2ε₁` apart.
    KnownPartGap,
    /// The known part is `2ε₁` away from every eigenvalue of a resonance block.
    BlockGap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Competitor {
    pub gamma: Vec<i64>,
    pub level: usize,
    pub condition: Condition,
    /// `min |F(v) - E| - 2ε₁` over the competing energies `E`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplicityReport {
    pub v: Vec<f64>,
    pub known: KnownPart,
    pub k_set: Vec<KEntry>,
    pub competitors: Vec<Competitor>,
    pub eps1: f64,
    pub member: bool,
}

impl SimplicityReport {
    pub fn violators(&self) -> Vec<&Competitor> {
        self.competitors.iter().filter(|c| c.margin < 0.0).collect()
    }
}

/// Tests the simplicity conditions for `v = gamma + t`.
pub fn check_simplicity(
    lattice: &LatticeModel,
    gamma: &[i64],
    t: &[f64],
    q: &FourierPotential,
    cascade: &ParameterCascade,
) -> Result<SimplicityReport> {
    let classifier = Classifier::new(lattice, cascade);
    let v = add(&lattice.embed(gamma), t);
    let class = classifier.classify(&v)?;
    if class.is_resonant() {
        return Err(Error::NotNonResonant { level: class.level() });
    }
    let rho = cascade.rho;
    let pad = powf(rho, cascade.effective_level(1) - 1.0);
    let (inner, outer) = (rho / 2.0 + pad, 1.5 * rho - pad);
    let r = norm(&v);
    if !(r > inner && r < outer) {
        return Err(Error::ShellViolation { norm: r, inner, outer });
    }
    let known = known_part(&v, q, cascade)?;
    let entries = k_set(lattice, t, &known, cascade, &classifier)?;
    let eps1 = cascade.eps1();
    let mut competitors = Vec::new();
    for e in &entries {
        if e.gamma.coords == gamma {
            continue;
        }
        let w = add(&e.gamma.embedding, t);
        let Some(class) = &e.class else {
            return Err(Error::FullRankResonance { level: lattice.dim() });
        };
        if class.is_resonant() {
            let set = build_index_set(lattice, &e.gamma.coords, t, class.directions(), cascade)?;
            let block = assemble_block(&set, cascade.l, q)?;
            // λ_j - F(v) = (|w|^{2l} - |v|^{2l}) + μ_j - F_s(v)
            let lift = energy_diff(&w, &v, cascade.l) - known.correction;
            let closest = block.offsets.iter().map(|mu| (lift + mu).abs()).fold(f64::INFINITY, f64::min);
            competitors.push(Competitor {
                gamma: e.gamma.coords.clone(),
                level: class.level(),
                condition: Condition::BlockGap,
                margin: closest - 2.0 * eps1,
            });
        } else {
            let other = known_part(&w, q, cascade)?;
            competitors.push(Competitor {
                gamma: e.gamma.coords.clone(),
                level: 0,
                condition: Condition::KnownPartGap,
                margin: known.difference(&other).abs() - 2.0 * eps1,
            });
        }
    }
    let member = competitors.iter().all(|c| c.margin >= 0.0);
    Ok(SimplicityReport { v, known, k_set: entries, competitors, eps1, member })
}

/// Eigenvalues of an oracle spectrum near a known part.
#[derive(Debug, Clone, PartialEq)]
pub struct Uniqueness {
    /// Indices with `|Λ - prediction| < halfwidth`.
    pub in_window: Vec<usize>,
    /// Distance from the single in-window eigenvalue to its nearest neighbour.
    pub neighbor_gap: Option<f64>,
}

impl Uniqueness {
    pub fn holds(&self, min_gap: f64) -> bool {
        self.in_window.len() == 1 && self.neighbor_gap.is_some_and(|g| g >= min_gap)
    }
}

/// Counts eigenvalues within `halfwidth` of `prediction_offset` (relative to
/// the spectrum origin) and, when there is exactly one, its neighbour gap.
pub fn uniqueness(spectrum: &BlochSpectrum, prediction_offset: f64, halfwidth: f64) -> Uniqueness {
    let off = &spectrum.offsets;
    let in_window: Vec<usize> = (0..off.len()).filter(|&n| (off[n] - prediction_offset).abs() < halfwidth).collect();
    let neighbor_gap = match in_window.as_slice() {
        [n] => (0..off.len()).filter(|m| m != n).map(|m| (off[m] - off[*n]).abs()).reduce(f64::min),
        _ => None,
    };
    Uniqueness { in_window, neighbor_gap }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientCheck {
    pub offset: Vec<i64>,
    /// `q_{γ'} / (|v|^{2l} - |v+γ'|^{2l})`.
    pub predicted: Complex64,
    /// `b(N, γ+γ') / b(N, γ)`.
    pub measured: Complex64,
}

impl CoefficientCheck {
    pub fn ratio(&self) -> Complex64 {
        self.measured / self.predicted
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlochReport {
    pub weight: f64,
    /// `Σ_{γ'≠γ} |b(N,γ')|²`.
    pub residual_mass: f64,
    pub first_order: Vec<CoefficientCheck>,
    /// `(1 + Σ_k Σ_{γ*} |A_k(γ*)|²)^{-1/2}` and the measured `|b(N,γ)|`.
    pub normalization: Option<(f64, f64)>,
}

/// `A_k(γ')` for `k = 1..=k_max` at energy `|v|^{2l} + shift`:
/// `Σ q_{γ_1}…q_{γ_{k-1}} q_{γ' - Σγ_i} / Π_{j=0}^{k-1} (P - |v + γ' - Σ_{i≤j} γ_i|^{2l})`,
/// with every intermediate `γ' - Σ_{i≤j} γ_i` nonzero.
pub fn higher_coefficients(
    lattice: &LatticeModel,
    v: &[f64],
    offset: &LatticeVector,
    l: u32,
    q: &FourierPotential,
    shift: f64,
    k_max: usize,
) -> Result<Vec<Complex64>> {
    struct Walk<'a> {
        lattice: &'a LatticeModel,
        v: &'a [f64],
        l: u32,
        q: &'a FourierPotential,
        shift: f64,
        k_max: usize,
        out: Vec<Complex64>,
    }
    impl Walk<'_> {
        fn go(&mut self, pos: &LatticeVector, depth: usize, num: Complex64, den: f64) -> Result<()> {
            if pos.is_zero() {
                return Ok(());
            }
            let gap = self.shift + energy_diff(self.v, &add(self.v, &pos.embedding), self.l);
            if gap == 0.0 {
                return Err(Error::SmallDenominator { tuple: vec![pos.coords.clone()], value: gap });
            }
            let den = den * gap;
            // the remaining hop lands on γ
            let land = self.q.coefficient(&pos.coords);
            if land != Complex64::new(0.0, 0.0) {
                self.out[depth - 1] += num * land / den;
            }
            if depth < self.k_max {
                let q = self.q;
                for (s, qs) in q.entries() {
                    let c: Vec<i64> = pos.coords.iter().zip(&s.coords).map(|(a, b)| a - b).collect();
                    let next = self.lattice.vector(&c);
                    self.go(&next, depth + 1, num * qs, den)?;
                }
            }
            Ok(())
        }
    }
    let mut w = Walk { lattice, v, l, q, shift, k_max, out: vec![Complex64::new(0.0, 0.0); k_max] };
    if k_max > 0 {
        w.go(offset, 1, Complex64::new(1.0, 0.0), 1.0)?;
    }
    Ok(w.out)
}

/// Checks the eigenpair `n` against the plane-wave expansion around `gamma`.
///
/// The phase is normalized so that `b(N, γ) > 0`. For `order ≥ 2` the
/// normalization `(1 + Σ_{k<order} Σ_{γ*} |A_k(γ*)|²)^{-1/2}` is evaluated at
/// energy `|v|^{2l} + energy_shift`.
pub fn bloch_verify(
    spectrum: &BlochSpectrum,
    n: usize,
    gamma: &[i64],
    order: usize,
    q: &FourierPotential,
    lattice: &LatticeModel,
    energy_shift: f64,
) -> Result<BlochReport> {
    let l = spectrum.l;
    let b0 = spectrum.coefficient(n, gamma)?;
    let weight = b0.norm_sqr();
    if weight < 0.5 {
        return Err(Error::PhaseDegenerate { weight });
    }
    let p = spectrum.basis.position(gamma).expect("checked above");
    let residual_mass: f64 =
        spectrum.coefficients[n].iter().enumerate().filter(|(i, _)| *i != p).map(|(_, z)| z.norm_sqr()).sum();
    let v = add(&lattice.embed(gamma), &spectrum.t);
    let mut first_order = Vec::new();
    for (s, qs) in q.entries() {
        let idx: Vec<i64> = gamma.iter().zip(&s.coords).map(|(a, b)| a + b).collect();
        let Some(pos) = spectrum.basis.position(&idx) else {
            continue;
        };
        let predicted = qs / energy_diff(&v, &add(&v, &s.embedding), l);
        let measured = spectrum.coefficients[n][pos] / b0;
        first_order.push(CoefficientCheck { offset: s.coords.clone(), predicted, measured });
    }
    let normalization = if order >= 2 {
        let reach = reachable_offsets(q, lattice, order - 1);
        let mut total = 0.0;
        for g in &reach {
            let a = higher_coefficients(lattice, &v, g, l, q, energy_shift, order - 1)?;
            total += a.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        Some((1.0 / crate::float::sqrt(1.0 + total), b0.norm()))
    } else {
        None
    };
    Ok(BlochReport { weight, residual_mass, first_order, normalization })
}

/// Nonzero sums of at most `hops` support vectors.
pub fn reachable_offsets(q: &FourierPotential, lattice: &LatticeModel, hops: usize) -> Vec<LatticeVector> {
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut frontier: Vec<Vec<i64>> = vec![vec![0; lattice.dim()]];
    for _ in 0..hops {
        let mut next = Vec::new();
        for f in &frontier {
            for (s, _) in q.entries() {
                let c: Vec<i64> = f.iter().zip(&s.coords).map(|(a, b)| a + b).collect();
                if seen.insert(c.clone()) {
                    next.push(c);
                }
            }
        }
        frontier = next;
    }
    seen.into_iter().filter(|c| c.iter().any(|&x| x != 0)).map(|c| lattice.vector(&c)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum RayOutcome {
    Root { point: Vec<f64>, radius: f64, residual: f64, bisections: usize },
    /// The root lies in a resonance zone; reported, not used.
    Resonant { point: Vec<f64>, level: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct RayOptions {
    /// Search `|x| ∈ [ρ - halfwidth, ρ + halfwidth]`.
    pub halfwidth: f64,
    pub max_bisections: usize,
    pub newton_steps: usize,
}

impl Default for RayOptions {
    fn default() -> Self {
        Self { halfwidth: 0.5, max_bisections: 200, newton_steps: 3 }
    }
}

/// Finds `x = r·e` with `F(x) = ρ^{2l}` on each ray.
pub fn isoenergetic_sample(
    lattice: &LatticeModel,
    q: &FourierPotential,
    cascade: &ParameterCascade,
    rays: &[Vec<f64>],
    options: RayOptions,
) -> Result<Vec<RayOutcome>> {
    let classifier = Classifier::new(lattice, cascade);
    let rho = cascade.rho;
    let l = cascade.l;
    let s = cascade.known_part_index();
    let mut out = Vec::with_capacity(rays.len());
    for ray in rays {
        let e = scale(ray, 1.0 / norm(ray));
        // F(r e) - ρ^{2l}
        let f = |r: f64| -> Result<f64> {
            let x = scale(&e, r);
            let corr = known_part_corrections(&x, l, q, s, SeriesOptions::default())?.corrections[s];
            Ok(pow_diff(r * r, rho * rho, (r - rho) * (r + rho), l) + corr)
        };
        let (mut lo, mut hi) = (rho - options.halfwidth, rho + options.halfwidth);
        let (mut flo, fhi) = (f(lo)?, f(hi)?);
        if flo == 0.0 {
            hi = lo;
        } else if fhi == 0.0 {
            lo = hi;
        } else if flo.signum() == fhi.signum() {
            return Err(Error::NoBracket { lo, hi });
        }
        let tol = 1e-9 * powi(rho, 2 * l);
        let mut steps = 0;
        while steps < options.max_bisections && hi - lo > 0.0 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = f(mid)?;
            steps += 1;
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        let mut r = 0.5 * (lo + hi);
        for _ in 0..options.newton_steps {
            let h = 1e-6 * rho;
            let slope = (f(r + h)? - f(r - h)?) / (2.0 * h);
            let fr = f(r)?;
            if slope == 0.0 || fr == 0.0 {
                break;
            }
            let next = r - fr / slope;
            if f(next)?.abs() <= fr.abs() {
                r = next;
            }
        }
        let residual = f(r)?;
        if residual.abs() > tol {
            return Err(Error::ConvergenceFailure(alloc::format!("ray root residual {residual:e}")));
        }
        let point = scale(&e, r);
        let class = classifier.classify(&point)?;
        if class.is_resonant() {
            out.push(RayOutcome::Resonant { point, level: class.level() });
        } else {
            out.push(RayOutcome::Root { point, radius: r, residual, bisections: steps });
        }
    }
    Ok(out)
}

/// Whether some block eigenvalue lies in `(ρ^{2l} - 3ε₁, ρ^{2l} + 3ε₁)`.
pub fn block_meets_window(block_eigenvalues: &[f64], rho: f64, l: u32, eps1: f64) -> bool {
    let e = powi(rho, 2 * l);
    block_eigenvalues.iter().any(|&x| (x - e).abs() < 3.0 * eps1)
}

/// `x ∈ K_ρ` and some eigenvalue of the resonance block at `x` lies within
/// `3ε₁` of `ρ^{2l}`.
pub fn in_a_rho(lattice: &LatticeModel, x: &[f64], q: &FourierPotential, cascade: &ParameterCascade) -> Result<bool> {
    let classifier = Classifier::new(lattice, cascade);
    let class = classifier.classify(x)?;
    if !class.is_resonant() {
        return Err(Error::NotResonant);
    }
    let l = cascade.l;
    let rho = cascade.rho;
    let r2 = norm_sqr(x);
    let offset = pow_diff(r2, rho * rho, r2 - rho * rho, l);
    if offset.abs() >= cascade.threshold(1) {
        return Ok(false);
    }
    let (gamma, t) = lattice.reduce(x)?;
    let set = build_index_set(lattice, &gamma.coords, &t.reduced, class.directions(), cascade)?;
    let block = assemble_block(&set, l, q)?;
    // λ_j - ρ^{2l} = (|v|^{2l} - ρ^{2l}) + μ_j, with v = γ + t ≈ x
    let v = add(&gamma.embedding, &t.reduced);
    let vv = norm_sqr(&v);
    let lift = pow_diff(vv, rho * rho, vv - rho * rho, l);
    let eps = cascade.eps1();
    Ok(block.offsets.iter().any(|mu| (lift + mu).abs() < 3.0 * eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::{derive_parameters, Mode, Overrides, ScaledExponents};
    use crate::lattice::QuasiMomentum;
    use crate::planewave::{bloch_solve, SolveOptions};
    use alloc::vec;

    fn scaled(rho: f64, threshold: f64) -> ParameterCascade {
        let ex = ScaledExponents::from_values(rho, 2.0, &[threshold, 2.0 * threshold, 4.0 * threshold]);
        let ov = Overrides {
            pool_radius: Some(2.5),
            block_b_radius: Some(2.5),
            block_a_radius: Some(1.5),
            known_part_order: Some(3),
            ..Default::default()
        };
        derive_parameters(2, 1, 10.0, rho, Mode::Scaled(ex), ov).unwrap()
    }

    #[test]
    fn k_set_integer_annulus() {
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::zero(2);
        let c = scaled(5.0, 12.0);
        let cl = Classifier::new(&lat, &c);
        let known = known_part_with(&[5.0, 0.0], 1, &q, 2).unwrap();
        let k = k_set_with_window(&lat, &[0.0, 0.0], &known, 4.0, &cl).unwrap();
        let mut got: Vec<Vec<i64>> = k.iter().map(|e| e.gamma.coords.clone()).collect();
        got.sort();
        let mut want = Vec::new();
        for x in -8i64..=8 {
            for y in -8i64..=8 {
                if ((x * x + y * y) - 25).abs() < 4 {
                    want.push(vec![x, y]);
                }
            }
        }
        want.sort();
        assert_eq!(got, want);
        assert_eq!(got.len(), 20);
        let ties = k_set_with_window(&lat, &[0.0, 0.0], &known, 0.0, &cl).unwrap();
        assert_eq!(ties.len(), 12);
    }

    #[test]
    fn k_set_matches_brute_force_off_lattice() {
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::zero(2);
        let c = scaled(20.0, 0.3);
        let cl = Classifier::new(&lat, &c);
        let t = [0.3137, 0.1171];
        let v = add(&lat.embed(&[12, 16]), &t);
        let known = known_part_with(&v, 1, &q, 2).unwrap();
        let k = k_set_with_window(&lat, &t, &known, 0.5, &cl).unwrap();
        let mut got: Vec<Vec<i64>> = k.iter().map(|e| e.gamma.coords.clone()).collect();
        got.sort();
        let e0 = v[0] * v[0] + v[1] * v[1];
        let mut want = Vec::new();
        for x in -30i64..=30 {
            for y in -30i64..=30 {
                let (a, b) = (x as f64 + t[0], y as f64 + t[1]);
                if (a * a + b * b - e0).abs() < 0.5 {
                    want.push(vec![x, y]);
                }
            }
        }
        want.sort();
        assert_eq!(got, want);
        assert!(got.contains(&vec![12, 16]));
    }

    #[test]
    fn first_order_coefficients_at_cosine_example() {
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::cosines(&lat, &[(vec![1, 0], 0.1)], 2.0).unwrap();
        let (g, t) = lat.reduce(&[5.3, 4.2]).unwrap();
        let spec = bloch_solve(&lat, 1, &q, &t, &[5.3, 4.2], 8.0, &g.coords, SolveOptions::default()).unwrap();
        let (n, _) = spec.dominant(&g.coords).unwrap();
        let rep = bloch_verify(&spec, n, &g.coords, 2, &q, &lat, 0.0).unwrap();
        let minus = rep.first_order.iter().find(|c| c.offset == vec![-1, 0]).unwrap();
        let plus = rep.first_order.iter().find(|c| c.offset == vec![1, 0]).unwrap();
        assert!((minus.predicted.re - 0.1 / 9.6).abs() < 1e-12);
        assert!((plus.predicted.re + 0.1 / 11.6).abs() < 1e-12);
        assert!((minus.ratio().re - 1.0).abs() < 0.05);
        assert!((plus.ratio().re - 1.0).abs() < 0.05);
        let (pred, meas) = rep.normalization.unwrap();
        assert!((pred - meas).abs() < 1e-4);
    }

    #[test]
    fn free_spectrum_has_no_residual_mass() {
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::zero(2);
        let t = QuasiMomentum::new(vec![0.3, 0.2]);
        let spec = bloch_solve(&lat, 1, &q, &t, &[5.3, 4.2], 3.0, &[5, 4], SolveOptions::default()).unwrap();
        let (n, _) = spec.dominant(&[5, 4]).unwrap();
        let rep = bloch_verify(&spec, n, &[5, 4], 2, &q, &lat, 0.0).unwrap();
        assert_eq!(rep.residual_mass, 0.0);
        assert!(rep.first_order.is_empty());
        assert_eq!(rep.normalization.unwrap().0, 1.0);
    }

    #[test]
    fn degenerate_phase_is_rejected() {
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::cosines(&lat, &[(vec![1, 0], 0.3)], 2.0).unwrap();
        // on the (1,0) bisector the two plane waves mix half and half
        let t = QuasiMomentum::new(vec![0.5, 0.0]);
        let spec = bloch_solve(&lat, 1, &q, &t, &[-0.5, 10.0], 6.0, &[-1, 10], SolveOptions::default()).unwrap();
        let (n, w) = spec.dominant(&[-1, 10]).unwrap();
        assert!(w < 0.5);
        assert!(matches!(bloch_verify(&spec, n, &[-1, 10], 1, &q, &lat, 0.0), Err(Error::PhaseDegenerate { .. })));
    }

    #[test]
    fn free_roots_are_on_the_sphere() {
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::zero(2);
        let c = scaled(20.0, 2.0);
        let rays = vec![vec![0.78, 0.6258], vec![0.3, 0.9]];
        for o in isoenergetic_sample(&lat, &q, &c, &rays, RayOptions::default()).unwrap() {
            match o {
                RayOutcome::Root { radius, .. } => assert!((radius - 20.0).abs() <= 1e-9 * 20.0),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn axis_ray_is_resonant() {
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::cosines(&lat, &[(vec![1, 0], 0.1)], 2.0).unwrap();
        let c = scaled(20.0, 2.0);
        let out = isoenergetic_sample(&lat, &q, &c, &[vec![0.0, 1.0]], RayOptions::default()).unwrap();
        assert!(matches!(out[0], RayOutcome::Resonant { .. }));
    }

    #[test]
    fn block_window_examples() {
        assert!(!block_meets_window(&[95.0, 110.0], 10.0, 1, 0.01));
        // 2x2 crossing with diagonal 100 + δ and coupling 1: λ₁ = 100 + δ - 1 = ρ² for δ = 1
        assert!(block_meets_window(&[100.0, 102.0], 10.0, 1, 0.01));
    }

    #[test]
    fn free_isolated_point_is_member() {
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::zero(2);
        let c = scaled(20.0, 0.3);
        let t = [0.3137, 0.1171];
        let rep = check_simplicity(&lat, &[12, 15], &t, &q, &c).unwrap();
        assert!(rep.member);
        assert!(rep.violators().is_empty());
    }

    #[test]
    fn tied_competitor_is_flagged() {
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::cosines(&lat, &[(vec![1, 0], 0.1)], 2.0).unwrap();
        let c = scaled(20.0, 0.3);
        let (g, h) = ([12i64, 16], [16i64, 12]);
        // F(g + t) - F(h + t) as a function of t₁, with t₂ fixed
        let gap = |t1: f64| {
            let t = [t1, 0.3];
            let a = known_part(&add(&lat.embed(&g), &t), &q, &c).unwrap();
            let b = known_part(&add(&lat.embed(&h), &t), &q, &c).unwrap();
            a.difference(&b)
        };
        let (mut lo, mut hi) = (0.2, 0.4);
        assert!(gap(lo) * gap(hi) < 0.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if gap(mid).signum() == gap(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let rep = check_simplicity(&lat, &g, &[lo, 0.3], &q, &c).unwrap();
        assert!(!rep.member);
        let bad = rep.violators();
        assert!(bad.iter().any(|b| b.gamma == h.to_vec() && b.condition == Condition::KnownPartGap));
        assert!(bad.iter().all(|b| b.margin < 0.0));
    }

    #[test]
    fn a_rho_membership() {
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::zero(2);
        let c = scaled(20.0, 2.0);
        // resonant with (1,0) but far from the sphere
        assert!(!in_a_rho(&lat, &[-0.5, 25.0], &q, &c).unwrap());
        // on the sphere and on the bisector of (1,0): free block eigenvalue equals ρ²
        let y = (400.0f64 - 0.25).sqrt();
        assert!(in_a_rho(&lat, &[-0.5, y], &q, &c).unwrap());
        assert!(matches!(in_a_rho(&lat, &[12.3137, 16.1171], &q, &c), Err(Error::NotResonant)));
    }
}
