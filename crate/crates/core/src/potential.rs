//! Periodic potentials as finite Fourier tables `q(x) = Σ q_γ e^{i(γ,x)}`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::float::{powf, sqrt};
use crate::lattice::{LatticeModel, LatticeVector};

const HERMITIAN_TOL: f64 = 1e-12;

/// Finite Fourier coefficient table with a declared Sobolev smoothness.
///
/// Entries are kept sorted by integer coordinates; exact zeros are dropped.
/// Construction does not enforce the zero-mean and Hermitian invariants; use
/// [`FourierPotential::validate`] or [`FourierPotential::checked`].
#[derive(Debug, Clone, PartialEq)]
pub struct FourierPotential {
    dim: usize,
    entries: Vec<(LatticeVector, Complex64)>,
    smoothness: f64,
}

/// One failed invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonZeroMean { value: Complex64 },
    NotHermitian { coords: Vec<i64>, value: Complex64, partner: Complex64 },
    NegativeSmoothness { s: f64 },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Result of cutting a potential at a radius.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub potential: FourierPotential,
    /// Σ |q_γ| over dropped coefficients.
    pub tail_bound: f64,
    /// Nominal size `ρ^{-pα}` of the dropped tail.
    pub nominal_order: f64,
}

impl FourierPotential {
    pub fn zero(dim: usize) -> Self {
        Self { dim, entries: Vec::new(), smoothness: 0.0 }
    }

    pub fn new(
        lattice: &LatticeModel,
        coefficients: impl IntoIterator<Item = (Vec<i64>, Complex64)>,
        smoothness: f64,
    ) -> Result<Self> {
        let dim = lattice.dim();
        let mut entries: Vec<(LatticeVector, Complex64)> = Vec::new();
        for (coords, value) in coefficients {
            if coords.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: coords.len() });
            }
            if !value.re.is_finite() || !value.im.is_finite() {
                return Err(Error::InvalidPotential(format!("non-finite coefficient at {coords:?}")));
            }
            if value == Complex64::new(0.0, 0.0) {
                continue;
            }
            entries.push((lattice.vector(&coords), value));
        }
        entries.sort_by(|a, b| a.0.coords.cmp(&b.0.coords));
        if let Some(w) = entries.windows(2).find(|w| w[0].0.coords == w[1].0.coords) {
            return Err(Error::InvalidPotential(format!("duplicate coefficient at {:?}", w[0].0.coords)));
        }
        Ok(Self { dim, entries, smoothness })
    }

    /// `Σ a_j · 2cos((γ_j, x))`, i.e. `q_{±γ_j} = a_j`.
    pub fn cosines(lattice: &LatticeModel, terms: &[(Vec<i64>, f64)], smoothness: f64) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (n, a) in terms {
            let neg: Vec<i64> = n.iter().map(|c| -c).collect();
            coeffs.push((n.clone(), Complex64::new(*a, 0.0)));
            coeffs.push((neg, Complex64::new(*a, 0.0)));
        }
        Self::new(lattice, coeffs, smoothness)
    }

    /// Like [`FourierPotential::new`] but rejects tables that fail validation.
    pub fn checked(
        lattice: &LatticeModel,
        coefficients: impl IntoIterator<Item = (Vec<i64>, Complex64)>,
        smoothness: f64,
    ) -> Result<Self> {
        let q = Self::new(lattice, coefficients, smoothness)?;
        let report = q.validate();
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidPotential(format!("{v:?}")));
        }
        Ok(q)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn smoothness(&self) -> f64 {
        self.smoothness
    }

    pub fn entries(&self) -> &[(LatticeVector, Complex64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `q_γ`, zero outside the support.
    pub fn coefficient(&self, coords: &[i64]) -> Complex64 {
        match self.entries.binary_search_by(|e| e.0.coords.as_slice().cmp(coords)) {
            Ok(i) => self.entries[i].1,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// max |γ| over the support (0 for the zero potential).
    pub fn support_radius(&self) -> f64 {
        self.entries.iter().map(|e| sqrt(e.0.norm_sqr())).fold(0.0, f64::max)
    }

    /// Σ |q_γ|; bounds the multiplication operator norm.
    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.1.norm()).sum()
    }

    /// Σ |q_γ|² (1 + |γ|^{2s}).
    pub fn sobolev_weight(&self) -> f64 {
        self.entries
            .iter()
            .map(|(g, q)| q.norm_sqr() * (1.0 + powf(g.norm_sqr(), self.smoothness)))
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.entries.retain(|_| factor != 0.0);
        for e in out.entries.iter_mut() {
            e.1 *= factor;
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.smoothness < 0.0 || !self.smoothness.is_finite() {
            violations.push(Violation::NegativeSmoothness { s: self.smoothness });
        }
        for (g, q) in &self.entries {
            if g.is_zero() {
                violations.push(Violation::NonZeroMean { value: *q });
                continue;
            }
            let neg: Vec<i64> = g.coords.iter().map(|c| -c).collect();
            let partner = self.coefficient(&neg);
            if (partner - q.conj()).norm() > HERMITIAN_TOL * (1.0 + q.norm()) {
                violations.push(Violation::NotHermitian { coords: g.coords.clone(), value: *q, partner });
            }
        }
        ValidationReport { violations }
    }

    /// Keeps `|γ| < radius`; the tail bound is the l¹ mass of what was cut.
    pub fn truncate(&self, radius: f64, p: f64, alpha: f64, rho: f64) -> Result<Truncation> {
        if radius <= 0.0 || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("truncation radius must be positive, got {radius}")));
        }
        let mut kept = self.clone();
        let mut tail = 0.0;
        kept.entries.retain(|(g, q)| {
            let inside = sqrt(g.norm_sqr()) < radius;
            if !inside {
                tail += q.norm();
            }
            inside
        });
        Ok(Truncation { potential: kept, tail_bound: tail, nominal_order: powf(rho, -p * alpha) })
    }

    pub fn describe(&self) -> String {
        format!("{} coefficients, support radius {:.4}, l1 {:.6}", self.len(), self.support_radius(), self.l1_norm())
    }
}

fn uniform_pm1(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random bits -> [0,1) -> [-1,1)
    let bits = rng.next_u64() >> 11;
    (bits as f64) * (1.0 / (1u64 << 53) as f64) * 2.0 - 1.0
}

/// Deterministic random Hermitian zero-mean potential supported on
/// `0 < |γ| ≤ support_radius`, scaled so its Sobolev weight equals
/// `norm_budget` (up to one part in 10¹²).
pub fn random_potential(
    lattice: &LatticeModel,
    seed: u64,
    support_radius: f64,
    smoothness: f64,
    norm_budget: f64,
) -> Result<FourierPotential> {
    if support_radius < 1.0 {
        return Err(Error::InvalidArgument(format!("support radius must be >= 1, got {support_radius}")));
    }
    if norm_budget < 0.0 || !norm_budget.is_finite() {
        return Err(Error::InvalidArgument(format!("norm budget must be >= 0, got {norm_budget}")));
    }
    if norm_budget == 0.0 {
        return Ok(FourierPotential { dim: lattice.dim(), entries: Vec::new(), smoothness });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ball = lattice.enumerate_around(
        &alloc::vec![0.0; lattice.dim()],
        support_radius,
        crate::lattice::Boundary::Closed,
    );
    // one representative per ± pair: first nonzero coordinate positive
    let reps: Vec<&LatticeVector> = ball
        .iter()
        .filter(|v| v.coords.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0))
        .collect();
    let mut raw: Vec<(Vec<i64>, Complex64)> = Vec::new();
    let mut weight = 0.0;
    for v in reps {
        let z = Complex64::new(uniform_pm1(&mut rng), uniform_pm1(&mut rng));
        weight += 2.0 * z.norm_sqr() * (1.0 + powf(v.norm_sqr(), smoothness));
        raw.push((v.coords.clone(), z));
    }
    let factor = if weight > 0.0 { sqrt(norm_budget / weight) * (1.0 - 1e-12) } else { 0.0 };
    let mut coeffs = Vec::with_capacity(2 * raw.len());
    for (n, z) in raw {
        let neg: Vec<i64> = n.iter().map(|c| -c).collect();
        coeffs.push((n, z * factor));
        coeffs.push((neg, z.conj() * factor));
    }
    FourierPotential::new(lattice, coeffs, smoothness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_and_cosine_pass_validation() {
        assert!(FourierPotential::zero(2).validate().passed());
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::new(&lat, vec![(vec![1, 0], c(1.0)), (vec![-1, 0], c(1.0))], 2.0).unwrap();
        assert!(q.validate().passed());
    }

    #[test]
    fn nonzero_mean_fails() {
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::new(&lat, vec![(vec![0, 0], c(0.5))], 2.0).unwrap();
        let r = q.validate();
        assert_eq!(r.violations.len(), 1);
        assert!(matches!(r.violations[0], Violation::NonZeroMean { .. }));
    }

    #[test]
    fn non_hermitian_fails() {
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::new(
            &lat,
            vec![(vec![1, 0], Complex64::new(1.0, 1.0)), (vec![-1, 0], Complex64::new(1.0, 1.0))],
            0.0,
        )
        .unwrap();
        assert!(!q.validate().passed());
        assert!(FourierPotential::checked(&lat, vec![(vec![1, 1], c(1.0))], 0.0).is_err());
    }

    #[test]
    fn truncation_examples() {
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::cosines(&lat, &[(vec![1, 0], 1.0)], 2.0).unwrap();
        let t = q.truncate(2.0, 1.0, 1.0, 10.0).unwrap();
        assert_eq!(t.potential, q);
        assert_eq!(t.tail_bound, 0.0);

        let q3 = FourierPotential::cosines(&lat, &[(vec![1, 0], 1.0), (vec![3, 0], 1.0)], 2.0).unwrap();
        let t = q3.truncate(2.0, 1.0, 1.0, 10.0).unwrap();
        assert_eq!(t.potential.len(), 2);
        assert_eq!(t.tail_bound, 2.0);

        let z = FourierPotential::zero(2).truncate(5.0, 1.0, 1.0, 10.0).unwrap();
        assert!(z.potential.is_zero() && z.tail_bound == 0.0);
    }

    #[test]
    fn random_potential_is_deterministic_and_valid() {
        let lat = LatticeModel::cubic(2);
        assert!(random_potential(&lat, 1, 2.0, 2.0, 0.0).unwrap().is_zero());
        let a = random_potential(&lat, 7, 3.0, 2.0, 1.0).unwrap();
        let b = random_potential(&lat, 7, 3.0, 2.0, 1.0).unwrap();
        assert_eq!(a, b);
        assert!(a.validate().passed());
        assert!(a.sobolev_weight() <= 1.0);
        assert!(a.sobolev_weight() > 0.999);
        assert!(a.support_radius() <= 3.0 + 1e-12);
        let other = random_potential(&lat, 8, 3.0, 2.0, 1.0).unwrap();
        assert_ne!(a, other);
    }
}
