//! Exponent bookkeeping: `m = 3^d + d + 2`, `α = 1/m`, `α_k = 3^k α`,
//! `k₁ = ⌊d/(3α)⌋ + 2`, `p₁ = ⌊p/3⌋ + 1`, `ε₁ = ρ^{-d-2α}`, and the seven
//! consistency inequalities between them.
//!
//! In scaled mode the set definitions use user-chosen exponents `α̂, α̂_k`
//! (plus optional radius overrides) while the theory values are still
//! computed and reported.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::{floor, ln, powf, powi};

/// Hard cap on series order (term counts grow like `|support|^k`).
pub const MAX_SERIES_ORDER: usize = 6;

/// Smallest smoothness for which the theory-mode inequalities are designed:
/// `(3d-1)/2 · (3^d+d+2) + d·3^d/4 + d + 6`.
pub fn critical_smoothness(d: usize) -> f64 {
    let df = d as f64;
    let m = (3usize.pow(d as u32) + d + 2) as f64;
    (3.0 * df - 1.0) / 2.0 * m + df * powf(3.0, df) / 4.0 + df + 6.0
}

/// User-chosen exponents replacing `α` and `α_1..α_{d+1}` in set definitions.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledExponents {
    pub alpha: f64,
    /// `levels[k-1]` replaces `α_k`, for `k = 1..=d+1`.
    pub levels: Vec<f64>,
}

impl ScaledExponents {
    /// Exponents with `ρ^{α̂} = pool` and `ρ^{α̂_k} = thresholds[k-1]`.
    pub fn from_values(rho: f64, pool: f64, thresholds: &[f64]) -> Self {
        let lr = ln(rho);
        Self { alpha: ln(pool) / lr, levels: thresholds.iter().map(|t| ln(*t) / lr).collect() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Theory,
    Scaled(ScaledExponents),
}

/// Optional direct values for the radii and thresholds derived from the
/// exponents. Any `None` falls back to the formula.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    /// Radius of the direction pool (default `p ρ^{α̂}`).
    pub pool_radius: Option<f64>,
    /// Radius for the inner lattice combinations of a resonance block
    /// (default `ρ^{α̂_{k+1}/2}/2`).
    pub block_b_radius: Option<f64>,
    /// Radius of the translation ball of a resonance block (default `p₁ρ^{α̂}`).
    pub block_a_radius: Option<f64>,
    pub eps1: Option<f64>,
    /// Number of known-part iterations `K`; the known part is `F_{K-1}`.
    pub known_part_order: Option<usize>,
    /// Constants table `c[i]` (default all ones).
    pub constants: Option<Vec<f64>>,
}

/// One numerically evaluated consistency inequality `lhs < rhs`
/// (or `lhs ≤ rhs` when `strict` is false).
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub level: Option<usize>,
    pub statement: String,
    pub lhs: f64,
    pub rhs: f64,
    pub strict: bool,
}

impl InequalityCheck {
    pub fn holds(&self) -> bool {
        if self.strict {
            self.lhs < self.rhs
        } else {
            self.lhs <= self.rhs
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterCascade {
    pub d: usize,
    pub l: u32,
    pub s: f64,
    pub p: f64,
    pub m: usize,
    pub alpha: f64,
    /// `alpha_k[k] = 3^k α` for `k = 0..=d+1`.
    pub alpha_k: Vec<f64>,
    pub k1: usize,
    pub p1: usize,
    pub rho: f64,
    pub eps1: f64,
    pub mode: Mode,
    pub overrides: Overrides,
    pub constants: Vec<f64>,
    pub checks: Vec<InequalityCheck>,
}

fn theory_checks(d: usize, p: f64, m: usize, alpha: f64, ak: &[f64], k1: usize, p1: usize) -> Vec<InequalityCheck> {
    let df = d as f64;
    let mf = m as f64;
    let k1f = k1 as f64;
    let mut out = vec![
        InequalityCheck {
            name: "first_level_budget",
            level: None,
            statement: "α₁ + dα < 1 − α".into(),
            lhs: ak[1] + df * alpha,
            rhs: 1.0 - alpha,
            strict: true,
        },
        InequalityCheck {
            name: "top_level_dominance",
            level: None,
            statement: "dα < α_d / 2".into(),
            lhs: df * alpha,
            rhs: ak[d] / 2.0,
            strict: true,
        },
        InequalityCheck {
            name: "iteration_depth",
            level: None,
            statement: "k₁ ≤ (p − m(d−1)/2) / 3".into(),
            lhs: k1f,
            rhs: (p - mf * (df - 1.0) / 2.0) / 3.0,
            strict: false,
        },
        InequalityCheck {
            name: "remainder_decay",
            level: None,
            statement: "pα ≤ p₁α₁".into(),
            lhs: p * alpha,
            rhs: p1 as f64 * ak[1],
            strict: false,
        },
        InequalityCheck {
            name: "series_accuracy",
            level: None,
            statement: "d + 2α < 3k₁α".into(),
            lhs: df + 2.0 * alpha,
            rhs: 3.0 * k1f * alpha,
            strict: true,
        },
    ];
    for k in 1..=d {
        let kf = k as f64;
        out.push(InequalityCheck {
            name: "level_budget",
            level: Some(k),
            statement: format!("α_{k} + {}α < 1", k - 1),
            lhs: ak[k] + (kf - 1.0) * alpha,
            rhs: 1.0,
            strict: true,
        });
    }
    for k in 1..=d {
        let kf = k as f64;
        out.push(InequalityCheck {
            name: "level_separation",
            level: Some(k),
            statement: format!("2(α_{k} + {}α) < α_{}", k - 1, k + 1),
            lhs: 2.0 * (ak[k] + (kf - 1.0) * alpha),
            rhs: ak[k + 1],
            strict: true,
        });
    }
    out
}

/// Builds the cascade. In theory mode any failed inequality is an error
/// naming it; in scaled mode the checks are recorded only.
pub fn derive_parameters(d: usize, l: u32, s: f64, rho: f64, mode: Mode, overrides: Overrides) -> Result<ParameterCascade> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be at least 2, got {d}")));
    }
    if l < 1 {
        return Err(Error::InvalidArgument("operator degree l must be at least 1".into()));
    }
    if !(rho > 1.0) || !rho.is_finite() {
        return Err(Error::InvalidArgument(format!("rho must exceed 1, got {rho}")));
    }
    if !s.is_finite() {
        return Err(Error::InvalidArgument(format!("smoothness must be finite, got {s}")));
    }
    if let Mode::Scaled(ex) = &mode {
        if ex.levels.len() < d + 1 {
            return Err(Error::InvalidArgument(format!(
                "scaled mode needs {} level exponents, got {}",
                d + 1,
                ex.levels.len()
            )));
        }
    }
    let m = 3usize.pow(d as u32) + d + 2;
    let alpha = 1.0 / m as f64;
    let alpha_k: Vec<f64> = (0..=d + 1).map(|k| powi(3.0, k as u32) * alpha).collect();
    // d/(3α) = d·m/3
    let k1 = d * m / 3 + 2;
    let p = s - d as f64;
    let p1 = if p >= 0.0 { floor(p / 3.0) as usize + 1 } else { 0 };
    let eps1 = powf(rho, -(d as f64) - 2.0 * alpha);
    let checks = theory_checks(d, p, m, alpha, &alpha_k, k1, p1);
    if mode == Mode::Theory {
        if let Some(c) = checks.iter().find(|c| !c.holds()) {
            return Err(Error::CascadeInequalityViolated {
                name: c.name,
                detail: format!("{}: {} vs {} (s = {s}, d = {d})", c.statement, c.lhs, c.rhs),
            });
        }
    }
    let constants = overrides.constants.clone().unwrap_or_else(|| vec![1.0; 6]);
    Ok(ParameterCascade { d, l, s, p, m, alpha, alpha_k, k1, p1, rho, eps1, mode, overrides, constants, checks })
}

impl ParameterCascade {
    pub fn is_scaled(&self) -> bool {
        matches!(self.mode, Mode::Scaled(_))
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(InequalityCheck::holds)
    }

    /// `α` or its scaled replacement.
    pub fn effective_alpha(&self) -> f64 {
        match &self.mode {
            Mode::Theory => self.alpha,
            Mode::Scaled(e) => e.alpha,
        }
    }

    /// `α_k` or its scaled replacement, `1 ≤ k ≤ d+1`.
    pub fn effective_level(&self, k: usize) -> f64 {
        match &self.mode {
            Mode::Theory => self.alpha_k[k],
            Mode::Scaled(e) => e.levels[k - 1],
        }
    }

    /// Resonance threshold `ρ^{α_k}` used for level `k`.
    pub fn threshold(&self, k: usize) -> f64 {
        powf(self.rho, self.effective_level(k))
    }

    /// Radius of the direction pool `Γ(pρ^α)`.
    pub fn pool_radius(&self) -> f64 {
        self.overrides.pool_radius.unwrap_or_else(|| self.p * powf(self.rho, self.effective_alpha()))
    }

    /// `ρ^{α_{k+1}/2} / 2`.
    pub fn block_b_radius(&self, k: usize) -> f64 {
        self.overrides
            .block_b_radius
            .unwrap_or_else(|| powf(self.rho, self.effective_level(k + 1) / 2.0) / 2.0)
    }

    /// `p₁ ρ^α`.
    pub fn block_a_radius(&self) -> f64 {
        self.overrides
            .block_a_radius
            .unwrap_or_else(|| self.p1 as f64 * powf(self.rho, self.effective_alpha()))
    }

    pub fn eps1(&self) -> f64 {
        self.overrides.eps1.unwrap_or(self.eps1)
    }

    /// Index `s` of the known part `F(v) = |v|^{2l} + F_s(v)`:
    /// `k₁ - 1` in theory mode, `K - 1` in scaled mode, capped by
    /// [`MAX_SERIES_ORDER`].
    pub fn known_part_index(&self) -> usize {
        let k = match (&self.mode, self.overrides.known_part_order) {
            (_, Some(k)) => k,
            (Mode::Theory, None) => self.k1,
            (Mode::Scaled(_), None) => 3,
        };
        k.saturating_sub(1).min(MAX_SERIES_ORDER)
    }

    /// Half-width `ρ^{α₁}/2` of the eigenvalue matching window.
    pub fn match_halfwidth(&self) -> f64 {
        self.threshold(1) / 2.0
    }

    /// Same cascade at a different `ρ`; scaled exponents are kept.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        derive_parameters(self.d, self.l, self.s, rho, self.mode.clone(), self.overrides.clone())
    }
}
