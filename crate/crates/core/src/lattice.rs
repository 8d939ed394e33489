//! Period lattices, their duals, ball enumeration and quasimomentum reduction.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::float::{floor, norm_sqr, round, sqrt};
use crate::linalg::real_inverse;

/// Integer coordinates of a dual-lattice vector with its real embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeVector {
    pub coords: Vec<i64>,
    pub embedding: Vec<f64>,
}

impl LatticeVector {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.embedding)
    }
}

/// A quasimomentum reduced into the half-open dual cell, with the point it
/// was reduced from.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiMomentum {
    pub reduced: Vec<f64>,
    pub original: Vec<f64>,
}

impl QuasiMomentum {
    /// Wraps an already-reduced quasimomentum.
    pub fn new(t: Vec<f64>) -> Self {
        Self { original: t.clone(), reduced: t }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.reduced
    }
}

/// Period lattice Ω together with its dual Γ.
///
/// Matrices are stored row-major with one basis vector per row. The cell is
/// never rescaled to unit volume.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeModel {
    dim: usize,
    basis: Vec<f64>,
    dual: Vec<f64>,
    // x = u G  <=>  u = x G^{-1}
    dual_inv: Vec<f64>,
    cell_volume: f64,
    // Gram matrix of the dual basis when it is integral
    dual_gram: Option<Vec<i64>>,
}

/// Dual basis of a period basis: rows `γ_i` with `(γ_i, ω_j) = 2π δ_ij`.
pub fn dual_lattice(basis: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = basis.len();
    let flat = flatten(basis, d)?;
    let scale = flat.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let (det, inv) = real_inverse(d, &flat);
    if det.abs() <= 1e-12 * crate::float::powi(scale, d as u32) || scale == 0.0 {
        return Err(Error::SingularBasis { det });
    }
    let inv = inv.ok_or(Error::SingularBasis { det })?;
    // G = 2π (W^{-1})^T
    Ok((0..d)
        .map(|i| (0..d).map(|j| 2.0 * PI * inv[j * d + i]).collect())
        .collect())
}

fn flatten(rows: &[Vec<f64>], d: usize) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::InvalidArgument("empty basis".into()));
    }
    let mut out = Vec::with_capacity(d * d);
    for r in rows {
        if r.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: r.len() });
        }
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite basis entry".into()));
        }
        out.extend_from_slice(r);
    }
    Ok(out)
}

impl LatticeModel {
    /// Builds the model from period vectors ω_i.
    pub fn from_basis(basis: &[Vec<f64>]) -> Result<Self> {
        let dual = dual_lattice(basis)?;
        Self::assemble(basis, &dual)
    }

    /// Builds the model from dual vectors γ_i (the period basis is derived).
    pub fn from_dual(dual: &[Vec<f64>]) -> Result<Self> {
        // the dual of the dual, rescaled: Ω = 2π (G^{-1})^T
        let basis = dual_lattice(dual)?;
        Self::assemble(&basis, dual)
    }

    /// Ω = 2π Z^d, so that Γ = Z^d.
    pub fn cubic(d: usize) -> Self {
        let dual: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_dual(&dual).expect("identity is nonsingular")
    }

    /// Ω spanned by 2π(a, 0) and 2π(0, b).
    pub fn rectangular(a: f64, b: f64) -> Result<Self> {
        Self::from_basis(&[vec![2.0 * PI * a, 0.0], vec![0.0, 2.0 * PI * b]])
    }

    /// Ω spanned by 2π(1, 0) and 2π(1/2, √3/2).
    pub fn hexagonal() -> Self {
        Self::from_basis(&[vec![2.0 * PI, 0.0], vec![PI, PI * sqrt(3.0)]]).expect("nonsingular")
    }

    fn assemble(basis: &[Vec<f64>], dual: &[Vec<f64>]) -> Result<Self> {
        let d = basis.len();
        let basis_flat = flatten(basis, d)?;
        let dual_flat = flatten(dual, d)?;
        let (det, _) = real_inverse(d, &basis_flat);
        let (_, dual_inv) = real_inverse(d, &dual_flat);
        let dual_inv = dual_inv.ok_or(Error::SingularBasis { det: 0.0 })?;
        let mut gram = Vec::with_capacity(d * d);
        let mut integral = true;
        for i in 0..d {
            for j in 0..d {
                let g: f64 = (0..d).map(|k| dual_flat[i * d + k] * dual_flat[j * d + k]).sum();
                let r = round(g);
                if (g - r).abs() > 1e-12 * (1.0 + g.abs()) {
                    integral = false;
                }
                gram.push(r as i64);
            }
        }
        Ok(Self {
            dim: d,
            basis: basis_flat,
            dual: dual_flat,
            dual_inv,
            cell_volume: det.abs(),
            dual_gram: integral.then_some(gram),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_vector(&self, i: usize) -> &[f64] {
        &self.basis[i * self.dim..(i + 1) * self.dim]
    }

    pub fn dual_vector(&self, i: usize) -> &[f64] {
        &self.dual[i * self.dim..(i + 1) * self.dim]
    }

    pub fn basis_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.basis_vector(i).to_vec()).collect()
    }

    pub fn dual_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.dual_vector(i).to_vec()).collect()
    }

    /// Volume of the period cell F.
    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    /// Volume of the dual cell F★, `(2π)^d / μ(F)`.
    pub fn dual_cell_volume(&self) -> f64 {
        crate::float::powi(2.0 * PI, self.dim as u32) / self.cell_volume
    }

    /// True when the dual Gram matrix is integral, so norms are exact integers.
    pub fn is_integral(&self) -> bool {
        self.dual_gram.is_some()
    }

    /// Embeds integer coordinates.
    pub fn vector(&self, coords: &[i64]) -> LatticeVector {
        LatticeVector { coords: coords.to_vec(), embedding: self.embed(coords) }
    }

    pub fn embed(&self, coords: &[i64]) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        for (i, &n) in coords.iter().enumerate() {
            if n != 0 {
                let row = &self.dual[i * d..(i + 1) * d];
                for (o, g) in out.iter_mut().zip(row) {
                    *o += n as f64 * g;
                }
            }
        }
        out
    }

    /// Exact squared norm for integral lattices.
    pub fn exact_norm_sqr(&self, coords: &[i64]) -> Option<i64> {
        let g = self.dual_gram.as_ref()?;
        let d = self.dim;
        let mut s = 0i64;
        for i in 0..d {
            for j in 0..d {
                s += coords[i] * g[i * d + j] * coords[j];
            }
        }
        Some(s)
    }

    /// Coordinates of `x` in the dual basis.
    pub fn fractional_coords(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|j| (0..d).map(|i| x[i] * self.dual_inv[i * d + j]).sum())
            .collect()
    }

    /// Splits `x = γ + t` with `t` in the half-open dual cell.
    pub fn reduce(&self, x: &[f64]) -> Result<(LatticeVector, QuasiMomentum)> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite quasimomentum".into()));
        }
        let u = self.fractional_coords(x);
        let coords: Vec<i64> = u
            .iter()
            .map(|&ui| {
                let r = round(ui);
                if (ui - r).abs() <= 1e-12 * (1.0 + ui.abs()) {
                    r as i64
                } else {
                    floor(ui) as i64
                }
            })
            .collect();
        let gamma = self.vector(&coords);
        let t = crate::float::sub(x, &gamma.embedding);
        Ok((gamma, QuasiMomentum { reduced: t, original: x.to_vec() }))
    }

    /// Γ ∩ ball: vectors with `|γ| < radius` (strict), sorted by
    /// `(|γ|², integer coordinates)`.
    pub fn enumerate_ball(&self, radius: f64, exclude_zero: bool) -> Vec<LatticeVector> {
        let zero = vec![0.0; self.dim];
        let mut out = self.enumerate_around(&zero, radius, Boundary::Open);
        if exclude_zero {
            out.retain(|v| !v.is_zero());
        }
        out
    }

    /// Lattice vectors `γ` with `|γ - center|` below (or up to) `radius`,
    /// sorted by `(|γ - center|², integer coordinates)`.
    pub fn enumerate_around(&self, center: &[f64], radius: f64, boundary: Boundary) -> Vec<LatticeVector> {
        let d = self.dim;
        if radius < 0.0 || !radius.is_finite() {
            return Vec::new();
        }
        let origin = center.iter().all(|&c| c == 0.0);
        let exact = origin && self.dual_gram.is_some();
        let uc = self.fractional_coords(center);
        // |u_j| range: column j of G^{-1}
        let mut lo = vec![0i64; d];
        let mut hi = vec![0i64; d];
        for j in 0..d {
            let col: f64 = sqrt((0..d).map(|i| { let v = self.dual_inv[i * d + j]; v * v }).sum());
            let reach = radius * col + 1e-9;
            lo[j] = floor(uc[j] - reach) as i64;
            hi[j] = floor(uc[j] + reach) as i64 + 1;
        }
        let r2 = radius * radius;
        let tol = 1e-9 * radius;
        let mut found: Vec<(f64, Option<i64>, LatticeVector)> = Vec::new();
        let mut n = lo.clone();
        loop {
            let emb = self.embed(&n);
            let dist2: f64 = emb.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
            let exact_n2 = if exact { self.exact_norm_sqr(&n) } else { None };
            let inside = match (exact_n2, boundary) {
                (Some(n2), Boundary::Open) => (n2 as f64) < r2,
                (Some(n2), Boundary::Closed) => (n2 as f64) <= r2,
                (None, Boundary::Open) => sqrt(dist2) < radius - tol,
                (None, Boundary::Closed) => sqrt(dist2) <= radius + tol,
            };
            if inside {
                found.push((dist2, exact_n2, LatticeVector { coords: n.clone(), embedding: emb }));
            }
            // odometer
            let mut k = 0;
            loop {
                if k == d {
                    found.sort_by(|a, b| compare_key(a, b));
                    return found.into_iter().map(|x| x.2).collect();
                }
                n[k] += 1;
                if n[k] <= hi[k] {
                    break;
                }
                n[k] = lo[k];
                k += 1;
            }
        }
    }
}

fn compare_key(a: &(f64, Option<i64>, LatticeVector), b: &(f64, Option<i64>, LatticeVector)) -> Ordering {
    let by_norm = match (a.1, b.1) {
        (Some(x), Some(y)) => x.cmp(&y),
        _ => a.0.total_cmp(&b.0),
    };
    by_norm.then_with(|| a.2.coords.cmp(&b.2.coords))
}

/// Whether a ball boundary belongs to the ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Closed,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_count(r: f64, box_half: i64) -> usize {
        let mut c = 0;
        for i in -box_half..=box_half {
            for j in -box_half..=box_half {
                let n2 = (i * i + j * j) as f64;
                if n2 > 0.0 && sqrt(n2) < r {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn dual_of_scaled_identity() {
        let dual = dual_lattice(&[vec![2.0 * PI, 0.0], vec![0.0, 2.0 * PI]]).unwrap();
        assert!((dual[0][0] - 1.0).abs() < 1e-15 && dual[0][1].abs() < 1e-15);
        assert!((dual[1][1] - 1.0).abs() < 1e-15 && dual[1][0].abs() < 1e-15);
    }

    #[test]
    fn dual_of_diagonal() {
        let dual = dual_lattice(&[vec![2.0 * PI, 0.0], vec![0.0, 4.0 * PI]]).unwrap();
        assert!((dual[0][0] - 1.0).abs() < 1e-15);
        assert!((dual[1][1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dual_of_hexagonal() {
        let lat = LatticeModel::hexagonal();
        let g1 = lat.dual_vector(0);
        let g2 = lat.dual_vector(1);
        // solved by hand from (γ_i, ω_j) = 2π δ_ij
        assert!((g1[0] - 1.0).abs() < 1e-14 && (g1[1] + 1.0 / sqrt(3.0)).abs() < 1e-14);
        assert!(g2[0].abs() < 1e-14 && (g2[1] - 2.0 / sqrt(3.0)).abs() < 1e-14);
        for i in 0..2 {
            for j in 0..2 {
                let ip = crate::float::dot(lat.dual_vector(i), lat.basis_vector(j));
                let want = if i == j { 2.0 * PI } else { 0.0 };
                assert!((ip - want).abs() < 1e-10 * 2.0 * PI);
            }
        }
    }

    #[test]
    fn singular_basis_rejected() {
        let err = dual_lattice(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap_err();
        assert!(matches!(err, Error::SingularBasis { .. }));
    }

    #[test]
    fn double_dual_reproduces_basis() {
        let lat = LatticeModel::hexagonal();
        let back = dual_lattice(&lat.dual_rows()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((back[i][j] - lat.basis_vector(i)[j]).abs() < 1e-12 * 2.0 * PI);
            }
        }
    }

    #[test]
    fn ball_counts_match_brute_force() {
        let lat = LatticeModel::cubic(2);
        assert!(lat.enumerate_ball(0.5, true).is_empty());
        let b = lat.enumerate_ball(1.5, true);
        assert_eq!(b.len(), brute_force_count(1.5, 2));
        assert_eq!(b.len(), 8);
        assert_eq!(lat.enumerate_ball(1.2, true).len(), 4);
        let b = lat.enumerate_ball(2.3, true);
        assert_eq!(b.len(), brute_force_count(2.3, 3));
        assert_eq!(b.len(), 20);
        assert_eq!(lat.enumerate_ball(2.3, false).len(), 21);
        // strict boundary: |γ| = 2 excluded at radius 2
        assert_eq!(lat.enumerate_ball(2.0, true).len(), 8);
    }

    #[test]
    fn ball_order_is_by_norm_then_coords() {
        let lat = LatticeModel::cubic(2);
        let b = lat.enumerate_ball(1.2, false);
        let coords: Vec<Vec<i64>> = b.iter().map(|v| v.coords.clone()).collect();
        assert_eq!(coords, vec![vec![0, 0], vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn reduce_examples() {
        let lat = LatticeModel::cubic(2);
        let (g, t) = lat.reduce(&[0.0, 0.0]).unwrap();
        assert_eq!(g.coords, vec![0, 0]);
        assert_eq!(t.reduced, vec![0.0, 0.0]);
        let (g, t) = lat.reduce(&[5.3, -4.2]).unwrap();
        assert_eq!(g.coords, vec![5, -5]);
        assert!((t.reduced[0] - 0.3).abs() < 1e-12 && (t.reduced[1] - 0.8).abs() < 1e-12);

        let hex = LatticeModel::hexagonal();
        let x: Vec<f64> = (0..2).map(|i| hex.dual_vector(0)[i] + 0.25 * hex.dual_vector(1)[i]).collect();
        let (g, t) = hex.reduce(&x).unwrap();
        assert_eq!(g.coords, vec![1, 0]);
        for i in 0..2 {
            assert!((t.reduced[i] - 0.25 * hex.dual_vector(1)[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn lattice_point_density() {
        let lat = LatticeModel::cubic(2);
        for r in [20.0, 40.0] {
            let count = lat.enumerate_ball(r, false).len() as f64;
            let expected = PI * r * r / lat.dual_cell_volume();
            assert!((count / expected - 1.0).abs() < 0.1, "r={r}: {count} vs {expected}");
        }
    }
}
