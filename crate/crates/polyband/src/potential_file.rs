//! JSON coefficient tables:
//! `{"dim": 2, "coefficients": [{"n": [1, 0], "re": 0.1, "im": 0.0}, ...]}`.

use polyband_core::lattice::LatticeModel;
use polyband_core::potential::FourierPotential;
use polyband_core::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientRecord {
    pub n: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialFile {
    pub dim: usize,
    pub coefficients: Vec<CoefficientRecord>,
}

impl PotentialFile {
    pub fn from_potential(q: &FourierPotential) -> Self {
        let coefficients = q
            .entries()
            .iter()
            .map(|(g, z)| CoefficientRecord { n: g.coords.clone(), re: z.re, im: z.im })
            .collect();
        Self { dim: q.dim(), coefficients }
    }

    /// Validated potential (zero mean, Hermitian).
    pub fn into_potential(self, lattice: &LatticeModel, smoothness: f64) -> polyband_core::Result<FourierPotential> {
        if self.dim != lattice.dim() {
            return Err(polyband_core::Error::DimensionMismatch { expected: lattice.dim(), got: self.dim });
        }
        let coeffs = self.coefficients.into_iter().map(|c| (c.n, Complex64::new(c.re, c.im)));
        FourierPotential::checked(lattice, coeffs, smoothness)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let lat = LatticeModel::cubic(2);
        let q = FourierPotential::cosines(&lat, &[(vec![1, 0], 0.1), (vec![1, 1], -0.05)], 3.0).unwrap();
        let text = serde_json::to_string(&PotentialFile::from_potential(&q)).unwrap();
        let back: PotentialFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_potential(&lat, 3.0).unwrap(), q);
    }

    #[test]
    fn non_hermitian_table_is_rejected() {
        let lat = LatticeModel::cubic(2);
        let f: PotentialFile =
            serde_json::from_str(r#"{"dim": 2, "coefficients": [{"n": [1, 0], "re": 0.1, "im": 0.2}]}"#).unwrap();
        assert!(f.into_potential(&lat, 1.0).is_err());
    }
}
