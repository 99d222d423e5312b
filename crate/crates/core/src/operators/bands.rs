use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Space {
    L2,
    /// H¹ functions vanishing at the crest.
    H1Tilde,
}

/// Exact band geometry. A band `Some(r)` means 0 < |Re λ| < r (closure: |Re λ| ≤ r).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandPrediction {
    pub b: f64,
    pub space: Space,
    pub closure_band: Option<f64>,
    pub point_band: Option<f64>,
    pub residual_band: Option<f64>,
    pub embedded_eigenvalues: Vec<Complex64>,
}

impl BandPrediction {
    pub fn in_closure(&self, lambda: Complex64, tol: f64) -> bool {
        self.closure_band
            .map_or(true, |r| lambda.re.abs() <= r + tol)
    }
}

pub fn band_prediction(b: f64, space: Space) -> BandPrediction {
    let (closure, point, residual) = match space {
        Space::L2 => (
            Some((5.0 - b).abs()),
            (b < 5.0).then_some(5.0 - b),
            (b > 5.0).then_some(b - 5.0),
        ),
        Space::H1Tilde => (
            None,
            (b < 3.0).then_some(3.0 - b),
            (b > 3.0).then_some(b - 3.0),
        ),
    };
    let pair = subspace_eigenvalues(b);
    BandPrediction {
        b,
        space,
        closure_band: closure,
        point_band: point,
        residual_band: residual,
        embedded_eigenvalues: vec![pair.eigenvalues.0, pair.eigenvalues.1],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspacePair {
    /// (+, -) ordering: the root with non-negative real (or imaginary) part first.
    pub eigenvalues: (Complex64, Complex64),
    pub double_zero: bool,
}

/// Eigenvalues of L on span{φ, φ'}: ±√((b - 2)(4 - b)).
pub fn subspace_eigenvalues(b: f64) -> SubspacePair {
    let d = (b - 2.0) * (4.0 - b);
    let root = Complex64::new(d, 0.0).sqrt();
    SubspacePair {
        eigenvalues: (root, -root),
        double_zero: d == 0.0,
    }
}
