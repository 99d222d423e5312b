//! The peakon profile φ(ξ) = e^{-|ξ|} and its one-sided derivative.

use crate::error::{Error, Result};

pub fn peakon(xi: f64) -> f64 {
    (-xi.abs()).exp()
}

/// φ'(ξ) = -sgn(ξ) e^{-|ξ|}; undefined at the crest.
pub fn peakon_derivative(xi: f64) -> Result<f64> {
    if xi == 0.0 {
        return Err(Error::PeakSingularity);
    }
    Ok(dphi(xi))
}

// Callers guarantee ξ ≠ 0 (staggered grids never hit the crest).
#[inline]
pub(crate) fn dphi(xi: f64) -> f64 {
    -xi.signum() * (-xi.abs()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn values() {
        let ln2 = std::f64::consts::LN_2;
        assert_eq!(peakon(0.0), 1.0);
        assert_abs_diff_eq!(peakon(ln2), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(peakon(-ln2), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(peakon_derivative(ln2).unwrap(), -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(peakon_derivative(-ln2).unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(
            peakon_derivative(0.0),
            Err(Error::PeakSingularity)
        ));
    }

    #[test]
    fn second_derivative_equals_profile_off_crest() {
        let h = 1e-3;
        for &x in &[-3.0, -0.7, 0.2, 1.9, 6.0] {
            let fd = (peakon(x + h) - 2.0 * peakon(x) + peakon(x - h)) / (h * h);
            assert!((fd - peakon(x)).abs() < 1e-6 * (1.0 + peakon(x)));
        }
    }
}
