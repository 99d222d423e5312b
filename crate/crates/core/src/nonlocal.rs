//! The compact nonlocal part Q of the linearized operator.
//!
//! Q v = (b - 3) [φ ∗ ((φ²)' v) - 2 φ' ∗ (φ² v)] = ∫ (b - 3)(K1 - 2 K2)(ξ, η) v(η) dη

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::convolution::Helmholtz;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::{Grid, GridFunction};
use crate::quadrature::{integrate_2d, Estimate};

/// Beyond this radius the Hilbert–Schmidt integrands are below e^{-40}.
pub const HS_TRUNCATION: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum KernelTag {
    K1,
    /// Kernel of v ↦ φ' ∗ (φ² v).
    K2,
    QKernel {
        b: f64,
    },
}

#[inline]
fn k1(xi: f64, eta: f64) -> f64 {
    -2.0 * eta.signum() * (-(xi - eta).abs() - 2.0 * eta.abs()).exp()
}

#[inline]
fn k2(xi: f64, eta: f64) -> f64 {
    let d = xi - eta;
    if d == 0.0 {
        return 0.0;
    }
    -d.signum() * (-d.abs() - 2.0 * eta.abs()).exp()
}

#[inline]
fn q_kernel(b: f64, xi: f64, eta: f64) -> f64 {
    (b - 3.0) * (k1(xi, eta) - 2.0 * k2(xi, eta))
}

pub fn kernel_eval(tag: KernelTag, xi: f64, eta: f64) -> Result<f64> {
    let on_k1_line = eta == 0.0;
    let on_k2_line = xi == eta;
    match tag {
        KernelTag::K1 if on_k1_line => Err(Error::SingularLine { xi, eta }),
        KernelTag::K2 if on_k2_line => Err(Error::SingularLine { xi, eta }),
        KernelTag::QKernel { b } if !b.is_finite() => {
            Err(Error::InvalidParameter(format!("b = {b} must be finite")))
        }
        KernelTag::QKernel { .. } if on_k1_line || on_k2_line => {
            Err(Error::SingularLine { xi, eta })
        }
        KernelTag::K1 => Ok(k1(xi, eta)),
        KernelTag::K2 => Ok(k2(xi, eta)),
        KernelTag::QKernel { b } => Ok(q_kernel(b, xi, eta)),
    }
}

/// ∫∫ |K|² over the plane (truncated to [-20, 20]²).
pub fn hs_norm_squared(tag: KernelTag, tol: f64) -> Result<Estimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol = {tol} must be positive"
        )));
    }
    let sq: Box<dyn Fn(f64, f64) -> f64> = match tag {
        KernelTag::K1 => Box::new(|x, y| k1(x, y).powi(2)),
        KernelTag::K2 => Box::new(|x, y| k2(x, y).powi(2)),
        KernelTag::QKernel { b } => {
            if !b.is_finite() {
                return Err(Error::InvalidParameter(format!("b = {b} must be finite")));
            }
            if b == 3.0 {
                return Ok(Estimate {
                    value: 0.0,
                    error: 0.0,
                });
            }
            Box::new(move |x, y| q_kernel(b, x, y).powi(2))
        }
    };
    let t = HS_TRUNCATION;
    // outer variable η, inner ξ
    integrate_2d(
        |eta, xi| sq(xi, eta),
        &[-t, 0.0, t],
        |eta| vec![-t, eta, t],
        0.25 * tol,
    )
}

/// Q v through two Helmholtz solves.
pub fn apply_q(v: &GridFunction, b: f64) -> GridFunction {
    let grid = *v.grid();
    let helm = Helmholtz::new(&grid);
    let values = apply_q_with(&helm, &grid.phi_vec(), &grid.dphi_vec(), v.values(), b);
    GridFunction::new(grid, values).expect("length preserved")
}

pub(crate) fn apply_q_with(
    helm: &Helmholtz,
    phi: &[f64],
    dphi: &[f64],
    v: &[Complex64],
    b: f64,
) -> Vec<Complex64> {
    let first: Vec<Complex64> = v
        .iter()
        .zip(phi.iter().zip(dphi))
        .map(|(&x, (&p, &dp))| x * (2.0 * p * dp))
        .collect();
    let second: Vec<Complex64> = v.iter().zip(phi).map(|(&x, &p)| x * (p * p)).collect();
    let a = helm.phi(&first);
    let c = helm.phi_prime(&second);
    a.iter()
        .zip(&c)
        .map(|(&x, &y)| (x - 2.0 * y) * (b - 3.0))
        .collect()
}

/// Dense Q by rectangle-rule kernel quadrature; the K2 jump on the diagonal
/// is replaced by its mean, zero.
pub fn q_kernel_matrix(grid: &Grid, b: f64) -> Array2<f64> {
    q_kernel_matrix_with(grid, b, Exec::default())
}

pub fn q_kernel_matrix_with(grid: &Grid, b: f64, exec: Exec) -> Array2<f64> {
    let n = grid.len();
    let h = grid.weight();
    let x = grid.points();
    let mut data = vec![0.0; n * n];
    if b != 3.0 {
        exec.for_each_row(&mut data, n, |i, row| {
            for (j, r) in row.iter_mut().enumerate() {
                *r = h * q_kernel(b, x[i], x[j]);
            }
        });
    }
    Array2::from_shape_vec((n, n), data).expect("square")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// max |φ∗(φ'² v_ξ) - φ'∗(φ² v) + φ∗((φ²)' v)|
    pub first_residual: f64,
    /// max |φ'∗(φφ' v_ξ) - ½φ∗((φ²)' v) + 2φ'∗(φ² v) + 2φ'(φ v - v(0))|
    pub second_residual: f64,
    pub crest_value: Complex64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks the two convolution identities behind the derivation of L on the grid.
///
/// v_ξ is taken piecewise (never across the crest); v(0) by linear interpolation.
pub fn verify_convolution_identities(v: &GridFunction, tol: f64) -> IdentityReport {
    let grid = *v.grid();
    let helm = Helmholtz::new(&grid);
    let phi = grid.phi_vec();
    let dphi = grid.dphi_vec();
    let vx = v.piecewise_derivative();
    let v0 = v.value_at_crest();

    let prod = |f: &dyn Fn(usize) -> f64, u: &[Complex64]| -> Vec<Complex64> {
        u.iter().enumerate().map(|(i, &x)| x * f(i)).collect()
    };
    let vv = v.values();
    let vxv = vx.values();

    let c_p2v = helm.phi_prime(&prod(&|i| phi[i] * phi[i], vv));
    let c_dp2v = helm.phi(&prod(&|i| 2.0 * phi[i] * dphi[i], vv));
    let lhs1 = helm.phi(&prod(&|i| dphi[i] * dphi[i], vxv));
    let lhs2 = helm.phi_prime(&prod(&|i| phi[i] * dphi[i], vxv));

    let mut first: f64 = 0.0;
    let mut second: f64 = 0.0;
    for i in 0..grid.len() {
        let r1 = lhs1[i] - (c_p2v[i] - c_dp2v[i]);
        let r2 =
            lhs2[i] - (0.5 * c_dp2v[i] - 2.0 * c_p2v[i] - 2.0 * dphi[i] * (phi[i] * vv[i] - v0));
        first = first.max(r1.norm());
        second = second.max(r2.norm());
    }
    IdentityReport {
        first_residual: first,
        second_residual: second,
        crest_value: v0,
        tol,
        pass: first <= tol && second <= tol,
    }
}
