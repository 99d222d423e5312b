use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::convolution::Helmholtz;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::operators::apply_l_upwind;

/// Windows (in |ξ|) on which the far-field residual is projected onto e^{-|ξ|}.
const FAR_WINDOW: (f64, f64) = (1.0, 5.0);

/// Momentum of e^{λξ} t^q with t = 1 - e^{2ξ} is e^{λξ} t^{q-2} (A + B t + C t²).
fn momentum_coefficients(q: Complex64, lambda: Complex64) -> (Complex64, Complex64, Complex64) {
    let a = 4.0 * q * (1.0 - q);
    let b = 4.0 * q * (lambda + 2.0 * q - 1.0);
    let c = 1.0 - (lambda + 2.0 * q).powi(2);
    (a, b, c)
}

/// Candidate L-eigenfunction for 0 < Re λ < 5 - b, normalized by m₊ = 0, m₋ = 1.
///
/// υ - υ'' = m is solved by peeling off the two leading singular terms of the
/// local expansion at 0⁻ analytically and Helmholtz-solving the (integrable)
/// remainder. The homogeneous part c₀φ + c₁φ' is then fixed so that the
/// discrete L-residual has no far-field e^{-|ξ|} component.
pub fn reconstruct_eigenfunction(lambda: Complex64, b: f64, grid: &Grid) -> Result<GridFunction> {
    let edge = 5.0 - b;
    if !(b < 5.0 && lambda.re > 0.0 && lambda.re < edge) {
        return Err(Error::OutOfBand { lambda, edge });
    }
    let s = lambda + b;
    if s.im == 0.0 && (s.re == 2.0 || s.re == 4.0) {
        return Err(Error::LogCase(s.re));
    }
    let p = 2.0 - s * 0.5;
    let (ap, bp, cp) = momentum_coefficients(p, lambda);
    let (a1, b1, c1) = momentum_coefficients(p + 1.0, lambda);
    let k1 = 1.0 / ap;
    let k2 = -k1 * bp / a1;

    let n = grid.len();
    let m = grid.crest();
    let zero = Complex64::new(0.0, 0.0);
    let mut w = vec![zero; n];
    let mut rem = vec![zero; n];
    for j in 0..m {
        let x = grid.point(j);
        let t = Complex64::new(-(2.0 * x).exp_m1(), 0.0);
        let e = (lambda * x).exp();
        let tp = t.powc(p);
        w[j] = e * (k1 * tp + k2 * tp * t);
        rem[j] = -e * ((k1 * cp + k2 * b1) * tp + k2 * c1 * tp * t);
    }
    Helmholtz::new(grid).solve(&mut rem);
    let particular: Vec<Complex64> = w.iter().zip(&rem).map(|(a, b)| a + b).collect();
    let particular = GridFunction::new(*grid, particular)?;

    let residual = apply_l_upwind(grid, b, &particular).axpy(-lambda, &particular)?;
    let project = |sign: f64| -> Complex64 {
        let mut num = zero;
        let mut den = 0.0;
        for (j, r) in residual.values().iter().enumerate() {
            let x = grid.point(j);
            if sign * x > FAR_WINDOW.0 && sign * x < FAR_WINDOW.1 {
                let e = (-(x.abs())).exp();
                num += r * e;
                den += e * e;
            }
        }
        num / den
    };
    let (left, right) = (project(-1.0), project(1.0));
    let a = (left + right) * 0.5;
    let d = (left - right) * 0.5;
    // (L - λ)(c₀φ + c₁φ') = (-λc₀ + (b-2)c₁)φ + ((4-b)c₀ - λc₁)φ'
    let det = lambda * lambda - (b - 2.0) * (4.0 - b);
    let c0 = (lambda * a + (b - 2.0) * d) / det;
    let c1 = ((4.0 - b) * a + lambda * d) / det;

    let phi = grid.phi();
    let dphi = grid.dphi();
    particular.axpy(c0, &phi)?.axpy(c1, &dphi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    /// Window on s = -ξ, i.e. ξ ∈ (-hi, -lo).
    pub lo: f64,
    pub hi: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow { lo: 0.01, hi: 0.2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub predicted_exponent: Complex64,
    pub fitted_exponent: f64,
    pub fit_window: FitWindow,
    pub log_correction: bool,
    pub residual: f64,
}

/// Fits υ(ξ) ≈ c₀ + c₁s + c₂s^σ + c₃s^{σ+1} (s = -ξ) on the window by variable
/// projection: σ scanned on [-0.49, 1.49], then refined by golden section.
pub fn fit_local_exponent(
    v: &GridFunction,
    lambda: Complex64,
    b: f64,
    window: FitWindow,
) -> Result<ExponentReport> {
    let grid = v.grid();
    let (s, y): (Vec<f64>, Vec<f64>) = (0..grid.crest())
        .filter_map(|j| {
            let x = grid.point(j);
            (-x > window.lo && -x < window.hi).then(|| (-x, v.values()[j].re))
        })
        .unzip();
    if s.len() < 6 {
        return Err(Error::EmptyWindow(-window.hi, -window.lo));
    }
    let misfit = |sigma: f64| -> f64 {
        let cols: Vec<[f64; 4]> = s
            .iter()
            .map(|&t| [1.0, t, t.powf(sigma), t.powf(sigma + 1.0)])
            .collect();
        least_squares_residual(&cols, &y)
    };

    let grid_pts = 199;
    let (lo, hi) = (-0.49, 1.49);
    let step = (hi - lo) / (grid_pts - 1) as f64;
    let best = (0..grid_pts)
        .map(|i| lo + step * i as f64)
        .map(|q| (q, misfit(q)))
        .fold((lo, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let (mut a, mut c) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = c - g * (c - a);
    let mut x2 = a + g * (c - a);
    let (mut f1, mut f2) = (misfit(x1), misfit(x2));
    while c - a > 1e-8 {
        if f1 < f2 {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - g * (c - a);
            f1 = misfit(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (c - a);
            f2 = misfit(x2);
        }
    }
    let sigma = 0.5 * (a + c);
    let sum = lambda + b;
    Ok(ExponentReport {
        predicted_exponent: 2.0 - sum * 0.5,
        fitted_exponent: sigma,
        fit_window: window,
        log_correction: sum.im == 0.0 && (sum.re == 2.0 || sum.re == 4.0),
        residual: misfit(sigma),
    })
}

/// ‖Mc - y‖ for the least-squares c, through the normal equations (4×4, column-scaled).
fn least_squares_residual(cols: &[[f64; 4]], y: &[f64]) -> f64 {
    let mut scale = [0.0f64; 4];
    for r in cols {
        for k in 0..4 {
            scale[k] = scale[k].max(r[k].abs());
        }
    }
    let mut g = [[0.0; 5]; 4];
    for (r, &yi) in cols.iter().zip(y) {
        let r: Vec<f64> = (0..4).map(|k| r[k] / scale[k]).collect();
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] += r[i] * r[j];
            }
            g[i][4] += r[i] * yi;
        }
    }
    // Gaussian elimination with a small ridge for near-collinear σ ≈ 0, 1.
    for (i, row) in g.iter_mut().enumerate() {
        row[i] += 1e-14;
    }
    for c in 0..4 {
        let p = (c..4)
            .max_by(|&i, &j| g[i][c].abs().total_cmp(&g[j][c].abs()))
            .expect("rows");
        g.swap(c, p);
        for i in c + 1..4 {
            let f = g[i][c] / g[c][c];
            for k in c..5 {
                g[i][k] -= f * g[c][k];
            }
        }
    }
    let mut coef = [0.0; 4];
    for i in (0..4).rev() {
        let s: f64 = (i + 1..4).map(|k| g[i][k] * coef[k]).sum();
        coef[i] = (g[i][4] - s) / g[i][i];
    }
    cols.iter()
        .zip(y)
        .map(|(r, &yi)| {
            let fit: f64 = (0..4).map(|k| r[k] / scale[k] * coef[k]).sum();
            (fit - yi).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FResidualReport {
    /// max |left side of the f-equation + 1| on the window; absent in log cases.
    pub max_deviation: Option<f64>,
    pub window: (f64, f64),
    pub log_correction: bool,
}

/// Recovers f = υ e^{-λξ} (1 - e^{2ξ})^{(λ+b)/2 - 2} on ξ < 0 from the
/// reconstruction and checks
/// t²f'' + 2t(λ + (b-4)e^{2ξ})f' + [(b-5)(b-3)e^{4ξ} + 2(b-3)(λ+1)e^{2ξ} + λ² - 1]f = -1.
pub fn f_ode_residual(
    lambda: Complex64,
    b: f64,
    grid: &Grid,
    window: (f64, f64),
) -> Result<FResidualReport> {
    let sum = lambda + b;
    if sum.im == 0.0 && (sum.re == 2.0 || sum.re == 4.0) {
        return Ok(FResidualReport {
            max_deviation: None,
            window,
            log_correction: true,
        });
    }
    let v = reconstruct_eigenfunction(lambda, b, grid)?;
    let h = grid.spacing();
    let idx: Vec<usize> = (1..grid.crest() - 1)
        .filter(|&j| grid.point(j) >= window.0 && grid.point(j) <= window.1)
        .collect();
    if idx.is_empty() {
        return Err(Error::EmptyWindow(window.0, window.1));
    }
    let f = |j: usize| -> Complex64 {
        let x = grid.point(j);
        let t = -(2.0 * x).exp_m1();
        v.values()[j] * (-lambda * x).exp() * Complex64::new(t, 0.0).powc(sum * 0.5 - 2.0)
    };
    let mut worst: f64 = 0.0;
    for &j in &idx {
        let x = grid.point(j);
        let e2 = (2.0 * x).exp();
        let t = 1.0 - e2;
        let (fm, f0, fp) = (f(j - 1), f(j), f(j + 1));
        let d1 = (fp - fm) / (2.0 * h);
        let d2 = (fp - 2.0 * f0 + fm) / (h * h);
        let lhs = t * t * d2
            + 2.0 * t * (lambda + (b - 4.0) * e2) * d1
            + ((b - 5.0) * (b - 3.0) * e2 * e2
                + 2.0 * (b - 3.0) * (lambda + 1.0) * e2
                + lambda * lambda
                - 1.0)
                * f0;
        worst = worst.max((lhs + 1.0).norm());
    }
    Ok(FResidualReport {
        max_deviation: Some(worst),
        window,
        log_correction: false,
    })
}
