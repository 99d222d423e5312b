use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::assembly::{assemble_l_with, OperatorMatrix, OperatorTag, Stencil};
use super::bands::{band_prediction, Space};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    /// Largest n accepted for a dense eigensolve.
    pub max_points: usize,
    /// Slack δ allowed outside the predicted closure band before an eigenvalue is flagged.
    pub band_tol: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            max_points: 4096,
            band_tol: 0.3,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub b: f64,
    pub tag: OperatorTag,
    pub stencil: Stencil,
    pub half_width: f64,
    pub n: usize,
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
    pub max_abs_real_part: f64,
    /// max(0, max |Re λ| - |5 - b|)
    pub band_excess: f64,
    pub band_tol: f64,
    pub band_violations: Vec<Complex64>,
}

/// All eigenvalues of a real dense matrix stored row-major.
pub(crate) fn dense_eigenvalues(n: usize, row_major: &[f64]) -> Result<Vec<Complex64>> {
    // The row-major buffer read column-major is the transpose: same spectrum.
    let mut a = row_major.to_vec();
    let ni = n as i32;
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut vl = [0.0];
    let mut vr = [0.0];
    let mut query = [0.0];
    let mut info = 0;
    unsafe {
        lapack::dgeev(
            b'N', b'N', ni, &mut a, ni, &mut wr, &mut wi, &mut vl, 1, &mut vr, 1, &mut query, -1,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolve(format!(
            "workspace query failed (info = {info})"
        )));
    }
    let lwork = query[0] as usize;
    let mut work = vec![0.0; lwork.max(4 * n)];
    let lwork = work.len() as i32;
    unsafe {
        lapack::dgeev(
            b'N', b'N', ni, &mut a, ni, &mut wr, &mut wi, &mut vl, 1, &mut vr, 1, &mut work, lwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolve(format!(
            "QR iteration failed (info = {info})"
        )));
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(r, i)| Complex64::new(r, i))
        .collect())
}

pub fn compute_spectrum(op: &OperatorMatrix, config: &SpectrumConfig) -> Result<SpectrumReport> {
    let n = op.grid().len();
    if n > config.max_points {
        return Err(Error::TooLarge {
            n,
            cap: config.max_points,
        });
    }
    let mut eigenvalues = dense_eigenvalues(n, op.entries().as_slice().expect("standard layout"))?;
    if eigenvalues
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::Eigensolve("non-finite eigenvalue".into()));
    }
    eigenvalues.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));

    let b = op.b();
    let edge = (5.0 - b).abs();
    let max_real_part = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let max_abs_real_part = eigenvalues.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    // For L* the band is the same strip (the spectrum is conjugate-reflected).
    let prediction = band_prediction(b, Space::L2);
    let band_violations = eigenvalues
        .iter()
        .copied()
        .filter(|&z| !prediction.in_closure(z, config.band_tol))
        .collect();
    Ok(SpectrumReport {
        b,
        tag: op.tag(),
        stencil: op.stencil(),
        half_width: op.grid().half_width(),
        n,
        eigenvalues,
        max_real_part,
        max_abs_real_part,
        band_excess: (max_abs_real_part - edge).max(0.0),
        band_tol: config.band_tol,
        band_violations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandMapRow {
    pub b: f64,
    pub predicted_edge: f64,
    pub computed_max_abs_re: f64,
    pub band_excess: f64,
    pub violations: usize,
}

/// Spectra of L over a sweep of b; one independent eigensolve per value.
pub fn band_map(
    grid: &Grid,
    bs: &[f64],
    stencil: Stencil,
    config: &SpectrumConfig,
    exec: Exec,
) -> Result<Vec<BandMapRow>> {
    exec.map_slice(bs, |&b| {
        let op = assemble_l_with(grid, b, stencil, Exec::Sequential);
        let r = compute_spectrum(&op, config)?;
        Ok(BandMapRow {
            b,
            predicted_edge: (5.0 - b).abs(),
            computed_max_abs_re: r.max_abs_real_part,
            band_excess: r.band_excess,
            violations: r.band_violations.len(),
        })
    })
    .into_iter()
    .collect()
}
