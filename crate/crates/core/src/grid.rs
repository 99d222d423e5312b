//! Staggered grids on [-L, L] and complex samples on them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{dphi, peakon};

/// ξ_j = -L + (j + 1/2) h with h = 2L/n. No node sits on the crest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_width: f64,
    n: usize,
}

impl Grid {
    pub const DEFAULT_HALF_WIDTH: f64 = 30.0;
    pub const DEFAULT_POINTS: usize = 4096;

    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width {half_width} must be positive"
            )));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be even and at least 8"
            )));
        }
        Ok(Grid { half_width, n })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    #[inline]
    pub fn point(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Index of the first node right of the crest; the node left of it is `crest() - 1`.
    pub fn crest(&self) -> usize {
        self.n / 2
    }

    /// Quadrature weight, identical at every node.
    pub fn weight(&self) -> f64 {
        self.spacing()
    }

    pub fn sample(&self, f: impl Fn(f64) -> Complex64) -> GridFunction {
        GridFunction {
            grid: *self,
            values: (0..self.n).map(|j| f(self.point(j))).collect(),
        }
    }

    pub fn sample_real(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        self.sample(|x| Complex64::new(f(x), 0.0))
    }

    pub fn phi(&self) -> GridFunction {
        self.sample_real(peakon)
    }

    pub fn dphi(&self) -> GridFunction {
        self.sample_real(dphi)
    }

    pub(crate) fn phi_vec(&self) -> Vec<f64> {
        (0..self.n).map(|j| peakon(self.point(j))).collect()
    }

    pub(crate) fn dphi_vec(&self) -> Vec<f64> {
        (0..self.n).map(|j| dphi(self.point(j))).collect()
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            half_width: Self::DEFAULT_HALF_WIDTH,
            n: Self::DEFAULT_POINTS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(
            grid,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> GridFunction {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| f(self.grid.point(j), v))
            .collect();
        GridFunction {
            grid: self.grid,
            values,
        }
    }

    pub fn scaled(&self, a: Complex64) -> GridFunction {
        self.map(|_, v| a * v)
    }

    /// `self + a·other`
    pub fn axpy(&self, a: Complex64, other: &GridFunction) -> Result<GridFunction> {
        self.check(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| x + a * y)
            .collect();
        Ok(GridFunction {
            grid: self.grid,
            values,
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn l2_norm(&self) -> f64 {
        (self.grid.weight() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn h1_norm(&self) -> f64 {
        let d = self.derivative();
        let w = self.grid.weight();
        let s: f64 = self
            .values
            .iter()
            .zip(&d.values)
            .map(|(v, dv)| v.norm_sqr() + dv.norm_sqr())
            .sum();
        (w * s).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// ∫ conj(self) · other.
    pub fn inner_product(&self, other: &GridFunction) -> Result<Complex64> {
        self.check(other)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.weight())
    }

    /// Centered differences inside, first-order one-sided at the two ends.
    pub fn derivative(&self) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: centered_difference(&self.values, self.grid.spacing()),
        }
    }

    /// Derivative that never differences across the crest: second-order
    /// one-sided stencils on the two crest neighbours and at the ends,
    /// centered elsewhere.
    pub fn piecewise_derivative(&self) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: piecewise_difference(&self.values, self.grid.spacing()),
        }
    }

    /// Linear interpolation across the two nodes straddling the crest.
    pub fn value_at_crest(&self) -> Complex64 {
        let m = self.grid.crest();
        0.5 * (self.values[m - 1] + self.values[m])
    }

    fn check(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::LengthMismatch {
                expected: self.grid.len(),
                got: other.grid.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn centered_difference<T>(v: &[T], h: f64) -> Vec<T>
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = v.len();
    let mut d = Vec::with_capacity(n);
    d.push((v[1] - v[0]) * (1.0 / h));
    for i in 1..n - 1 {
        d.push((v[i + 1] - v[i - 1]) * (0.5 / h));
    }
    d.push((v[n - 1] - v[n - 2]) * (1.0 / h));
    d
}

pub(crate) fn piecewise_difference<T>(v: &[T], h: f64) -> Vec<T>
where
    T: Copy
        + std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<f64, Output = T>,
{
    let n = v.len();
    let m = n / 2;
    let s = 0.5 / h;
    let fwd = |i: usize| (v[i + 1] * 4.0 - v[i] * 3.0 - v[i + 2]) * s;
    let bwd = |i: usize| (v[i] * 3.0 - v[i - 1] * 4.0 + v[i - 2]) * s;
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        d.push(if i == 0 || i == m {
            fwd(i)
        } else if i == n - 1 || i == m - 1 {
            bwd(i)
        } else {
            (v[i + 1] - v[i - 1]) * s
        });
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn staggering_avoids_the_crest() {
        let g = Grid::new(30.0, 4096).unwrap();
        let h = g.spacing();
        assert_abs_diff_eq!(g.point(g.crest()), h / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.point(g.crest() - 1), -h / 2.0, epsilon = 1e-12);
        let p = g.points();
        assert!(p.windows(2).all(|w| w[1] > w[0]));
        assert!(p.iter().all(|x| x.abs() >= h / 2.0 - 1e-12));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(30.0, 7).is_err());
        assert!(Grid::new(-1.0, 64).is_err());
        assert!(Grid::new(f64::NAN, 64).is_err());
    }

    #[test]
    fn peakon_moments() {
        let g = Grid::default();
        let phi = g.phi();
        let dp = g.dphi();
        let p2dp = g.sample_real(|x| peakon(x).powi(2) * crate::profile::dphi(x));
        assert_abs_diff_eq!(phi.l2_norm(), 1.0, epsilon = 1e-4);
        assert_abs_diff_eq!(
            p2dp.inner_product(&phi).unwrap().norm(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(p2dp.inner_product(&dp).unwrap().re, 0.5, epsilon = 1e-4);
    }

    #[test]
    fn inner_product_is_hermitian() {
        let g = Grid::new(10.0, 256).unwrap();
        let f = g.sample(|x| Complex64::new((-x * x).exp(), x * (-x.abs()).exp()));
        let k = g.sample(|x| Complex64::new(x.cos() * (-x * x).exp(), 0.3 * (-x * x).exp()));
        let a = f.inner_product(&k).unwrap();
        let b = k.inner_product(&f).unwrap();
        assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-14);
        assert_abs_diff_eq!(a.im, -b.im, epsilon = 1e-14);
    }

    #[test]
    fn piecewise_derivative_respects_the_kink() {
        let g = Grid::new(20.0, 2048).unwrap();
        let d = g.phi().piecewise_derivative();
        let exact = g.dphi();
        let err = d.sub(&exact).unwrap().sup_norm();
        assert!(err < 1e-3 * 0.5, "{err}");
    }

    #[test]
    fn crest_value_interpolates() {
        let g = Grid::new(10.0, 1000).unwrap();
        let f = g.sample_real(|x| 2.0 + x);
        assert_abs_diff_eq!(f.value_at_crest().re, 2.0, epsilon = 1e-12);
    }
}
