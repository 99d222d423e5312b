//! Convolution with φ = e^{-|ξ|} by inverting (1 - ∂²)/2.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::grid::{centered_difference, Grid, GridFunction};

/// Endpoint magnitude above which a convolution input is reported as not decaying.
pub const DECAY_WARN_THRESHOLD: f64 = 1e-10;

pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

/// Pre-factored tridiagonal system for (1 - D²) w = r on a staggered grid.
///
/// The two boundary rows use the ghost values w_{-1} = e^{-h} w_0 and
/// w_n = e^{-h} w_{n-1}, i.e. the exact decay rate of the homogeneous solution.
#[derive(Clone, Debug)]
pub struct Helmholtz {
    h: f64,
    off: f64,
    upper: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl Helmholtz {
    pub fn new(grid: &Grid) -> Self {
        let n = grid.len();
        let h = grid.spacing();
        let off = -1.0 / (h * h);
        let inner = 1.0 + 2.0 / (h * h);
        let edge = inner - (-h).exp() / (h * h);

        let mut upper = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        let mut pivot = edge;
        for i in 0..n {
            if i > 0 {
                let d = if i == n - 1 { edge } else { inner };
                pivot = d - off * upper[i - 1];
            }
            assert!(pivot.abs() > 0.0, "singular Helmholtz system");
            inv_pivot[i] = 1.0 / pivot;
            upper[i] = off * inv_pivot[i];
        }
        Helmholtz {
            h,
            off,
            upper,
            inv_pivot,
        }
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    /// Solves (1 - D²) w = r in place.
    pub fn solve<T: Scalar>(&self, r: &mut [T]) {
        let n = self.len();
        assert_eq!(r.len(), n);
        r[0] = r[0] * self.inv_pivot[0];
        for i in 1..n {
            r[i] = (r[i] - r[i - 1] * self.off) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            r[i] = r[i] - r[i + 1] * self.upper[i];
        }
    }

    /// φ ∗ g
    pub fn phi<T: Scalar>(&self, g: &[T]) -> Vec<T> {
        let mut w: Vec<T> = g.iter().map(|&v| v * 2.0).collect();
        self.solve(&mut w);
        w
    }

    /// φ' ∗ g = ∂(φ ∗ g)
    pub fn phi_prime<T: Scalar>(&self, g: &[T]) -> Vec<T> {
        centered_difference(&self.phi(g), self.h)
    }
}

fn warn_if_not_decaying(g: &GridFunction) {
    let v = g.values();
    let edge = v[0].norm().max(v[v.len() - 1].norm());
    if edge > DECAY_WARN_THRESHOLD {
        log::warn!("convolution input does not decay at the boundary (|g| = {edge:e})");
    }
}

pub fn convolve_phi(g: &GridFunction) -> GridFunction {
    warn_if_not_decaying(g);
    let w = Helmholtz::new(g.grid()).phi(g.values());
    GridFunction::new(*g.grid(), w).expect("length preserved")
}

pub fn convolve_phi_prime(g: &GridFunction) -> GridFunction {
    warn_if_not_decaying(g);
    let w = Helmholtz::new(g.grid()).phi_prime(g.values());
    GridFunction::new(*g.grid(), w).expect("length preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::peakon;

    #[test]
    fn peakon_self_convolution() {
        let g = Grid::new(30.0, 4096).unwrap();
        let w = convolve_phi(&g.phi());
        let dw = convolve_phi_prime(&g.phi());
        for j in (0..g.len()).step_by(37) {
            let x = g.point(j);
            assert!((w.values()[j].re - (1.0 + x.abs()) * peakon(x)).abs() < 1e-3);
            assert!((dw.values()[j].re + x * peakon(x)).abs() < 1e-3);
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = Grid::new(10.0, 64).unwrap();
        let z = GridFunction::zeros(g);
        assert!(convolve_phi(&z).sup_norm() == 0.0);
        assert!(convolve_phi_prime(&z).sup_norm() == 0.0);
    }

    #[test]
    fn recovers_source_on_interior() {
        let g = Grid::new(15.0, 2000).unwrap();
        let h = g.spacing();
        let src: Vec<f64> = g
            .points()
            .iter()
            .map(|x| (-x * x).exp() * x.cos())
            .collect();
        let w = Helmholtz::new(&g).phi(&src);
        for i in 1..g.len() - 1 {
            let lhs = (w[i] - (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h)) / 2.0;
            assert!((lhs - src[i]).abs() < 1e-10);
        }
    }
}
