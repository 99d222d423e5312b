use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::assembly::{assemble_l_with, OperatorMatrix, Stencil};
use crate::error::Result;
use crate::exec::Exec;
use crate::grid::Grid;

/// Galerkin matrix G⁻¹ Bᵀ W L B of an operator on span{φ, φ'}.
///
/// Columns are the coefficients of Lφ and Lφ' in the basis (φ, φ').
pub fn projected_matrix(op: &OperatorMatrix, exec: Exec) -> [[f64; 2]; 2] {
    let grid = op.grid();
    let basis = [grid.phi(), grid.dphi()];
    let images = [
        op.apply_with(&basis[0], exec),
        op.apply_with(&basis[1], exec),
    ];
    let mut gram = [[0.0; 2]; 2];
    let mut rhs = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            gram[i][j] = basis[i].inner_product(&basis[j]).expect("same grid").re;
            rhs[i][j] = basis[i].inner_product(&images[j]).expect("same grid").re;
        }
    }
    let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
    let inv = [
        [gram[1][1] / det, -gram[0][1] / det],
        [-gram[1][0] / det, gram[0][0] / det],
    ];
    let mut p = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            p[i][j] = inv[i][0] * rhs[0][j] + inv[i][1] * rhs[1][j];
        }
    }
    p
}

/// Roots of the characteristic polynomial, larger real (then imaginary) part first.
pub fn projected_eigenvalues(p: &[[f64; 2]; 2]) -> (Complex64, Complex64) {
    let tr = p[0][0] + p[1][1];
    let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
    let disc = Complex64::new(tr * tr / 4.0 - det, 0.0).sqrt();
    let half = Complex64::new(tr / 2.0, 0.0);
    (half + disc, half - disc)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub b: f64,
    pub coarse_n: usize,
    pub coarse: [[f64; 2]; 2],
    pub fine: [[f64; 2]; 2],
    /// (4·fine - coarse)/3
    pub extrapolated: [[f64; 2]; 2],
    pub fine_eigenvalues: (Complex64, Complex64),
    pub eigenvalues: (Complex64, Complex64),
}

/// Projects L on grids with n and 2n points and Richardson-extrapolates the
/// 2×2 matrix assuming second-order convergence.
pub fn richardson_projected_eigenvalues(
    half_width: f64,
    coarse_n: usize,
    b: f64,
    stencil: Stencil,
    exec: Exec,
) -> Result<ProjectionReport> {
    let project = |n: usize| -> Result<[[f64; 2]; 2]> {
        let grid = Grid::new(half_width, n)?;
        Ok(projected_matrix(
            &assemble_l_with(&grid, b, stencil, exec),
            exec,
        ))
    };
    let coarse = project(coarse_n)?;
    let fine = project(2 * coarse_n)?;
    let mut extrapolated = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            extrapolated[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
        }
    }
    Ok(ProjectionReport {
        b,
        coarse_n,
        coarse,
        fine,
        extrapolated,
        fine_eigenvalues: projected_eigenvalues(&fine),
        eigenvalues: projected_eigenvalues(&extrapolated),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_small_matrices() {
        let (a, b) = projected_eigenvalues(&[[0.0, 1.0], [1.0, 0.0]]);
        assert!((a - 1.0).norm() < 1e-15 && (b + 1.0).norm() < 1e-15);
        let (a, b) = projected_eigenvalues(&[[0.0, -3.0], [1.0, 0.0]]);
        assert!((a - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-15);
        assert!((b + Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-15);
    }
}
