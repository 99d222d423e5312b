use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::convolution::Helmholtz;
use crate::exec::Exec;
use crate::grid::{Grid, GridFunction};
use crate::nonlocal::{apply_q_with, q_kernel_matrix_with};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorTag {
    L0,
    L,
    LAdjoint,
}

/// First-derivative discretization of the transport term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stencil {
    /// Two-point differences reading from the inflow side, never across the crest.
    #[default]
    Upwind,
    /// ½(A·D + D·A) with D centered and skew-symmetric on each half-line.
    SkewCentered,
}

/// Real-valued dense operator on a grid, applied to complex samples.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    grid: Grid,
    entries: Array2<f64>,
    tag: OperatorTag,
    b: f64,
    stencil: Stencil,
}

impl OperatorMatrix {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn tag(&self) -> OperatorTag {
        self.tag
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    pub fn apply(&self, v: &GridFunction) -> GridFunction {
        self.apply_with(v, Exec::default())
    }

    pub fn apply_with(&self, v: &GridFunction, exec: Exec) -> GridFunction {
        assert_eq!(v.grid(), &self.grid);
        let out = self.apply_slice(v.values(), exec);
        GridFunction::new(self.grid, out).expect("length preserved")
    }

    pub(crate) fn apply_slice(&self, v: &[Complex64], exec: Exec) -> Vec<Complex64> {
        let n = self.grid.len();
        let a = self.entries.as_slice().expect("standard layout");
        exec.map_range(n, |i| {
            let row = &a[i * n..(i + 1) * n];
            let mut re = 0.0;
            let mut im = 0.0;
            for (w, x) in row.iter().zip(v) {
                re += w * x.re;
                im += w * x.im;
            }
            Complex64::new(re, im)
        })
    }
}

struct Coefficients {
    h: f64,
    n: usize,
    crest: usize,
    phi: Vec<f64>,
    dphi: Vec<f64>,
}

impl Coefficients {
    fn new(grid: &Grid) -> Self {
        Coefficients {
            h: grid.spacing(),
            n: grid.len(),
            crest: grid.crest(),
            phi: grid.phi_vec(),
            dphi: grid.dphi_vec(),
        }
    }

    fn transport(&self, i: usize) -> f64 {
        1.0 - self.phi[i] * self.phi[i]
    }

    fn potential(&self, i: usize) -> f64 {
        self.phi[i] * self.dphi[i]
    }

    /// Neighbour j of row i for the skew-centered stencil, if it is on the same half-line.
    fn skew_neighbours(&self, i: usize) -> (Option<usize>, Option<usize>) {
        let m = self.crest;
        let left = (i > 0 && i != m).then(|| i - 1);
        let right = (i + 1 < self.n && i + 1 != m).then_some(i + 1);
        (left, right)
    }
}

/// Writes A·∂ + c·diag(φφ') into `row`, with `sign` = +1 for L0 and -1 for L*.
fn transport_row(
    k: &Coefficients,
    stencil: Stencil,
    i: usize,
    sign: f64,
    potential: f64,
    row: &mut [f64],
) {
    let h = k.h;
    let m = k.crest;
    let n = k.n;
    match stencil {
        Stencil::Upwind => {
            let a = sign * k.transport(i);
            // L0 transports leftward so reads from the right; L* the opposite.
            let forward = if sign > 0.0 {
                i != m - 1 && i != n - 1
            } else {
                i == m || i == 0
            };
            if forward {
                row[i] -= a / h;
                row[i + 1] += a / h;
            } else {
                row[i] += a / h;
                row[i - 1] -= a / h;
            }
            row[i] += potential * k.potential(i);
        }
        Stencil::SkewCentered => {
            let (left, right) = k.skew_neighbours(i);
            let ai = k.transport(i);
            if let Some(j) = left {
                row[j] -= sign * 0.25 * (ai + k.transport(j)) / h;
            }
            if let Some(j) = right {
                row[j] += sign * 0.25 * (ai + k.transport(j)) / h;
            }
            // ½(AD + DA) carries -φφ' relative to A∂; the shift restores the target potential.
            row[i] += (potential + sign) * k.potential(i);
        }
    }
}

pub fn assemble_l0(grid: &Grid, b: f64) -> OperatorMatrix {
    assemble_l0_with(grid, b, Stencil::default(), Exec::default())
}

pub fn assemble_l0_with(grid: &Grid, b: f64, stencil: Stencil, exec: Exec) -> OperatorMatrix {
    let k = Coefficients::new(grid);
    let n = grid.len();
    let mut data = vec![0.0; n * n];
    exec.for_each_row(&mut data, n, |i, row| {
        transport_row(&k, stencil, i, 1.0, 4.0 - b, row)
    });
    OperatorMatrix {
        grid: *grid,
        entries: Array2::from_shape_vec((n, n), data).expect("square"),
        tag: OperatorTag::L0,
        b,
        stencil,
    }
}

pub fn assemble_l(grid: &Grid, b: f64) -> OperatorMatrix {
    assemble_l_with(grid, b, Stencil::default(), Exec::default())
}

pub fn assemble_l_with(grid: &Grid, b: f64, stencil: Stencil, exec: Exec) -> OperatorMatrix {
    let mut op = assemble_l0_with(grid, b, stencil, exec);
    if b != 3.0 {
        op.entries += &q_kernel_matrix_with(grid, b, exec);
    }
    op.tag = OperatorTag::L;
    op
}

pub fn assemble_l_adjoint(grid: &Grid, b: f64) -> OperatorMatrix {
    assemble_l_adjoint_with(grid, b, Stencil::default(), Exec::default())
}

/// (φ² - 1)∂ + (6 - b)φφ' + 2(b - 3)[φφ'(φ∗·) + φ²(φ'∗·)], convolutions as dense blocks.
pub fn assemble_l_adjoint_with(
    grid: &Grid,
    b: f64,
    stencil: Stencil,
    exec: Exec,
) -> OperatorMatrix {
    let k = Coefficients::new(grid);
    let n = grid.len();
    let h = grid.weight();
    let x = grid.points();
    let mut data = vec![0.0; n * n];
    exec.for_each_row(&mut data, n, |i, row| {
        transport_row(&k, stencil, i, -1.0, 6.0 - b, row);
        if b != 3.0 {
            let c = 2.0 * (b - 3.0) * h;
            let p = k.potential(i);
            let p2 = k.phi[i] * k.phi[i];
            for (j, r) in row.iter_mut().enumerate() {
                let d = x[i] - x[j];
                let e = (-d.abs()).exp();
                let de = if j == i { 0.0 } else { -d.signum() * e };
                *r += c * (p * e + p2 * de);
            }
        }
    });
    OperatorMatrix {
        grid: *grid,
        entries: Array2::from_shape_vec((n, n), data).expect("square"),
        tag: OperatorTag::LAdjoint,
        b,
        stencil,
    }
}

/// Matrix-free L with the upwind stencil and Q by Helmholtz solves; O(n) per call.
pub fn apply_l_upwind(grid: &Grid, b: f64, v: &GridFunction) -> GridFunction {
    assert_eq!(v.grid(), grid);
    let helm = Helmholtz::new(grid);
    let phi = grid.phi_vec();
    let dphi = grid.dphi_vec();
    let u = v.values();
    let h = grid.spacing();
    let n = grid.len();
    let m = grid.crest();
    let mut out = apply_q_with(&helm, &phi, &dphi, u, b);
    for i in 0..n {
        let d = if i == m - 1 || i == n - 1 {
            (u[i] - u[i - 1]) / h
        } else {
            (u[i + 1] - u[i]) / h
        };
        out[i] += d * (1.0 - phi[i] * phi[i]) + u[i] * ((4.0 - b) * phi[i] * dphi[i]);
    }
    GridFunction::new(*grid, out).expect("length preserved")
}
