//! Globally adaptive Gauss–Kronrod (7/15) quadrature in one and two dimensions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// Subinterval budget before refinement is declared non-convergent.
pub const MAX_SUBINTERVALS: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let s = f(c - r * XGK[i]) + f(c + r * XGK[i]);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Piece {
        a,
        b,
        value: k * r,
        error: ((k - g) * r).abs(),
    }
}

/// ∫ f over [breaks[0], breaks[last]], splitting at every interior break.
///
/// Stops once the summed error estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    assert!(breaks.len() >= 2, "need at least one interval");
    let mut heap: BinaryHeap<Piece> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod(&f, w[0], w[1]))
        .collect();

    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Estimate { value, error });
        }
        if heap.len() >= MAX_SUBINTERVALS {
            return Err(Error::QuadratureDiverged {
                estimate: value,
                error,
            });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::QuadratureDiverged {
                estimate: value,
                error,
            });
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}

/// ∫∫ f(x, y) dy dx with x-breaks fixed and y-breaks depending on x.
///
/// The inner tolerance is a tenth of the outer one spread over the x-range.
pub fn integrate_2d<F, B>(f: F, x_breaks: &[f64], y_breaks: B, abs_tol: f64) -> Result<Estimate>
where
    F: Fn(f64, f64) -> f64,
    B: Fn(f64) -> Vec<f64>,
{
    let span = x_breaks[x_breaks.len() - 1] - x_breaks[0];
    let inner_tol = 0.1 * abs_tol / span.max(1.0);
    let inner_error = std::cell::Cell::new(0.0f64);
    let failure = std::cell::Cell::new(None);
    let outer = integrate(
        |x| {
            let ys = y_breaks(x);
            match integrate(|y| f(x, y), &ys, inner_tol, 0.0) {
                Ok(e) => {
                    inner_error.set(inner_error.get().max(e.error));
                    e.value
                }
                Err(err) => {
                    if let Error::QuadratureDiverged { estimate, error } = err {
                        failure.set(Some((estimate, error)));
                    }
                    f64::NAN
                }
            }
        },
        x_breaks,
        0.5 * abs_tol,
        0.0,
    );
    if let Some((estimate, error)) = failure.get() {
        return Err(Error::QuadratureDiverged { estimate, error });
    }
    let outer = outer?;
    Ok(Estimate {
        value: outer.value,
        error: outer.error + inner_error.get() * span,
    })
}
