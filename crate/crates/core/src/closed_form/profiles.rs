use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::profile::{dphi, peakon};

/// Which first-order ODE a profile solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    /// (1 - φ²)υ' + (4 - b)φφ'υ = λυ
    L0,
    /// -(1 - φ²)υ' + (6 - b)φφ'υ = λυ
    L0Adjoint,
    /// (1 - φ²)m' - bφφ'm = λm, with m = υ - υ'' for the full operator L
    Momentum,
    /// (φ² - 1)k' + (2 - b)φφ'k = λk, with υ = k - k'' for L*
    AdjointK,
}

/// Constants on the two half-lines; the names follow the profile kind.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BranchConstants {
    Upsilon { plus: Complex64, minus: Complex64 },
    Momentum { plus: Complex64, minus: Complex64 },
    AdjointK { plus: Complex64, minus: Complex64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionSpec {
    pub kind: ProfileKind,
    pub lambda: Complex64,
    pub b: f64,
    pub constants: BranchConstants,
}

impl EigenfunctionSpec {
    pub fn new(
        kind: ProfileKind,
        lambda: Complex64,
        b: f64,
        plus: Complex64,
        minus: Complex64,
    ) -> Self {
        let constants = match kind {
            ProfileKind::L0 | ProfileKind::L0Adjoint => BranchConstants::Upsilon { plus, minus },
            ProfileKind::Momentum => BranchConstants::Momentum { plus, minus },
            ProfileKind::AdjointK => BranchConstants::AdjointK { plus, minus },
        };
        EigenfunctionSpec {
            kind,
            lambda,
            b,
            constants,
        }
    }

    /// The normalization used for L-eigenfunctions: m₊ = 0, m₋ = 1.
    pub fn decaying_momentum(lambda: Complex64, b: f64) -> Self {
        Self::new(ProfileKind::Momentum, lambda, b, 0.0.into(), 1.0.into())
    }

    fn pair(&self) -> (Complex64, Complex64) {
        match self.constants {
            BranchConstants::Upsilon { plus, minus }
            | BranchConstants::Momentum { plus, minus }
            | BranchConstants::AdjointK { plus, minus } => (plus, minus),
        }
    }

    pub fn eval(&self, xi: f64) -> Result<Complex64> {
        if xi == 0.0 {
            return Err(Error::PeakSingularity);
        }
        let (plus, minus) = self.pair();
        let c = if xi > 0.0 { plus } else { minus };
        if c == Complex64::new(0.0, 0.0) {
            return Ok(c);
        }
        let (e, base, p) = shape(self.kind, self.lambda, self.b, xi);
        Ok(c * e * Complex64::new(base, 0.0).powc(p))
    }

    /// d/dξ of the profile by differentiating its powers in closed form.
    pub fn derivative(&self, xi: f64) -> Result<Complex64> {
        Ok(self.eval(xi)? * log_derivative(self.kind, self.lambda, self.b, xi))
    }

    /// |ODE left side - λ·profile| scaled by 1 + |profile| + |profile'|.
    pub fn ode_residual(&self, xi: f64) -> Result<f64> {
        let v = self.eval(xi)?;
        let dv = self.derivative(xi)?;
        let a = 1.0 - peakon(xi).powi(2);
        let pp = peakon(xi) * dphi(xi);
        let b = self.b;
        let lhs = match self.kind {
            ProfileKind::L0 => a * dv + (4.0 - b) * pp * v,
            ProfileKind::L0Adjoint => -a * dv + (6.0 - b) * pp * v,
            ProfileKind::Momentum => a * dv - b * pp * v,
            ProfileKind::AdjointK => -a * dv + (2.0 - b) * pp * v,
        };
        Ok((lhs - self.lambda * v).norm() / (1.0 + v.norm() + dv.norm()))
    }
}

/// (e^{±λξ}, base in (0,1), exponent) for each branch.
fn shape(kind: ProfileKind, lambda: Complex64, b: f64, xi: f64) -> (Complex64, f64, Complex64) {
    let right = xi > 0.0;
    let base = if right {
        -(-2.0 * xi).exp_m1()
    } else {
        -(2.0 * xi).exp_m1()
    };
    let grow = (lambda * xi).exp();
    let decay = (-lambda * xi).exp();
    let half = |z: Complex64| z * 0.5;
    match (kind, right) {
        // (e^{2ξ} - 1)^{λ/2} = e^{λξ}(1 - e^{-2ξ})^{λ/2}
        (ProfileKind::L0, true) => (grow, base, half(lambda) - (b / 2.0 - 2.0)),
        (ProfileKind::L0, false) => (grow, base, -(half(lambda + b) - 2.0)),
        (ProfileKind::L0Adjoint, true) => (decay, base, half(b - lambda) - 3.0),
        (ProfileKind::L0Adjoint, false) => (decay, base, half(lambda + b) - 3.0),
        (ProfileKind::Momentum, true) => (grow, base, half(lambda - b)),
        (ProfileKind::Momentum, false) => (grow, base, -half(lambda + b)),
        (ProfileKind::AdjointK, true) => (decay, base, half(b - lambda) - 1.0),
        (ProfileKind::AdjointK, false) => (decay, base, half(lambda + b) - 1.0),
    }
}

fn log_derivative(kind: ProfileKind, lambda: Complex64, b: f64, xi: f64) -> Complex64 {
    let (_, base, p) = shape(kind, lambda, b, xi);
    let sign = match kind {
        ProfileKind::L0 | ProfileKind::Momentum => 1.0,
        ProfileKind::L0Adjoint | ProfileKind::AdjointK => -1.0,
    };
    // d/dξ ln(1 - e^{∓2ξ}) = ±2e^{∓2ξ}/base
    let dlog_base = if xi > 0.0 {
        2.0 * (-2.0 * xi).exp() / base
    } else {
        -2.0 * (2.0 * xi).exp() / base
    };
    sign * lambda + p * dlog_base
}

fn profile(
    kind: ProfileKind,
    lambda: Complex64,
    b: f64,
    xi: f64,
    plus: Complex64,
    minus: Complex64,
) -> Result<Complex64> {
    EigenfunctionSpec::new(kind, lambda, b, plus, minus).eval(xi)
}

/// Solutions of (1 - φ²)υ' + (4 - b)φφ'υ = λυ.
pub fn eigfun_l0(
    lambda: Complex64,
    b: f64,
    xi: f64,
    plus: Complex64,
    minus: Complex64,
) -> Result<Complex64> {
    profile(ProfileKind::L0, lambda, b, xi, plus, minus)
}

/// Solutions of -(1 - φ²)υ' + (6 - b)φφ'υ = λυ.
pub fn eigfun_l0_adjoint(
    lambda: Complex64,
    b: f64,
    xi: f64,
    plus: Complex64,
    minus: Complex64,
) -> Result<Complex64> {
    profile(ProfileKind::L0Adjoint, lambda, b, xi, plus, minus)
}

/// m = υ - υ'' for eigenfunctions of L.
pub fn momentum_profile(
    lambda: Complex64,
    b: f64,
    xi: f64,
    plus: Complex64,
    minus: Complex64,
) -> Result<Complex64> {
    profile(ProfileKind::Momentum, lambda, b, xi, plus, minus)
}

/// k with υ = k - k'' for eigenfunctions of L*.
pub fn adjoint_k_profile(
    lambda: Complex64,
    b: f64,
    xi: f64,
    plus: Complex64,
    minus: Complex64,
) -> Result<Complex64> {
    profile(ProfileKind::AdjointK, lambda, b, xi, plus, minus)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSweep {
    pub kind: ProfileKind,
    pub samples: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub worst: (Complex64, f64, f64),
}

/// ODE residuals at random (λ, b, ξ) with Re λ ∈ (0, 3), |Im λ| < 2, b ∈ (-1, 8),
/// |ξ| ∈ [0.1, 10]; unit constants on both branches.
pub fn sample_ode_residuals(
    kind: ProfileKind,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> ResidualSweep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(Complex64, f64, f64)> = (0..samples)
        .map(|_| {
            let lambda = Complex64::new(rng.gen_range(0.0..3.0), rng.gen_range(-2.0..2.0));
            let b = rng.gen_range(-1.0..8.0);
            let r: f64 = rng.gen_range(0.1..10.0);
            let xi = if rng.gen_bool(0.5) { r } else { -r };
            (lambda, b, xi)
        })
        .collect();
    let residuals = exec.map_slice(&points, |&(lambda, b, xi)| {
        let one = Complex64::new(1.0, 0.0);
        EigenfunctionSpec::new(kind, lambda, b, one, one)
            .ode_residual(xi)
            .expect("xi is off the crest")
    });
    let (i, max_residual) = residuals
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
    ResidualSweep {
        kind,
        samples,
        seed,
        max_residual,
        worst: points.get(i).copied().unwrap_or_default(),
    }
}
