use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{step_count, EvolutionTrace, RunConfig, BLOWUP_FACTOR};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::GridFunction;
use crate::operators::{assemble_l_with, OperatorMatrix, Stencil};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSettings {
    pub stencil: Stencil,
    /// Record every this many steps (the final step is always recorded).
    pub output_stride: usize,
    /// Largest admissible |ṽ₀(0)|.
    pub crest_tol: f64,
    pub blowup_factor: f64,
    pub exec: Exec,
}

impl Default for LinearSettings {
    fn default() -> Self {
        LinearSettings {
            stencil: Stencil::Upwind,
            output_stride: 1,
            crest_tol: 1e-6,
            blowup_factor: BLOWUP_FACTOR,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaBetaState {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Solution of α' = (4-b)β, β' = (4-b)α.
pub fn exact_alpha_beta(alpha0: f64, beta0: f64, b: f64, t: f64) -> AlphaBetaState {
    let k = (4.0 - b) * t;
    let (c, s) = (k.cosh(), k.sinh());
    AlphaBetaState {
        t,
        alpha: alpha0 * c + beta0 * s,
        beta: beta0 * c + alpha0 * s,
    }
}

fn check_cfl(op: &OperatorMatrix, dt: f64) -> Result<()> {
    let g = op.grid();
    let speed = g.phi_vec().iter().map(|p| 1.0 - p * p).fold(0.0, f64::max);
    let limit = g.spacing() / speed;
    if !(dt > 0.0) || dt > limit {
        return Err(Error::Cfl { dt, limit });
    }
    Ok(())
}

fn config(op: &OperatorMatrix, dt: f64, t_final: f64, stride: usize, scheme: &str) -> RunConfig {
    RunConfig {
        b: op.b(),
        dt,
        t_final,
        half_width: op.grid().half_width(),
        n: op.grid().len(),
        scheme: format!("rk4/{scheme}/{:?}", op.stencil()).to_lowercase(),
        output_stride: stride.max(1),
    }
}

fn combine(base: &[Complex64], k: &[Complex64], a: f64) -> Vec<Complex64> {
    base.iter().zip(k).map(|(x, y)| x + y * a).collect()
}

/// ⟨φ²φ', v⟩
fn moment(weights: &[f64], v: &[Complex64]) -> Complex64 {
    weights.iter().zip(v).map(|(w, x)| x * w).sum()
}

/// ṽ_t = Lṽ - 4(b-3)⟨φ²φ', ṽ⟩φ by classical RK4 with the dense L.
pub fn evolve_linear_tilde(
    v0: &GridFunction,
    b: f64,
    t_final: f64,
    dt: f64,
    settings: &LinearSettings,
) -> Result<EvolutionTrace> {
    let op = assemble_l_with(v0.grid(), b, settings.stencil, settings.exec);
    evolve_linear_tilde_with(&op, v0, t_final, dt, settings).map(|(trace, _)| trace)
}

/// As [`evolve_linear_tilde`] with a pre-assembled L; also returns the final state.
pub fn evolve_linear_tilde_with(
    op: &OperatorMatrix,
    v0: &GridFunction,
    t_final: f64,
    dt: f64,
    settings: &LinearSettings,
) -> Result<(EvolutionTrace, GridFunction)> {
    let crest = v0.value_at_crest().norm();
    if crest > settings.crest_tol {
        return Err(Error::Constraint {
            value: crest,
            tol: settings.crest_tol,
        });
    }
    check_cfl(op, dt)?;
    let grid = *op.grid();
    let (steps, dt) = step_count(t_final, dt);
    let b = op.b();
    let h = grid.weight();
    let phi = grid.phi_vec();
    let weights: Vec<f64> = phi
        .iter()
        .zip(grid.dphi_vec())
        .map(|(p, dp)| h * p * p * dp)
        .collect();
    let exec = settings.exec;
    let rhs = |v: &[Complex64]| -> Vec<Complex64> {
        let mut out = op.apply_slice(v, exec);
        if b != 3.0 {
            let c = moment(&weights, v) * (4.0 * (b - 3.0));
            for (o, p) in out.iter_mut().zip(&phi) {
                *o -= c * p;
            }
        }
        out
    };

    let stride = settings.output_stride.max(1);
    let mut trace = EvolutionTrace::new(config(op, dt, t_final, stride, "tilde"));
    let cap = settings.blowup_factor * v0.sup_norm();
    let mut v = v0.values().to_vec();
    trace.record(0.0, v0);
    for step in 1..=steps {
        let k1 = rhs(&v);
        let k2 = rhs(&combine(&v, &k1, 0.5 * dt));
        let k3 = rhs(&combine(&v, &k2, 0.5 * dt));
        let k4 = rhs(&combine(&v, &k3, dt));
        for i in 0..v.len() {
            v[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
        }
        if step % stride == 0 || step == steps {
            let t = step as f64 * dt;
            let gf = GridFunction::new(grid, v.clone())?;
            trace.record(t, &gf);
            let sup = gf.sup_norm();
            if !sup.is_finite() || sup > cap {
                return Err(Error::BlowUp {
                    t,
                    sup,
                    cap,
                    partial: Box::new(trace),
                });
            }
        }
    }
    let last = GridFunction::new(grid, v)?;
    Ok((trace, last))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaRun {
    /// Norms of ṽ = ω + αφ + βφ'.
    pub tilde: EvolutionTrace,
    /// Norms of ω alone.
    pub omega: EvolutionTrace,
    /// Real parts of (α, β) at every recorded time.
    pub alpha_beta: Vec<AlphaBetaState>,
    pub final_tilde: GridFunction,
}

/// ω' = Lω together with α' = (4-b)β - 4(b-3)⟨φ²φ', ω⟩, β' = (4-b)α, in one RK4.
pub fn evolve_omega_system(
    omega0: &GridFunction,
    alpha0: f64,
    beta0: f64,
    b: f64,
    t_final: f64,
    dt: f64,
    settings: &LinearSettings,
) -> Result<OmegaRun> {
    let op = assemble_l_with(omega0.grid(), b, settings.stencil, settings.exec);
    evolve_omega_system_with(&op, omega0, alpha0, beta0, t_final, dt, settings)
}

/// As [`evolve_omega_system`] with a pre-assembled L.
pub fn evolve_omega_system_with(
    op: &OperatorMatrix,
    omega0: &GridFunction,
    alpha0: f64,
    beta0: f64,
    t_final: f64,
    dt: f64,
    settings: &LinearSettings,
) -> Result<OmegaRun> {
    check_cfl(op, dt)?;
    let grid = *op.grid();
    let (steps, dt) = step_count(t_final, dt);
    let b = op.b();
    let h = grid.weight();
    let phi = grid.phi();
    let dphi = grid.dphi();
    let weights: Vec<f64> = grid
        .phi_vec()
        .iter()
        .zip(grid.dphi_vec())
        .map(|(p, dp)| h * p * p * dp)
        .collect();
    let exec = settings.exec;
    let n = grid.len();

    // state layout: ω (n entries), α, β
    let rhs = |s: &[Complex64]| -> Vec<Complex64> {
        let (w, ab) = s.split_at(n);
        let mut out = op.apply_slice(w, exec);
        let m = moment(&weights, w);
        out.push((4.0 - b) * ab[1] - 4.0 * (b - 3.0) * m);
        out.push((4.0 - b) * ab[0]);
        out
    };
    let tilde_of = |s: &[Complex64]| -> Result<GridFunction> {
        let w = GridFunction::new(grid, s[..n].to_vec())?;
        w.axpy(s[n], &phi)?.axpy(s[n + 1], &dphi)
    };

    let stride = settings.output_stride.max(1);
    let mut tilde = EvolutionTrace::new(config(op, dt, t_final, stride, "omega"));
    let mut omega = EvolutionTrace::new(config(op, dt, t_final, stride, "omega"));
    let mut alpha_beta = Vec::new();

    let mut s = omega0.values().to_vec();
    s.push(alpha0.into());
    s.push(beta0.into());
    let first = tilde_of(&s)?;
    let cap = settings.blowup_factor * first.sup_norm().max(omega0.sup_norm());
    tilde.record(0.0, &first);
    omega.record(0.0, omega0);
    alpha_beta.push(AlphaBetaState {
        t: 0.0,
        alpha: alpha0,
        beta: beta0,
    });

    // α, β may grow like e^{|4-b|t} by design; only ω is capped.
    for step in 1..=steps {
        let k1 = rhs(&s);
        let k2 = rhs(&combine(&s, &k1, 0.5 * dt));
        let k3 = rhs(&combine(&s, &k2, 0.5 * dt));
        let k4 = rhs(&combine(&s, &k3, dt));
        for i in 0..s.len() {
            s[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
        }
        if step % stride == 0 || step == steps {
            let t = step as f64 * dt;
            let w = GridFunction::new(grid, s[..n].to_vec())?;
            tilde.record(t, &tilde_of(&s)?);
            omega.record(t, &w);
            alpha_beta.push(AlphaBetaState {
                t,
                alpha: s[n].re,
                beta: s[n + 1].re,
            });
            let sup = w.sup_norm();
            if !sup.is_finite() || (cap > 0.0 && sup > cap) {
                return Err(Error::BlowUp {
                    t,
                    sup,
                    cap,
                    partial: Box::new(omega),
                });
            }
        }
    }
    Ok(OmegaRun {
        final_tilde: tilde_of(&s)?,
        tilde,
        omega,
        alpha_beta,
    })
}
