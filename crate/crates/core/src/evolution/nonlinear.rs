use serde::{Deserialize, Serialize};

use super::{step_count, EvolutionTrace, RunConfig, BLOWUP_FACTOR};
use crate::convolution::Helmholtz;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::{centered_difference, Grid, GridFunction};
use crate::profile::{dphi, peakon};
use crate::quadrature::integrate;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearSettings {
    /// Speed of the co-moving frame; `None` picks max(u0)², the speed of the
    /// peakon with that amplitude.
    pub frame_speed: Option<f64>,
    pub output_stride: usize,
    pub blowup_factor: f64,
}

impl Default for NonlinearSettings {
    fn default() -> Self {
        NonlinearSettings {
            frame_speed: None,
            output_stride: 50,
            blowup_factor: BLOWUP_FACTOR,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearRun {
    pub times: Vec<f64>,
    /// Solution at each output time, in the co-moving frame ξ = x - c t.
    pub states: Vec<GridFunction>,
    /// Peak position in the lab frame.
    pub peak_positions: Vec<f64>,
    pub peak_values: Vec<f64>,
    pub frame_speed: f64,
    pub trace: EvolutionTrace,
}

impl NonlinearRun {
    /// Mean lab-frame speed of the peak over the whole run.
    pub fn peak_speed(&self) -> f64 {
        let k = self.times.len() - 1;
        if k == 0 {
            return 0.0;
        }
        (self.peak_positions[k] - self.peak_positions[0]) / (self.times[k] - self.times[0])
    }
}

/// Sub-grid peak location from a parabola through the discrete maximum and
/// its neighbours. Returns (position, value).
pub fn locate_peak(u: &GridFunction) -> (f64, f64) {
    let grid = u.grid();
    let v = u.re();
    locate_peak_slice(grid, &v)
}

fn locate_peak_slice(grid: &Grid, v: &[f64]) -> (f64, f64) {
    let i = argmax(v);
    if i == 0 || i + 1 == v.len() {
        return (grid.point(i), v[i]);
    }
    let (y0, y1, y2) = (v[i - 1], v[i], v[i + 1]);
    let den = y0 - 2.0 * y1 + y2;
    let off = if den != 0.0 {
        0.5 * (y0 - y2) / den
    } else {
        0.0
    };
    (
        grid.point(i) + off * grid.spacing(),
        y1 - 0.25 * (y0 - y2) * off,
    )
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// The two grid points straddling the kink of a peaked profile.
fn kink_pair(u: &[f64]) -> Option<(usize, usize)> {
    let i = argmax(u);
    if i < 2 || i + 3 > u.len() || u[i] <= 0.0 {
        return None;
    }
    let j = if u[i + 1] >= u[i - 1] { i + 1 } else { i - 1 };
    let (l, r) = (i.min(j), i.max(j));
    (l >= 2 && r + 2 < u.len()).then_some((l, r))
}

struct Rhs {
    helm: Helmholtz,
    h: f64,
    b: f64,
    c: f64,
}

impl Rhs {
    fn eval(&self, u: &[f64]) -> Vec<f64> {
        let (h, b) = (self.h, self.b);
        let n = u.len();
        let kink = kink_pair(u);

        // transport derivative, upwinded by the sign of u² - c
        let mut ux = vec![0.0; n];
        for i in 0..n {
            let forward = if i + 1 < n {
                (u[i + 1] - u[i]) / h
            } else {
                (u[i] - u[i - 1]) / h
            };
            let backward = if i > 0 {
                (u[i] - u[i - 1]) / h
            } else {
                (u[1] - u[0]) / h
            };
            ux[i] = if u[i] * u[i] - self.c < 0.0 {
                forward
            } else {
                backward
            };
        }
        // derivative inside the nonlocal terms: never differenced across the kink
        let mut uxn = centered_difference(u, h);
        if let Some((l, r)) = kink {
            ux[l] = (u[l] - u[l - 1]) / h;
            ux[r] = (u[r + 1] - u[r]) / h;
            uxn[l] = (3.0 * u[l] - 4.0 * u[l - 1] + u[l - 2]) / (2.0 * h);
            uxn[r] = (-3.0 * u[r] + 4.0 * u[r + 1] - u[r + 2]) / (2.0 * h);
        }

        let g1: Vec<f64> = u
            .iter()
            .zip(&uxn)
            .map(|(&v, &d)| 0.5 * (6.0 - b) * v * d * d + b / 3.0 * v * v * v)
            .collect();
        let g2: Vec<f64> = uxn.iter().map(|d| d * d * d).collect();
        let t1 = self.helm.phi_prime(&g1);
        let t2 = self.helm.phi(&g2);
        (0..n)
            .map(|i| -(u[i] * u[i] - self.c) * ux[i] - 0.5 * t1[i] - 0.25 * (b - 2.0) * t2[i])
            .collect()
    }
}

fn rk4_step(rhs: &Rhs, u: &mut [f64], dt: f64) {
    let stage = |base: &[f64], k: &[f64], a: f64| -> Vec<f64> {
        base.iter().zip(k).map(|(x, y)| x + a * y).collect()
    };
    let k1 = rhs.eval(u);
    let k2 = rhs.eval(&stage(u, &k1, 0.5 * dt));
    let k3 = rhs.eval(&stage(u, &k2, 0.5 * dt));
    let k4 = rhs.eval(&stage(u, &k3, dt));
    for i in 0..u.len() {
        u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Integrates the weak form of the b-Novikov equation by the method of lines
/// (upwind transport, Helmholtz convolutions, RK4) in a frame moving at
/// `settings.frame_speed`.
pub fn evolve_nonlinear(
    u0: &GridFunction,
    b: f64,
    t_final: f64,
    dt: f64,
    settings: &NonlinearSettings,
) -> Result<NonlinearRun> {
    let grid = *u0.grid();
    let mut u = u0.re();
    let sup0 = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let c = settings.frame_speed.unwrap_or(sup0 * sup0);
    let speed = c.max(sup0 * sup0);
    let h = grid.spacing();
    if !(dt > 0.0) {
        return Err(Error::Cfl {
            dt,
            limit: f64::INFINITY,
        });
    }
    if speed > 0.0 && dt > h / speed {
        return Err(Error::Cfl {
            dt,
            limit: h / speed,
        });
    }
    let (steps, dt) = step_count(t_final, dt);
    let stride = settings.output_stride.max(1);
    let rhs = Rhs {
        helm: Helmholtz::new(&grid),
        h,
        b,
        c,
    };

    let mut run = NonlinearRun {
        times: Vec::new(),
        states: Vec::new(),
        peak_positions: Vec::new(),
        peak_values: Vec::new(),
        frame_speed: c,
        trace: EvolutionTrace::new(RunConfig {
            b,
            dt,
            t_final,
            half_width: grid.half_width(),
            n: grid.len(),
            scheme: "rk4/upwind/co-moving".into(),
            output_stride: stride,
        }),
    };
    let record = |run: &mut NonlinearRun, t: f64, u: &[f64]| -> Result<GridFunction> {
        let gf = GridFunction::from_real(grid, u)?;
        let (p, pv) = locate_peak_slice(&grid, u);
        run.times.push(t);
        run.peak_positions.push(p + c * t);
        run.peak_values.push(pv);
        run.trace.record(t, &gf);
        Ok(gf)
    };
    let first = record(&mut run, 0.0, &u)?;
    run.states.push(first);

    let cap = settings.blowup_factor * sup0;
    for step in 1..=steps {
        rk4_step(&rhs, &mut u, dt);
        if step % stride == 0 || step == steps {
            let t = step as f64 * dt;
            let gf = record(&mut run, t, &u)?;
            let sup = gf.sup_norm();
            if !sup.is_finite() || sup > cap {
                return Err(Error::BlowUp {
                    t,
                    sup,
                    cap,
                    partial: Box::new(run.trace),
                });
            }
            run.states.push(gf);
        }
    }
    Ok(run)
}

/// Max over grid points with |ξ| ≥ 5h of the traveling-wave residual
/// -f' + f²f' + ½φ'∗((6-b)/2·f f'² + b/3·f³) + (b-2)/4·φ∗f'³
/// for a profile f with a kink at 0, convolutions by adaptive quadrature.
pub fn weak_form_residual<F, D>(
    profile: F,
    dprofile: D,
    b: f64,
    grid: &Grid,
    tol: f64,
    exec: Exec,
) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
    D: Fn(f64) -> f64 + Sync,
{
    const REACH: f64 = 45.0;
    let cut = 5.0 * grid.spacing();
    let g1 = |eta: f64| {
        let (f, d) = (profile(eta), dprofile(eta));
        0.5 * (6.0 - b) * f * d * d + b / 3.0 * f * f * f
    };
    let g2 = |eta: f64| dprofile(eta).powi(3);
    let at = |j: usize| -> Result<f64> {
        let xi = grid.point(j);
        if xi.abs() < cut {
            return Ok(0.0);
        }
        let mut breaks = [-REACH, 0.0, xi, REACH];
        breaks.sort_by(|a, b| a.total_cmp(b));
        let c1 = integrate(
            |eta| -(xi - eta).signum() * (-(xi - eta).abs()).exp() * g1(eta),
            &breaks,
            tol,
            0.0,
        )?;
        let c2 = if b == 2.0 {
            0.0
        } else {
            integrate(|eta| (-(xi - eta).abs()).exp() * g2(eta), &breaks, tol, 0.0)?.value
        };
        let (f, d) = (profile(xi), dprofile(xi));
        Ok(-d + f * f * d + 0.5 * c1.value + 0.25 * (b - 2.0) * c2)
    };
    let values = exec.map_range(grid.len(), at);
    let mut worst = 0.0f64;
    for v in values {
        worst = worst.max(v?.abs());
    }
    Ok(worst)
}

/// [`weak_form_residual`] of the peakon itself at quadrature tolerance 10⁻⁸.
pub fn peakon_residual(b: f64, grid: &Grid) -> Result<f64> {
    weak_form_residual(peakon, dphi, b, grid, 1e-8, Exec::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationShape {
    /// φ² = e^{-2|ξ|}
    PeakonSquared,
    /// e^{-ξ²}
    Gaussian,
}

impl PerturbationShape {
    pub fn eval(self, xi: f64) -> f64 {
        match self {
            PerturbationShape::PeakonSquared => (-2.0 * xi.abs()).exp(),
            PerturbationShape::Gaussian => (-xi * xi).exp(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub b: f64,
    pub epsilon: f64,
    pub shape: PerturbationShape,
    /// Norms of the perturbed run minus an unperturbed run, after aligning
    /// the two peaks.
    pub trace: EvolutionTrace,
    /// Norms of the perturbed run minus the exact peakon at the located peak.
    pub raw_trace: EvolutionTrace,
    /// Final over initial L² norm of `trace`.
    pub growth_factor: f64,
    pub raw_growth_factor: f64,
}

/// v(x + s) by linear interpolation, constant beyond the ends.
fn shifted(grid: &Grid, v: &[f64], s: f64) -> Vec<f64> {
    let h = grid.spacing();
    let n = v.len();
    (0..n)
        .map(|j| {
            let pos = (grid.point(j) + s - grid.point(0)) / h;
            if pos <= 0.0 {
                v[0]
            } else if pos >= (n - 1) as f64 {
                v[n - 1]
            } else {
                let k = pos.floor() as usize;
                let f = pos - k as f64;
                v[k] * (1.0 - f) + v[k + 1] * f
            }
        })
        .collect()
}

/// Runs φ + εw next to an unperturbed φ and traces the frame-shifted
/// difference between them, plus the difference from the exact peakon.
pub fn perturbed_peakon_experiment(
    b: f64,
    epsilon: f64,
    shape: PerturbationShape,
    t_final: f64,
    grid: &Grid,
    settings: &NonlinearSettings,
) -> Result<PerturbationReport> {
    let base0 = grid.phi();
    let pert0 = grid.sample_real(|x| peakon(x) + epsilon * shape.eval(x));
    let sup = pert0.sup_norm().max(1.0);
    let dt = 0.4 * grid.spacing() / (sup * sup);
    let settings = NonlinearSettings {
        frame_speed: Some(settings.frame_speed.unwrap_or(1.0)),
        ..*settings
    };
    let (base, pert) = match Exec::default() {
        #[cfg(feature = "parallel")]
        Exec::Parallel => rayon::join(
            || evolve_nonlinear(&base0, b, t_final, dt, &settings),
            || evolve_nonlinear(&pert0, b, t_final, dt, &settings),
        ),
        _ => (
            evolve_nonlinear(&base0, b, t_final, dt, &settings),
            evolve_nonlinear(&pert0, b, t_final, dt, &settings),
        ),
    };
    let (base, pert) = (base?, pert?);

    let mut trace = EvolutionTrace::new(pert.trace.config.clone());
    trace.config.scheme.push_str("/baseline-difference");
    let mut raw_trace = EvolutionTrace::new(pert.trace.config.clone());
    raw_trace.config.scheme.push_str("/peakon-difference");
    let c = pert.frame_speed;
    for k in 0..pert.times.len() {
        let t = pert.times[k];
        let p1 = pert.peak_positions[k] - c * t;
        let p0 = base.peak_positions[k] - c * t;
        let u1 = pert.states[k].re();
        let u0 = base.states[k].re();
        let aligned = shifted(grid, &u1, p1 - p0);
        let d: Vec<f64> = aligned.iter().zip(&u0).map(|(a, b)| a - b).collect();
        trace.record(t, &GridFunction::from_real(*grid, &d)?);
        let raw: Vec<f64> = u1
            .iter()
            .enumerate()
            .map(|(j, v)| v - peakon(grid.point(j) - p1))
            .collect();
        raw_trace.record(t, &GridFunction::from_real(*grid, &raw)?);
    }
    let ratio = |tr: &EvolutionTrace| {
        let first = tr.l2_norms[0];
        let last = *tr.l2_norms.last().expect("non-empty");
        if first > 0.0 {
            last / first
        } else {
            f64::NAN
        }
    };
    Ok(PerturbationReport {
        b,
        epsilon,
        shape,
        growth_factor: ratio(&trace),
        raw_growth_factor: ratio(&raw_trace),
        trace,
        raw_trace,
    })
}
