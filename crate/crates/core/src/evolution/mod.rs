//! Time integration of the linearized and nonlinear dynamics, and growth-rate fits.

mod linear;
mod nonlinear;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

pub use linear::{
    evolve_linear_tilde, evolve_linear_tilde_with, evolve_omega_system, evolve_omega_system_with,
    exact_alpha_beta, AlphaBetaState, LinearSettings, OmegaRun,
};
pub use nonlinear::{
    evolve_nonlinear, locate_peak, peakon_residual, perturbed_peakon_experiment,
    weak_form_residual, NonlinearRun, NonlinearSettings, PerturbationReport, PerturbationShape,
};

/// Default sup-norm blow-up cap, as a multiple of the initial sup norm.
pub const BLOWUP_FACTOR: f64 = 100.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub b: f64,
    pub dt: f64,
    pub t_final: f64,
    pub half_width: f64,
    pub n: usize,
    pub scheme: String,
    pub output_stride: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub l2_norms: Vec<f64>,
    pub h1_norms: Vec<f64>,
    pub sup_norms: Vec<f64>,
    /// |v(t, 0)| by interpolation across the crest.
    pub crest_values: Vec<f64>,
    pub fitted_rate: Option<f64>,
    pub fit_window: Option<(f64, f64)>,
    pub fit_residual: Option<f64>,
    pub config: RunConfig,
}

impl EvolutionTrace {
    pub fn new(config: RunConfig) -> Self {
        EvolutionTrace {
            times: Vec::new(),
            l2_norms: Vec::new(),
            h1_norms: Vec::new(),
            sup_norms: Vec::new(),
            crest_values: Vec::new(),
            fitted_rate: None,
            fit_window: None,
            fit_residual: None,
            config,
        }
    }

    pub fn record(&mut self, t: f64, v: &GridFunction) {
        self.times.push(t);
        self.l2_norms.push(v.l2_norm());
        self.h1_norms.push(v.h1_norm());
        self.sup_norms.push(v.sup_norm());
        self.crest_values.push(v.value_at_crest().norm());
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Fits the L² growth rate on `window` and keeps it only if the RMS
    /// log-residual is at most `max_residual`.
    pub fn attach_fit(&mut self, window: (f64, f64), max_residual: f64) -> Result<GrowthFit> {
        let fit = fit_growth_rate(self, window)?;
        self.fit_window = Some(window);
        self.fit_residual = Some(fit.residual);
        self.fitted_rate = (fit.residual <= max_residual).then_some(fit.rate);
        Ok(fit)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub rate: f64,
    /// RMS residual of log‖v‖ about the fitted line.
    pub residual: f64,
    pub samples: usize,
}

/// Least-squares slope of log(l2_norm) against t over the window.
pub fn fit_growth_rate(trace: &EvolutionTrace, window: (f64, f64)) -> Result<GrowthFit> {
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in trace.times.iter().zip(&trace.l2_norms) {
        if t >= window.0 && t <= window.1 {
            if !(v > 0.0) {
                return Err(Error::NonPositiveNorm(t));
            }
            ts.push(t);
            ys.push(v.ln());
        }
    }
    if ts.len() < 2 {
        return Err(Error::EmptyWindow(window.0, window.1));
    }
    let k = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / k;
    let ym = ys.iter().sum::<f64>() / k;
    let sxx: f64 = ts.iter().map(|t| (t - tm).powi(2)).sum();
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
    let rate = sxy / sxx;
    let residual = (ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| (y - ym - rate * (t - tm)).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(GrowthFit {
        rate,
        residual,
        samples: ts.len(),
    })
}

/// Number of RK4 steps landing exactly on `t_final`, and the adjusted step.
pub(crate) fn step_count(t_final: f64, dt: f64) -> (usize, f64) {
    let steps = (t_final / dt).ceil().max(1.0) as usize;
    (steps, t_final / steps as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(f: impl Fn(f64) -> f64) -> EvolutionTrace {
        let cfg = RunConfig {
            b: 0.0,
            dt: 0.01,
            t_final: 5.0,
            half_width: 1.0,
            n: 8,
            scheme: "synthetic".into(),
            output_stride: 1,
        };
        let mut t = EvolutionTrace::new(cfg);
        for i in 0..=500 {
            let s = i as f64 * 0.01;
            t.times.push(s);
            t.l2_norms.push(f(s));
        }
        t
    }

    #[test]
    fn exact_exponential() {
        let tr = synthetic(|t| (2.0 * t).exp());
        let fit = fit_growth_rate(&tr, (0.0, 5.0)).unwrap();
        assert!((fit.rate - 2.0).abs() < 1e-6);
        let tr = synthetic(|_| 3.0);
        assert!(fit_growth_rate(&tr, (0.0, 5.0)).unwrap().rate.abs() < 1e-12);
    }

    #[test]
    fn fit_errors() {
        let tr = synthetic(|t| t);
        assert!(matches!(
            fit_growth_rate(&tr, (0.0, 1.0)),
            Err(Error::NonPositiveNorm(_))
        ));
        assert!(matches!(
            fit_growth_rate(&tr, (7.0, 8.0)),
            Err(Error::EmptyWindow(..))
        ));
    }

    #[test]
    fn rate_dropped_when_fit_is_poor() {
        let mut tr = synthetic(|t| 1.0 + (3.0 * t).sin().powi(2));
        tr.attach_fit((0.0, 5.0), 1e-3).unwrap();
        assert!(tr.fitted_rate.is_none());
        assert!(tr.fit_residual.unwrap() > 1e-3);
    }
}
