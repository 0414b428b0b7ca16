//! rPPG extraction: a normalized LMS adaptive filter predicts the green
//! channel from the red reference, so everything the two channels share
//! (illumination changes, body motion) is cancelled and the pulsatile
//! remainder survives.

use crate::error::{Error, Result};
use crate::preprocess::{Channel, ChannelTrace};

/// Default adaptive filter length in taps.
pub const DEFAULT_LMS_TAPS: usize = 32;
/// Default normalized step size.
pub const DEFAULT_LMS_MU: f64 = 0.1;

#[derive(Debug, Clone, Copy)]
pub struct LmsConfig {
    pub filter_length: usize,
    /// Normalized adaptation rate; must stay below 2 for stability.
    pub step_size: f64,
    /// Coefficient leakage in [0, 1).
    pub leakage: f64,
}

impl Default for LmsConfig {
    fn default() -> Self {
        LmsConfig {
            filter_length: DEFAULT_LMS_TAPS,
            step_size: DEFAULT_LMS_MU,
            leakage: 0.0,
        }
    }
}

impl LmsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.filter_length < 1 {
            return Err(Error::InvalidArguments("filter_length must be >= 1".into()));
        }
        if !(self.step_size > 0.0 && self.step_size < 2.0) {
            return Err(Error::InvalidArguments(format!(
                "step_size {} outside (0, 2)",
                self.step_size
            )));
        }
        if !(0.0..1.0).contains(&self.leakage) {
            return Err(Error::InvalidArguments(format!(
                "leakage {} outside [0, 1)",
                self.leakage
            )));
        }
        Ok(())
    }
}

/// Normalized LMS filter; newest reference sample is at index 0.
struct NlmsFilter {
    weights: Vec<f64>,
    history: Vec<f64>,
    mu: f64,
    leak: f64,
}

const NLMS_EPS: f64 = 1e-8;

impl NlmsFilter {
    fn new(cfg: &LmsConfig) -> Self {
        NlmsFilter {
            weights: vec![0.0; cfg.filter_length],
            history: vec![0.0; cfg.filter_length],
            mu: cfg.step_size,
            leak: cfg.leakage,
        }
    }

    /// Push one reference sample, predict the desired sample, adapt, and
    /// return the prediction error.
    fn update(&mut self, reference: f64, desired: f64) -> f64 {
        self.history.rotate_right(1);
        self.history[0] = reference;
        let prediction: f64 = self
            .weights
            .iter()
            .zip(&self.history)
            .map(|(w, x)| w * x)
            .sum();
        let error = desired - prediction;
        let power: f64 = self.history.iter().map(|x| x * x).sum();
        let gain = self.mu * error / (power + NLMS_EPS);
        let decay = 1.0 - self.mu * self.leak;
        for (w, x) in self.weights.iter_mut().zip(&self.history) {
            *w = decay * *w + gain * x;
        }
        error
    }
}

/// Derive the rPPG trace for one sub-ROI from its green and red traces.
/// Both inputs are mean-removed and unit-variance scaled before adaptation;
/// the output is returned in the green channel's original scale of
/// deviations.
pub fn extract_rppg(
    green: &ChannelTrace,
    red: &ChannelTrace,
    cfg: &LmsConfig,
) -> Result<ChannelTrace> {
    cfg.validate()?;
    if green.len() != red.len() {
        return Err(Error::LengthMismatch(format!(
            "green has {} samples, red has {}",
            green.len(),
            red.len()
        )));
    }
    if green.fps != red.fps {
        return Err(Error::LengthMismatch(format!(
            "green at {} fps, red at {} fps",
            green.fps, red.fps
        )));
    }
    if green.roi_id != red.roi_id {
        return Err(Error::LengthMismatch(format!(
            "green from roi {}, red from roi {}",
            green.roi_id, red.roi_id
        )));
    }

    let (g_norm, g_std) = normalize(&green.samples, "green")?;
    let (r_norm, _) = normalize(&red.samples, "red")?;

    let mut filter = NlmsFilter::new(cfg);
    let samples: Vec<f64> = r_norm
        .iter()
        .zip(&g_norm)
        .map(|(&r, &g)| filter.update(r, g) * g_std)
        .collect();
    ChannelTrace::new(samples, green.fps, green.roi_id, Channel::Rppg)
}

fn normalize(x: &[f64], name: &'static str) -> Result<(Vec<f64>, f64)> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var <= 0.0 {
        return Err(Error::DegenerateReference(name));
    }
    let std = var.sqrt();
    Ok((x.iter().map(|v| (v - mean) / std).collect(), std))
}
