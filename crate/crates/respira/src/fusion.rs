//! Fuse per-cell frequency estimates into one per-window rate: SNR-derived
//! weights and the weighted median across sub-ROIs.

use crate::error::{Error, Result};
use crate::ingest::Region;
use crate::preprocess::Channel;
use crate::rate::CellEstimate;

/// Fused respiratory rate for one (window, region, channel) group.
#[derive(Debug, Clone)]
pub struct WindowEstimate {
    pub window_index: usize,
    pub region: Region,
    pub channel: Channel,
    /// Fused frequency in Hz; always one of the contributor frequencies.
    pub fused_hz: f64,
    /// (f_k, w_k) pairs that entered the median, in input order.
    pub contributors: Vec<(f64, f64)>,
    pub n_valid: usize,
}

impl WindowEstimate {
    pub fn fused_bpm(&self) -> f64 {
        60.0 * self.fused_hz
    }
}

/// Normalize linear SNR values to weights summing to one.
pub fn weights(snrs: &[f64]) -> Result<Vec<f64>> {
    if snrs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&bad) = snrs.iter().find(|&&s| s < 0.0 || !s.is_finite()) {
        return Err(Error::NegativeSnr(bad));
    }
    let total: f64 = snrs.iter().sum();
    if total <= 0.0 {
        return Err(Error::AllZeroSnr);
    }
    Ok(snrs.iter().map(|s| s / total).collect())
}

/// Weighted median: sort pairs by frequency (stable) and return the first
/// element whose cumulative weight on each side does not exceed one half.
/// With uniform weights and odd count this is the classic median; at an
/// exact 0.5 boundary the lower of the two admissible elements wins.
pub fn weighted_median(fs: &[f64], ws: &[f64]) -> Result<f64> {
    if fs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if fs.len() != ws.len() {
        return Err(Error::LengthMismatch(format!(
            "{} frequencies, {} weights",
            fs.len(),
            ws.len()
        )));
    }
    if let Some(i) = fs
        .iter()
        .chain(ws.iter())
        .position(|v| !v.is_finite())
    {
        return Err(Error::NonFiniteInput(i % fs.len()));
    }

    let mut order: Vec<usize> = (0..fs.len()).collect();
    order.sort_by(|&a, &b| fs[a].partial_cmp(&fs[b]).unwrap());
    let total: f64 = ws.iter().sum();

    let mut before = 0.0;
    for &i in &order {
        let after = total - before - ws[i];
        if before <= 0.5 && after <= 0.5 {
            return Ok(fs[i]);
        }
        before += ws[i];
    }
    // numerically unreachable for normalized weights; pick the boundary element
    let mut cum = 0.0;
    for &i in &order {
        cum += ws[i];
        if cum >= 0.5 * total {
            return Ok(fs[i]);
        }
    }
    Ok(fs[order[fs.len() - 1]])
}

/// Fuse the valid estimates of one (window, region, channel) group. Weights
/// are renormalized over the valid cells only.
pub fn fuse_window(
    window_index: usize,
    region: Region,
    channel: Channel,
    estimates: &[CellEstimate],
) -> Result<WindowEstimate> {
    let valid: Vec<(f64, f64)> = estimates
        .iter()
        .filter_map(|e| e.f_hz.zip(e.snr))
        .collect();
    if valid.is_empty() {
        return Err(Error::NoValidCellsInWindow(window_index));
    }
    let fs: Vec<f64> = valid.iter().map(|&(f, _)| f).collect();
    let snrs: Vec<f64> = valid.iter().map(|&(_, s)| s).collect();
    let ws = match weights(&snrs) {
        Ok(ws) => ws,
        Err(Error::AllZeroSnr) => return Err(Error::NoValidCellsInWindow(window_index)),
        Err(e) => return Err(e),
    };
    let fused_hz = weighted_median(&fs, &ws)?;
    Ok(WindowEstimate {
        window_index,
        region,
        channel,
        fused_hz,
        contributors: fs.iter().copied().zip(ws.iter().copied()).collect(),
        n_valid: valid.len(),
    })
}

/// Brute-force reference: scan every element and test both cumulative
/// conditions directly. Used by tests and the self-test suite.
pub fn weighted_median_reference(fs: &[f64], ws: &[f64]) -> Result<f64> {
    if fs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if fs.len() != ws.len() {
        return Err(Error::LengthMismatch("reference input".into()));
    }
    let mut order: Vec<usize> = (0..fs.len()).collect();
    order.sort_by(|&a, &b| fs[a].partial_cmp(&fs[b]).unwrap());
    for (rank, &i) in order.iter().enumerate() {
        let before: f64 = order[..rank].iter().map(|&j| ws[j]).sum();
        let after: f64 = order[rank + 1..].iter().map(|&j| ws[j]).sum();
        if before <= 0.5 && after <= 0.5 {
            return Ok(fs[i]);
        }
    }
    Err(Error::EmptyInput)
}
