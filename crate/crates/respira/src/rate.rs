//! Sliding-window respiratory rate estimation for one sub-ROI: decimate the
//! window, decompose it, pick the respiratory mode, estimate its frequency
//! from the autocorrelation function and attach the band-limited SNR.

use crate::emd::{self, EmdConfig, ImfSet};
use crate::error::{Error, Result};
use crate::preprocess::{decimate_samples, decimation_factor, Channel, ChannelTrace};
use crate::spectral::{self, BandSnr, Psd, RESP_BAND, SNR_TOTAL_BAND};

/// Default analysis window length in seconds.
pub const DEFAULT_WINDOW_S: f64 = 30.0;
/// Default window step in seconds.
pub const DEFAULT_STEP_S: f64 = 1.0;
/// Default working rate the windows are decimated to before decomposition.
pub const DEFAULT_WORK_RATE_HZ: f64 = 8.0;

/// Sliding-window geometry.
#[derive(Debug, Clone, Copy)]
pub struct WindowSpec {
    pub length_s: f64,
    pub step_s: f64,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            length_s: DEFAULT_WINDOW_S,
            step_s: DEFAULT_STEP_S,
        }
    }
}

impl WindowSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.length_s > 0.0) || !(self.step_s > 0.0) || self.step_s > self.length_s {
            return Err(Error::InvalidArguments(format!(
                "bad window spec: length {} s, step {} s",
                self.length_s, self.step_s
            )));
        }
        Ok(())
    }

    /// Center time of window `index` in seconds.
    pub fn center_s(&self, index: usize) -> f64 {
        index as f64 * self.step_s + self.length_s / 2.0
    }

    /// Time span `[start, end]` of window `index` in seconds.
    pub fn span_s(&self, index: usize) -> (f64, f64) {
        let start = index as f64 * self.step_s;
        (start, start + self.length_s)
    }
}

/// Autocorrelation peak-picking parameters.
#[derive(Debug, Clone, Copy)]
pub struct AutocorrConfig {
    /// Frequencies outside this open interval are rejected (Hz).
    pub plausible: (f64, f64),
    /// The earliest peak reaching this fraction of the tallest peak is taken,
    /// which prevents locking onto a period multiple.
    pub accept_frac: f64,
    /// Minimum normalized autocorrelation at the chosen peak; weaker
    /// periodicity is rejected.
    pub min_norm_peak: f64,
}

impl Default for AutocorrConfig {
    fn default() -> Self {
        AutocorrConfig {
            plausible: (0.05, 0.6),
            accept_frac: 0.6,
            min_norm_peak: 0.35,
        }
    }
}

/// Minimum input duration: two periods of the slowest in-band frequency.
const MIN_AUTOCORR_DURATION_S: f64 = 20.0;

/// Configuration for one per-window estimation pass.
#[derive(Debug, Clone)]
pub struct RateConfig {
    /// Plausible respiratory band for mode selection (Hz).
    pub band: (f64, f64),
    /// Working rate windows are decimated to before decomposition (Hz).
    pub work_rate_hz: f64,
    /// Autocorrelation refinement may leave the band by at most this much.
    pub band_tolerance_hz: f64,
    pub emd: EmdConfig,
    pub autocorr: AutocorrConfig,
}

impl Default for RateConfig {
    fn default() -> Self {
        RateConfig {
            band: RESP_BAND,
            work_rate_hz: DEFAULT_WORK_RATE_HZ,
            band_tolerance_hz: 0.02,
            emd: EmdConfig::default(),
            autocorr: AutocorrConfig::default(),
        }
    }
}

/// Per-window estimate for one (sub-ROI, channel).
#[derive(Debug, Clone, Copy)]
pub struct CellEstimate {
    pub roi_id: u32,
    pub channel: Channel,
    pub window_index: usize,
    /// Estimated respiratory frequency in Hz, when the window is valid.
    pub f_hz: Option<f64>,
    /// Linear band SNR of the selected mode, when the window is valid.
    pub snr: Option<f64>,
}

impl CellEstimate {
    pub fn valid(&self) -> bool {
        self.f_hz.is_some()
    }
}

/// The respiratory mode chosen from a decomposition.
#[derive(Debug, Clone)]
pub struct ImfSelection {
    pub index: usize,
    pub rep_freq_hz: f64,
    pub snr: BandSnr,
    pub psd: Psd,
}

/// Among modes whose representative frequency lies in the closed `band`,
/// pick the one with the highest in-band power fraction.
pub fn select_respiratory_imf(
    imfs: &ImfSet,
    fps: f64,
    band: (f64, f64),
) -> Result<Option<ImfSelection>> {
    let mut best: Option<ImfSelection> = None;
    for (index, imf) in imfs.imfs.iter().enumerate() {
        let p = spectral::psd(imf, fps)?;
        let rep = match spectral::representative_frequency(&p) {
            Ok(f) => f,
            Err(Error::NoDominantComponent) => continue,
            Err(e) => return Err(e),
        };
        if rep < band.0 || rep > band.1 {
            continue;
        }
        let snr = spectral::band_snr(&p, band, SNR_TOTAL_BAND)?;
        if best.as_ref().map_or(true, |b| snr.ratio > b.snr.ratio) {
            best = Some(ImfSelection {
                index,
                rep_freq_hz: rep,
                snr,
                psd: p,
            });
        }
    }
    Ok(best)
}

/// Fundamental frequency from the unbiased sample autocorrelation: the
/// earliest sufficiently tall peak after the first zero crossing, refined by
/// 3-point parabolic interpolation.
pub fn autocorr_frequency(sequence: &[f64], fps: f64) -> Result<f64> {
    autocorr_frequency_with(sequence, fps, &AutocorrConfig::default())
}

pub fn autocorr_frequency_with(
    sequence: &[f64],
    fps: f64,
    cfg: &AutocorrConfig,
) -> Result<f64> {
    let n = sequence.len();
    let min_len = (MIN_AUTOCORR_DURATION_S * fps).ceil() as usize;
    if n < min_len {
        return Err(Error::WindowTooShort {
            len: n,
            min: min_len,
        });
    }
    if let Some(i) = sequence.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput(i));
    }

    let mean = sequence.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = sequence.iter().map(|v| v - mean).collect();

    // lags beyond the slowest plausible frequency carry no information
    let max_lag = ((fps / cfg.plausible.0).ceil() as usize + 1).min(n - 2);
    let mut r = Vec::with_capacity(max_lag + 1);
    for k in 0..=max_lag {
        let mut acc = 0.0;
        for t in 0..n - k {
            acc += x[t] * x[t + k];
        }
        r.push(acc / (n - k) as f64);
    }
    if r[0] <= f64::MIN_POSITIVE {
        return Err(Error::WeakPeriodicity(0.0));
    }

    // Broadband noise makes the raw ACF wiggle inside the main lobe, which
    // shifts naive peak picks by several lags. A short Hann smoothing pass
    // (lag 0 excluded so its spike cannot leak into small lags) stabilizes
    // the lobe maxima without moving them: the lobes are locally symmetric.
    let smooth = smooth_positive_lags(&r, (0.4 * fps).round() as usize);

    let zc = smooth
        .iter()
        .skip(1)
        .position(|&v| v <= 0.0)
        .map(|i| i + 1)
        .ok_or(Error::NoZeroCrossing)?;

    // local maxima after the zero crossing, inside the plausible lag range
    let lag_min = (fps / cfg.plausible.1).ceil() as usize;
    let mut peaks: Vec<usize> = Vec::new();
    for k in (zc + 1).max(lag_min).max(1)..max_lag {
        if smooth[k] > smooth[k - 1] && smooth[k] >= smooth[k + 1] && smooth[k] > 0.0 {
            peaks.push(k);
        }
    }
    if peaks.is_empty() {
        return Err(Error::NoPeak);
    }
    let tallest = peaks.iter().map(|&k| smooth[k]).fold(f64::MIN, f64::max);
    let lag = *peaks
        .iter()
        .find(|&&k| smooth[k] >= cfg.accept_frac * tallest)
        .expect("tallest peak always qualifies");

    let norm = smooth[lag] / r[0];
    if norm < cfg.min_norm_peak {
        return Err(Error::WeakPeriodicity(norm));
    }
    let r = smooth;

    // 3-point parabolic refinement
    let (a, b, c) = (r[lag - 1], r[lag], r[lag + 1]);
    let denom = a - 2.0 * b + c;
    let delta = if denom.abs() > f64::MIN_POSITIVE {
        (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let f = fps / (lag as f64 + delta);
    if f <= cfg.plausible.0 || f >= cfg.plausible.1 {
        return Err(Error::OutOfPlausibleRange {
            f,
            lo: cfg.plausible.0,
            hi: cfg.plausible.1,
        });
    }
    Ok(f)
}

/// Hann-weighted moving average over lags >= 1, truncated near the start so
/// the lag-0 energy spike never enters a kernel. `half` is the half-width in
/// samples; the lag-0 entry is passed through untouched.
fn smooth_positive_lags(r: &[f64], half: usize) -> Vec<f64> {
    let half = half.max(1);
    let mut out = Vec::with_capacity(r.len());
    out.push(r[0]);
    for k in 1..r.len() {
        let lo = k.saturating_sub(half).max(1);
        let hi = (k + half).min(r.len() - 1);
        let mut acc = 0.0;
        let mut wsum = 0.0;
        for (j, &v) in r[lo..=hi].iter().enumerate() {
            let d = (lo + j) as f64 - k as f64;
            let w = 0.5 * (1.0 + (std::f64::consts::PI * d / (half as f64 + 1.0)).cos());
            acc += w * v;
            wsum += w;
        }
        out.push(acc / wsum);
    }
    out
}

/// Number of complete windows of `len` samples advancing by `step`.
pub fn window_count(n_samples: usize, len: usize, step: usize) -> usize {
    if n_samples < len {
        0
    } else {
        (n_samples - len) / step + 1
    }
}

/// Run the per-window estimation chain over every channel trace of one cell.
pub fn estimate_windows(
    traces: &[ChannelTrace],
    spec: &WindowSpec,
    cfg: &RateConfig,
) -> Result<Vec<CellEstimate>> {
    spec.validate()?;
    let mut out = Vec::new();
    for trace in traces {
        out.extend(estimate_trace_windows(trace, spec, cfg)?);
    }
    Ok(out)
}

/// Per-window estimates for a single trace.
pub fn estimate_trace_windows(
    trace: &ChannelTrace,
    spec: &WindowSpec,
    cfg: &RateConfig,
) -> Result<Vec<CellEstimate>> {
    spec.validate()?;
    let len = (spec.length_s * trace.fps).round() as usize;
    let step = ((spec.step_s * trace.fps).round() as usize).max(1);
    if trace.len() < len {
        return Err(Error::InsufficientDuration {
            got_s: trace.duration_s(),
            need_s: spec.length_s,
        });
    }
    let count = window_count(trace.len(), len, step);
    let mut out = Vec::with_capacity(count);
    for w in 0..count {
        let slice = &trace.samples[w * step..w * step + len];
        out.push(estimate_one_window(slice, trace, w, cfg)?);
    }
    Ok(out)
}

/// One (window, trace) task: decimate, decompose, select, estimate.
pub(crate) fn estimate_one_window(
    slice: &[f64],
    trace: &ChannelTrace,
    window_index: usize,
    cfg: &RateConfig,
) -> Result<CellEstimate> {
    let factor = decimation_factor(trace.fps, cfg.work_rate_hz);
    let work = decimate_samples(slice, factor);
    let fps_work = trace.fps / factor as f64;

    let invalid = CellEstimate {
        roi_id: trace.roi_id,
        channel: trace.channel,
        window_index,
        f_hz: None,
        snr: None,
    };

    let imfs = emd::decompose(&work, &cfg.emd)?;
    let Some(selection) = select_respiratory_imf(&imfs, fps_work, cfg.band)? else {
        return Ok(invalid);
    };
    let f = match autocorr_frequency_with(&imfs.imfs[selection.index], fps_work, &cfg.autocorr)
    {
        Ok(f) => f,
        Err(
            Error::NoZeroCrossing
            | Error::NoPeak
            | Error::WeakPeriodicity(_)
            | Error::OutOfPlausibleRange { .. },
        ) => return Ok(invalid),
        Err(e) => return Err(e),
    };
    // the refined frequency must stay near the selection band
    if f < cfg.band.0 - cfg.band_tolerance_hz || f > cfg.band.1 + cfg.band_tolerance_hz {
        return Ok(invalid);
    }
    Ok(CellEstimate {
        f_hz: Some(f),
        snr: Some(selection.snr.ratio),
        ..invalid
    })
}
