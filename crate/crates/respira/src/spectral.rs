//! Power spectral density estimation and band-limited SNR.
//!
//! The PSD is a one-sided periodogram of the mean-removed, Hann-windowed
//! sequence, zero-padded until the bin spacing is at most 0.01 Hz and
//! normalized so the bins sum to the window-energy-compensated signal power.

use std::cell::RefCell;
use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Upper bound on PSD bin spacing.
pub const MAX_RESOLUTION_HZ: f64 = 0.01;
/// Plausible respiratory band (Hz).
pub const RESP_BAND: (f64, f64) = (0.1, 0.4);
/// Total band for the SNR denominator (Hz); clamped to Nyquist when lower.
pub const SNR_TOTAL_BAND: (f64, f64) = (0.0, 4.0);
/// Minimum sequence length for spectral estimation.
pub const MIN_PSD_LEN: usize = 8;

/// One-sided power spectral density on a uniform frequency grid.
#[derive(Debug, Clone)]
pub struct Psd {
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    pub resolution: f64,
}

/// Band-limited SNR as a linear power ratio and in decibels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSnr {
    pub ratio: f64,
    pub db: f64,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Periodogram of `sequence` sampled at `fps` Hz.
pub fn psd(sequence: &[f64], fps: f64) -> Result<Psd> {
    let n = sequence.len();
    if n < MIN_PSD_LEN {
        return Err(Error::WindowTooShort {
            len: n,
            min: MIN_PSD_LEN,
        });
    }
    if let Some(i) = sequence.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput(i));
    }

    let mean = sequence.iter().sum::<f64>() / n as f64;
    let mut window_energy = 0.0;
    let mut windowed: Vec<f64> = sequence
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let w = 0.5 * (1.0 - (2.0 * PI * i as f64 / (n - 1) as f64).cos());
            window_energy += w * w;
            (v - mean) * w
        })
        .collect();

    let n_fft = (n.max((fps / MAX_RESOLUTION_HZ).ceil() as usize)).next_power_of_two();
    windowed.resize(n_fft, 0.0);
    let mut buf: Vec<Complex<f64>> = windowed
        .into_iter()
        .map(|v| Complex::new(v, 0.0))
        .collect();
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_forward(n_fft);
        fft.process(&mut buf);
    });

    let half = n_fft / 2;
    let scale = 1.0 / (n_fft as f64 * window_energy);
    let resolution = fps / n_fft as f64;
    let mut freqs = Vec::with_capacity(half + 1);
    let mut power = Vec::with_capacity(half + 1);
    for (j, c) in buf.iter().take(half + 1).enumerate() {
        let double = if j == 0 || j == half { 1.0 } else { 2.0 };
        freqs.push(j as f64 * resolution);
        power.push(double * c.norm_sqr() * scale);
    }
    Ok(Psd {
        freqs,
        power,
        resolution,
    })
}

/// Frequency of the strongest PSD bin; ties go to the lower frequency.
pub fn representative_frequency(p: &Psd) -> Result<f64> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &pw) in p.power.iter().enumerate() {
        if pw > 0.0 && best.map_or(true, |(_, b)| pw > b) {
            best = Some((i, pw));
        }
    }
    match best {
        Some((i, _)) => Ok(p.freqs[i]),
        None => Err(Error::NoDominantComponent),
    }
}

/// Fraction of spectral power inside `band` relative to `total`; bins whose
/// center lies in the closed interval count. The total band's upper edge is
/// clamped to the spectrum's Nyquist limit.
pub fn band_snr(p: &Psd, band: (f64, f64), total: (f64, f64)) -> Result<BandSnr> {
    let nyquist = *p.freqs.last().expect("psd is never empty");
    let total = (total.0, total.1.min(nyquist));
    if band.0 < total.0 || band.1 > total.1 || band.0 > band.1 {
        return Err(Error::BadBand {
            band_lo: band.0,
            band_hi: band.1,
            total_lo: total.0,
            total_hi: total.1,
        });
    }
    let sum_in = |lo: f64, hi: f64| -> f64 {
        p.freqs
            .iter()
            .zip(&p.power)
            .filter(|(f, _)| **f >= lo && **f <= hi)
            .map(|(_, pw)| pw)
            .sum()
    };
    let num = sum_in(band.0, band.1);
    let den = sum_in(total.0, total.1);
    if den <= 0.0 {
        return Err(Error::ZeroTotalPower {
            lo: total.0,
            hi: total.1,
        });
    }
    let ratio = num / den;
    Ok(BandSnr {
        ratio,
        db: 10.0 * ratio.log10(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tone(n: usize, fps: f64, freq: f64, amp: f64) -> Vec<f64> {
        (0..n)
            .map(|i| amp * (2.0 * PI * freq * i as f64 / fps).sin())
            .collect()
    }

    #[test]
    fn single_tone_peak_location() {
        let x = tone(240, 8.0, 0.25, 1.0);
        let p = psd(&x, 8.0).unwrap();
        let f = representative_frequency(&p).unwrap();
        assert!((f - 0.25).abs() <= 0.01, "peak at {f}");
        assert!(p.resolution <= MAX_RESOLUTION_HZ);
    }

    #[test]
    fn constant_input_is_all_zero() {
        let p = psd(&vec![7.5; 64], 8.0).unwrap();
        assert!(p.power.iter().all(|&v| v.abs() < 1e-20));
        assert!(matches!(
            representative_frequency(&p),
            Err(Error::NoDominantComponent)
        ));
    }

    #[test]
    fn white_noise_total_power_matches_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 4096;
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let p = psd(&x, 8.0).unwrap();
        let total: f64 = p.power.iter().sum();
        assert!(
            (total / var - 1.0).abs() < 0.05,
            "total {total} vs variance {var}"
        );
    }

    #[test]
    fn stronger_tone_wins() {
        let mut x = tone(2400, 8.0, 0.2, 1.0);
        for (v, w) in x.iter_mut().zip(tone(2400, 8.0, 0.3, 0.5f64.sqrt())) {
            *v += w;
        }
        let p = psd(&x, 8.0).unwrap();
        let f = representative_frequency(&p).unwrap();
        assert!((f - 0.2).abs() <= 0.01, "peak at {f}");
    }

    #[test]
    fn tie_breaks_toward_lower_frequency() {
        let p = Psd {
            freqs: vec![0.0, 0.1, 0.2, 0.3, 0.4],
            power: vec![0.0, 0.0, 1.0, 1.0, 0.0],
            resolution: 0.1,
        };
        assert_eq!(representative_frequency(&p).unwrap(), 0.2);
    }

    #[test]
    fn band_snr_all_in_band() {
        let p = Psd {
            freqs: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            power: vec![0.0, 0.5, 1.0, 0.25, 0.0, 0.0],
            resolution: 0.1,
        };
        let snr = band_snr(&p, (0.1, 0.4), (0.0, 4.0)).unwrap();
        assert_eq!(snr.ratio, 1.0);
        assert_eq!(snr.db, 0.0);
    }

    #[test]
    fn band_snr_out_of_band_tone() {
        let x = tone(240, 8.0, 1.0, 1.0);
        let p = psd(&x, 8.0).unwrap();
        let snr = band_snr(&p, (0.1, 0.4), (0.0, 4.0)).unwrap();
        assert!(snr.ratio < 1e-4, "ratio {}", snr.ratio);
    }

    #[test]
    fn band_snr_half_split() {
        // synthetic PSD: one bin in band, one out, equal power
        let p = Psd {
            freqs: vec![0.0, 0.25, 1.0],
            power: vec![0.0, 3.0, 3.0],
            resolution: 0.25,
        };
        let snr = band_snr(&p, (0.1, 0.4), (0.0, 4.0)).unwrap();
        assert!((snr.ratio - 0.5).abs() <= 1e-12);
        assert!((snr.db - (-3.010299956639812)).abs() < 1e-9);
    }

    #[test]
    fn band_snr_scale_invariant() {
        let x = tone(240, 8.0, 0.25, 1.0);
        let p = psd(&x, 8.0).unwrap();
        let scaled = Psd {
            freqs: p.freqs.clone(),
            power: p.power.iter().map(|v| v * 1234.5).collect(),
            resolution: p.resolution,
        };
        let a = band_snr(&p, RESP_BAND, SNR_TOTAL_BAND).unwrap();
        let b = band_snr(&scaled, RESP_BAND, SNR_TOTAL_BAND).unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-12);
        assert_eq!(
            representative_frequency(&p).unwrap(),
            representative_frequency(&scaled).unwrap()
        );
    }

    #[test]
    fn zero_total_power_rejected() {
        let p = Psd {
            freqs: vec![0.0, 0.1, 0.2],
            power: vec![0.0, 0.0, 0.0],
            resolution: 0.1,
        };
        assert!(matches!(
            band_snr(&p, (0.1, 0.2), (0.0, 4.0)),
            Err(Error::ZeroTotalPower { .. })
        ));
    }

    #[test]
    fn short_input_rejected() {
        assert!(matches!(
            psd(&[1.0; 4], 8.0),
            Err(Error::WindowTooShort { .. })
        ));
    }
}
