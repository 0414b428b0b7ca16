//! Temporary tuning probe; prints Monte-Carlo statistics. Will be deleted.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use respira::preprocess::{Channel, ChannelTrace};
use respira::rate::{autocorr_frequency_with, AutocorrConfig};
use std::f64::consts::PI;

fn tone(n: usize, fps: f64, freq: f64, amp: f64, phase: f64) -> Vec<f64> {
    (0..n)
        .map(|i| amp * (2.0 * PI * freq * i as f64 / fps + phase).sin())
        .collect()
}

fn noise(n: usize, sigma: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n)
        .map(|_| sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
        .collect()
}

#[test]
fn probe_autocorr_rules() {
    for accept_frac in [0.5, 0.6, 0.7, 0.8] {
        for min_norm in [0.2, 0.25, 0.3, 0.35] {
            let cfg = AutocorrConfig {
                plausible: (0.05, 0.6),
                accept_frac,
                min_norm_peak: min_norm,
            };
            let mut hits = 0;
            let mut errs = 0;
            let mut octave = 0;
            let mut other = 0;
            for seed in 0..200u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut x = tone(240, 8.0, 0.25, 1.0, rng.random::<f64>() * 2.0 * PI);
                for (v, w) in x.iter_mut().zip(noise(240, 0.5f64.sqrt(), &mut rng)) {
                    *v += w;
                }
                match autocorr_frequency_with(&x, 8.0, &cfg) {
                    Ok(f) if (f - 0.25).abs() <= 0.02 => hits += 1,
                    Ok(f) if (f - 0.125).abs() <= 0.02 || (f - 0.0833).abs() < 0.02 => {
                        octave += 1
                    }
                    Ok(_) => other += 1,
                    Err(_) => errs += 1,
                }
            }
            // noise-only rejection
            let mut rejected = 0;
            for seed in 1000..1200u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let x = noise(240, 1.0, &mut rng);
                if autocorr_frequency_with(&x, 8.0, &cfg).is_err() {
                    rejected += 1;
                }
            }
            println!(
                "accept={accept_frac} min_norm={min_norm}: tone hits {hits}/200 \
                 (octave {octave}, other {other}, err {errs}); noise rejected {rejected}/200"
            );
        }
    }
}

#[test]
fn probe_noise_pipeline_validity() {
    use respira::rate::{estimate_trace_windows, RateConfig, WindowSpec};
    for min_norm in [0.25, 0.3, 0.35, 0.4] {
        let mut cfg = RateConfig::default();
        cfg.autocorr.min_norm_peak = min_norm;
        let mut invalid = 0usize;
        let mut total = 0usize;
        for seed in 300..330u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = noise(480, 1.0, &mut rng);
            let trace = ChannelTrace::new(x, 8.0, 0, Channel::R).unwrap();
            let estimates = estimate_trace_windows(&trace, &WindowSpec::default(), &cfg).unwrap();
            total += estimates.len();
            invalid += estimates.iter().filter(|e| !e.valid()).count();
        }
        println!("min_norm={min_norm}: {invalid}/{total} noise windows invalid");
    }
}

#[test]
fn probe_nlms_rates() {
    use respira::rppg::{extract_rppg, LmsConfig};
    for fps in [8.0, 15.0, 30.0, 120.0] {
        let n = (60.0 * fps) as usize;
        let drift: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * 0.05 * i as f64 / fps + 0.3).sin())
            .collect();
        let green: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / fps;
                100.0 + (2.0 * PI * 1.2 * t).sin() + 3.0 * drift[i]
            })
            .collect();
        let red: Vec<f64> = drift.iter().map(|d| 90.0 + d).collect();
        let g = ChannelTrace::new(green, fps, 0, Channel::G).unwrap();
        let r = ChannelTrace::new(red, fps, 0, Channel::R).unwrap();
        let out = extract_rppg(&g, &r, &LmsConfig::default()).unwrap();
        let tail = &out.samples[n / 2..];
        let amp = |x: &[f64], freq: f64| {
            let (mut a, mut b) = (0.0, 0.0);
            for (i, &v) in x.iter().enumerate() {
                let ph = 2.0 * PI * freq * i as f64 / fps;
                a += v * ph.sin();
                b += v * ph.cos();
            }
            2.0 * (a * a + b * b).sqrt() / x.len() as f64
        };
        println!(
            "fps={fps}: pulse retained {:.3}, drift residual {:.4} (of 3.0)",
            amp(tail, 1.2),
            amp(tail, 0.05)
        );
    }
}
