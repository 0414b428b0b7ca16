//! Empirical mode decomposition by iterative sifting.
//!
//! Envelopes are natural cubic splines through the local extrema, with the
//! first/last two extrema mirrored past each end to suppress edge swings.
//! Sifting of one mode stops when the Cauchy SD criterion drops below the
//! configured threshold; the decomposition stops when the residual carries
//! fewer than two extrema or the mode budget is exhausted.

use crate::error::{Error, Result};

/// Minimum window length accepted by [`decompose`].
pub const MIN_WINDOW_LEN: usize = 8;

#[derive(Debug, Clone)]
pub struct EmdConfig {
    /// Cauchy SD threshold deciding when a sifted mode is accepted.
    pub sd_threshold: f64,
    /// Cap on sifting iterations per mode.
    pub max_sift_iters: usize,
    /// Cap on extracted modes.
    pub max_imfs: usize,
}

impl Default for EmdConfig {
    fn default() -> Self {
        EmdConfig {
            sd_threshold: 0.2,
            max_sift_iters: 10,
            max_imfs: 12,
        }
    }
}

/// Ordered intrinsic mode functions plus residual from one decomposition.
#[derive(Debug, Clone)]
pub struct ImfSet {
    pub imfs: Vec<Vec<f64>>,
    pub residual: Vec<f64>,
    pub input_len: usize,
}

impl ImfSet {
    /// Sum of all modes plus the residual; equals the input up to rounding.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = self.residual.clone();
        for imf in &self.imfs {
            for (o, v) in out.iter_mut().zip(imf) {
                *o += v;
            }
        }
        out
    }
}

/// Decompose one window into IMFs plus residual.
pub fn decompose(window: &[f64], cfg: &EmdConfig) -> Result<ImfSet> {
    if window.len() < MIN_WINDOW_LEN {
        return Err(Error::WindowTooShort {
            len: window.len(),
            min: MIN_WINDOW_LEN,
        });
    }
    if let Some(i) = window.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput(i));
    }

    let mut residual = window.to_vec();
    let mut imfs = Vec::new();
    while imfs.len() < cfg.max_imfs {
        let (maxima, minima) = find_extrema(&residual);
        if maxima.len() + minima.len() < 2 {
            break;
        }
        let imf = sift(&residual, cfg);
        for (r, v) in residual.iter_mut().zip(&imf) {
            *r -= v;
        }
        imfs.push(imf);
    }
    Ok(ImfSet {
        imfs,
        residual,
        input_len: window.len(),
    })
}

fn sift(signal: &[f64], cfg: &EmdConfig) -> Vec<f64> {
    let mut h = signal.to_vec();
    for _ in 0..cfg.max_sift_iters {
        let Some(mean) = envelope_mean(&h) else {
            break;
        };
        let mut num = 0.0;
        let mut den = 0.0;
        for (hv, m) in h.iter_mut().zip(&mean) {
            num += m * m;
            den += *hv * *hv;
            *hv -= m;
        }
        if den <= f64::MIN_POSITIVE || num / den < cfg.sd_threshold {
            break;
        }
    }
    h
}

/// Mean of the upper and lower spline envelopes, or `None` when the signal
/// no longer has both maxima and minima.
fn envelope_mean(x: &[f64]) -> Option<Vec<f64>> {
    let (maxima, minima) = find_extrema(x);
    if maxima.is_empty() || minima.is_empty() {
        return None;
    }
    let (ts, ys) = mirror_extend(&maxima, x, 2);
    let upper = spline_on_grid(&ts, &ys, x.len());
    let (ts, ys) = mirror_extend(&minima, x, 2);
    let lower = spline_on_grid(&ts, &ys, x.len());
    Some(
        upper
            .iter()
            .zip(&lower)
            .map(|(u, l)| 0.5 * (u + l))
            .collect(),
    )
}

/// Interior local maxima and minima, with equal-value plateaus collapsed to
/// their midpoint.
pub(crate) fn find_extrema(x: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let n = x.len();
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let mut i = 1;
    while i + 1 <= n - 1 {
        // run of equal values starting at i
        let mut j = i;
        while j + 1 < n && x[j + 1] == x[i] {
            j += 1;
        }
        if j < n - 1 {
            let prev = x[i - 1];
            let next = x[j + 1];
            let mid = (i + j) / 2;
            if x[i] > prev && x[i] > next {
                maxima.push(mid);
            } else if x[i] < prev && x[i] < next {
                minima.push(mid);
            }
        }
        i = j + 1;
    }
    (maxima, minima)
}

/// Knot set for an envelope: the extrema plus up to `count` extrema mirrored
/// across each end of the signal.
fn mirror_extend(pos: &[usize], x: &[f64], count: usize) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let c = count.min(pos.len());
    let mut ts = Vec::with_capacity(pos.len() + 2 * c);
    let mut ys = Vec::with_capacity(pos.len() + 2 * c);
    for k in (0..c).rev() {
        ts.push(-(pos[k] as f64));
        ys.push(x[pos[k]]);
    }
    for &p in pos {
        ts.push(p as f64);
        ys.push(x[p]);
    }
    let end = (n - 1) as f64;
    for k in 0..c {
        let p = pos[pos.len() - 1 - k];
        ts.push(2.0 * end - p as f64);
        ys.push(x[p]);
    }
    (ts, ys)
}

/// Natural cubic spline through (ts, ys), evaluated at 0, 1, .., n-1.
fn spline_on_grid(ts: &[f64], ys: &[f64], n: usize) -> Vec<f64> {
    let m = ts.len();
    debug_assert!(m >= 1);
    if m == 1 {
        return vec![ys[0]; n];
    }
    if m == 2 {
        let slope = (ys[1] - ys[0]) / (ts[1] - ts[0]);
        return (0..n)
            .map(|i| ys[0] + slope * (i as f64 - ts[0]))
            .collect();
    }

    // second derivatives via the Thomas algorithm, natural boundary
    let mut h = vec![0.0; m - 1];
    for i in 0..m - 1 {
        h[i] = ts[i + 1] - ts[i];
    }
    let mut diag = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for i in 1..m - 1 {
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
    }
    let mut c_prime = vec![0.0; m];
    let mut d_prime = vec![0.0; m];
    for i in 1..m - 1 {
        let denom = diag[i]
            - if i > 1 {
                h[i - 1] * c_prime[i - 1]
            } else {
                0.0
            };
        c_prime[i] = h[i] / denom;
        d_prime[i] = (rhs[i]
            - if i > 1 {
                h[i - 1] * d_prime[i - 1]
            } else {
                0.0
            })
            / denom;
    }
    let mut m2 = vec![0.0; m]; // second derivatives, m2[0] = m2[m-1] = 0
    for i in (1..m - 1).rev() {
        m2[i] = d_prime[i] - c_prime[i] * m2[i + 1];
    }

    let mut out = Vec::with_capacity(n);
    let mut seg = 0usize;
    for i in 0..n {
        let t = i as f64;
        while seg + 2 < m && t > ts[seg + 1] {
            seg += 1;
        }
        let (t0, t1) = (ts[seg], ts[seg + 1]);
        let hs = t1 - t0;
        let a = (t1 - t) / hs;
        let b = (t - t0) / hs;
        let v = a * ys[seg]
            + b * ys[seg + 1]
            + ((a * a * a - a) * m2[seg] + (b * b * b - b) * m2[seg + 1]) * hs * hs / 6.0;
        out.push(v);
    }
    out
}
