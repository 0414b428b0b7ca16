//! Sub-ROI grid construction, per-cell channel averaging and FIR
//! low-pass filtering of the averaged traces.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::{FrameSequence, Region, RegionMask};

/// Default sub-ROI edge length in pixels.
pub const DEFAULT_EDGE_PX: u32 = 10;
/// Default low-pass cutoff in Hz.
pub const DEFAULT_F_CUT: f64 = 4.0;
/// Default fraction of single-label pixels required for a valid cell.
pub const DEFAULT_CELL_PURITY: f64 = 1.0;

// ── channel traces ──────────────────────────────────────────────────────

/// Signal source of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    R,
    G,
    B,
    Rppg,
}

impl Channel {
    pub const COLOR: [Channel; 3] = [Channel::R, Channel::G, Channel::B];
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::R => "R",
            Channel::G => "G",
            Channel::B => "B",
            Channel::Rppg => "rPPG",
        })
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" => Ok(Channel::R),
            "G" => Ok(Channel::G),
            "B" => Ok(Channel::B),
            "rPPG" => Ok(Channel::Rppg),
            other => Err(Error::UnknownChannel(other.into())),
        }
    }
}

/// One scalar time series for a (sub-ROI, channel) pair.
#[derive(Debug, Clone)]
pub struct ChannelTrace {
    pub samples: Vec<f64>,
    pub fps: f64,
    pub roi_id: u32,
    pub channel: Channel,
}

impl ChannelTrace {
    pub fn new(samples: Vec<f64>, fps: f64, roi_id: u32, channel: Channel) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !(fps > 0.0) || !fps.is_finite() {
            return Err(Error::GeometryMismatch(format!("fps={fps}")));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput(i));
        }
        Ok(ChannelTrace {
            samples,
            fps,
            roi_id,
            channel,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.fps
    }
}

// ── sub-ROI grid ────────────────────────────────────────────────────────

/// One valid square cell of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub id: u32,
    pub x0: u32,
    pub y0: u32,
    pub region: Region,
}

/// Partition of the frame into square sub-ROIs that passed the purity rule.
#[derive(Debug, Clone)]
pub struct SubRoiGrid {
    pub edge_px: u32,
    pub cells: Vec<Cell>,
}

impl SubRoiGrid {
    pub fn n_roi(&self) -> usize {
        self.cells.len()
    }

    pub fn region_of(&self, roi_id: u32) -> Option<Region> {
        self.cells
            .iter()
            .find(|c| c.id == roi_id)
            .map(|c| c.region)
    }

    pub fn region_map(&self) -> BTreeMap<u32, Region> {
        self.cells.iter().map(|c| (c.id, c.region)).collect()
    }
}

/// Tile the mask from (0,0) in steps of `edge_px`; keep cells where at least
/// `purity` of the pixels carry one non-background label. Partial cells at
/// the boundary are discarded.
pub fn build_grid(mask: &RegionMask, edge_px: u32, purity: f64) -> Result<SubRoiGrid> {
    if edge_px == 0 {
        return Err(Error::GeometryMismatch("edge_px must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&purity) {
        return Err(Error::GeometryMismatch(format!(
            "cell purity {purity} outside [0, 1]"
        )));
    }
    let area = (edge_px as usize) * (edge_px as usize);
    let mut cells = Vec::new();
    let mut id = 0u32;
    let mut y0 = 0;
    while y0 + edge_px <= mask.height {
        let mut x0 = 0;
        while x0 + edge_px <= mask.width {
            let mut face = 0usize;
            let mut chest = 0usize;
            for y in y0..y0 + edge_px {
                for x in x0..x0 + edge_px {
                    match mask.label(x, y) {
                        crate::ingest::MaskLabel::Face => face += 1,
                        crate::ingest::MaskLabel::Chest => chest += 1,
                        crate::ingest::MaskLabel::Background => {}
                    }
                }
            }
            let (region, count) = if face >= chest {
                (Region::Face, face)
            } else {
                (Region::Chest, chest)
            };
            if count > 0 && count as f64 + 1e-9 >= purity * area as f64 {
                cells.push(Cell {
                    id,
                    x0,
                    y0,
                    region,
                });
                id += 1;
            }
            x0 += edge_px;
        }
        y0 += edge_px;
    }
    if cells.is_empty() {
        return Err(Error::NoValidCells);
    }
    Ok(SubRoiGrid { edge_px, cells })
}

// ── channel averaging ───────────────────────────────────────────────────

/// Spatially average every color channel inside every cell, producing three
/// traces per cell (R, G, B) with one sample per frame.
pub fn average_channels(frames: &FrameSequence, grid: &SubRoiGrid) -> Result<Vec<ChannelTrace>> {
    let w = frames.width as usize;
    for c in &grid.cells {
        if c.x0 + grid.edge_px > frames.width || c.y0 + grid.edge_px > frames.height {
            return Err(Error::GeometryMismatch(format!(
                "cell {} at ({},{}) exceeds {}x{} frame",
                c.id, c.x0, c.y0, frames.width, frames.height
            )));
        }
    }
    let n = frames.frame_count();
    let area = (grid.edge_px as usize * grid.edge_px as usize) as f64;
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(n); grid.cells.len() * 3];

    for frame in &frames.frames {
        for (ci, cell) in grid.cells.iter().enumerate() {
            for (k, channel) in Channel::COLOR.iter().enumerate() {
                let plane = frame.plane(*channel);
                let mut sum = 0.0f64;
                for y in cell.y0..cell.y0 + grid.edge_px {
                    let row = (y as usize) * w + cell.x0 as usize;
                    for &v in &plane[row..row + grid.edge_px as usize] {
                        sum += v as f64;
                    }
                }
                series[ci * 3 + k].push(sum / area);
            }
        }
    }

    let mut out = Vec::with_capacity(series.len());
    for (ci, cell) in grid.cells.iter().enumerate() {
        for (k, channel) in Channel::COLOR.iter().enumerate() {
            out.push(ChannelTrace::new(
                std::mem::take(&mut series[ci * 3 + k]),
                frames.fps,
                cell.id,
                *channel,
            )?);
        }
    }
    Ok(out)
}

// ── FIR low-pass ────────────────────────────────────────────────────────

/// Linear-phase windowed-sinc low-pass filter (Hamming window), with the
/// smallest even order whose measured response keeps passband gain within
/// 1% below 0.8·f_cut and stopband attenuation of at least 40 dB above
/// 1.25·f_cut.
#[derive(Debug, Clone)]
pub struct FirLowpass {
    taps: Vec<f64>,
    fps: f64,
    f_cut: f64,
}

const PASSBAND_RIPPLE: f64 = 0.01;
const STOPBAND_GAIN: f64 = 0.01; // -40 dB
const MAX_ORDER: usize = 8192;

impl FirLowpass {
    pub fn design(fps: f64, f_cut: f64) -> Result<Self> {
        if !(f_cut > 0.0 && f_cut < fps / 2.0) {
            return Err(Error::CutoffOutOfRange { f_cut, fps });
        }
        let pass_edge = 0.8 * f_cut;
        let stop_edge = (1.25 * f_cut).min(fps / 2.0);
        // center the transition band on the design cutoff
        let fc_design = 0.5 * (pass_edge + stop_edge);

        // Hamming transition width is roughly 3.3 / taps (normalized), which
        // gives a starting point for the order search.
        let delta = (stop_edge - pass_edge) / fps;
        let mut order = ((3.3 / delta).ceil() as usize + 1).max(4);
        if order % 2 == 1 {
            order += 1;
        }

        let meets = |order: usize| {
            let taps = windowed_sinc(order, fc_design / fps);
            if response_ok(&taps, fps, pass_edge, stop_edge) {
                Some(taps)
            } else {
                None
            }
        };

        // walk up to a passing order, then down to the smallest one
        let mut current = order;
        let mut best = loop {
            if let Some(taps) = meets(current) {
                break taps;
            }
            current += 2;
            if current > MAX_ORDER {
                return Err(Error::CutoffOutOfRange { f_cut, fps });
            }
        };
        while current > 4 {
            match meets(current - 2) {
                Some(taps) => {
                    best = taps;
                    current -= 2;
                }
                None => break,
            }
        }
        Ok(FirLowpass {
            taps: best,
            fps,
            f_cut,
        })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn order(&self) -> usize {
        self.taps.len() - 1
    }

    pub fn f_cut(&self) -> f64 {
        self.f_cut
    }

    /// Magnitude response at frequency `f` (Hz).
    pub fn gain_at(&self, f: f64) -> f64 {
        gain(&self.taps, f / self.fps)
    }

    /// Filter with mirror extension and group-delay compensation; the output
    /// is time-aligned with the input and has the same length.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let taps = self.taps.len();
        if x.len() < taps {
            return Err(Error::TraceTooShort {
                len: x.len(),
                taps,
            });
        }
        let n = x.len();
        let ext = taps - 1;
        let half = ext / 2;
        let mut e = Vec::with_capacity(n + 2 * ext);
        for i in (1..=ext).rev() {
            e.push(x[i]); // even reflection about x[0]
        }
        e.extend_from_slice(x);
        for i in 1..=ext {
            e.push(x[n - 1 - i]); // even reflection about x[n-1]
        }
        let mut y = Vec::with_capacity(n);
        for k in 0..n {
            let base = ext + k + half;
            let mut acc = 0.0;
            for (j, &h) in self.taps.iter().enumerate() {
                acc += h * e[base - j];
            }
            y.push(acc);
        }
        Ok(y)
    }
}

fn windowed_sinc(order: usize, fc_norm: f64) -> Vec<f64> {
    let n = order + 1;
    let alpha = order as f64 / 2.0;
    let mut taps: Vec<f64> = (0..n)
        .map(|i| {
            let x = i as f64 - alpha;
            let ideal = if x == 0.0 {
                2.0 * fc_norm
            } else {
                (2.0 * PI * fc_norm * x).sin() / (PI * x)
            };
            let window = 0.54 - 0.46 * (2.0 * PI * i as f64 / order as f64).cos();
            ideal * window
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in taps.iter_mut() {
        *t /= sum; // exact unit DC gain
    }
    taps
}

fn gain(taps: &[f64], f_norm: f64) -> f64 {
    let omega = 2.0 * PI * f_norm;
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for (n, &h) in taps.iter().enumerate() {
        let (s, c) = (omega * n as f64).sin_cos();
        re += h * c;
        im -= h * s;
    }
    (re * re + im * im).sqrt()
}

fn response_ok(taps: &[f64], fps: f64, pass_edge: f64, stop_edge: f64) -> bool {
    const GRID: usize = 256;
    for i in 0..=GRID {
        let f = pass_edge * i as f64 / GRID as f64;
        if (gain(taps, f / fps) - 1.0).abs() > PASSBAND_RIPPLE {
            return false;
        }
    }
    let nyq = fps / 2.0;
    if stop_edge < nyq {
        for i in 0..=GRID {
            let f = stop_edge + (nyq - stop_edge) * i as f64 / GRID as f64;
            if gain(taps, f / fps) > STOPBAND_GAIN {
                return false;
            }
        }
    }
    true
}

/// Convenience wrapper: design the filter for the trace's rate and apply it.
pub fn lowpass(trace: &ChannelTrace, f_cut: f64) -> Result<ChannelTrace> {
    let fir = FirLowpass::design(trace.fps, f_cut)?;
    let samples = fir.apply(&trace.samples)?;
    ChannelTrace::new(samples, trace.fps, trace.roi_id, trace.channel)
}

// ── decimation ──────────────────────────────────────────────────────────

/// Integer decimation factor taking `fps` closest to `target_hz` (at least 1).
pub fn decimation_factor(fps: f64, target_hz: f64) -> usize {
    if !(target_hz > 0.0) {
        return 1;
    }
    ((fps / target_hz).round() as usize).max(1)
}

/// Keep every `factor`-th sample starting at index 0.
pub fn decimate_samples(samples: &[f64], factor: usize) -> Vec<f64> {
    samples.iter().step_by(factor.max(1)).copied().collect()
}

// ── trace CSV export ────────────────────────────────────────────────────

/// Serialize traces in the shared trace CSV format. All traces must share
/// one sampling rate. `regions` entries become `# region=` header lines.
pub fn traces_to_csv(traces: &[ChannelTrace], regions: &BTreeMap<u32, Region>) -> Result<String> {
    if traces.is_empty() {
        return Err(Error::NoTraces);
    }
    let fps = traces[0].fps;
    if traces.iter().any(|t| t.fps != fps) {
        return Err(Error::GeometryMismatch(
            "traces with mixed sampling rates".into(),
        ));
    }
    let mut sorted: Vec<&ChannelTrace> = traces.iter().collect();
    sorted.sort_by_key(|t| (t.roi_id, t.channel));

    let mut out = String::new();
    out.push_str(&format!("# fps={fps}\n"));
    for (id, region) in regions {
        out.push_str(&format!("# region={id}:{region}\n"));
    }
    for t in sorted {
        for (i, v) in t.samples.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", t.roi_id, t.channel, i, v));
        }
    }
    Ok(out)
}

pub fn export_traces(
    traces: &[ChannelTrace],
    regions: &BTreeMap<u32, Region>,
    path: &Path,
) -> Result<()> {
    let text = traces_to_csv(traces, regions)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{BitDepth, Frame, MaskLabel};

    fn uniform_mask(width: u32, height: u32, label: MaskLabel) -> RegionMask {
        RegionMask::new(width, height, vec![label; (width * height) as usize]).unwrap()
    }

    fn frames_from_fn(
        width: u32,
        height: u32,
        count: usize,
        f: impl Fn(usize, u32, u32) -> (u16, u16, u16),
    ) -> FrameSequence {
        let frames = (0..count)
            .map(|t| {
                let mut r = Vec::new();
                let mut g = Vec::new();
                let mut b = Vec::new();
                for y in 0..height {
                    for x in 0..width {
                        let (pr, pg, pb) = f(t, x, y);
                        r.push(pr);
                        g.push(pg);
                        b.push(pb);
                    }
                }
                Frame { r, g, b }
            })
            .collect();
        FrameSequence::new(width, height, 120.0, BitDepth::Eight, frames).unwrap()
    }

    #[test]
    fn grid_all_face() {
        let mask = uniform_mask(20, 20, MaskLabel::Face);
        let grid = build_grid(&mask, 10, 1.0).unwrap();
        assert_eq!(grid.n_roi(), 4);
        assert!(grid.cells.iter().all(|c| c.region == Region::Face));
    }

    #[test]
    fn grid_all_background_rejected() {
        let mask = uniform_mask(20, 20, MaskLabel::Background);
        assert!(matches!(
            build_grid(&mask, 10, 1.0),
            Err(Error::NoValidCells)
        ));
    }

    #[test]
    fn grid_split_regions() {
        // left half face, right half chest
        let labels: Vec<MaskLabel> = (0..400)
            .map(|i| {
                if i % 20 < 10 {
                    MaskLabel::Face
                } else {
                    MaskLabel::Chest
                }
            })
            .collect();
        let mask = RegionMask::new(20, 20, labels).unwrap();
        let grid = build_grid(&mask, 10, 1.0).unwrap();
        let faces = grid.cells.iter().filter(|c| c.region == Region::Face).count();
        let chests = grid.cells.iter().filter(|c| c.region == Region::Chest).count();
        assert_eq!((faces, chests), (2, 2));
    }

    #[test]
    fn grid_purity_rule() {
        // one 10x10 block with 99 face pixels and 1 background pixel
        let mut labels = vec![MaskLabel::Face; 100];
        labels[0] = MaskLabel::Background;
        let mask = RegionMask::new(10, 10, labels).unwrap();
        assert!(matches!(
            build_grid(&mask, 10, 1.0),
            Err(Error::NoValidCells)
        ));
        let grid = build_grid(&mask, 10, 0.9).unwrap();
        assert_eq!(grid.n_roi(), 1);
    }

    #[test]
    fn grid_partial_cells_discarded() {
        let mask = uniform_mask(25, 15, MaskLabel::Chest);
        let grid = build_grid(&mask, 10, 1.0).unwrap();
        // 25x15 fits 2x1 full cells of edge 10
        assert_eq!(grid.n_roi(), 2);
    }

    #[test]
    fn averaging_constant() {
        let frames = frames_from_fn(10, 10, 5, |_, _, _| (50, 60, 70));
        let mask = uniform_mask(10, 10, MaskLabel::Face);
        let grid = build_grid(&mask, 10, 1.0).unwrap();
        let traces = average_channels(&frames, &grid).unwrap();
        assert_eq!(traces.len(), 3);
        assert!(traces[0].samples.iter().all(|&v| v == 50.0));
        assert!(traces[1].samples.iter().all(|&v| v == 60.0));
        assert!(traces[2].samples.iter().all(|&v| v == 70.0));
    }

    #[test]
    fn averaging_brute_force_oracle() {
        // 16x16 cell whose red pixels hold 0..=255 exactly once
        let frames = frames_from_fn(16, 16, 2, |_, x, y| ((y * 16 + x) as u16, 3, 4));
        let mask = uniform_mask(16, 16, MaskLabel::Chest);
        let grid = build_grid(&mask, 16, 1.0).unwrap();
        let traces = average_channels(&frames, &grid).unwrap();
        let expected: f64 = (0..=255u32).map(f64::from).sum::<f64>() / 256.0;
        assert!((traces[0].samples[0] - expected).abs() < 1e-12);
        assert_eq!(expected, 127.5);
    }

    #[test]
    fn averaging_single_pixel_cell_is_identity() {
        let frames = frames_from_fn(3, 3, 4, |t, x, y| ((t as u16 + x as u16 * y as u16), 0, 0));
        let mask = uniform_mask(3, 3, MaskLabel::Face);
        let grid = build_grid(&mask, 1, 1.0).unwrap();
        let traces = average_channels(&frames, &grid).unwrap();
        // cell id 4 is the center pixel (1,1) in row-major order
        let center_r = traces.iter().find(|t| t.roi_id == 4 && t.channel == Channel::R);
        let series: Vec<f64> = (0..4).map(|t| (t + 1) as f64).collect();
        assert_eq!(center_r.unwrap().samples, series);
    }

    #[test]
    fn averaging_is_linear() {
        let fx = frames_from_fn(8, 8, 6, |t, x, _| ((t as u16 * 2 + x as u16), 1, 2));
        let fy = frames_from_fn(8, 8, 6, |t, _, y| ((y as u16 + t as u16), 5, 1));
        // pixelwise 2*X + 3*Y
        let combined = frames_from_fn(8, 8, 6, |t, x, y| {
            (
                2 * (t as u16 * 2 + x as u16) + 3 * (y as u16 + t as u16),
                2 * 1 + 3 * 5,
                2 * 2 + 3 * 1,
            )
        });
        let mask = uniform_mask(8, 8, MaskLabel::Face);
        let grid = build_grid(&mask, 8, 1.0).unwrap();
        let tx = average_channels(&fx, &grid).unwrap();
        let ty = average_channels(&fy, &grid).unwrap();
        let tc = average_channels(&combined, &grid).unwrap();
        for ((a, b), c) in tx.iter().zip(&ty).zip(&tc) {
            for ((&va, &vb), &vc) in a.samples.iter().zip(&b.samples).zip(&c.samples) {
                assert!((2.0 * va + 3.0 * vb - vc).abs() < 1e-9);
            }
        }
    }

    fn sine_trace(freq: f64, fps: f64, seconds: f64) -> ChannelTrace {
        let n = (fps * seconds) as usize;
        let samples = (0..n)
            .map(|i| (2.0 * PI * freq * i as f64 / fps).sin())
            .collect();
        ChannelTrace::new(samples, fps, 0, Channel::G).unwrap()
    }

    fn interior_rms(x: &[f64], margin: usize) -> f64 {
        let inner = &x[margin..x.len() - margin];
        (inner.iter().map(|v| v * v).sum::<f64>() / inner.len() as f64).sqrt()
    }

    #[test]
    fn lowpass_passband_preserved() {
        let t = sine_trace(0.25, 120.0, 20.0);
        let y = lowpass(&t, 4.0).unwrap();
        let rin = interior_rms(&t.samples, 300);
        let rout = interior_rms(&y.samples, 300);
        assert!(
            (rout / rin - 1.0).abs() < 0.01,
            "passband gain {}",
            rout / rin
        );
    }

    #[test]
    fn lowpass_stopband_attenuated() {
        let t = sine_trace(20.0, 120.0, 20.0);
        let y = lowpass(&t, 4.0).unwrap();
        let rin = interior_rms(&t.samples, 300);
        let rout = interior_rms(&y.samples, 300);
        assert!(rout / rin <= 0.01, "stopband gain {}", rout / rin);
    }

    #[test]
    fn lowpass_dc_exact() {
        let t = ChannelTrace::new(vec![3.25; 600], 120.0, 0, Channel::R).unwrap();
        let y = lowpass(&t, 4.0).unwrap();
        assert!(y.samples.iter().all(|&v| (v - 3.25).abs() < 1e-12));
    }

    #[test]
    fn lowpass_rejects_bad_cutoff() {
        let t = sine_trace(0.2, 8.0, 60.0);
        assert!(matches!(
            lowpass(&t, 4.0),
            Err(Error::CutoffOutOfRange { .. })
        ));
    }

    #[test]
    fn lowpass_rejects_short_trace() {
        let t = sine_trace(1.0, 120.0, 0.5);
        assert!(matches!(lowpass(&t, 4.0), Err(Error::TraceTooShort { .. })));
    }

    #[test]
    fn lowpass_time_invariant() {
        let fps = 120.0;
        let n = 2400;
        let shift = 17usize;
        let sig = |i: i64| (2.0 * PI * 0.7 * i as f64 / fps).sin();
        let x0: Vec<f64> = (0..n).map(|i| sig(i as i64)).collect();
        let x1: Vec<f64> = (0..n).map(|i| sig(i as i64 - shift as i64)).collect();
        let fir = FirLowpass::design(fps, 4.0).unwrap();
        let y0 = fir.apply(&x0).unwrap();
        let y1 = fir.apply(&x1).unwrap();
        let margin = 600;
        for i in margin..n - margin {
            assert!(
                (y1[i] - y0[i - shift]).abs() < 1e-9,
                "time invariance broken at {i}"
            );
        }
    }

    #[test]
    fn design_order_is_even_and_modest() {
        let fir = FirLowpass::design(120.0, 4.0).unwrap();
        assert_eq!(fir.order() % 2, 0);
        assert!(fir.order() < 400, "order {}", fir.order());
    }

    #[test]
    fn decimation_arithmetic() {
        assert_eq!(decimation_factor(120.0, 8.0), 15);
        assert_eq!(decimation_factor(8.0, 8.0), 1);
        assert_eq!(decimation_factor(4.0, 8.0), 1);
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        assert_eq!(decimate_samples(&x, 3), vec![0.0, 3.0, 6.0, 9.0]);
    }

    #[test]
    fn trace_csv_round_trip() {
        let t1 = sine_trace(0.3, 30.0, 2.0);
        let mut t2 = sine_trace(0.4, 30.0, 2.0);
        t2.roi_id = 3;
        t2.channel = Channel::Rppg;
        let mut regions = BTreeMap::new();
        regions.insert(0u32, Region::Face);
        regions.insert(3u32, Region::Chest);
        let csv = traces_to_csv(&[t1.clone(), t2.clone()], &regions).unwrap();
        let set = crate::ingest::parse_traces(&csv).unwrap();
        assert_eq!(set.traces.len(), 2);
        assert_eq!(set.regions[&3], Region::Chest);
        // shortest round-trip float formatting makes the values bit-identical
        assert_eq!(set.traces[0].samples, t1.samples);
        assert_eq!(set.traces[1].samples, t2.samples);
    }
}
