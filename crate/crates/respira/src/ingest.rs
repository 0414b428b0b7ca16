//! Dataset loaders: frame sequences, region masks, precomputed traces and
//! ground-truth schedules.
//!
//! File formats:
//! * `rawseq` — a directory holding `header.json` (width, height, fps,
//!   bit_depth, frame_count, layout) and `frames.bin` with the frames
//!   concatenated, per frame: R plane, G plane, B plane, row-major.
//!   16-bit samples are little-endian.
//! * mask — binary PGM (P5), maxval 255, labels 0=background, 128=face,
//!   255=chest.
//! * trace CSV — `# fps=<float>` header, optional `# region=<id>:<label>`
//!   lines, then `roi_id,channel,t_index,value` rows sorted by
//!   (roi_id, channel, t_index).
//! * schedule CSV — `start_s,end_s,freq_bpm` rows, time-ordered.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::{Channel, ChannelTrace};

// ── core data model ─────────────────────────────────────────────────────

/// Sample width of stored frame intensities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            8 => Ok(BitDepth::Eight),
            16 => Ok(BitDepth::Sixteen),
            other => Err(Error::UnsupportedBitDepth(other)),
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }

    pub fn max_value(self) -> u32 {
        match self {
            BitDepth::Eight => u8::MAX as u32,
            BitDepth::Sixteen => u16::MAX as u32,
        }
    }

    fn bytes_per_sample(self) -> usize {
        match self {
            BitDepth::Eight => 1,
            BitDepth::Sixteen => 2,
        }
    }
}

/// One RGB frame stored as three planes. 8-bit data is widened to `u16`
/// losslessly; `BitDepth` on the owning sequence records the original width.
#[derive(Debug, Clone)]
pub struct Frame {
    pub r: Vec<u16>,
    pub g: Vec<u16>,
    pub b: Vec<u16>,
}

impl Frame {
    pub fn plane(&self, channel: Channel) -> &[u16] {
        match channel {
            Channel::R => &self.r,
            Channel::G => &self.g,
            Channel::B => &self.b,
            Channel::Rppg => panic!("rPPG is a derived channel, not a stored plane"),
        }
    }
}

/// Time-ordered RGB frames with sampling rate and geometry.
#[derive(Debug, Clone)]
pub struct FrameSequence {
    pub width: u32,
    pub height: u32,
    pub fps: f64,
    pub bit_depth: BitDepth,
    pub frames: Vec<Frame>,
}

impl FrameSequence {
    pub fn new(
        width: u32,
        height: u32,
        fps: f64,
        bit_depth: BitDepth,
        frames: Vec<Frame>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::BadFrameGeometry(format!("{width}x{height}")));
        }
        if !(fps > 0.0) || !fps.is_finite() {
            return Err(Error::BadFrameGeometry(format!("fps={fps}")));
        }
        if frames.is_empty() {
            return Err(Error::BadFrameGeometry("zero frames".into()));
        }
        let plane_len = (width as usize) * (height as usize);
        for (i, f) in frames.iter().enumerate() {
            if f.r.len() != plane_len || f.g.len() != plane_len || f.b.len() != plane_len {
                return Err(Error::BadFrameGeometry(format!(
                    "frame {i} plane size does not match {width}x{height}"
                )));
            }
        }
        Ok(FrameSequence {
            width,
            height,
            fps,
            bit_depth,
            frames,
        })
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }
}

/// Per-pixel mask label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskLabel {
    Background,
    Face,
    Chest,
}

impl MaskLabel {
    pub fn from_byte(v: u8) -> Result<Self> {
        match v {
            0 => Ok(MaskLabel::Background),
            128 => Ok(MaskLabel::Face),
            255 => Ok(MaskLabel::Chest),
            other => Err(Error::UnknownMaskLabel(other)),
        }
    }

    pub fn to_byte(self) -> u8 {
        match self {
            MaskLabel::Background => 0,
            MaskLabel::Face => 128,
            MaskLabel::Chest => 255,
        }
    }

    pub fn region(self) -> Option<Region> {
        match self {
            MaskLabel::Background => None,
            MaskLabel::Face => Some(Region::Face),
            MaskLabel::Chest => Some(Region::Chest),
        }
    }
}

/// Body region a sub-ROI belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    Face,
    Chest,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Face => "face",
            Region::Chest => "chest",
        })
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "face" => Ok(Region::Face),
            "chest" => Ok(Region::Chest),
            other => Err(Error::MalformedHeader(format!("unknown region {other:?}"))),
        }
    }
}

/// Per-pixel region labels for one frame geometry.
#[derive(Debug, Clone)]
pub struct RegionMask {
    pub width: u32,
    pub height: u32,
    pub labels: Vec<MaskLabel>,
}

impl RegionMask {
    pub fn new(width: u32, height: u32, labels: Vec<MaskLabel>) -> Result<Self> {
        if labels.len() != (width as usize) * (height as usize) {
            return Err(Error::GeometryMismatch(format!(
                "mask has {} labels for {width}x{height}",
                labels.len()
            )));
        }
        Ok(RegionMask {
            width,
            height,
            labels,
        })
    }

    pub fn label(&self, x: u32, y: u32) -> MaskLabel {
        self.labels[(y as usize) * (self.width as usize) + (x as usize)]
    }
}

/// One metronome stage: constant target frequency over a time span.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub start_s: f64,
    pub end_s: f64,
    pub freq_bpm: f64,
}

impl Stage {
    pub fn freq_hz(&self) -> f64 {
        self.freq_bpm / 60.0
    }
}

/// Ordered, non-overlapping stages of target respiratory frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthSchedule {
    stages: Vec<Stage>,
}

impl GroundTruthSchedule {
    pub fn new(stages: Vec<Stage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::EmptySchedule);
        }
        for s in &stages {
            if !(s.freq_bpm > 0.0) {
                return Err(Error::NonPositiveFrequency(s.freq_bpm));
            }
            if !(s.end_s > s.start_s) {
                return Err(Error::BadStageSpan {
                    start_s: s.start_s,
                    end_s: s.end_s,
                });
            }
        }
        for pair in stages.windows(2) {
            if pair[1].start_s < pair[0].end_s {
                return Err(Error::StageOverlap {
                    at_s: pair[1].start_s,
                });
            }
        }
        Ok(GroundTruthSchedule { stages })
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn start_s(&self) -> f64 {
        self.stages[0].start_s
    }

    pub fn end_s(&self) -> f64 {
        self.stages[self.stages.len() - 1].end_s
    }

    /// Stage containing time `t` (stages are half-open `[start, end)`;
    /// the final stage end is inclusive).
    pub fn stage_at(&self, t: f64) -> Option<&Stage> {
        let last = self.stages.len() - 1;
        self.stages.iter().enumerate().find_map(|(i, s)| {
            let inside = t >= s.start_s && (t < s.end_s || (i == last && t <= s.end_s));
            inside.then_some(s)
        })
    }

    /// Instantaneous target frequency in Hz at time `t`, if scheduled.
    pub fn freq_hz_at(&self, t: f64) -> Option<f64> {
        self.stage_at(t).map(Stage::freq_hz)
    }
}

/// Traces loaded from one CSV file, with any region annotations found.
#[derive(Debug, Clone)]
pub struct TraceSet {
    pub fps: f64,
    pub traces: Vec<ChannelTrace>,
    /// roi_id -> region, from optional `# region=` header lines.
    pub regions: BTreeMap<u32, Region>,
}

// ── rawseq frames ───────────────────────────────────────────────────────

/// Supported frame container formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameFormat {
    /// `header.json` + `frames.bin` directory, planar RGB.
    RawSeq,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawSeqHeader {
    width: u32,
    height: u32,
    fps: f64,
    bit_depth: u32,
    frame_count: u64,
    layout: String,
}

const RAWSEQ_LAYOUT: &str = "planar-rgb";

pub fn load_frames(path: &Path, format: FrameFormat) -> Result<FrameSequence> {
    match format {
        FrameFormat::RawSeq => load_rawseq(path),
    }
}

fn load_rawseq(dir: &Path) -> Result<FrameSequence> {
    let header_path = dir.join("header.json");
    let header_text =
        fs::read_to_string(&header_path).map_err(|e| Error::io(&header_path, e))?;
    let header: RawSeqHeader = serde_json::from_str(&header_text)
        .map_err(|e| Error::MalformedHeader(e.to_string()))?;
    if header.layout != RAWSEQ_LAYOUT {
        return Err(Error::MalformedHeader(format!(
            "layout {:?}, expected {RAWSEQ_LAYOUT:?}",
            header.layout
        )));
    }
    if header.width == 0 || header.height == 0 || header.frame_count == 0 {
        return Err(Error::BadFrameGeometry(format!(
            "{}x{} x{} frames",
            header.width, header.height, header.frame_count
        )));
    }
    if !(header.fps > 0.0) {
        return Err(Error::BadFrameGeometry(format!("fps={}", header.fps)));
    }
    let bit_depth = BitDepth::from_bits(header.bit_depth)?;

    let bin_path = dir.join("frames.bin");
    let mut file = fs::File::open(&bin_path).map_err(|e| Error::io(&bin_path, e))?;
    let plane_len = (header.width as usize) * (header.height as usize);
    let frame_bytes = 3 * plane_len * bit_depth.bytes_per_sample();
    let expected = (frame_bytes as u64) * header.frame_count;
    let actual = file
        .metadata()
        .map_err(|e| Error::io(&bin_path, e))?
        .len();
    if actual < expected {
        return Err(Error::TruncatedFrameData {
            expected,
            found: actual,
        });
    }
    if actual > expected {
        return Err(Error::TrailingFrameData {
            expected,
            found: actual,
        });
    }

    let mut buf = vec![0u8; frame_bytes];
    let mut frames = Vec::with_capacity(header.frame_count as usize);
    for _ in 0..header.frame_count {
        file.read_exact(&mut buf).map_err(|e| Error::io(&bin_path, e))?;
        let mut planes = buf
            .chunks_exact(plane_len * bit_depth.bytes_per_sample())
            .map(|chunk| decode_plane(chunk, bit_depth));
        let r = planes.next().unwrap();
        let g = planes.next().unwrap();
        let b = planes.next().unwrap();
        frames.push(Frame { r, g, b });
    }
    FrameSequence::new(header.width, header.height, header.fps, bit_depth, frames)
}

fn decode_plane(bytes: &[u8], depth: BitDepth) -> Vec<u16> {
    match depth {
        BitDepth::Eight => bytes.iter().map(|&b| b as u16).collect(),
        BitDepth::Sixteen => bytes
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect(),
    }
}

fn encode_plane(samples: &[u16], depth: BitDepth, out: &mut Vec<u8>) {
    match depth {
        BitDepth::Eight => out.extend(samples.iter().map(|&v| v as u8)),
        BitDepth::Sixteen => {
            for &v in samples {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
}

/// Write a frame sequence as a `rawseq` directory.
pub fn write_frames(seq: &FrameSequence, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let header = RawSeqHeader {
        width: seq.width,
        height: seq.height,
        fps: seq.fps,
        bit_depth: seq.bit_depth.bits(),
        frame_count: seq.frames.len() as u64,
        layout: RAWSEQ_LAYOUT.into(),
    };
    let header_path = dir.join("header.json");
    let text = serde_json::to_string_pretty(&header)
        .expect("header serialization cannot fail");
    fs::write(&header_path, text).map_err(|e| Error::io(&header_path, e))?;

    let plane_len = (seq.width as usize) * (seq.height as usize);
    let mut bytes =
        Vec::with_capacity(seq.frames.len() * 3 * plane_len * seq.bit_depth.bytes_per_sample());
    for f in &seq.frames {
        encode_plane(&f.r, seq.bit_depth, &mut bytes);
        encode_plane(&f.g, seq.bit_depth, &mut bytes);
        encode_plane(&f.b, seq.bit_depth, &mut bytes);
    }
    let bin_path = dir.join("frames.bin");
    fs::write(&bin_path, bytes).map_err(|e| Error::io(&bin_path, e))
}

// ── mask PGM ────────────────────────────────────────────────────────────

pub fn load_mask(path: &Path) -> Result<RegionMask> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (width, height, maxval, data_start) = parse_pgm_header(&bytes)?;
    if maxval != 255 {
        return Err(Error::MalformedHeader(format!(
            "PGM maxval {maxval}, expected 255"
        )));
    }
    let n = (width as usize) * (height as usize);
    let data = &bytes[data_start..];
    if data.len() < n {
        return Err(Error::TruncatedFrameData {
            expected: n as u64,
            found: data.len() as u64,
        });
    }
    let labels = data[..n]
        .iter()
        .map(|&b| MaskLabel::from_byte(b))
        .collect::<Result<Vec<_>>>()?;
    RegionMask::new(width, height, labels)
}

/// Parse a binary PGM header, returning (width, height, maxval, data offset).
fn parse_pgm_header(bytes: &[u8]) -> Result<(u32, u32, u32, usize)> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::MalformedHeader("not a binary PGM (P5)".into()));
    }
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        // skip whitespace and comments
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::MalformedHeader("incomplete PGM header".into()));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).unwrap();
        *field = text
            .parse()
            .map_err(|_| Error::MalformedHeader(format!("bad PGM field {text:?}")))?;
    }
    // single whitespace byte separates maxval from data
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::MalformedHeader("missing PGM data separator".into()));
    }
    pos += 1;
    Ok((fields[0], fields[1], fields[2], pos))
}

pub fn write_mask(mask: &RegionMask, path: &Path) -> Result<()> {
    let mut bytes = format!("P5\n{} {}\n255\n", mask.width, mask.height).into_bytes();
    bytes.extend(mask.labels.iter().map(|l| l.to_byte()));
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

// ── trace CSV ───────────────────────────────────────────────────────────

pub fn load_traces(path: &Path) -> Result<TraceSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_traces(&text)
}

pub(crate) fn parse_traces(text: &str) -> Result<TraceSet> {
    let mut fps: Option<f64> = None;
    let mut regions = BTreeMap::new();
    let mut groups: BTreeMap<(u32, Channel), Vec<(u64, f64)>> = BTreeMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("fps=") {
                let parsed = v.trim().parse::<f64>().map_err(|_| {
                    Error::MalformedHeader(format!("bad fps value {v:?}"))
                })?;
                if !(parsed > 0.0) || !parsed.is_finite() {
                    return Err(Error::MalformedHeader(format!("fps={parsed} not positive")));
                }
                fps = Some(parsed);
            } else if let Some(v) = rest.strip_prefix("region=") {
                let (id, label) = v.split_once(':').ok_or_else(|| {
                    Error::MalformedHeader(format!("bad region line {v:?}"))
                })?;
                let id: u32 = id.trim().parse().map_err(|_| {
                    Error::MalformedHeader(format!("bad region roi id {id:?}"))
                })?;
                regions.insert(id, label.trim().parse::<Region>()?);
            }
            // other comment lines are ignored
            continue;
        }

        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::RaggedRow {
                line: lineno + 1,
                msg: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let roi_id: u32 = fields[0].trim().parse().map_err(|_| Error::NonNumericSample {
            line: lineno + 1,
            value: fields[0].into(),
        })?;
        let channel: Channel = fields[1].trim().parse()?;
        let t_index: u64 = fields[2].trim().parse().map_err(|_| Error::NonNumericSample {
            line: lineno + 1,
            value: fields[2].into(),
        })?;
        let value: f64 = fields[3].trim().parse().map_err(|_| Error::NonNumericSample {
            line: lineno + 1,
            value: fields[3].into(),
        })?;
        if !value.is_finite() {
            return Err(Error::NonFiniteInput(t_index as usize));
        }
        groups.entry((roi_id, channel)).or_default().push((t_index, value));
    }

    let fps = fps.ok_or_else(|| Error::MalformedHeader("missing `# fps=` line".into()))?;
    if groups.is_empty() {
        return Err(Error::NoTraces);
    }

    let mut traces = Vec::with_capacity(groups.len());
    for ((roi_id, channel), mut rows) in groups {
        rows.sort_by_key(|&(t, _)| t);
        for (expect, &(t, _)) in rows.iter().enumerate() {
            if t != expect as u64 {
                return Err(Error::RaggedRow {
                    line: 0,
                    msg: format!(
                        "roi {roi_id} channel {channel} t_index {t} where {expect} expected"
                    ),
                });
            }
        }
        let samples: Vec<f64> = rows.into_iter().map(|(_, v)| v).collect();
        traces.push(ChannelTrace::new(samples, fps, roi_id, channel)?);
    }
    Ok(TraceSet {
        fps,
        traces,
        regions,
    })
}

// ── schedule CSV ────────────────────────────────────────────────────────

pub fn load_schedule(path: &Path) -> Result<GroundTruthSchedule> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_schedule(&text)
}

pub(crate) fn parse_schedule(text: &str) -> Result<GroundTruthSchedule> {
    let mut stages = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::RaggedRow {
                line: lineno + 1,
                msg: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let mut nums = [0.0f64; 3];
        for (slot, f) in nums.iter_mut().zip(&fields) {
            *slot = f.trim().parse().map_err(|_| Error::NonNumericSample {
                line: lineno + 1,
                value: (*f).into(),
            })?;
        }
        stages.push(Stage {
            start_s: nums[0],
            end_s: nums[1],
            freq_bpm: nums[2],
        });
    }
    GroundTruthSchedule::new(stages)
}

pub fn write_schedule(schedule: &GroundTruthSchedule, path: &Path) -> Result<()> {
    let mut text = String::new();
    for s in schedule.stages() {
        text.push_str(&format!("{},{},{}\n", s.start_s, s.end_s, s.freq_bpm));
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
