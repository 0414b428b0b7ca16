//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    // ── file formats ───────────────────────────────────────────────────
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported bit depth {0} (expected 8 or 16)")]
    UnsupportedBitDepth(u32),
    #[error("truncated frame data: expected {expected} bytes, found {found}")]
    TruncatedFrameData { expected: u64, found: u64 },
    #[error("frame payload has {found} trailing bytes beyond {expected} expected")]
    TrailingFrameData { expected: u64, found: u64 },
    #[error("inconsistent frame dimensions in header: {0}")]
    BadFrameGeometry(String),
    #[error("unknown mask label value {0} (expected 0, 128 or 255)")]
    UnknownMaskLabel(u8),
    #[error("ragged row at line {line}: {msg}")]
    RaggedRow { line: usize, msg: String },
    #[error("non-numeric sample at line {line}: {value:?}")]
    NonNumericSample { line: usize, value: String },
    #[error("unknown channel {0:?} (expected R, G, B or rPPG)")]
    UnknownChannel(String),
    #[error("no traces in file")]
    NoTraces,
    #[error("stage overlap at {at_s} s")]
    StageOverlap { at_s: f64 },
    #[error("non-positive stage frequency {0} bpm")]
    NonPositiveFrequency(f64),
    #[error("empty schedule")]
    EmptySchedule,
    #[error("stage with end {end_s} s not after start {start_s} s")]
    BadStageSpan { start_s: f64, end_s: f64 },

    // ── grid / preprocessing ───────────────────────────────────────────
    #[error("no valid cells: every candidate cell failed the purity rule")]
    NoValidCells,
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("cutoff {f_cut} Hz out of range for sampling rate {fps} Hz")]
    CutoffOutOfRange { f_cut: f64, fps: f64 },
    #[error("trace of {len} samples is shorter than the {taps}-tap filter")]
    TraceTooShort { len: usize, taps: usize },

    // ── adaptive filtering ─────────────────────────────────────────────
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("degenerate reference: {0} input has zero variance")]
    DegenerateReference(&'static str),

    // ── decomposition / spectra ────────────────────────────────────────
    #[error("window too short: {len} samples (minimum {min})")]
    WindowTooShort { len: usize, min: usize },
    #[error("non-finite input sample at index {0}")]
    NonFiniteInput(usize),
    #[error("no dominant component: spectrum is all zero")]
    NoDominantComponent,
    #[error("zero total power in {lo}-{hi} Hz")]
    ZeroTotalPower { lo: f64, hi: f64 },
    #[error("band [{band_lo}, {band_hi}] Hz not inside total [{total_lo}, {total_hi}] Hz")]
    BadBand {
        band_lo: f64,
        band_hi: f64,
        total_lo: f64,
        total_hi: f64,
    },

    // ── rate estimation ────────────────────────────────────────────────
    #[error("autocorrelation has no zero crossing")]
    NoZeroCrossing,
    #[error("no autocorrelation peak after the first zero crossing")]
    NoPeak,
    #[error("weak periodicity: best normalized peak {0:.3} below threshold")]
    WeakPeriodicity(f64),
    #[error("estimated frequency {f} Hz outside plausible range ({lo}, {hi}) Hz")]
    OutOfPlausibleRange { f: f64, lo: f64, hi: f64 },
    #[error("insufficient duration: trace of {got_s:.2} s is shorter than one {need_s:.2} s window")]
    InsufficientDuration { got_s: f64, need_s: f64 },

    // ── fusion ─────────────────────────────────────────────────────────
    #[error("all-zero SNR list")]
    AllZeroSnr,
    #[error("negative SNR {0}")]
    NegativeSnr(f64),
    #[error("empty input")]
    EmptyInput,
    #[error("no valid cells in window {0}")]
    NoValidCellsInWindow(usize),

    // ── synthesis ──────────────────────────────────────────────────────
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(
        "intensity overflow at bit depth {bits}: peak value {peak:.1} outside [0, {max}]; \
         reduce dc or amplitudes"
    )]
    IntensityOverflow { bits: u32, peak: f64, max: u32 },

    // ── cli ────────────────────────────────────────────────────────────
    #[error("{0}")]
    InvalidArguments(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
