//! respira — camera-based respiratory rate estimation from RGB frame
//! sequences.
//!
//! The pipeline stages are:
//!
//! 1. **ingest** – frame sequences, region masks, precomputed traces and
//!    ground-truth schedules from disk.
//! 2. **preprocess** – square sub-ROI grid over the mask, per-cell channel
//!    averaging, FIR low-pass filtering.
//! 3. **rppg** – per-cell rPPG extraction with a normalized LMS adaptive
//!    filter (green as desired signal, red as reference).
//! 4. **emd** – empirical mode decomposition of each analysis window.
//! 5. **spectral** – periodogram PSD, representative frequency, band SNR.
//! 6. **rate** – sliding-window orchestration: mode selection plus
//!    autocorrelation frequency estimation.
//! 7. **fusion** – SNR-weighted median across sub-ROIs per window.
//! 8. **synth** – ground-truth-labeled synthetic traces and frame sequences.
//! 9. **eval** – error statistics against the schedule, SNR maps.

pub mod emd;
pub mod error;
pub mod fusion;
pub mod ingest;
pub mod preprocess;
pub mod rate;
pub mod rppg;
pub mod spectral;

pub use error::{Error, Result};

/// Entry point for the `respira` binary. Returns the process exit code.
pub fn run_cli() -> i32 {
    0 // TODO: replace with the real CLI dispatch once the cli module lands
}
