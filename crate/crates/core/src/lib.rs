//! Fine spectrum of the generalized difference operator `Δ_{a,b}` on `ℓ_p`,
//! `1 < p < ∞`.
//!
//! `Δ_{a,b}` is the lower-bidiagonal infinite matrix with diagonal `a_k` and
//! subdiagonal `b_k`, where both sequences are periodic or asymptotically
//! periodic with period `m`. The spectrum is governed by the limit symbol
//! `Φ(λ) = ∏(λ - p_i) / ∏ q_i`: the open set `|Φ| < 1` is residual spectrum,
//! exterior `a_k` are eigenvalues, and points on `|Φ| = 1` are split between
//! the three parts by the convergence of two series.

pub mod error;
pub mod fine_spectrum;
pub mod operator;
pub mod options;
pub mod oracle;
pub mod sequence;
pub mod series;
pub mod spectral_sets;

pub use error::{SpecError, SpectralError};
pub use fine_spectrum::{
    classify, classify_grid, eigen_index, spectrum_report, Classifier, Goldberg, GridCell,
    GridScanResult, SpectrumClassification, SpectrumPart, SpectrumReport, Window,
};
pub use num_complex::Complex64;
pub use options::Options;
pub use sequence::{
    ExponentPair, Mode, Override, PerturbationForm, ResidueClass, SequenceSpec, Which,
};
pub use series::{SeriesState, SeriesVerdict};
pub use spectral_sets::{RegionVerdict, Zone};
