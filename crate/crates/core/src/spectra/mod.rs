//! Floating-point spectral exploration: truncated operators, magic angles as
//! determinant zeros, and flat-band checks through singular values.

pub mod banded;
pub mod flat;
pub mod magic;
pub mod op;
pub mod roots;
pub mod singular;

pub use flat::{band_profile, flat_band_check, k_grid, k_point, refine_alpha, singular_values_at, FlatBandReport, KSample};
pub use magic::{magic_angles, ratio_diagnostic, MagicAngle, MagicOptions, MagicSet, TraceSource};
pub use op::{block_operator, materialize, BlockOp, TruncatedOp};
