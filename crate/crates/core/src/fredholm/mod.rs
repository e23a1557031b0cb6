//! Regularized determinant, its tail majorants, the Hilbert–Schmidt bound and the
//! certificate for the first real magic angle.

pub mod certificate;
pub mod detpoly;
pub mod hs;
pub mod tail;

pub use certificate::{certify_first_magic, certify_first_magic_with, Certificate, CertifyOptions};
pub use detpoly::{det2_taylor, newton_elementary, plemelj_smithies, plemelj_smithies_determinant, DetPoly};
pub use hs::{hs_norm_certified, window_norm_sq, HsMode, HsReport};
pub use tail::{tail_bound, tail_sum_bound};
