//! Quaternion matrix algebra with a randomized low-rank fast path and a
//! nonlocal self-similarity color image denoiser built on top of it.
//!
//! The crate is organized in three layers:
//!
//! * exact quaternion scalar/matrix algebra ([`quaternion`], [`qmatrix`]),
//!   including a Gaussian-elimination linear solver over quaternions;
//! * spectral tools: the complex-adjoint embedding ([`adjoint`]), a
//!   Jacobi-based quaternion SVD oracle ([`mod@qsvd`]), and the bilateral
//!   random projection approximation ([`brp`]) that replaces the SVD on
//!   the hot path;
//! * the image pipeline: pure-quaternion color images ([`image`]), patch
//!   grouping / per-group low-rank denoising / aggregation ([`denoise`]),
//!   and AWGN + PSNR/SSIM evaluation ([`metrics`]).

pub mod adjoint;
pub mod brp;
pub mod denoise;
pub mod error;
pub mod image;
mod jacobi;
pub mod metrics;
pub mod qmatrix;
pub mod qsvd;
pub mod quaternion;
pub mod seed;
pub mod synth;

pub use adjoint::ComplexAdjoint;
pub use brp::{clqa_brp, clqa_brp_detailed, qbrp_sketch, BrpConfig, BrpSketch, BrpStats};
pub use denoise::{aggregate, denoise_group, denoise_image, extract_group, DenoiseConfig, PatchGroup};
pub use error::{Error, Result};
pub use image::ColorImageQ;
pub use metrics::{add_awgn, psnr, quality, ssim, QualityReport};
pub use qmatrix::{solve_linear, QMatrix};
pub use qsvd::{qsvd, quaternion_rank, truncated_qsvd, Qsvd};
pub use quaternion::Quaternion;
