//! Constitutive-analysis toolkit for finite-strain elasto-plasticity built on
//! logarithmic (Hencky) strains: energy models, rank-one-convexity scanning
//! and strain-driven plastic flow with KKT verification.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values;
// rewriting it through `partial_cmp` would lose that guard.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops mirror the i,j tensor-component notation of the formulas and
// frequently touch several fixed-size arrays at once
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod ellipticity;
pub mod energy;
pub mod plasticity;
pub mod tensor;
