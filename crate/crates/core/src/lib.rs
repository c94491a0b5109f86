#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bd;
pub mod dft;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod precoder;
pub mod scalar;
pub mod socp;
