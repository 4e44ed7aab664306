#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dataset;
pub mod error;
pub mod frustum;
pub mod geom;
pub mod hdmap;
pub mod inflate;
mod io_util;
pub mod labels;
pub mod metrics;
pub mod synth;
