//! Label-constrained peak detection in weighted count sequences.
//!
//! The core is an exact dynamic program over piecewise Poisson cost
//! functions: each data point keeps one cost function per hidden state
//! (background or peak), segment means are constrained to alternate up and
//! down, and expert labels remove edges so the optimal model agrees with
//! every label. Running with no labels gives the classic unsupervised
//! up-down model.

// Negated float comparisons reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cost;
pub mod data;
pub mod engine;
pub mod error;
pub mod eval;
pub mod io;
pub mod labels;
pub mod oracle;
pub mod state;
pub mod synth;

pub use cost::{Backtrace, CostFunction, PoissonPiece, PrevMean};
pub use data::{poisson_loss, CountSequence, GenomicInterval};
pub use engine::{fit, fit_unlabeled, Segment, SegmentationResult};
pub use error::{Error, Result};
pub use labels::{Label, LabelKind, LabelSet};
pub use state::State;
