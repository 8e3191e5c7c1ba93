use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while reading inputs, validating labels, or fitting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("labels overlap or touch: label {first} [{first_lo}, {first_hi}] and label {second} [{second_lo}, {second_hi}]")]
    LabelsOverlap {
        first: usize,
        first_lo: usize,
        first_hi: usize,
        second: usize,
        second_lo: usize,
        second_hi: usize,
    },
    #[error("label out of range: [{lo}, {hi}] with sequence length {n}")]
    LabelOutOfRange { lo: usize, hi: usize, n: usize },
    #[error("label spans fewer than two points: [{lo}, {hi}]")]
    LabelTooShort { lo: usize, hi: usize },
    #[error("label covers no data: {chrom}:{start}-{end}")]
    LabelCoversNoData { chrom: String, start: u64, end: u64 },
    #[error("label covers a single data point: {chrom}:{start}-{end}")]
    LabelSinglePoint { chrom: String, start: u64, end: u64 },
    #[error("chromosome mismatch: label on {label}, data on {data}")]
    ChromosomeMismatch { label: String, data: String },
    #[error("data has no genomic coordinates")]
    MissingCoordinates,
    #[error("unknown label type {0:?}")]
    UnknownLabelType(String),

    #[error("infeasible label configuration at data index {index}")]
    Infeasible { index: usize },
    #[error("no feasible model")]
    NoFeasibleModel,
    #[error("mean {mu} outside cost function domain [{lo}, {hi}]")]
    OutOfDomain { mu: f64, lo: f64, hi: f64 },
    #[error("instance too large: n = {n}, oracle limit is {max}")]
    InstanceTooLarge { n: usize, max: usize },

    #[error("malformed line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("unsorted intervals at line {line}")]
    UnsortedIntervals { line: usize },
    #[error("negative count at line {line}")]
    NegativeCount { line: usize },
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("peaks do not fit: {peaks} peaks in {n} points")]
    PeaksDoNotFit { peaks: usize, n: usize },

    #[error("empty penalty grid")]
    EmptyGrid,
    #[error("unconstrained problem: no finite target interval bounds")]
    Unconstrained,
    #[error("no positive labels")]
    NoPositiveLabels,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(line: usize, reason: impl Into<String>) -> Self {
        Self::MalformedLine {
            line,
            reason: reason.into(),
        }
    }

    /// True for errors caused by a label set that admits no model.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Self::Infeasible { .. } | Self::NoFeasibleModel)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
