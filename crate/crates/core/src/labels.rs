//! Expert labels: validation, genomic-to-index mapping and per-index lookup.

use std::fmt;
use std::str::FromStr;

use crate::data::{CountSequence, GenomicInterval};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LabelKind {
    NoPeaks,
    PeakStart,
    PeakEnd,
}

impl LabelKind {
    /// Signed change type: 0, +1 or -1.
    pub fn change(self) -> i8 {
        match self {
            LabelKind::NoPeaks => 0,
            LabelKind::PeakStart => 1,
            LabelKind::PeakEnd => -1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LabelKind::NoPeaks => "noPeaks",
            LabelKind::PeakStart => "peakStart",
            LabelKind::PeakEnd => "peakEnd",
        }
    }
}

impl fmt::Display for LabelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LabelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "noPeaks" => Ok(LabelKind::NoPeaks),
            "peakStart" => Ok(LabelKind::PeakStart),
            "peakEnd" => Ok(LabelKind::PeakEnd),
            other => Err(Error::UnknownLabelType(other.to_string())),
        }
    }
}

/// Labeled region `[lo, hi]` in 1-based inclusive data indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Label {
    pub lo: usize,
    pub hi: usize,
    pub kind: LabelKind,
    pub source_region: Option<GenomicInterval>,
}

impl Label {
    pub fn new(lo: usize, hi: usize, kind: LabelKind) -> Self {
        Label {
            lo,
            hi,
            kind,
            source_region: None,
        }
    }
}

/// Sorted, strictly separated labels for a sequence of length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSet {
    labels: Vec<Label>,
    n: usize,
}

impl LabelSet {
    pub fn empty(n: usize) -> Self {
        LabelSet {
            labels: Vec::new(),
            n,
        }
    }

    /// Sorts and checks labels: each spans at least two points, lies in
    /// `1..=n`, and ends strictly before the next one starts.
    pub fn validate(mut labels: Vec<Label>, n: usize) -> Result<Self> {
        for l in &labels {
            if l.lo >= l.hi {
                return Err(Error::LabelTooShort { lo: l.lo, hi: l.hi });
            }
            if l.lo < 1 || l.hi > n {
                return Err(Error::LabelOutOfRange {
                    lo: l.lo,
                    hi: l.hi,
                    n,
                });
            }
        }
        labels.sort_by_key(|l| (l.lo, l.hi));
        for (j, pair) in labels.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            if a.hi >= b.lo {
                return Err(Error::LabelsOverlap {
                    first: j + 1,
                    first_lo: a.lo,
                    first_hi: a.hi,
                    second: j + 2,
                    second_lo: b.lo,
                    second_hi: b.hi,
                });
            }
        }
        Ok(LabelSet { labels, n })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Subset of labels, keeping order.
    pub fn select(&self, keep: impl Fn(usize) -> bool) -> LabelSet {
        LabelSet {
            labels: self
                .labels
                .iter()
                .enumerate()
                .filter(|(j, _)| keep(*j))
                .map(|(_, l)| l.clone())
                .collect(),
            n: self.n,
        }
    }

    pub fn cursor(&self) -> LabelCursor<'_> {
        LabelCursor {
            labels: &self.labels,
            next: 0,
        }
    }
}

/// Where an index sits inside its label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    First,
    Interior,
    Last,
}

/// Label context of one data index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelContext {
    Unlabeled,
    Labeled {
        /// 0-based index into the label set.
        label: usize,
        kind: LabelKind,
        position: Position,
    },
}

/// Left-to-right label lookup, amortized O(1) per index.
#[derive(Clone, Debug)]
pub struct LabelCursor<'a> {
    labels: &'a [Label],
    next: usize,
}

impl LabelCursor<'_> {
    /// Context of index `i`. Indices must be queried in non-decreasing order.
    pub fn get(&mut self, i: usize) -> LabelContext {
        while self.next < self.labels.len() && self.labels[self.next].hi < i {
            self.next += 1;
        }
        match self.labels.get(self.next) {
            Some(l) if l.lo <= i => {
                let position = if i == l.lo {
                    Position::First
                } else if i == l.hi {
                    Position::Last
                } else {
                    Position::Interior
                };
                LabelContext::Labeled {
                    label: self.next,
                    kind: l.kind,
                    position,
                }
            }
            _ => LabelContext::Unlabeled,
        }
    }
}

/// Maps genomic regions to index labels. A label covers every data point
/// whose interval intersects the half-open region `[start, end)`.
pub fn map_genomic_to_indices(
    regions: &[(GenomicInterval, LabelKind)],
    data: &CountSequence,
) -> Result<Vec<Label>> {
    let coords = data.coords().ok_or(Error::MissingCoordinates)?;
    let mut out = Vec::with_capacity(regions.len());
    for (region, kind) in regions {
        let on_chrom: Vec<usize> = coords
            .iter()
            .enumerate()
            .filter(|(_, c)| c.chrom == region.chrom)
            .map(|(k, _)| k)
            .collect();
        if on_chrom.is_empty() {
            return Err(Error::ChromosomeMismatch {
                label: region.chrom.clone(),
                data: coords[0].chrom.clone(),
            });
        }
        let mut covered = on_chrom
            .into_iter()
            .filter(|&k| coords[k].start < region.end && coords[k].end > region.start);
        let first = covered.next();
        let last = covered.next_back();
        let (lo, hi) = match (first, last) {
            (None, _) => {
                return Err(Error::LabelCoversNoData {
                    chrom: region.chrom.clone(),
                    start: region.start,
                    end: region.end,
                })
            }
            (Some(_), None) => {
                return Err(Error::LabelSinglePoint {
                    chrom: region.chrom.clone(),
                    start: region.start,
                    end: region.end,
                })
            }
            (Some(a), Some(b)) => (a + 1, b + 1),
        };
        out.push(Label {
            lo,
            hi,
            kind: *kind,
            source_region: Some(region.clone()),
        });
    }
    Ok(out)
}
