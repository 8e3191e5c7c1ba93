//! Text formats: coverage, labels, segments, and report tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::data::{CountSequence, GenomicInterval};
use crate::engine::SegmentationResult;
use crate::error::{Error, Result};
use crate::eval::{LabelErrorReport, RocCurve};
use crate::labels::{map_genomic_to_indices, Label, LabelKind, LabelSet};
use crate::state::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverageFormat {
    /// `chrom start end count`, weight `end - start`.
    Bedgraph,
    /// One count per line, unit weight.
    Counts,
}

impl FromStr for CoverageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bedgraph" | "bedGraph" => Ok(CoverageFormat::Bedgraph),
            "counts" => Ok(CoverageFormat::Counts),
            other => Err(Error::InvalidArgument(format!(
                "unknown coverage format {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelMode {
    /// `chrom start end type`, half-open genomic regions.
    Genomic,
    /// `lo hi type`, 1-based inclusive indices.
    Index,
}

impl FromStr for LabelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "genomic" => Ok(LabelMode::Genomic),
            "index" => Ok(LabelMode::Index),
            other => Err(Error::InvalidArgument(format!(
                "unknown label mode {other:?}"
            ))),
        }
    }
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_string(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, line)| {
        let line = line.trim();
        let skip = line.is_empty()
            || line.starts_with('#')
            || line.starts_with("track")
            || line.starts_with("browser");
        (!skip).then(|| (k + 1, line.split_whitespace().collect()))
    })
}

fn parse_field<T: FromStr>(field: &str, line: usize, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::malformed(line, format!("{what} {field:?} is not a number")))
}

fn is_header(fields: &[&str], numeric_column: usize) -> bool {
    fields
        .get(numeric_column)
        .is_some_and(|f| f.parse::<f64>().is_err())
}

fn parse_count(field: &str, line: usize) -> Result<f64> {
    let z: f64 = parse_field(field, line, "count")?;
    if z < 0.0 {
        return Err(Error::NegativeCount { line });
    }
    if !z.is_finite() {
        return Err(Error::malformed(line, "count is not finite"));
    }
    Ok(z)
}

/// Parses coverage text. A leading header row is skipped.
pub fn parse_coverage(text: &str, format: CoverageFormat) -> Result<CountSequence> {
    let mut lines = data_lines(text).peekable();
    let header_column = match format {
        CoverageFormat::Bedgraph => 1,
        CoverageFormat::Counts => 0,
    };
    if lines
        .peek()
        .is_some_and(|(_, f)| is_header(f, header_column))
    {
        lines.next();
    }
    match format {
        CoverageFormat::Counts => {
            let mut values = Vec::new();
            for (line, fields) in lines {
                if fields.len() != 1 {
                    return Err(Error::malformed(
                        line,
                        format!("expected 1 column, found {}", fields.len()),
                    ));
                }
                values.push(parse_count(fields[0], line)?);
            }
            if values.is_empty() {
                return Err(Error::EmptyInput("no counts".into()));
            }
            CountSequence::from_counts(values)
        }
        CoverageFormat::Bedgraph => {
            let (mut values, mut weights, mut coords) =
                (Vec::new(), Vec::new(), Vec::<GenomicInterval>::new());
            for (line, fields) in lines {
                if fields.len() != 4 {
                    return Err(Error::malformed(
                        line,
                        format!("expected 4 columns, found {}", fields.len()),
                    ));
                }
                let start: u64 = parse_field(fields[1], line, "start")?;
                let end: u64 = parse_field(fields[2], line, "end")?;
                if end <= start {
                    return Err(Error::malformed(
                        line,
                        "interval has zero or negative width",
                    ));
                }
                let z = parse_count(fields[3], line)?;
                if let Some(prev) = coords.last() {
                    if prev.chrom == fields[0] && start < prev.end {
                        return Err(Error::UnsortedIntervals { line });
                    }
                }
                values.push(z);
                weights.push((end - start) as f64);
                coords.push(GenomicInterval {
                    chrom: fields[0].to_string(),
                    start,
                    end,
                });
            }
            if values.is_empty() {
                return Err(Error::EmptyInput("no coverage intervals".into()));
            }
            CountSequence::with_coords(values, weights, coords)
        }
    }
}

/// Guesses the format from the first data row: four columns is bedGraph.
pub fn detect_format(text: &str) -> CoverageFormat {
    match data_lines(text).next() {
        Some((_, f)) if f.len() == 4 => CoverageFormat::Bedgraph,
        _ => CoverageFormat::Counts,
    }
}

pub fn read_coverage(path: &Path, format: Option<CoverageFormat>) -> Result<CountSequence> {
    let text = read_to_string(path)?;
    let format = format.unwrap_or_else(|| detect_format(&text));
    parse_coverage(&text, format)
}

/// bedGraph text when the data has coordinates, otherwise one count per line.
pub fn format_coverage(data: &CountSequence) -> String {
    let mut out = String::new();
    match data.coords() {
        Some(coords) => {
            for (c, z) in coords.iter().zip(data.values()) {
                writeln!(out, "{}\t{}\t{}\t{}", c.chrom, c.start, c.end, z).unwrap();
            }
        }
        None => {
            for z in data.values() {
                writeln!(out, "{z}").unwrap();
            }
        }
    }
    out
}

/// Parses and validates labels for a sequence of `n` points. Genomic labels
/// are mapped onto the coordinates of `data`. Without a mode, four columns
/// means genomic.
pub fn parse_labels(
    text: &str,
    mode: Option<LabelMode>,
    n: usize,
    data: Option<&CountSequence>,
) -> Result<LabelSet> {
    let mut lines = data_lines(text).peekable();
    let mode = mode.unwrap_or(match lines.peek() {
        Some((_, f)) if f.len() == 4 => LabelMode::Genomic,
        _ => LabelMode::Index,
    });
    let (columns, numeric) = match mode {
        LabelMode::Genomic => (4, 1),
        LabelMode::Index => (3, 0),
    };
    if lines.peek().is_some_and(|(_, f)| is_header(f, numeric)) {
        lines.next();
    }
    let mut regions = Vec::new();
    let mut labels = Vec::new();
    for (line, fields) in lines {
        if fields.len() != columns {
            return Err(Error::malformed(
                line,
                format!("expected {columns} columns, found {}", fields.len()),
            ));
        }
        let kind: LabelKind = fields[columns - 1].parse()?;
        match mode {
            LabelMode::Genomic => regions.push((
                GenomicInterval {
                    chrom: fields[0].to_string(),
                    start: parse_field(fields[1], line, "start")?,
                    end: parse_field(fields[2], line, "end")?,
                },
                kind,
            )),
            LabelMode::Index => labels.push(Label::new(
                parse_field(fields[0], line, "lo")?,
                parse_field(fields[1], line, "hi")?,
                kind,
            )),
        }
    }
    if mode == LabelMode::Genomic {
        labels = map_genomic_to_indices(&regions, data.ok_or(Error::MissingCoordinates)?)?;
    }
    LabelSet::validate(labels, n)
}

pub fn read_labels(
    path: &Path,
    mode: Option<LabelMode>,
    n: usize,
    data: Option<&CountSequence>,
) -> Result<LabelSet> {
    parse_labels(&read_to_string(path)?, mode, n, data)
}

/// Index-mode label table.
pub fn format_labels(labels: &LabelSet) -> String {
    let mut out = String::from("lo\thi\ttype\n");
    for l in labels.labels() {
        writeln!(out, "{}\t{}\t{}", l.lo, l.hi, l.kind).unwrap();
    }
    out
}

/// Segment table: genomic when the data has coordinates, otherwise
/// 1-based inclusive indices.
pub fn format_segments(result: &SegmentationResult, data: &CountSequence) -> String {
    let mut out = String::new();
    match data.coords() {
        Some(coords) => {
            out.push_str("chrom\tsegStart\tsegEnd\tmean\tstate\n");
            for s in &result.segments {
                let (a, b) = (&coords[s.start - 1], &coords[s.end - 1]);
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}",
                    a.chrom, a.start, b.end, s.mean, s.state
                )
                .unwrap();
            }
        }
        None => {
            out.push_str("segStart\tsegEnd\tmean\tstate\n");
            for s in &result.segments {
                writeln!(out, "{}\t{}\t{}\t{}", s.start, s.end, s.mean, s.state).unwrap();
            }
        }
    }
    out
}

pub fn format_summary(result: &SegmentationResult) -> String {
    format!(
        "field\tvalue\ntotal_loss\t{}\npenalized_cost\t{}\npenalty\t{}\nchanges\t{}\n",
        result.total_loss,
        result.penalized_cost,
        result.penalty,
        result.change_count()
    )
}

/// Writes `segments.tsv` and `summary.tsv` into `dir`.
pub fn write_segments(result: &SegmentationResult, data: &CountSequence, dir: &Path) -> Result<()> {
    create_dir(dir)?;
    write_string(&dir.join("segments.tsv"), &format_segments(result, data))?;
    write_string(&dir.join("summary.tsv"), &format_summary(result))
}

fn parse_state(field: &str, line: usize) -> Result<State> {
    match field {
        "background" => Ok(State::Background),
        "peak" => Ok(State::Peak),
        other => Err(Error::malformed(line, format!("unknown state {other:?}"))),
    }
}

/// Per-point states from a segment table. Genomic tables need the data to
/// place points; index tables stand alone.
pub fn parse_segments(text: &str, data: Option<&CountSequence>) -> Result<Vec<State>> {
    let mut lines = data_lines(text).peekable();
    let genomic = lines.peek().is_some_and(|(_, f)| f.len() == 5);
    let numeric = if genomic { 1 } else { 0 };
    if lines.peek().is_some_and(|(_, f)| is_header(f, numeric)) {
        lines.next();
    }
    let columns = if genomic { 5 } else { 4 };
    let mut segments = Vec::new();
    for (line, fields) in lines {
        if fields.len() != columns {
            return Err(Error::malformed(
                line,
                format!("expected {columns} columns, found {}", fields.len()),
            ));
        }
        let f = &fields[columns - 4..];
        let a: u64 = parse_field(f[0], line, "segStart")?;
        let b: u64 = parse_field(f[1], line, "segEnd")?;
        let state = parse_state(f[3], line)?;
        segments.push((genomic.then(|| fields[0]), a, b, state, line));
    }
    if segments.is_empty() {
        return Err(Error::EmptyInput("no segments".into()));
    }
    if !genomic {
        let mut states = Vec::new();
        for &(_, a, b, state, line) in &segments {
            if a as usize != states.len() + 1 || b < a {
                return Err(Error::malformed(line, "segments must tile 1..n in order"));
            }
            states.resize(b as usize, state);
        }
        if let Some(d) = data {
            if d.len() != states.len() {
                return Err(Error::InvalidArgument(format!(
                    "segments cover {} points, data has {}",
                    states.len(),
                    d.len()
                )));
            }
        }
        return Ok(states);
    }
    let coords = data
        .and_then(|d| d.coords())
        .ok_or(Error::MissingCoordinates)?;
    coords
        .iter()
        .enumerate()
        .map(|(k, c)| {
            segments
                .iter()
                .find(|s| s.0 == Some(c.chrom.as_str()) && s.1 <= c.start && c.end <= s.2)
                .map(|s| s.3)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("no segment covers data point {}", k + 1))
                })
        })
        .collect()
}

pub fn read_segments(path: &Path, data: Option<&CountSequence>) -> Result<Vec<State>> {
    parse_segments(&read_to_string(path)?, data)
}

/// Per-label outcomes: `label_id chrom lo hi type outcome`. Genomic labels
/// report their source region; index labels use `NA` for chrom.
pub fn format_error_report(report: &LabelErrorReport, labels: &LabelSet) -> String {
    let mut out = String::from("label_id\tchrom\tlo\thi\ttype\toutcome\n");
    for (j, (l, o)) in labels.labels().iter().zip(&report.outcomes).enumerate() {
        match &l.source_region {
            Some(r) => writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                j + 1,
                r.chrom,
                r.start,
                r.end,
                l.kind,
                o
            ),
            None => writeln!(out, "{}\tNA\t{}\t{}\t{}\t{}", j + 1, l.lo, l.hi, l.kind, o),
        }
        .unwrap();
    }
    out
}

/// One row per offset, then `auc <value>`.
pub fn format_roc(curve: &RocCurve) -> String {
    let mut out = String::from("c\tfp\tfn\tfpr\ttpr\n");
    for r in &curve.rows {
        writeln!(out, "{}\t{}\t{}\t{}\t{}", r.c, r.fp, r.fn_, r.fpr, r.tpr).unwrap();
    }
    writeln!(out, "auc\t{}", curve.auc).unwrap();
    out
}

/// `(data, labels)` path pairs from a manifest with header `data labels`.
/// Relative paths resolve against the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<(PathBuf, PathBuf)>> {
    let text = read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut lines = data_lines(&text).peekable();
    if lines.peek().is_some_and(|(_, f)| f == &["data", "labels"]) {
        lines.next();
    }
    let mut out = Vec::new();
    for (line, fields) in lines {
        if fields.len() != 2 {
            return Err(Error::malformed(
                line,
                format!("expected 2 columns, found {}", fields.len()),
            ));
        }
        out.push((base.join(fields[0]), base.join(fields[1])));
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("manifest lists no sequences".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bedgraph_row() {
        let d = parse_coverage("chr1 0 10 4\n", CoverageFormat::Bedgraph).unwrap();
        assert_eq!(d.values(), &[4.0]);
        assert_eq!(d.weights(), &[10.0]);
    }

    #[test]
    fn counts_file() {
        let d = parse_coverage("1\n5\n1\n", CoverageFormat::Counts).unwrap();
        assert_eq!(d.values(), &[1.0, 5.0, 1.0]);
        assert_eq!(d.weights(), &[1.0; 3]);
    }

    #[test]
    fn bad_coverage() {
        let err = parse_coverage("chr1 10 10 4\n", CoverageFormat::Bedgraph).unwrap_err();
        assert!(err.to_string().starts_with("malformed line 1"), "{err}");
        let err =
            parse_coverage("chr1 0 10 4\nchr1 5 20 1\n", CoverageFormat::Bedgraph).unwrap_err();
        assert!(err.to_string().starts_with("unsorted intervals"), "{err}");
        let err = parse_coverage("1\n-2\n", CoverageFormat::Counts).unwrap_err();
        assert!(err.to_string().starts_with("negative count"), "{err}");
        let err = parse_coverage("chr1 0 x 4\n", CoverageFormat::Bedgraph).unwrap_err();
        assert!(err.to_string().starts_with("malformed line 1"), "{err}");
        let err =
            parse_coverage("track name=x\n\nchr1 0 10\n", CoverageFormat::Bedgraph).unwrap_err();
        assert!(err.to_string().starts_with("malformed line 3"), "{err}");
    }

    #[test]
    fn detection_and_headers() {
        let text = "chrom\tstart\tend\tcount\nchr1\t0\t5\t2\nchr1\t5\t9\t0\n";
        assert_eq!(detect_format(text), CoverageFormat::Bedgraph);
        let d = parse_coverage(text, CoverageFormat::Bedgraph).unwrap();
        assert_eq!(d.weights(), &[5.0, 4.0]);
        assert_eq!(detect_format("3\n4\n"), CoverageFormat::Counts);
    }

    fn genomic() -> CountSequence {
        parse_coverage(
            "chr1 0 10 1\nchr1 10 20 5\nchr1 20 30 1\nchr1 30 40 0\n",
            CoverageFormat::Bedgraph,
        )
        .unwrap()
    }

    #[test]
    fn labels_in_both_modes() {
        let data = genomic();
        let g = parse_labels(
            "chrom\tstart\tend\ttype\nchr1\t5\t15\tpeakStart\n",
            None,
            4,
            Some(&data),
        )
        .unwrap();
        assert_eq!((g.labels()[0].lo, g.labels()[0].hi), (1, 2));
        let i = parse_labels("lo\thi\ttype\n3\t4\tpeakEnd\n", None, 4, Some(&data)).unwrap();
        assert_eq!(i.labels()[0].kind, LabelKind::PeakEnd);
        let err = parse_labels("1 2 peakStart\n2 3 peakEnd\n", None, 4, Some(&data)).unwrap_err();
        assert!(err.to_string().starts_with("labels overlap or touch"));
        assert!(parse_labels("1 2 bump\n", None, 4, Some(&data)).is_err());
    }

    #[test]
    fn segments_round_trip() {
        let data = genomic();
        let labels = LabelSet::empty(4);
        let r = crate::engine::fit(&data, &labels, 1.0).unwrap();
        let text = format_segments(&r, &data);
        assert!(text.starts_with("chrom\tsegStart"));
        assert_eq!(parse_segments(&text, Some(&data)).unwrap(), r.states);
        assert!(matches!(
            parse_segments(&text, None),
            Err(Error::MissingCoordinates)
        ));

        let plain = CountSequence::from_counts(vec![1.0, 5.0, 1.0]).unwrap();
        let r = crate::engine::fit_unlabeled(&plain, 1.0).unwrap();
        let text = format_segments(&r, &plain);
        assert_eq!(text.lines().count(), 4);
        assert_eq!(parse_segments(&text, None).unwrap(), r.states);
    }

    #[test]
    fn coverage_round_trip() {
        let data = genomic();
        let back = parse_coverage(&format_coverage(&data), CoverageFormat::Bedgraph).unwrap();
        assert_eq!(back, data);
    }
}
