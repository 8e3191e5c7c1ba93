use flopart::io::{
    format_coverage, read_coverage, read_labels, read_segments, write_segments, write_string,
    CoverageFormat,
};
use flopart::{fit, CountSequence, GenomicInterval};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_bedgraph(seed: u64) -> CountSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..40);
    let mut pos = rng.gen_range(0..1000u64);
    let mut coords = Vec::with_capacity(n);
    for _ in 0..n {
        pos += rng.gen_range(0..3);
        let width = rng.gen_range(1..50);
        coords.push(GenomicInterval {
            chrom: "chr2".into(),
            start: pos,
            end: pos + width,
        });
        pos += width;
    }
    let values = (0..n).map(|_| rng.gen_range(0..30) as f64).collect();
    let weights = coords.iter().map(|c| (c.end - c.start) as f64).collect();
    CountSequence::with_coords(values, weights, coords).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(50) })]

    #[test]
    fn bedgraph_round_trip(seed in any::<u64>()) {
        let data = random_bedgraph(seed);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cov.bedGraph");
        write_string(&path, &format_coverage(&data)).unwrap();
        prop_assert_eq!(read_coverage(&path, Some(CoverageFormat::Bedgraph)).unwrap(), data.clone());
        prop_assert_eq!(read_coverage(&path, None).unwrap(), data);
    }
}

#[test]
fn segments_and_labels_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let cov = dir.path().join("cov.bedGraph");
    write_string(
        &cov,
        "chr1\t0\t10\t1\nchr1\t10\t20\t9\nchr1\t20\t30\t8\nchr1\t30\t40\t0\n",
    )
    .unwrap();
    let labels_path = dir.path().join("labels.tsv");
    write_string(
        &labels_path,
        "chrom\tstart\tend\ttype\nchr1\t0\t15\tpeakStart\n",
    )
    .unwrap();

    let data = read_coverage(&cov, None).unwrap();
    let labels = read_labels(&labels_path, None, data.len(), Some(&data)).unwrap();
    let r = fit(&data, &labels, 1.0).unwrap();
    let out = dir.path().join("out");
    write_segments(&r, &data, &out).unwrap();
    assert_eq!(
        read_segments(&out.join("segments.tsv"), Some(&data)).unwrap(),
        r.states
    );
    let summary = std::fs::read_to_string(out.join("summary.tsv")).unwrap();
    assert!(summary.contains("penalized_cost\t"));
    assert!(summary.contains(&format!("changes\t{}", r.change_count())));
}

#[test]
fn missing_file_names_the_path() {
    let err = read_coverage(std::path::Path::new("/nonexistent/cov.bedGraph"), None).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/cov.bedGraph"));
}
