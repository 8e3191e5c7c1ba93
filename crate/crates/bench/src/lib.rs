//! Seeded workloads shared by the benchmarks.

use flopart::bench::bench_peaks;
use flopart::synth::{generate_synthetic, SynthParams, SyntheticSequence};
use flopart::{CostFunction, CountSequence};

/// Planted-peak sequence of length `n` with its labels.
pub fn workload(n: usize, seed: u64) -> SyntheticSequence {
    generate_synthetic(&SynthParams::new(n, bench_peaks(n), seed))
        .expect("bench sizes fit their peaks")
}

/// Many-piece input for the operators: each point either continues the
/// current segment or starts a higher one at cost `lambda`.
pub fn accumulated_cost(data: &CountSequence, lambda: f64) -> CostFunction {
    let (lo, hi) = data.value_range();
    let mut f = CostFunction::zero(lo, hi.max(lo + 1.0));
    for (&z, &w) in data.values().iter().zip(data.weights()) {
        let up = f.min_less().add_constant(lambda);
        f = f.pointwise_min(&up).add_loss(z, w);
    }
    f
}
