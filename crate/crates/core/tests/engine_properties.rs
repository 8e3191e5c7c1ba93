use flopart::eval::{extract_peaks, label_errors};
use flopart::synth::{random_counts, random_labels};
use flopart::{fit, fit_unlabeled, CountSequence, LabelSet, State};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config() -> ProptestConfig {
    ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::with_cases(200)
    }
}

fn instance(seed: u64) -> (CountSequence, LabelSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..80);
    let mean = rng.gen_range(0.5..15.0);
    let data = random_counts(n, mean, &mut rng);
    let labels = random_labels(n, &mut rng);
    (data, labels)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn labeled_fit_has_no_train_errors(seed in any::<u64>(), lambda in 0.0f64..50.0) {
        let (data, labels) = instance(seed);
        let r = fit(&data, &labels, lambda).unwrap();
        let report = label_errors(&extract_peaks(&r.states), &labels);
        prop_assert_eq!(report.totals.errors, 0, "labels {:?}", labels.labels());
    }

    #[test]
    fn segments_alternate_and_respect_up_down(seed in any::<u64>(), lambda in 0.0f64..20.0) {
        let (data, labels) = instance(seed);
        let r = fit(&data, &labels, lambda).unwrap();
        prop_assert_eq!(r.segments[0].start, 1);
        prop_assert_eq!(r.segments.last().unwrap().end, data.len());
        for w in r.segments.windows(2) {
            prop_assert_eq!(w[0].end + 1, w[1].start);
            prop_assert_ne!(w[0].state, w[1].state);
            match w[0].state {
                State::Background => prop_assert!(w[0].mean <= w[1].mean),
                State::Peak => prop_assert!(w[0].mean >= w[1].mean),
            }
        }
        prop_assert_eq!(r.states.len(), data.len());
        let cost = r.recomputed_cost();
        prop_assert!((cost - r.penalized_cost).abs() <= 1e-6 * cost.abs().max(1.0));
    }

    #[test]
    fn empty_labels_reduce_to_unlabeled(seed in any::<u64>(), lambda in 0.0f64..20.0) {
        let (data, _) = instance(seed);
        let a = fit(&data, &LabelSet::empty(data.len()), lambda).unwrap();
        let b = fit_unlabeled(&data, lambda).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn labels_never_lower_the_optimum(seed in any::<u64>(), lambda in 0.0f64..20.0) {
        let (data, labels) = instance(seed);
        let constrained = fit(&data, &labels, lambda).unwrap().penalized_cost;
        let free = fit_unlabeled(&data, lambda).unwrap().penalized_cost;
        prop_assert!(constrained >= free - 1e-8 * free.abs().max(1.0));
    }

    #[test]
    fn optimum_grows_with_penalty(seed in any::<u64>(), l1 in 0.0f64..20.0, dl in 0.0f64..20.0) {
        let (data, labels) = instance(seed);
        let low = fit(&data, &labels, l1).unwrap();
        let high = fit(&data, &labels, l1 + dl).unwrap();
        let tol = 1e-8 * high.penalized_cost.abs().max(1.0);
        prop_assert!(high.penalized_cost >= low.penalized_cost - tol);
        // Each change costs at most dl more at the higher penalty.
        let bound = low.penalized_cost + dl * low.change_count() as f64;
        prop_assert!(high.penalized_cost <= bound + tol);
    }

    #[test]
    fn weights_scale_like_repeated_points(seed in any::<u64>(), lambda in 0.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..25);
        let z: Vec<f64> = random_counts(n, 4.0, &mut rng).values().to_vec();
        let weighted = CountSequence::new(z.clone(), vec![2.0; n]).unwrap();
        let doubled = CountSequence::from_counts(z.iter().flat_map(|&v| [v, v]).collect()).unwrap();
        let a = fit_unlabeled(&weighted, lambda).unwrap().penalized_cost;
        let b = fit_unlabeled(&doubled, lambda).unwrap().penalized_cost;
        // Splitting a doubled point can only help.
        prop_assert!(b <= a + 1e-8 * a.abs().max(1.0));
    }
}
