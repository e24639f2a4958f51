use typealign::alignment::score_all_pairs;
use typealign::evaluation::{default_thetas, eval_gt1, sweep, TypePairGroundTruth};
use typealign::ingest::{build_property_table, parse_ntriples_str, IngestConfig, IngestStats};
use typealign::stats::{consolidate_profiles, count_type_tokens, SkewLimits};
use typealign::synth::{self, SynthConfig};
use typealign::{ProfileSet, SimilarityMeasure};

fn profiles(nt: &str) -> ProfileSet {
    let parsed = parse_ntriples_str(nt, true).unwrap();
    let table = build_property_table(&parsed.triples, &IngestConfig::default());
    consolidate_profiles(&count_type_tokens(table.records()), SkewLimits::new(1, 30_000).unwrap())
}

fn best_f(config: &SynthConfig, measure: SimilarityMeasure) -> f64 {
    let out = synth::generate(config).unwrap();
    let table = score_all_pairs(&profiles(&out.kg_a), &profiles(&out.kg_b), &[measure]).unwrap();
    let gt = TypePairGroundTruth { pairs: out.planted };
    let s = sweep(&table, measure, &default_thetas(), |r| eval_gt1(r, &gt)).unwrap();
    s.best().unwrap().metrics.f_measure
}

#[test]
fn clean_planted_pairs_score_one_and_others_zero() {
    let out = synth::generate(&SynthConfig::default()).unwrap();
    let a = profiles(&out.kg_a);
    let b = profiles(&out.kg_b);
    let table = score_all_pairs(&a, &b, &SimilarityMeasure::ALL).unwrap();
    for e in table.entries() {
        let planted = out.planted.contains(&e.pair());
        for m in SimilarityMeasure::ALL {
            let want = if planted { 1.0 } else { 0.0 };
            assert_eq!(e.score(m), Some(want), "{m} {:?}", e.pair());
        }
    }
}

#[test]
fn generated_graphs_round_trip_through_ingest() {
    let config = SynthConfig {
        types_per_kg: 7,
        planted_pairs: 3,
        instances_per_type: 11,
        noise_rate: 0.5,
        ..SynthConfig::default()
    };
    let out = synth::generate(&config).unwrap();
    for nt in [&out.kg_a, &out.kg_b] {
        let parsed = parse_ntriples_str(nt, false).unwrap();
        let s = IngestStats::compute(&parsed, &IngestConfig::default());
        assert_eq!((s.unique_subjects, s.unique_types, s.malformed_lines), (77, 7, 0));
    }
    assert_eq!(out.sameas.lines().count(), 3 * 11);
    assert_eq!(synth::generate(&config).unwrap(), out);
}

#[test]
fn best_f_degrades_monotonically_with_noise() {
    // Fewer tokens per instance and a small distractor pool make noise bite.
    let base = SynthConfig {
        tokens_per_instance: 4,
        shared_vocab_size: 60,
        distractor_vocab_size: 300,
        instances_per_type: 20,
        ..SynthConfig::default()
    };
    let mean_f = |noise: f64| -> f64 {
        (1..=5)
            .map(|seed| {
                best_f(
                    &SynthConfig {
                        noise_rate: noise,
                        seed,
                        ..base.clone()
                    },
                    SimilarityMeasure::Jaccard,
                )
            })
            .sum::<f64>()
            / 5.0
    };
    // Above 0.9 every pair scores at chance level and the five-seed mean
    // only reflects sampling variation.
    let grid = [0.0, 0.3, 0.6, 0.8, 0.9];
    let means: Vec<f64> = grid.iter().map(|&n| mean_f(n)).collect();
    assert_eq!(means[0], 1.0);
    for w in means.windows(2) {
        assert!(w[1] <= w[0], "best F rose with noise: {means:?}");
    }
    assert!(means[grid.len() - 1] < means[0], "{means:?}");
}
