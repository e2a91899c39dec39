mod common;

use common::small_weighted;
use lowsens::matching::is_matching;
use lowsens::oracle::max_weight_matching;
use lowsens::weighted::{weighted_matching, weighted_matching_counted, WeightBuckets};
use lowsens::RandomTape;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn within_four_alpha_of_optimum(wg in small_weighted(10), seed in any::<u64>(), alpha in prop::sample::select(vec![1.5, 2.0, 3.0, 8.0])) {
        let m = weighted_matching(&wg, alpha, &RandomTape::new(seed)).unwrap();
        prop_assert!(is_matching(&wg.graph, &m));
        let (opt, _) = max_weight_matching(&wg).unwrap();
        let w = m.weight(&wg.weights).unwrap();
        prop_assert!(w * 4.0 * alpha >= opt - 1e-9, "w = {}, opt = {}", w, opt);
    }

    #[test]
    fn level_matchings_are_maximal_in_their_level(wg in small_weighted(10), seed in any::<u64>()) {
        let run = weighted_matching_counted(&wg, 2.0, &RandomTape::new(seed)).unwrap();
        let buckets = WeightBuckets::new(&wg, 2.0).unwrap();
        prop_assert_eq!(run.level_matchings.len(), buckets.level_count());
        for (m, level) in run.level_matchings.iter().zip(&buckets.levels) {
            prop_assert!(m.iter().all(|e| level.contains(&e)));
            for e in level {
                prop_assert!(m.iter().any(|f| f.shares_vertex(*e)));
            }
        }
        let scans: usize = buckets.levels.iter().map(Vec::len).sum::<usize>()
            + run.level_matchings.iter().map(|m| m.len()).sum::<usize>();
        prop_assert_eq!(run.operations, scans as u64);
    }
}
