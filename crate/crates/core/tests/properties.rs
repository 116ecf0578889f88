mod common;

use patseq::catalog::{Catalog, Profile};
use patseq::edk::{EdkMode, Series};
use patseq::planted;
use patseq::search::{Mode, SearchConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn check(r: Result<(), String>) -> Result<(), TestCaseError> {
    r.map_err(TestCaseError::fail)
}

proptest! {
    #[test]
    fn edk_rebuild_and_telescoping(v in prop::collection::vec(-50i64..50, 3..12), ratios in any::<bool>()) {
        let mode = if ratios { EdkMode::Ratios } else { EdkMode::Differences };
        check(common::edk_rebuild_and_telescoping(&v, mode))?;
    }

    #[test]
    fn foc_partitions_the_base(skip in 0usize..4, parts in prop::collection::vec(1usize..4, 1..4), n in 4usize..30) {
        check(common::foc_partition(skip, &parts, n))?;
    }

    #[test]
    fn dge_dgd_reconstruct(runs in prop::collection::vec((0i64..4, 1usize..4), 2..8)) {
        let v: Vec<i64> = runs.iter().flat_map(|&(x, l)| std::iter::repeat(x).take(l)).collect();
        check(common::dge_dgd_reconstruct(&v))?;
    }

    #[test]
    fn dgd_prefix_groups_reconstruct(distinct in prop::collection::vec(0i64..100, 2..6), lens in prop::collection::vec(1usize..6, 2..6)) {
        let mut d = distinct.clone();
        d.sort_unstable();
        d.dedup();
        prop_assume!(d.len() >= 2);
        let v: Vec<i64> = lens.iter().flat_map(|&l| distinct.iter().take(l).copied()).collect();
        check(common::dge_dgd_reconstruct(&v))?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn planted_patterns_are_found(seed in any::<u64>(), depth in 1usize..=3) {
        let p = planted::generate(&mut ChaCha8Rng::seed_from_u64(seed), depth, 24, 0);
        check(common::planted_is_solved(&p))?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn predictions_round_trip(seed in any::<u64>(), depth in 1usize..=3, extra in 1usize..6) {
        let p = planted::generate(&mut ChaCha8Rng::seed_from_u64(seed), depth, 20, extra);
        check(common::predictions_round_trip(&p))?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn mdl_ignores_solution_order(v in prop::collection::vec(-9i64..9, 5..9), seed in any::<u64>()) {
        let s = Series::from_ints(&v).unwrap();
        let cat = Catalog::with(&planted::alphabet());
        check(common::mdl_permutation_invariant(&s, &cat, seed))?;
    }

    #[test]
    fn predictions_are_prefix_stable(seed in any::<u64>(), depth in 1usize..=2) {
        let p = planted::generate(&mut ChaCha8Rng::seed_from_u64(seed), depth, 14, 0);
        let mut cfg = SearchConfig::new(Arc::new(Catalog::profile(Profile::Iq)), Mode::S1Z, 2);
        cfg.budget.max_time = None;
        check(common::prefix_stable(&p.series(), &cfg, 3))?;
    }
}
