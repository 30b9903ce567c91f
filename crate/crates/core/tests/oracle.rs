mod common;

use d2dsim::discovery::build_reports;

#[test]
fn greedy_matches_replay_on_random_gains() {
    let mut multi = 0;
    for seed in 0..500 {
        let inst = common::micro_instance(seed);
        let reports = build_reports(&inst.gains, &inst.params);
        if let Err(e) = common::check_oracle(&reports, inst.delta) {
            panic!("seed {seed}: {e}");
        }
        multi += (common::greedy_replay(&reports, inst.delta).len() >= 2) as usize;
    }
    assert!(
        multi >= 50,
        "only {multi} instances formed two or more pairs"
    );
}

#[test]
fn greedy_matches_replay_with_ties() {
    let mut multi = 0;
    for seed in 0..500 {
        let (reports, delta) = common::tied_reports(seed);
        if let Err(e) = common::check_oracle(&reports, delta) {
            panic!("seed {seed}: {e}");
        }
        multi += (common::greedy_replay(&reports, delta).len() >= 2) as usize;
    }
    assert!(
        multi >= 50,
        "only {multi} instances formed two or more pairs"
    );
}

#[test]
fn brute_force_maximum_matching() {
    assert_eq!(common::max_matching_size(4, &[(0, 1), (1, 2), (2, 3)]), 2);
    assert_eq!(common::max_matching_size(3, &[(0, 1), (1, 2), (0, 2)]), 1);
    assert_eq!(common::max_matching_size(5, &[]), 0);
}
