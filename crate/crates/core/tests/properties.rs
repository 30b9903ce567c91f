mod common;

use proptest::prelude::*;

fn run(check: common::Check) -> Result<(), TestCaseError> {
    check.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn antenna_attenuation_bounded(seed in any::<u64>()) {
        run(common::check_antenna(seed))?;
    }

    #[test]
    fn matching_is_valid_with_relay_rule_and_threshold(seed in any::<u64>()) {
        run(common::check_instance_matching(seed))?;
    }

    #[test]
    fn tied_matching_is_valid(seed in any::<u64>()) {
        let (reports, delta) = common::tied_reports(seed);
        let m = d2dsim::discovery::pair_devices(&reports, delta).unwrap();
        run(common::check_matching(&reports, delta, &m))?;
    }

    #[test]
    fn cdf_monotone(seed in any::<u64>()) {
        run(common::check_cdf(seed))?;
    }

    #[test]
    fn energy_degenerates_without_pairs(seed in any::<u64>()) {
        run(common::check_energy_degeneracy(seed))?;
    }

    #[test]
    fn scale_invariance(seed in any::<u64>()) {
        run(common::check_scale_invariance(seed))?;
    }

    #[test]
    fn eligibility_monotone_in_delta(seed in any::<u64>()) {
        run(common::check_delta_monotone(seed))?;
    }

    #[test]
    fn removing_interferer_never_hurts(seed in any::<u64>()) {
        run(common::check_interferer_removal(seed))?;
    }
}
