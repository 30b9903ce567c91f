//! Decibel and power-unit conversions. All simulator arithmetic runs in SI
//! units (Watts, Hz, seconds); dB quantities only appear at the edges.

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(value: f64) -> f64 {
    10.0 * value.log10()
}

#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

#[inline]
pub fn watts_to_dbm(watts: f64) -> f64 {
    linear_to_db(watts) + 30.0
}

#[inline]
pub fn mhz_to_hz(mhz: f64) -> f64 {
    mhz * 1e6
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_points() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-18);
        assert!((dbm_to_watts(46.0) - 39.810_717_055_349_69).abs() < 1e-12);
        assert!((watts_to_dbm(1e-3)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn db_round_trip(db in -200.0f64..200.0) {
            let lin = db_to_linear(db);
            prop_assert!(lin > 0.0 && lin.is_finite());
            let back = db_to_linear(linear_to_db(lin));
            prop_assert!(((back - lin) / lin).abs() < 1e-12);
        }

        #[test]
        fn dbm_round_trip(dbm in -100.0f64..80.0) {
            let w = dbm_to_watts(dbm);
            prop_assert!((watts_to_dbm(w) - dbm).abs() < 1e-10);
        }
    }
}
