//! Decibel and linear power conversions.
//!
//! Internal power arithmetic is linear (Watts). dBm only appears at I/O
//! boundaries and in the link budget.

/// Converts dBm to Watts. `-inf` maps to exactly 0 W.
pub fn dbm_to_w(dbm: f64) -> f64 {
    if dbm == f64::NEG_INFINITY {
        return 0.0;
    }
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

/// Converts Watts to dBm. 0 W maps to `-inf`.
pub fn w_to_dbm(w: f64) -> f64 {
    if w == 0.0 {
        return f64::NEG_INFINITY;
    }
    10.0 * libm::log10(w) + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    if db == f64::NEG_INFINITY {
        return 0.0;
    }
    libm::pow(10.0, db / 10.0)
}

pub fn linear_to_db(ratio: f64) -> f64 {
    if ratio == 0.0 {
        return f64::NEG_INFINITY;
    }
    10.0 * libm::log10(ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn twenty_watts_is_43_dbm() {
        assert!((w_to_dbm(20.0) - 43.0).abs() < 0.05);
        assert_eq!(dbm_to_w(30.0), 1.0);
        assert_eq!(dbm_to_w(40.0), 10.0);
    }

    #[test]
    fn sleep_edges() {
        assert_eq!(dbm_to_w(f64::NEG_INFINITY), 0.0);
        assert_eq!(w_to_dbm(0.0), f64::NEG_INFINITY);
        assert_eq!(db_to_linear(f64::NEG_INFINITY), 0.0);
        assert_eq!(linear_to_db(0.0), f64::NEG_INFINITY);
    }

    proptest! {
        #[test]
        fn dbm_round_trip(dbm in -200.0f64..100.0) {
            let back = w_to_dbm(dbm_to_w(dbm));
            prop_assert!((back - dbm).abs() < 1e-10, "{dbm} -> {back}");
        }
    }
}
