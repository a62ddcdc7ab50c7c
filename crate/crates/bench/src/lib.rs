//! Benchmark fixtures.

use holorigid_core::markov::build_an;
use holorigid_core::{Complex64, MapSpec, MarkovModel};

pub fn cantor_33() -> MarkovModel {
    certified(MarkovModel::full_shift(&[3.0, 3.0]).unwrap())
}

pub fn shift_24() -> MarkovModel {
    certified(MarkovModel::full_shift(&[2.0, 4.0]).unwrap())
}

pub fn z2_plus_i() -> MapSpec {
    MapSpec::quadratic(Complex64::new(0.0, 1.0))
}

/// The `c = i` cell model at the default cell size.
pub fn z2_plus_i_an() -> MarkovModel {
    certified(build_an(&z2_plus_i(), 0.3, 0.05, 30).unwrap())
}

fn certified(mut m: MarkovModel) -> MarkovModel {
    m.certify(12).unwrap();
    m
}
