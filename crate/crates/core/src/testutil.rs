//! Shared generators for unit tests.

use num_rational::BigRational;
use rand::Rng;

use crate::recurrence::{BivariatePoly, Monomial, QRecurrence};

pub(crate) fn random_recurrence(rng: &mut impl Rng, r: usize, d: u32) -> QRecurrence {
    loop {
        let coeffs = (0..=r)
            .map(|_| {
                let terms = (0..rng.random_range(1..5))
                    .map(|_| Monomial::int(rng.random_range(0..3), rng.random_range(0..=d), rng.random_range(-9..10)))
                    .collect();
                BivariatePoly::new(terms)
            })
            .collect();
        let initials = (0..r).map(|_| BigRational::from_integer(rng.random_range(-50i64..50).into())).collect();
        if let Ok(rec) = QRecurrence::new(r, coeffs, initials) {
            return rec;
        }
    }
}
