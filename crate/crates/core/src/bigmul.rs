//! Big-integer multiplication that switches to the NTT for large operands.

use num_bigint::{BigInt, BigUint, Sign};

use crate::ntt;

/// Operand size (in 64-bit words) above which the transform wins.
const NTT_WORDS: usize = 768;

pub(crate) fn mul_uint(a: &BigUint, b: &BigUint) -> BigUint {
    let (la, lb) = (a.bits().div_ceil(64) as usize, b.bits().div_ceil(64) as usize);
    if la.min(lb) < NTT_WORDS {
        return a * b;
    }
    let (wa, wb) = (a.to_u64_digits(), b.to_u64_digits());
    let words = ntt::mul_words(&wa, &wb);
    let mut digits = Vec::with_capacity(words.len() * 2);
    for w in words {
        digits.push(w as u32);
        digits.push((w >> 32) as u32);
    }
    BigUint::new(digits)
}

pub(crate) fn mul(a: &BigInt, b: &BigInt) -> BigInt {
    let sign = a.sign() * b.sign();
    if sign == Sign::NoSign {
        return BigInt::default();
    }
    BigInt::from_biguint(sign, mul_uint(a.magnitude(), b.magnitude()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn matches_plain_product(
            a in prop::collection::vec(any::<u32>(), 1600..4000),
            b in prop::collection::vec(any::<u32>(), 1600..4000),
            neg in any::<bool>(),
        ) {
            let x = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, BigUint::new(a));
            let y = BigInt::from(BigUint::new(b));
            prop_assert_eq!(mul(&x, &y), &x * &y);
        }
    }
}
