use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, j| acc * (n - j) / (j + 1))
}

/// Number of ways to write `n` as an unordered sum of positive integers.
pub fn partition_number(n: usize) -> BigUint {
    let mut p = vec![BigUint::zero(); n + 1];
    p[0] = BigUint::one();
    for part in 1..=n {
        for total in part..=n {
            let add = p[total - part].clone();
            p[total] += add;
        }
    }
    p[n].clone()
}

/// Nearest `f64` to `num / den`.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
        .to_f64()
        .unwrap_or(f64::NAN)
}

/// `1 / size` rounded once from the exact rational.
pub fn uniform_weight(size: &BigUint) -> f64 {
    ratio_to_f64(&BigUint::one(), size)
}
