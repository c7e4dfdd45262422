use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Nonnegative exact rational rate constant.
///
/// Rates of an explored chain are sums of rule constants; keeping them exact
/// until the final conversion to `f64` makes equal sums convert to identical
/// floating-point values.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rate(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RateParseError {
    #[error("{0:?} is not a decimal or p/q rate")]
    Syntax(String),
    #[error("rate {0} is negative")]
    Negative(String),
    #[error("rate {0:?} has a zero denominator")]
    ZeroDenominator(String),
}

impl Rate {
    pub fn zero() -> Self {
        Rate(BigRational::zero())
    }

    pub fn one() -> Self {
        Rate(BigRational::one())
    }

    pub fn from_integer(n: u64) -> Self {
        Rate(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(p: u64, q: u64) -> Option<Self> {
        (q != 0).then(|| Rate(BigRational::new(BigInt::from(p), BigInt::from(q))))
    }

    /// The decimal number printed by `f64`'s shortest round-trip formatting,
    /// so `Rate::from_f64(0.1)` is exactly one tenth.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() || x < 0.0 {
            return None;
        }
        format!("{x:e}").parse().ok()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Nearest `f64`.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }
}

impl FromStr for Rate {
    type Err = RateParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let s = text.trim();
        let syntax = || RateParseError::Syntax(text.to_string());
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| syntax())?;
            let q: BigInt = q.trim().parse().map_err(|_| syntax())?;
            if q.is_zero() {
                return Err(RateParseError::ZeroDenominator(text.to_string()));
            }
            let r = BigRational::new(p, q);
            if r.is_negative() {
                return Err(RateParseError::Negative(text.to_string()));
            }
            return Ok(Rate(r));
        }
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(k) => (&s[..k], s[k + 1..].parse::<i32>().map_err(|_| syntax())?),
            None => (s, 0),
        };
        let (negative, mantissa) = match mantissa.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty()
            || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
        {
            return Err(syntax());
        }
        let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| syntax())?;
        let scale = exponent - frac_part.len() as i32 - 1;
        let ten = BigInt::from(10);
        let value = if scale >= 0 {
            BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
        };
        if negative && !value.is_zero() {
            return Err(RateParseError::Negative(text.to_string()));
        }
        Ok(Rate(value))
    }
}

impl fmt::Display for Rate {
    /// Exact decimal when the denominator has only factors 2 and 5,
    /// otherwise `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let numer = self.0.numer();
        let denom = self.0.denom();
        let (mut twos, mut fives) = (0usize, 0usize);
        let mut rest = denom.clone();
        let (two, five) = (BigInt::from(2), BigInt::from(5));
        while (&rest % &two).is_zero() {
            rest /= &two;
            twos += 1;
        }
        while (&rest % &five).is_zero() {
            rest /= &five;
            fives += 1;
        }
        if !rest.is_one() {
            return write!(f, "{numer}/{denom}");
        }
        let places = twos.max(fives);
        let scaled = numer * num_traits::pow(BigInt::from(10), places) / denom;
        if places == 0 {
            return write!(f, "{scaled}.0");
        }
        let digits = format!("{:0>width$}", scaled.to_string(), width = places + 1);
        let (int_part, frac_part) = digits.split_at(digits.len() - places);
        write!(f, "{int_part}.{frac_part}")
    }
}

impl Add for Rate {
    type Output = Rate;

    fn add(self, rhs: Rate) -> Rate {
        Rate(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Rate> for Rate {
    type Output = Rate;

    fn add(self, rhs: &'a Rate) -> Rate {
        Rate(self.0 + &rhs.0)
    }
}

impl Mul<u64> for &Rate {
    type Output = Rate;

    fn mul(self, k: u64) -> Rate {
        Rate(&self.0 * BigRational::from_integer(BigInt::from(k)))
    }
}

impl Sum for Rate {
    fn sum<I: Iterator<Item = Rate>>(iter: I) -> Rate {
        iter.fold(Rate::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rate> for Rate {
    fn sum<I: Iterator<Item = &'a Rate>>(iter: I) -> Rate {
        iter.fold(Rate::zero(), |a, b| a + b)
    }
}
