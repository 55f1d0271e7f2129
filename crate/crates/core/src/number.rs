//! Exact rational numbers shared by every layer.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational, always kept in lowest terms with a positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Number(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumberError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed number literal `{0}`")]
    Malformed(String),
}

impl Number {
    /// Builds `numerator / denominator`, normalizing sign and common factors.
    pub fn new(numerator: i64, denominator: i64) -> Result<Self, NumberError> {
        if denominator == 0 {
            return Err(NumberError::ZeroDenominator);
        }
        Ok(Number(BigRational::new(
            BigInt::from(numerator),
            BigInt::from(denominator),
        )))
    }

    pub fn from_big(numerator: BigInt, denominator: BigInt) -> Result<Self, NumberError> {
        if denominator.is_zero() {
            return Err(NumberError::ZeroDenominator);
        }
        Ok(Number(BigRational::new(numerator, denominator)))
    }

    pub fn integer(value: i64) -> Self {
        Number(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn zero() -> Self {
        Number(BigRational::zero())
    }

    pub fn one() -> Self {
        Number(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    /// Returns `None` when dividing by zero.
    pub fn checked_div(&self, rhs: &Number) -> Option<Number> {
        if rhs.is_zero() {
            None
        } else {
            Some(Number(&self.0 / &rhs.0))
        }
    }

    /// Parses an exact decimal literal such as `-12.5` or `+3`.
    pub fn from_decimal_str(text: &str) -> Result<Self, NumberError> {
        let malformed = || NumberError::Malformed(text.to_string());
        let (int_part, frac_part) = match text.split_once('.') {
            Some((i, f)) => (i, f),
            None => (text, ""),
        };
        let unsigned = int_part.strip_prefix(['+', '-']).unwrap_or(int_part);
        if unsigned.is_empty()
            || !unsigned.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
            || (text.contains('.') && frac_part.is_empty())
        {
            return Err(malformed());
        }
        let negative = int_part.starts_with('-');
        let digits = format!("{unsigned}{frac_part}");
        let mut numerator: BigInt = digits.parse().map_err(|_| malformed())?;
        if negative {
            numerator = -numerator;
        }
        let denominator = num_traits::pow(BigInt::from(10), frac_part.len());
        Number::from_big(numerator, denominator)
    }

    /// Decimal rendering. Terminating expansions are printed exactly; others
    /// are rounded half away from zero to `max_places` fractional digits.
    /// Trailing zeros are trimmed.
    pub fn to_decimal(&self, max_places: usize) -> String {
        let negative = self.0.is_negative();
        let abs = self.0.abs();
        let mut denom = abs.denom().clone();
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        while denom.is_multiple_of(&two) {
            denom /= &two;
        }
        while denom.is_multiple_of(&five) {
            denom /= &five;
        }
        let terminating = denom.is_one();

        let (int_part, mut remainder) = abs.numer().div_rem(abs.denom());
        let d = abs.denom();
        let mut digits = Vec::new();
        let mut int_part = int_part;
        let limit = if terminating { usize::MAX } else { max_places };
        while !remainder.is_zero() && digits.len() < limit {
            remainder *= 10;
            let (q, r) = remainder.div_rem(d);
            digits.push(q.to_u8().unwrap_or(0));
            remainder = r;
        }
        if !terminating && !remainder.is_zero() && remainder.clone() * 2 >= *d {
            // round the last digit up, carrying leftwards
            let mut i = digits.len();
            loop {
                if i == 0 {
                    int_part += 1;
                    break;
                }
                i -= 1;
                if digits[i] == 9 {
                    digits[i] = 0;
                } else {
                    digits[i] += 1;
                    break;
                }
            }
        }
        while digits.last() == Some(&0) {
            digits.pop();
        }
        let mut out = String::new();
        if negative && !(int_part.is_zero() && digits.is_empty()) {
            out.push('-');
        }
        out.push_str(&int_part.to_string());
        if !digits.is_empty() {
            out.push('.');
            out.extend(digits.iter().map(|d| char::from(b'0' + d)));
        }
        out
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

/// Parses `[+-]?digits` or `[+-]?digits/digits`.
impl FromStr for Number {
    type Err = NumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || NumberError::Malformed(s.to_string());
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let unsigned = num.strip_prefix(['+', '-']).unwrap_or(num);
        if unsigned.is_empty() || !unsigned.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let numerator: BigInt = num.trim_start_matches('+').parse().map_err(|_| malformed())?;
        let denominator = match den {
            Some(d) => {
                if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(malformed());
                }
                d.parse::<BigInt>().map_err(|_| malformed())?
            }
            None => BigInt::one(),
        };
        Number::from_big(numerator, denominator)
    }
}

impl From<i64> for Number {
    fn from(value: i64) -> Self {
        Number::integer(value)
    }
}

impl Add for &Number {
    type Output = Number;
    fn add(self, rhs: &Number) -> Number {
        Number(&self.0 + &rhs.0)
    }
}

impl Sub for &Number {
    type Output = Number;
    fn sub(self, rhs: &Number) -> Number {
        Number(&self.0 - &rhs.0)
    }
}

impl Mul for &Number {
    type Output = Number;
    fn mul(self, rhs: &Number) -> Number {
        Number(&self.0 * &rhs.0)
    }
}

impl Neg for &Number {
    type Output = Number;
    fn neg(self) -> Number {
        Number(-&self.0)
    }
}
