use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::Error;

/// An exact element of `(1/2)Z`, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

/// Weights of modular forms; `TwiceWeight::from_twice(13)` is weight 13/2.
pub type TwiceWeight = HalfInt;

impl HalfInt {
    pub const fn from_twice(twice: i64) -> Self {
        Self(twice)
    }

    pub const fn from_int(v: i64) -> Self {
        Self(2 * v)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub const fn is_integral(self) -> bool {
        self.0 % 2 == 0
    }

    /// Largest integer not exceeding the value.
    pub const fn floor(self) -> i64 {
        self.0.div_euclid(2)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.0), BigInt::from(2))
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Accepts `6`, `13/2` or `6.5`.
impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("`{s}` is not a half-integer"));
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "1" => Ok(HalfInt(2 * num)),
                "2" => Ok(HalfInt(num)),
                _ => Err(bad()),
            }
        } else if let Some(int) = s.strip_suffix(".5") {
            let neg = int.starts_with('-');
            let int: i64 = int.parse().map_err(|_| bad())?;
            Ok(HalfInt(2 * int + if neg { -1 } else { 1 }))
        } else {
            let int = s.strip_suffix(".0").unwrap_or(s);
            int.parse::<i64>().map(|v| HalfInt(2 * v)).map_err(|_| bad())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        assert_eq!("6".parse::<HalfInt>().unwrap(), HalfInt::from_int(6));
        assert_eq!("13/2".parse::<HalfInt>().unwrap(), HalfInt::from_twice(13));
        assert_eq!("6.5".parse::<HalfInt>().unwrap(), HalfInt::from_twice(13));
        assert_eq!("-0.5".parse::<HalfInt>().unwrap(), HalfInt::from_twice(-1));
        assert!("1/3".parse::<HalfInt>().is_err());
        assert_eq!(HalfInt::from_twice(13).to_string(), "13/2");
        assert_eq!(HalfInt::from_twice(-3).floor(), -2);
    }
}
