//! Exact elements of the circle group, written additively as `Q/Z`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A rational number modulo 1, stored reduced with `0 <= num < den`.
///
/// `Phase(p/q)` stands for the unit complex number `exp(2πi p/q)`; sums of
/// phases are products of the corresponding circle values.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase {
    num: u64,
    den: u64,
}

impl Phase {
    pub const ZERO: Phase = Phase { num: 0, den: 1 };
    pub const HALF: Phase = Phase { num: 1, den: 2 };

    /// `num / den` reduced mod 1. Panics if `den == 0`.
    pub fn new(num: i64, den: u64) -> Phase {
        assert!(den != 0, "phase denominator must be nonzero");
        let d = den as i128;
        let n = (num as i128).rem_euclid(d);
        let g = n.gcd(&d).max(1);
        Phase {
            num: (n / g) as u64,
            den: (d / g) as u64,
        }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Representative in `[0, 1)`.
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Quarter turns are exact.
    pub fn to_complex(&self) -> Complex64 {
        if (4 * self.num) % self.den == 0 {
            return [
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, -1.0),
            ][(4 * self.num / self.den) as usize];
        }
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.value())
    }

    /// Snap a unit complex number onto the nearest phase with denominator `den`.
    /// Returns `None` if `z` is farther than `tol` from that root of unity.
    pub fn from_complex(z: Complex64, den: u64, tol: f64) -> Option<Phase> {
        let turns = z.arg() / std::f64::consts::TAU;
        let k = (turns * den as f64).round() as i64;
        let p = Phase::new(k, den);
        ((p.to_complex() - z).norm() <= tol).then_some(p)
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::ZERO
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        if self.den == rhs.den {
            return Phase::new((self.num + rhs.num) as i64, self.den);
        }
        let l = self.den.lcm(&rhs.den);
        let n = self.num as i128 * (l / self.den) as i128 + rhs.num as i128 * (l / rhs.den) as i128;
        Phase::new((n % l as i128) as i64, l)
    }
}

impl AddAssign for Phase {
    fn add_assign(&mut self, rhs: Phase) {
        *self = *self + rhs;
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        if self.num == 0 {
            self
        } else {
            Phase {
                num: self.den - self.num,
                den: self.den,
            }
        }
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        self + (-rhs)
    }
}

impl SubAssign for Phase {
    fn sub_assign(&mut self, rhs: Phase) {
        *self = *self - rhs;
    }
}

impl Mul<i64> for Phase {
    type Output = Phase;
    fn mul(self, k: i64) -> Phase {
        let n = (self.num as i128 * k as i128).rem_euclid(self.den as i128);
        Phase::new(n as i64, self.den)
    }
}

impl std::iter::Sum for Phase {
    fn sum<I: Iterator<Item = Phase>>(iter: I) -> Phase {
        iter.fold(Phase::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Phase({self})")
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Phase> {
        let bad = || Error::Parse(format!("not a phase: {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            None => {
                let n: i64 = s.parse().map_err(|_| bad())?;
                Ok(Phase::new(n, 1))
            }
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: u64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(Phase::new(n, d))
            }
        }
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Phase, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
