//! Exact rational scalars and points.
//!
//! Everything geometric in this crate is carried out over `BigRational`, so
//! stabilization of the wave dynamic and all certificates are decided exactly.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`. Decimal points are rejected.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Canonical `"p/q"` form; integers print as `"p"`.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Largest rational with denominator `den` not exceeding `sqrt(x)`.
pub fn sqrt_floor(x: &Rat, den: u64) -> Rat {
    assert!(!x.is_negative(), "sqrt of negative rational");
    let d = BigInt::from(den);
    // floor(sqrt(x) * den) = floor(sqrt(x * den^2))
    let scaled = x * BigRational::from_integer(&d * &d);
    let fl = scaled.floor().to_integer();
    BigRational::new(fl.sqrt(), d)
}

/// Smallest rational with denominator `den` not below `sqrt(x)`.
pub fn sqrt_ceil(x: &Rat, den: u64) -> Rat {
    let lo = sqrt_floor(x, den);
    if &lo * &lo == *x {
        lo
    } else {
        lo + rat(1, den as i64)
    }
}

pub fn lcm_denominators<'a>(it: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// A point of the plane with exact coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rat,
    pub y: Rat,
}

impl Point {
    pub fn new(x: Rat, y: Rat) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(int(x), int(y))
    }

    pub fn origin() -> Self {
        Point::new(Rat::zero(), Rat::zero())
    }

    pub fn sub(&self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn add(&self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn scale(&self, s: &Rat) -> Point {
        Point::new(&self.x * s, &self.y * s)
    }

    pub fn dot(&self, o: &Point) -> Rat {
        &self.x * &o.x + &self.y * &o.y
    }

    pub fn cross(&self, o: &Point) -> Rat {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn norm2(&self) -> Rat {
        self.dot(self)
    }

    pub fn dist2(&self, o: &Point) -> Rat {
        self.sub(o).norm2()
    }

    /// `self + t (o - self)`.
    pub fn lerp(&self, o: &Point, t: &Rat) -> Point {
        self.add(&o.sub(self).scale(t))
    }

    pub fn midpoint(&self, o: &Point) -> Point {
        self.lerp(o, &rat(1, 2))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.x), to_f64(&self.y))
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_rat(&self.x), fmt_rat(&self.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [fmt_rat(&self.x), fmt_rat(&self.y)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[String; 2]>::deserialize(d)?;
        let x = parse_rat(&x).map_err(serde::de::Error::custom)?;
        let y = parse_rat(&y).map_err(serde::de::Error::custom)?;
        Ok(Point::new(x, y))
    }
}

/// Serde adapter for a single rational stored as a `"p/q"` string.
pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        fmt_rat(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a list of rationals.
pub mod serde_rat_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(fmt_rat).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        v.iter().map(|s| parse_rat(s).map_err(serde::de::Error::custom)).collect()
    }
}
