//! Characteristic-two lift of the wave operator.
//!
//! The field is `GF(2)(t^(1/2^∞))`: rational functions in dyadic powers of
//! `t`, stored exactly. Polynomials in `X, Y` over it tropicalize to min-plus
//! polynomials, and `S_p` tropicalizes to a single wave.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::LatticeVec;
use crate::rat::{fmt_rat, int, parse_rat, rat, Point, Rat};

/// Dense polynomial over GF(2); bit `k` is the coefficient of `s^k`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn one() -> Bits {
        Bits(vec![1])
    }

    fn trim(mut self) -> Bits {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> Option<usize> {
        let w = *self.0.last()?;
        Some((self.0.len() - 1) * 64 + 63 - w.leading_zeros() as usize)
    }

    fn trailing(&self) -> Option<usize> {
        let (i, w) = self.0.iter().enumerate().find(|(_, w)| **w != 0)?;
        Some(i * 64 + w.trailing_zeros() as usize)
    }

    fn flip(&mut self, k: usize) {
        if self.0.len() <= k / 64 {
            self.0.resize(k / 64 + 1, 0);
        }
        self.0[k / 64] ^= 1 << (k % 64);
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    i * 64 + b
                })
            })
        })
    }

    /// `self ^= o · s^k`.
    fn xor_shifted(&mut self, o: &Bits, k: usize) {
        let (ws, bs) = (k / 64, k % 64);
        let need = o.0.len() + ws + 1;
        if self.0.len() < need {
            self.0.resize(need, 0);
        }
        for (i, &w) in o.0.iter().enumerate() {
            self.0[i + ws] ^= w << bs;
            if bs > 0 {
                self.0[i + ws + 1] ^= w >> (64 - bs);
            }
        }
    }

    fn mul(&self, o: &Bits) -> Bits {
        let (a, b) = if self.0.len() < o.0.len() { (self, o) } else { (o, self) };
        let mut r = Bits::default();
        for k in a.ones() {
            r.xor_shifted(b, k);
        }
        r.trim()
    }

    fn shr(&self, k: usize) -> Bits {
        let mut r = Bits::default();
        for b in self.ones() {
            r.flip(b - k);
        }
        r
    }

    fn divrem(&self, d: &Bits) -> (Bits, Bits) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut q = Bits::default();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            q.flip(dr - dd);
            r.xor_shifted(d, dr - dd);
            r = r.trim();
        }
        (q.trim(), r)
    }

    fn gcd(&self, o: &Bits) -> Bits {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a
    }

    /// `p(s) ↦ p(s^f)`.
    fn spread(&self, f: usize) -> Bits {
        if f == 1 {
            return self.clone();
        }
        let mut r = Bits::default();
        for k in self.ones() {
            r.flip(k * f);
        }
        r
    }

    /// Inverse of `spread(2)` when every exponent is even.
    fn halve(&self) -> Option<Bits> {
        let mut r = Bits::default();
        for k in self.ones() {
            if k % 2 == 1 {
                return None;
            }
            r.flip(k / 2);
        }
        Some(r)
    }
}

fn dyadic(e: &Rat) -> Result<(u32, i64), Error> {
    let d = e.denom();
    let bad = || Error::Parse(format!("exponent {} is not a dyadic rational", fmt_rat(e)));
    if d.magnitude().count_ones() != 1 {
        return Err(bad());
    }
    let level = d.trailing_zeros().ok_or_else(bad)? as u32;
    let n = e.numer().to_i64().ok_or_else(bad)?;
    Ok((level, n))
}

/// Finite sum `Σ t^e` with distinct dyadic exponents `e`: bit `k` stands for
/// `t^((low + k) / 2^level)`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct GF2Poly {
    level: u32,
    low: i64,
    bits: Bits,
}

impl GF2Poly {
    pub fn zero() -> Self {
        GF2Poly::default()
    }

    pub fn one() -> Self {
        GF2Poly { level: 0, low: 0, bits: Bits::one() }
    }

    /// `t^e`; `e` must have a power-of-two denominator.
    pub fn monomial(e: &Rat) -> Result<Self, Error> {
        let (level, low) = dyadic(e)?;
        Ok(GF2Poly { level, low, bits: Bits::one() }.normalized())
    }

    /// The sum of `t^e` over `exps`; repeated exponents cancel in pairs.
    pub fn from_exponents<'a>(exps: impl IntoIterator<Item = &'a Rat>) -> Result<Self, Error> {
        let mut r = GF2Poly::zero();
        for e in exps {
            r = r.add(&GF2Poly::monomial(e)?);
        }
        Ok(r)
    }

    fn normalized(mut self) -> Self {
        self.bits = self.bits.trim();
        let Some(tz) = self.bits.trailing() else {
            return GF2Poly::zero();
        };
        if tz > 0 {
            self.bits = self.bits.shr(tz);
            self.low += tz as i64;
        }
        while self.level > 0 && self.low % 2 == 0 {
            match self.bits.halve() {
                Some(b) => {
                    self.bits = b;
                    self.low /= 2;
                    self.level -= 1;
                }
                None => break,
            }
        }
        self
    }

    /// `(low, bits)` at a finer level.
    fn at_level(&self, level: u32) -> (i64, Bits) {
        let f = 1usize << (level - self.level);
        (self.low * f as i64, self.bits.spread(f))
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn len(&self) -> usize {
        self.bits.ones().count()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Exponents in increasing order.
    pub fn exponents(&self) -> Vec<Rat> {
        let d = BigInt::one() << self.level;
        self.bits
            .ones()
            .map(|k| Rat::new(BigInt::from(self.low + k as i64), d.clone()))
            .collect()
    }

    /// Smallest exponent; `None` for zero.
    pub fn valuation(&self) -> Option<Rat> {
        (!self.is_zero()).then(|| Rat::new(BigInt::from(self.low), BigInt::one() << self.level))
    }

    pub fn add(&self, o: &GF2Poly) -> GF2Poly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let level = self.level.max(o.level);
        let ((la, a), (lb, b)) = (self.at_level(level), o.at_level(level));
        let low = la.min(lb);
        let mut bits = Bits::default();
        bits.xor_shifted(&a, (la - low) as usize);
        bits.xor_shifted(&b, (lb - low) as usize);
        GF2Poly { level, low, bits }.normalized()
    }

    pub fn mul(&self, o: &GF2Poly) -> GF2Poly {
        if self.is_zero() || o.is_zero() {
            return GF2Poly::zero();
        }
        let level = self.level.max(o.level);
        let ((la, a), (lb, b)) = (self.at_level(level), o.at_level(level));
        GF2Poly { level, low: la + lb, bits: a.mul(&b) }.normalized()
    }

    /// Frobenius: `(Σ t^e)² = Σ t^(2e)`.
    pub fn square(&self) -> GF2Poly {
        if self.is_zero() {
            return GF2Poly::zero();
        }
        if self.level > 0 {
            GF2Poly { level: self.level - 1, ..self.clone() }
        } else {
            GF2Poly { level: 0, low: 2 * self.low, bits: self.bits.spread(2) }
        }
    }

    /// Inverse of `square`: `Σ t^(e/2)`.
    pub fn sqrt(&self) -> GF2Poly {
        if self.is_zero() {
            return GF2Poly::zero();
        }
        GF2Poly { level: self.level + 1, ..self.clone() }.normalized()
    }
}

impl fmt::Display for GF2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.exponents().iter().map(|e| format!("t^({})", fmt_rat(e))).collect();
        write!(f, "{}", terms.join("+"))
    }
}

impl fmt::Debug for GF2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_poly(s: &str) -> Result<GF2Poly, Error> {
    let s = s.trim();
    if s == "0" {
        return Ok(GF2Poly::zero());
    }
    let mut exps = Vec::new();
    for term in s.split('+') {
        let term = term.trim();
        let e = match term {
            "1" => int(0),
            "t" => int(1),
            _ => {
                let rest = term
                    .strip_prefix("t^")
                    .ok_or_else(|| Error::Parse(format!("bad term {term:?}")))?;
                let rest = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(rest);
                parse_rat(rest)?
            }
        };
        exps.push(e);
    }
    GF2Poly::from_exponents(&exps)
}

/// A valuation: a dyadic rational, or `+∞` for zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Finite(Rat),
    PlusInfinity,
}

impl Val {
    pub fn finite(self) -> Option<Rat> {
        match self {
            Val::Finite(r) => Some(r),
            Val::PlusInfinity => None,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(r) => write!(f, "{}", fmt_rat(r)),
            Val::PlusInfinity => write!(f, "+inf"),
        }
    }
}

/// An element `num / den` of the field. The form is canonical: `num` and
/// `den` are coprime, `den` has valuation zero, and the dyadic level is the
/// smallest possible, so structural equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GF2RatFun {
    num: GF2Poly,
    den: GF2Poly,
}

impl GF2RatFun {
    pub fn zero() -> Self {
        GF2RatFun { num: GF2Poly::zero(), den: GF2Poly::one() }
    }

    pub fn one() -> Self {
        GF2RatFun { num: GF2Poly::one(), den: GF2Poly::one() }
    }

    pub fn monomial(e: &Rat) -> Result<Self, Error> {
        Ok(GF2RatFun::from(GF2Poly::monomial(e)?))
    }

    pub fn new(num: GF2Poly, den: GF2Poly) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if num.is_zero() {
            return Ok(GF2RatFun::zero());
        }
        let level = num.level.max(den.level);
        let ((ln, n), (ld, d)) = (num.at_level(level), den.at_level(level));
        let g = n.gcd(&d);
        let (n, d) = (n.divrem(&g).0, d.divrem(&g).0);
        let num = GF2Poly { level, low: ln - ld, bits: n };
        let den = GF2Poly { level, low: 0, bits: d };
        Ok(GF2RatFun::reduce_level(num, den))
    }

    fn reduce_level(mut num: GF2Poly, mut den: GF2Poly) -> Self {
        while num.level > 0 && num.low % 2 == 0 {
            match (num.bits.halve(), den.bits.halve()) {
                (Some(n), Some(d)) => {
                    num = GF2Poly { level: num.level - 1, low: num.low / 2, bits: n };
                    den = GF2Poly { level: den.level - 1, low: 0, bits: d };
                }
                _ => break,
            }
        }
        GF2RatFun { num: num.normalized(), den: den.normalized() }
    }

    pub fn numerator(&self) -> &GF2Poly {
        &self.num
    }

    pub fn denominator(&self) -> &GF2Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn valuation(&self) -> Val {
        match self.num.valuation() {
            None => Val::PlusInfinity,
            Some(v) => Val::Finite(v - self.den.valuation().expect("denominator is nonzero")),
        }
    }

    pub fn add(&self, o: &GF2RatFun) -> GF2RatFun {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        GF2RatFun::new(num, self.den.mul(&o.den)).expect("denominators are nonzero")
    }

    pub fn mul(&self, o: &GF2RatFun) -> GF2RatFun {
        GF2RatFun::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("denominators are nonzero")
    }

    pub fn inv(&self) -> Result<GF2RatFun, Error> {
        GF2RatFun::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &GF2RatFun) -> Result<GF2RatFun, Error> {
        Ok(self.mul(&o.inv()?))
    }

    /// Frobenius; squaring keeps numerator and denominator coprime.
    pub fn square(&self) -> GF2RatFun {
        GF2RatFun::reduce_level(self.num.square(), self.den.square())
    }

    /// The unique square root (Frobenius is bijective on this field).
    pub fn sqrt(&self) -> GF2RatFun {
        GF2RatFun::reduce_level(self.num.sqrt(), self.den.sqrt())
    }

    pub fn pow(&self, k: i64) -> Result<GF2RatFun, Error> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let (mut acc, mut b) = (GF2RatFun::one(), base);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.square();
            e >>= 1;
        }
        Ok(acc)
    }
}

impl From<GF2Poly> for GF2RatFun {
    fn from(p: GF2Poly) -> Self {
        GF2RatFun { num: p, den: GF2Poly::one() }
    }
}

impl fmt::Display for GF2RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl fmt::Debug for GF2RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for GF2RatFun {
    type Err = Error;

    /// `(num)/(den)`, or a bare polynomial.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once(")/(") {
            let n = n.strip_prefix('(').ok_or_else(|| Error::Parse(format!("bad fraction {s:?}")))?;
            let d = d.strip_suffix(')').ok_or_else(|| Error::Parse(format!("bad fraction {s:?}")))?;
            GF2RatFun::new(parse_poly(n)?, parse_poly(d)?)
        } else {
            let s = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(s);
            Ok(GF2RatFun::from(parse_poly(s)?))
        }
    }
}

/// `Σ A_ij X^i Y^j` with coefficients in the field; zero coefficients are
/// never stored.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct LaurentPoly2 {
    terms: BTreeMap<LatticeVec, GF2RatFun>,
}

impl LaurentPoly2 {
    pub fn new(terms: impl IntoIterator<Item = (LatticeVec, GF2RatFun)>) -> Self {
        let mut out = LaurentPoly2::default();
        for (v, a) in terms {
            out.add_term(v, &a);
        }
        out
    }

    fn add_term(&mut self, v: LatticeVec, a: &GF2RatFun) {
        let s = self.terms.get(&v).map_or_else(|| a.clone(), |b| b.add(a));
        if s.is_zero() {
            self.terms.remove(&v);
        } else {
            self.terms.insert(v, s);
        }
    }

    pub fn terms(&self) -> &BTreeMap<LatticeVec, GF2RatFun> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, p: &(GF2RatFun, GF2RatFun)) -> Result<GF2RatFun, Error> {
        let mut s = GF2RatFun::zero();
        for (v, a) in &self.terms {
            s = s.add(&a.mul(&p.0.pow(v.i)?).mul(&p.1.pow(v.j)?));
        }
        Ok(s)
    }

    /// `Trop(F)(x, y) = min (val A_ij + i x + j y)`.
    pub fn trop(&self) -> Result<MinPlusPoly, Error> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(MinPlusPoly(
            self.terms
                .iter()
                .map(|(v, a)| (*v, a.valuation().finite().expect("stored coefficients are nonzero")))
                .collect(),
        ))
    }

    /// One `A(i,j)=(num)/(den)` line per term, in monomial order.
    pub fn to_text(&self) -> String {
        self.terms.iter().map(|(v, a)| format!("A({},{})={a}\n", v.i, v.j)).collect()
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut out = LaurentPoly2::default();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let bad = || Error::Parse(format!("bad line {line:?}"));
            let (lhs, rhs) = line.split_once('=').ok_or_else(bad)?;
            let idx = lhs.trim().strip_prefix("A(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
            let (i, j) = idx.split_once(',').ok_or_else(bad)?;
            let v = LatticeVec::new(i.trim().parse().map_err(|_| bad())?, j.trim().parse().map_err(|_| bad())?);
            out.add_term(v, &rhs.parse()?);
        }
        Ok(out)
    }
}

impl fmt::Debug for LaurentPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

/// Domain-free min-plus polynomial `min_v (a_v + v·z)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<MinPlusTerm>", try_from = "Vec<MinPlusTerm>")]
pub struct MinPlusPoly(pub BTreeMap<LatticeVec, Rat>);

#[derive(Serialize, Deserialize)]
struct MinPlusTerm {
    i: i64,
    j: i64,
    #[serde(with = "crate::rat::serde_rat")]
    a: Rat,
}

impl From<MinPlusPoly> for Vec<MinPlusTerm> {
    fn from(p: MinPlusPoly) -> Self {
        p.0.into_iter().map(|(v, a)| MinPlusTerm { i: v.i, j: v.j, a }).collect()
    }
}

impl TryFrom<Vec<MinPlusTerm>> for MinPlusPoly {
    type Error = String;

    fn try_from(ts: Vec<MinPlusTerm>) -> Result<Self, String> {
        let mut m = BTreeMap::new();
        for t in ts {
            if m.insert(LatticeVec::new(t.i, t.j), t.a).is_some() {
                return Err(format!("monomial ({}, {}) listed twice", t.i, t.j));
            }
        }
        Ok(MinPlusPoly(m))
    }
}

impl MinPlusPoly {
    pub fn value(&self, q: &Point) -> Rat {
        self.0.iter().map(|(v, a)| a + v.apply(q)).min().expect("nonempty min-plus polynomial")
    }

    /// Monomials attaining the minimum at `q`.
    pub fn argmin(&self, q: &Point) -> Vec<LatticeVec> {
        let m = self.value(q);
        self.0.iter().filter(|(v, a)| *a + v.apply(q) == m).map(|(v, _)| *v).collect()
    }

    /// The single wave at `q`: if one monomial `v` is minimal there, its
    /// coefficient rises until it ties with the rest at `q`; on the curve
    /// nothing changes.
    pub fn single_wave(&self, q: &Point) -> Result<MinPlusPoly, Error> {
        let arg = self.argmin(q);
        if arg.len() > 1 {
            return Ok(self.clone());
        }
        let v = arg[0];
        let rest = self.0.iter().filter(|(w, _)| **w != v).map(|(w, a)| a + w.apply(q)).min();
        let Some(second) = rest else {
            return Err(Error::HypothesisViolated("a single monomial has no finite wave".into()));
        };
        let mut out = self.clone();
        let c = second - self.value(q);
        *out.0.get_mut(&v).expect("v is in the support") += c;
        Ok(out)
    }
}

pub type LiftPoint = (GF2RatFun, GF2RatFun);

/// `(S_p F)(z) = F(z) + F(√(z p))² / F(p)`, coefficientwise
/// `A_v ↦ A_v + A_v² p^v / F(p)`; `S_p F = F` when `F(p) = 0`.
pub fn s_wave(f: &LaurentPoly2, p: &LiftPoint) -> Result<LaurentPoly2, Error> {
    let fp = f.eval(p)?;
    if fp.is_zero() {
        return Ok(f.clone());
    }
    let inv = fp.inv()?;
    let mut out = Vec::with_capacity(f.terms.len());
    for (v, a) in &f.terms {
        let pv = p.0.pow(v.i)?.mul(&p.1.pow(v.j)?);
        out.push((*v, a.add(&a.square().mul(&pv).mul(&inv))));
    }
    Ok(LaurentPoly2::new(out))
}

/// `(val p₁, val p₂)`; both coordinates must be nonzero.
pub fn val_point(p: &LiftPoint) -> Result<Point, Error> {
    match (p.0.valuation(), p.1.valuation()) {
        (Val::Finite(x), Val::Finite(y)) => Ok(Point::new(x, y)),
        _ => Err(Error::HypothesisViolated("lift point has a zero coordinate".into())),
    }
}

/// Checks that `(F, p)` is generic enough for the tropical identity: either
/// `F(p) = 0`, or `val p` is off the curve of `Trop(F)` and the remaining
/// terms do not cancel at `p` (`val F'(p) = Trop(F')(val p)`).
pub fn lift_hypothesis(f: &LaurentPoly2, p: &LiftPoint) -> Result<(), Error> {
    let q = val_point(p)?;
    let tf = f.trop()?;
    if f.eval(p)?.is_zero() {
        return Ok(());
    }
    let arg = tf.argmin(&q);
    if arg.len() > 1 {
        return Err(Error::HypothesisViolated(format!("val p = {q} lies on the curve of Trop(F) and F(p) ≠ 0")));
    }
    let rest = LaurentPoly2::new(f.terms.iter().filter(|(v, _)| **v != arg[0]).map(|(v, a)| (*v, a.clone())));
    if rest.is_zero() {
        return Err(Error::HypothesisViolated("F is a single monomial".into()));
    }
    let expect = rest.trop()?.value(&q);
    if rest.eval(p)?.valuation() != Val::Finite(expect) {
        return Err(Error::HypothesisViolated("the non-minimal terms cancel at p".into()));
    }
    Ok(())
}

/// Both sides of `G_{val p} Trop(F) = Trop(S_p F)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftCheck {
    pub holds: bool,
    pub wave_side: MinPlusPoly,
    pub lift_side: MinPlusPoly,
    /// First monomial where the coefficient maps differ.
    pub mismatch: Option<LatticeVec>,
}

pub fn verify_lift_theorem(f: &LaurentPoly2, p: &LiftPoint) -> Result<LiftCheck, Error> {
    lift_hypothesis(f, p)?;
    let wave_side = f.trop()?.single_wave(&val_point(p)?)?;
    let lift_side = s_wave(f, p)?.trop()?;
    let mismatch = wave_side
        .0
        .keys()
        .chain(lift_side.0.keys())
        .find(|v| wave_side.0.get(v) != lift_side.0.get(v))
        .copied();
    Ok(LiftCheck { holds: mismatch.is_none(), wave_side, lift_side, mismatch })
}

/// A random field element: one or two dyadic monomials over `1` or
/// `1 + t^e`.
pub fn random_element(rng: &mut impl Rng) -> GF2RatFun {
    let n: Vec<Rat> = (0..rng.gen_range(1..=2)).map(|_| random_dyadic(rng, -2, 4)).collect();
    let num = GF2Poly::from_exponents(&n).expect("dyadic exponents");
    let den = if rng.gen_bool(0.5) {
        GF2Poly::one()
    } else {
        GF2Poly::from_exponents(&[int(0), random_dyadic(rng, 1, 3)]).expect("dyadic exponents")
    };
    if num.is_zero() {
        GF2RatFun::one()
    } else {
        GF2RatFun::new(num, den).expect("denominator is nonzero")
    }
}

/// Uniform on the quarter-grid of `[lo, hi]`.
fn random_dyadic(rng: &mut impl Rng, lo: i64, hi: i64) -> Rat {
    let level = rng.gen_range(0..=2u32);
    rat(rng.gen_range(lo << level..=hi << level), 1 << level)
}

/// A random polynomial with `terms` distinct monomials in `[-2, 2]²` and a
/// point with monomial coordinates `t^r`, `r ∈ [-2, 2]` dyadic.
pub fn random_lift_instance(rng: &mut impl Rng, terms: usize) -> (LaurentPoly2, LiftPoint) {
    let mut f = BTreeMap::new();
    while f.len() < terms {
        f.insert(LatticeVec::new(rng.gen_range(-2..=2), rng.gen_range(-2..=2)), random_element(rng));
    }
    let mut coord = || GF2RatFun::monomial(&random_dyadic(rng, -2, 2)).expect("dyadic exponent");
    let p = (coord(), coord());
    (LaurentPoly2 { terms: f }, p)
}

/// Outcome of a seeded fuzz run of the lift identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftFuzzReport {
    pub seed: u64,
    /// Generic instances checked.
    pub checked: usize,
    /// Instances rejected by the genericity hypothesis.
    pub skipped: usize,
    /// Indices of instances violating the identity, idempotence or `(S_p F)(p) = 0`.
    pub failures: Vec<usize>,
}

/// Draws instances until `trials` generic ones have been checked.
pub fn lift_fuzz(seed: u64, trials: usize, terms: usize) -> Result<LiftFuzzReport, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LiftFuzzReport { seed, checked: 0, skipped: 0, failures: Vec::new() };
    let mut index = 0;
    while report.checked < trials {
        let (f, p) = random_lift_instance(&mut rng, terms);
        let s = s_wave(&f, &p)?;
        let mut ok = s_wave(&s, &p)? == s && s.eval(&p)?.is_zero();
        match verify_lift_theorem(&f, &p) {
            Ok(c) => {
                ok &= c.holds;
                report.checked += 1;
            }
            Err(Error::HypothesisViolated(_)) => report.skipped += 1,
            Err(e) => return Err(e),
        }
        if !ok {
            report.failures.push(index);
        }
        index += 1;
    }
    Ok(report)
}
