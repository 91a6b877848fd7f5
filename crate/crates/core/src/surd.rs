//! Numbers of the form `a + b√d` with rational `a, b` and `d ≥ 0`, compared
//! exactly. Needed for endpoints of disk/strip intersections in Hausdorff
//! checks.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub a: Rat,
    pub b: Rat,
    pub d: Rat,
}

impl Surd {
    pub fn rational(a: Rat) -> Self {
        Surd { a, b: Rat::zero(), d: Rat::zero() }
    }

    pub fn new(a: Rat, b: Rat, d: Rat) -> Self {
        assert!(!d.is_negative(), "negative radicand");
        Surd { a, b, d }
    }

    #[cfg(test)]
    pub fn to_f64(&self) -> f64 {
        crate::rat::to_f64(&self.a) + crate::rat::to_f64(&self.b) * crate::rat::to_f64(&self.d).sqrt()
    }
}

fn sign(r: &Rat) -> Ordering {
    r.cmp(&Rat::zero())
}

/// Sign of `p + q√z`.
fn sign2(p: &Rat, q: &Rat, z: &Rat) -> Ordering {
    let sp = sign(p);
    let sq = if z.is_zero() { Ordering::Equal } else { sign(q) };
    if sq == Ordering::Equal {
        return sp;
    }
    if sp == Ordering::Equal || sp == sq {
        return sq;
    }
    // opposite signs: compare p² with q² z
    match (p * p).cmp(&(q * q * z)) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => Ordering::Equal,
    }
}

/// Sign of `a + b√x + c√y`.
fn sign3(a: &Rat, b: &Rat, x: &Rat, c: &Rat, y: &Rat) -> Ordering {
    // s = b√x + c√y
    let sb = if x.is_zero() { Ordering::Equal } else { sign(b) };
    let sc = if y.is_zero() { Ordering::Equal } else { sign(c) };
    let ss = if sb == Ordering::Equal {
        sc
    } else if sc == Ordering::Equal || sb == sc {
        sb
    } else {
        match (b * b * x).cmp(&(c * c * y)) {
            Ordering::Greater => sb,
            Ordering::Less => sc,
            Ordering::Equal => Ordering::Equal,
        }
    };
    let sa = sign(a);
    if ss == Ordering::Equal {
        return sa;
    }
    if sa == Ordering::Equal || sa == ss {
        return ss;
    }
    // compare a² with s² = b²x + c²y + 2bc√(xy)
    let p = a * a - b * b * x - c * c * y;
    let q = -(b * c * Rat::from_integer(2.into()));
    match sign2(&p, &q, &(x * y)) {
        Ordering::Greater => sa,
        Ordering::Less => ss,
        Ordering::Equal => Ordering::Equal,
    }
}

impl Ord for Surd {
    fn cmp(&self, o: &Self) -> Ordering {
        sign3(&(&self.a - &o.a), &self.b, &self.d, &-o.b.clone(), &o.d)
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
