//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

pub mod checks;

use num_traits::{Signed, Zero};
use rand::Rng;
use tropwave::curve::TropicalCurve;
use tropwave::rat::{int, rat, Point, Rat};
use tropwave::{HalfPlane, LatticeVec, QPolygon, TropicalSeries};

pub fn third() -> TropicalSeries {
    TropicalSeries::from_triples(
        QPolygon::unit_square(),
        &[(1, 0, int(0)), (0, 1, int(0)), (-1, 0, int(1)), (0, -1, int(1)), (0, 0, rat(1, 3))],
    )
    .unwrap()
}

/// The unit square cut by up to three random half-planes with small normals
/// that keep `(1/2, 1/2)` at distance at least `1/8` inside.
pub fn random_polygon(rng: &mut impl Rng) -> QPolygon {
    let mut hs = QPolygon::unit_square().halfplanes().to_vec();
    let c = Point::new(rat(1, 2), rat(1, 2));
    for _ in 0..rng.gen_range(0..=3) {
        let n = loop {
            let n = LatticeVec::new(rng.gen_range(-2..=2), rng.gen_range(-2..=2));
            if !n.is_zero() {
                break n;
            }
        };
        // n·z + a ≥ 0 with n·c + a = r|n|_∞-ish margin
        let r = rat(rng.gen_range(2..=6), 8) * int(n.i.abs().max(n.j.abs()));
        hs.push(HalfPlane::new(n, r - n.apply(&c)));
    }
    QPolygon::new(hs).unwrap()
}

/// Points of the grid `(1/den)ℤ²` strictly inside `poly`.
pub fn random_points(rng: &mut impl Rng, poly: &QPolygon, n: usize, den: i64) -> Vec<Point> {
    let mut out = Vec::new();
    while out.len() < n {
        let z = Point::new(rat(rng.gen_range(1..den), den), rat(rng.gen_range(1..den), den));
        if poly.strictly_contains(&z) && !out.contains(&z) {
            out.push(z);
        }
    }
    out
}

/// `l_Ω(z) = min_{v ≠ 0} (v·z − min_{w ∈ Ω} v·w)` by brute force over a box
/// of exponents, using only the vertices of `Ω`.
pub fn oracle_distance(poly: &QPolygon, z: &Point) -> Rat {
    let r = poly.halfplanes().iter().map(|h| h.n.i.abs().max(h.n.j.abs())).max().unwrap() + 1;
    let mut best: Option<Rat> = None;
    for i in -r..=r {
        for j in -r..=r {
            let v = LatticeVec::new(i, j);
            if v.is_zero() {
                continue;
            }
            let m = poly.vertices().iter().map(|w| v.apply(w)).min().unwrap();
            let val = v.apply(z) - m;
            if best.as_ref().is_none_or(|b| val < *b) {
                best = Some(val);
            }
        }
    }
    best.unwrap()
}

/// Balancing, recomputed from edge geometry alone: at every interior vertex
/// the weighted primitive outgoing directions sum to zero.
pub fn oracle_balanced(c: &TropicalCurve) -> bool {
    c.interior_vertices().all(|v| {
        let (mut sx, mut sy) = (0i64, 0i64);
        for e in c.edges.iter().filter(|e| e.a == v.point || e.b == v.point) {
            let other = if e.a == v.point { &e.b } else { &e.a };
            let d = other.sub(&v.point);
            let l = num_integer::Integer::lcm(d.x.denom(), d.y.denom());
            let (x, y) = ((d.x.clone() * Rat::from_integer(l.clone())).to_integer(), (d.y.clone() * Rat::from_integer(l)).to_integer());
            let g = num_integer::Integer::gcd(&x, &y);
            let (x, y): (i64, i64) = ((x / &g).try_into().unwrap(), (y / &g).try_into().unwrap());
            sx += e.weight as i64 * x;
            sy += e.weight as i64 * y;
        }
        sx == 0 && sy == 0
    })
}

/// Every edge is orthogonal to the difference of its two monomials and has
/// the gcd of that difference as weight.
pub fn oracle_weights(c: &TropicalCurve) -> bool {
    c.edges.iter().all(|e| {
        let d = e.dual.0.sub(&e.dual.1);
        let along = e.b.sub(&e.a);
        d.apply(&along).is_zero() && e.weight as i64 == d.gcd()
    })
}

/// `f ≤ g` at every sample point.
pub fn below_at(f: &TropicalSeries, g: &TropicalSeries, samples: &[Point]) -> bool {
    samples.iter().all(|z| f.value(z) <= g.value(z))
}

pub fn nonneg(r: &Rat) -> bool {
    !r.is_negative()
}

/// The wave of a min-plus polynomial at `q`, from first principles: the
/// unique minimal coefficient at `q` rises by the gap to the runner-up.
pub fn oracle_single_wave(
    f: &std::collections::BTreeMap<LatticeVec, Rat>,
    q: &Point,
) -> std::collections::BTreeMap<LatticeVec, Rat> {
    let mut vals: Vec<(Rat, LatticeVec)> = f.iter().map(|(v, a)| (a + v.apply(q), *v)).collect();
    vals.sort();
    let mut out = f.clone();
    if vals.len() >= 2 && vals[0].0 < vals[1].0 {
        *out.get_mut(&vals[0].1).unwrap() += &vals[1].0 - &vals[0].0;
    }
    out
}
