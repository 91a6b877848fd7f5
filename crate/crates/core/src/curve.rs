//! Tropical curves as corner loci: faces, weighted edges, vertex types,
//! balancing, symplectic area and exact Hausdorff closeness.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{lattice_hull, lattice_hull_area2, LatticeVec, QPolygon};
use crate::rat::{int, Point, Rat};
use crate::series::{approx_form, TropicalSeries};
use crate::surd::Surd;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub exp: LatticeVec,
    pub polygon: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: Point,
    pub b: Point,
    pub weight: u64,
    /// The two monomials whose faces meet along this edge.
    pub dual: (LatticeVec, LatticeVec),
}

impl Edge {
    /// Primitive lattice direction of the edge.
    pub fn primitive_direction(&self) -> LatticeVec {
        self.dual.1.sub(&self.dual.0).perp().primitive()
    }

    /// `weight · |L|·|v|` for the segment `L = s v`, `v` primitive.
    pub fn area(&self) -> Rat {
        let v = self.primitive_direction();
        int(self.weight as i64) * v.apply(&self.b.sub(&self.a)).abs()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveVertex {
    pub point: Point,
    /// Exponents of all faces meeting at the vertex.
    pub dual: Vec<LatticeVec>,
    pub interior: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexClass {
    Smooth,
    Nodal,
    Other(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TropicalCurve {
    pub faces: Vec<Face>,
    pub edges: Vec<Edge>,
    pub vertices: Vec<CurveVertex>,
}

impl TropicalCurve {
    pub fn interior_vertices(&self) -> impl Iterator<Item = &CurveVertex> {
        self.vertices.iter().filter(|v| v.interior)
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges_at<'a>(&'a self, p: &'a Point) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.a == *p || e.b == *p)
    }
}

/// Faces, edges and vertices of `C(f)`, clipped to the closed domain.
pub fn extract_curve(f: &TropicalSeries) -> TropicalCurve {
    let sub = f.subdivision();
    let poly = f.polygon().expect("curves live on bounded polygons");
    let faces: Vec<Face> = sub
        .cells
        .iter()
        .map(|c| Face { exp: c.exp, polygon: c.polygon.clone() })
        .collect();
    let approx: Vec<Vec<(f64, f64)>> =
        sub.cells.iter().map(|c| c.polygon.iter().map(Point::to_f64).collect()).collect();
    let mut edges = Vec::new();
    for (k, cu) in sub.cells.iter().enumerate() {
        for cw in &sub.cells[k + 1..] {
            let d = cw.exp.sub(&cu.exp);
            let near = approx[k]
                .iter()
                .filter(|(x, y)| {
                    let (g, t) = approx_form(&d, cw.approx_coeff - cu.approx_coeff, *x, *y);
                    g.abs() <= t
                })
                .count();
            if near < 2 {
                continue;
            }
            let off = &cw.coeff - &cu.coeff;
            let mut on: Vec<&Point> = cu.polygon.iter().filter(|z| (d.apply(z) + &off).is_zero()).collect();
            if on.len() < 2 {
                continue;
            }
            // extreme points along the line
            let dir = d.perp();
            on.sort_by_key(|p| dir.apply(p));
            let (a, b) = (on[0].clone(), on[on.len() - 1].clone());
            if a == b {
                continue;
            }
            edges.push(Edge { a, b, weight: d.gcd() as u64, dual: (cu.exp, cw.exp) });
        }
    }
    let mut ends: BTreeMap<Point, ()> = BTreeMap::new();
    for e in &edges {
        ends.insert(e.a.clone(), ());
        ends.insert(e.b.clone(), ());
    }
    let vertices = ends
        .into_keys()
        .map(|p| {
            let dual = f.active_monomials(&p);
            let interior = poly.strictly_contains(&p);
            CurveVertex { point: p, dual, interior }
        })
        .collect();
    TropicalCurve { faces, edges, vertices }
}

/// Type of the local model at an interior vertex, read off its dual polygon.
pub fn classify_dual(dual: &[LatticeVec]) -> VertexClass {
    let hull = lattice_hull(dual);
    let a2 = lattice_hull_area2(dual);
    match (hull.len(), a2) {
        (3, 1) => VertexClass::Smooth,
        (4, 2) if hull[0].add(&hull[2]) == hull[1].add(&hull[3]) => VertexClass::Nodal,
        (n, a) => VertexClass::Other(format!("dual polygon with {n} corners and area {a}/2")),
    }
}

pub fn classify_vertex(c: &TropicalCurve, p: &Point) -> Result<VertexClass, Error> {
    let v = c
        .vertices
        .iter()
        .find(|v| v.point == *p && v.interior)
        .ok_or(Error::NotAVertex)?;
    Ok(classify_dual(&v.dual))
}

/// `Σ m_e · e = 0` for primitive outgoing directions `e`.
pub fn is_balanced_star(star: &[(LatticeVec, u64)]) -> bool {
    let s = star
        .iter()
        .fold(LatticeVec::ZERO, |acc, (e, m)| acc.add(&e.primitive().scale(*m as i64)));
    s.is_zero()
}

pub fn check_balancing(c: &TropicalCurve) -> bool {
    c.interior_vertices().all(|v| {
        let star: Vec<(LatticeVec, u64)> = c
            .edges_at(&v.point)
            .map(|e| {
                let dir = e.primitive_direction();
                let other = if e.a == v.point { &e.b } else { &e.a };
                let out = if dir.apply(&other.sub(&v.point)).is_positive() { dir } else { dir.neg() };
                (out, e.weight)
            })
            .collect();
        is_balanced_star(&star)
    })
}

/// Tropical symplectic area `Σ m_e |e|·|v_e|` of the clipped curve.
pub fn symplectic_area(c: &TropicalCurve) -> Rat {
    c.edges.iter().map(Edge::area).sum()
}

/// Symplectic area of a single weighted segment.
pub fn segment_area(a: &Point, b: &Point, weight: u64) -> Rat {
    let d = b.sub(a);
    if d.x.is_zero() && d.y.is_zero() {
        return Rat::zero();
    }
    // primitive lattice vector along d: scale the normal to integers
    let l = crate::rat::lcm_denominators([&d.x, &d.y]);
    let lr = Rat::from_integer(l);
    let (i, j) = ((&d.x * &lr).to_integer(), (&d.y * &lr).to_integer());
    let v = LatticeVec::new(i.try_into().expect("small"), j.try_into().expect("small")).primitive();
    int(weight as i64) * v.apply(&d).abs()
}

/// `Σ_S m_f(S) · Area(S)` over the sides of the polygon.
pub fn boundary_area(poly: &QPolygon, degree: &[u64]) -> Rat {
    (0..poly.num_sides())
        .map(|k| {
            let (a, b) = poly.side_segment(k);
            segment_area(&a, &b, degree[k])
        })
        .sum()
}

/// Parameter interval `{λ ∈ [0,1] : |P + λD − X| ≤ r for some X on [A,B]}`
/// with exact surd endpoints, or `None` if empty.
fn stadium_interval(p: &Point, d: &Point, a: &Point, b: &Point, r: &Rat) -> Option<(Surd, Surd)> {
    let zero = Surd::rational(Rat::zero());
    let one = Surd::rational(int(1));
    let mut lo: Option<Surd> = None;
    let mut hi: Option<Surd> = None;
    let mut take = |l: Surd, h: Surd| {
        let l = l.max(zero.clone());
        let h = h.min(one.clone());
        if l > h {
            return;
        }
        lo = Some(match lo.take() {
            Some(x) => x.min(l),
            None => l,
        });
        hi = Some(match hi.take() {
            Some(x) => x.max(h),
            None => h,
        });
    };
    let r2 = r * r;
    let dd = d.norm2();
    for c in [a, b] {
        // |P − C + λD|² ≤ r²
        let w = p.sub(c);
        let qa = dd.clone();
        let qb = int(2) * d.dot(&w);
        let qc = w.norm2() - &r2;
        if qa.is_zero() {
            if !qc.is_positive() {
                take(zero.clone(), one.clone());
            }
            continue;
        }
        let disc = &qb * &qb - int(4) * &qa * &qc;
        if disc.is_negative() {
            continue;
        }
        let mid = -&qb / (int(2) * &qa);
        let half = Rat::from_integer(1.into()) / (int(2) * &qa);
        take(Surd::new(mid.clone(), -half.clone(), disc.clone()), Surd::new(mid, half, disc));
    }
    // strip around the segment body
    let e = b.sub(a);
    let ee = e.norm2();
    if ee.is_positive() {
        let n = Point::new(-e.y.clone(), e.x.clone());
        let w = p.sub(a);
        // 0 ≤ (w + λd)·e ≤ |e|²
        let (al, be) = (w.dot(&e), d.dot(&e));
        let along = linear_range(&al, &be, &Rat::zero(), &ee);
        // |(w + λd)·n| ≤ r |n|, with |n|² = |e|²
        let (an, bn) = (w.dot(&n), d.dot(&n));
        if let Some((l1, h1)) = along {
            let (l1, h1) = (Surd::rational(l1), Surd::rational(h1));
            if bn.is_zero() {
                if an.clone() * an.clone() <= &r2 * &ee {
                    take(l1, h1);
                }
            } else {
                // λ = (±r√ee − an)/bn
                let base = -&an / &bn;
                let coef = r / bn.abs();
                let l2 = Surd::new(base.clone(), -coef.clone(), ee.clone());
                let h2 = Surd::new(base, coef, ee.clone());
                take(l1.max(l2), h1.min(h2));
            }
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) => Some((l, h)),
        _ => None,
    }
}

/// `{λ ∈ [0,1] : lo ≤ α + βλ ≤ hi}`.
fn linear_range(alpha: &Rat, beta: &Rat, lo: &Rat, hi: &Rat) -> Option<(Rat, Rat)> {
    let (mut l, mut h) = (Rat::zero(), int(1));
    if beta.is_zero() {
        return (alpha >= lo && alpha <= hi).then_some((l, h));
    }
    let (t1, t2) = ((lo - alpha) / beta, (hi - alpha) / beta);
    let (a, b) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    l = l.max(a);
    h = h.min(b);
    (l <= h).then_some((l, h))
}

/// Whether every point of segment `[p, q]` is within `r` of the union of `segs`.
pub fn segment_covered(p: &Point, q: &Point, segs: &[(Point, Point)], r: &Rat) -> bool {
    let d = q.sub(p);
    let mut ivs: Vec<(Surd, Surd)> = segs
        .iter()
        .filter_map(|(a, b)| stadium_interval(p, &d, a, b, r))
        .collect();
    ivs.sort_by(|x, y| x.0.cmp(&y.0));
    let mut reach = Surd::rational(Rat::zero());
    let mut started = false;
    for (l, h) in ivs {
        if (!started && l.cmp(&Surd::rational(Rat::zero())) == Ordering::Greater) || l > reach {
            return false;
        }
        started = true;
        if h > reach {
            reach = h;
        }
    }
    started && reach >= Surd::rational(int(1))
}

/// One-sided closeness: `C(f)` lies in the closed `2ε`-neighbourhood of `C(g)`.
pub fn curves_within(f: &TropicalSeries, g: &TropicalSeries, eps: &Rat) -> bool {
    let cf = extract_curve(f);
    let cg = extract_curve(g);
    let segs: Vec<(Point, Point)> = cg.edges.iter().map(|e| (e.a.clone(), e.b.clone())).collect();
    let r = int(2) * eps;
    cf.edges.iter().all(|e| segment_covered(&e.a, &e.b, &segs, &r))
}

/// Exact squared distance from a point to a segment.
pub fn point_segment_dist2(z: &Point, a: &Point, b: &Point) -> Rat {
    let e = b.sub(a);
    let ee = e.norm2();
    if ee.is_zero() {
        return z.dist2(a);
    }
    let t = z.sub(a).dot(&e) / &ee;
    if t.is_negative() {
        z.dist2(a)
    } else if t > int(1) {
        z.dist2(b)
    } else {
        z.dist2(&a.lerp(b, &t))
    }
}

/// Squared distance from a point to the curve (`None` for an empty curve).
pub fn point_curve_dist2(z: &Point, c: &TropicalCurve) -> Option<Rat> {
    c.edges.iter().map(|e| point_segment_dist2(z, &e.a, &e.b)).min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn third() -> TropicalSeries {
        TropicalSeries::from_triples(
            QPolygon::unit_square(),
            &[(1, 0, int(0)), (0, 1, int(0)), (-1, 0, int(1)), (0, -1, int(1)), (0, 0, rat(1, 3))],
        )
        .unwrap()
    }

    #[test]
    fn square_example_curve() {
        let c = extract_curve(&third());
        let inner: Vec<Point> = c.interior_vertices().map(|v| v.point.clone()).collect();
        let expect = [(1, 1), (2, 1), (2, 2), (1, 2)].map(|(x, y)| Point::new(rat(x, 3), rat(y, 3)));
        assert_eq!(inner.len(), 4);
        for p in &expect {
            assert!(inner.contains(p));
            assert_eq!(classify_vertex(&c, p).unwrap(), VertexClass::Smooth);
        }
        assert_eq!(c.edges.len(), 8);
        let sq = QPolygon::unit_square();
        let to_boundary = c.edges.iter().filter(|e| sq.on_boundary(&e.a) || sq.on_boundary(&e.b));
        assert_eq!(to_boundary.count(), 4);
        assert!(check_balancing(&c));
        assert_eq!(symplectic_area(&c), int(4));
        assert_eq!(boundary_area(&QPolygon::unit_square(), &[1, 1, 1, 1]), int(4));
        assert_eq!(classify_vertex(&c, &Point::new(rat(1, 2), rat(1, 2))), Err(Error::NotAVertex));
    }

    #[test]
    fn single_monomial_has_empty_curve() {
        let z = TropicalSeries::zero(&QPolygon::unit_square());
        let c = extract_curve(&z);
        assert!(c.is_empty());
        assert_eq!(symplectic_area(&c), int(0));
    }

    #[test]
    fn vertex_models() {
        let v = |i, j| LatticeVec::new(i, j);
        assert_eq!(classify_dual(&[v(0, 0), v(1, 0), v(0, 1)]), VertexClass::Smooth);
        assert_eq!(classify_dual(&[v(0, 0), v(1, 0), v(0, 1), v(1, 1)]), VertexClass::Nodal);
        assert!(matches!(classify_dual(&[v(0, 0), v(1, 1), v(-1, 1)]), VertexClass::Other(_)));
    }

    #[test]
    fn balancing_stars() {
        let v = |i, j| LatticeVec::new(i, j);
        assert!(is_balanced_star(&[(v(1, 0), 1), (v(0, 1), 1), (v(-1, -1), 1)]));
        assert!(is_balanced_star(&[(v(1, 0), 2), (v(-1, 1), 1), (v(-1, -1), 1)]));
        assert!(!is_balanced_star(&[(v(1, 0), 1), (v(-1, 1), 1), (v(-1, -1), 1)]));
    }

    #[test]
    fn segment_areas() {
        assert_eq!(segment_area(&Point::origin(), &Point::from_ints(1, 1), 1), int(2));
        assert_eq!(segment_area(&Point::origin(), &Point::new(rat(1, 2), int(0)), 3), rat(3, 2));
    }

    #[test]
    fn closeness_under_perturbation() {
        let f = third();
        let g = TropicalSeries::from_triples(
            QPolygon::unit_square(),
            &[(1, 0, int(0)), (0, 1, int(0)), (-1, 0, int(1)), (0, -1, int(1)), (0, 0, rat(34, 100))],
        )
        .unwrap();
        let eps = rat(1, 100);
        assert!(curves_within(&f, &f, &rat(1, 1000)));
        assert!(curves_within(&f, &g, &eps));
        assert!(curves_within(&g, &f, &eps));
        // the inner square edges move by exactly 1/150
        assert!(curves_within(&g, &f, &rat(1, 300)));
        assert!(!curves_within(&g, &f, &rat(1, 301)));
    }

    #[test]
    fn coverage_is_exact_at_irrational_threshold() {
        // point (1,1) against segment at distance √2 exactly
        let segs = [(Point::origin(), Point::origin())];
        let p = Point::from_ints(1, 1);
        assert!(segment_covered(&p, &p, &segs, &rat(1415, 1000)));
        assert!(!segment_covered(&p, &p, &segs, &rat(1414, 1000)));
    }
}
