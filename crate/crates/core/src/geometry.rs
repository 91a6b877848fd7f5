//! Exact planar primitives: lattice vectors, rational half-planes, ℚ-polygons,
//! support coefficients, corners and corner blow-ups.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rat::{fmt_rat, int, rat, serde_rat, Point, Rat};

/// An exponent pair `(i, j)` of a monomial `ix + jy`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct LatticeVec {
    pub i: i64,
    pub j: i64,
}

impl From<[i64; 2]> for LatticeVec {
    fn from([i, j]: [i64; 2]) -> Self {
        LatticeVec { i, j }
    }
}

impl From<LatticeVec> for [i64; 2] {
    fn from(v: LatticeVec) -> Self {
        [v.i, v.j]
    }
}

impl fmt::Debug for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

impl fmt::Display for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl LatticeVec {
    pub const ZERO: LatticeVec = LatticeVec { i: 0, j: 0 };

    pub const fn new(i: i64, j: i64) -> Self {
        LatticeVec { i, j }
    }

    pub fn is_zero(&self) -> bool {
        self.i == 0 && self.j == 0
    }

    pub fn gcd(&self) -> i64 {
        self.i.gcd(&self.j)
    }

    pub fn is_primitive(&self) -> bool {
        self.gcd() == 1
    }

    /// Primitive vector in the same direction; zero stays zero.
    pub fn primitive(&self) -> LatticeVec {
        let g = self.gcd();
        if g == 0 {
            *self
        } else {
            LatticeVec::new(self.i / g, self.j / g)
        }
    }

    pub fn norm2(&self) -> i64 {
        self.i * self.i + self.j * self.j
    }

    pub fn dot(&self, o: &LatticeVec) -> i64 {
        self.i * o.i + self.j * o.j
    }

    pub fn det(&self, o: &LatticeVec) -> i64 {
        self.i * o.j - self.j * o.i
    }

    pub fn add(&self, o: &LatticeVec) -> LatticeVec {
        LatticeVec::new(self.i + o.i, self.j + o.j)
    }

    pub fn sub(&self, o: &LatticeVec) -> LatticeVec {
        LatticeVec::new(self.i - o.i, self.j - o.j)
    }

    pub fn scale(&self, k: i64) -> LatticeVec {
        LatticeVec::new(self.i * k, self.j * k)
    }

    pub fn neg(&self) -> LatticeVec {
        LatticeVec::new(-self.i, -self.j)
    }

    /// Rotation by +90 degrees.
    pub fn perp(&self) -> LatticeVec {
        LatticeVec::new(-self.j, self.i)
    }

    /// `i x + j y` at `z`.
    pub fn apply(&self, z: &Point) -> Rat {
        int(self.i) * &z.x + int(self.j) * &z.y
    }

    pub fn to_point(&self) -> Point {
        Point::from_ints(self.i, self.j)
    }

    /// Total order by polar angle in `[0, 2π)`, starting from the positive x axis.
    pub fn angle_cmp(&self, o: &LatticeVec) -> Ordering {
        let half = |v: &LatticeVec| if v.j > 0 || (v.j == 0 && v.i > 0) { 0 } else { 1 };
        half(self)
            .cmp(&half(o))
            .then_with(|| 0.cmp(&self.det(o)))
    }
}

/// Every lattice vector with `i² + j² ≤ bound2`, in lexicographic order.
pub fn lattice_disk(bound2: &Rat) -> Vec<LatticeVec> {
    let mut out = Vec::new();
    if bound2.is_negative() {
        return out;
    }
    let r = crate::rat::sqrt_floor(bound2, 1).to_integer();
    let r: i64 = r.try_into().expect("lattice enumeration radius overflow");
    for i in -r..=r {
        for j in -r..=r {
            if int(i * i + j * j) <= *bound2 {
                out.push(LatticeVec::new(i, j));
            }
        }
    }
    out
}

/// Closed half-plane `{z : n·z + a ≥ 0}` with a lattice normal.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfPlane {
    pub n: LatticeVec,
    #[serde(with = "serde_rat")]
    pub a: Rat,
}

impl fmt::Debug for HalfPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x+{}y+{} >= 0", self.n.i, self.n.j, fmt_rat(&self.a))
    }
}

impl HalfPlane {
    pub fn new(n: LatticeVec, a: Rat) -> Self {
        HalfPlane { n, a }
    }

    pub fn eval(&self, z: &Point) -> Rat {
        self.n.apply(z) + &self.a
    }

    pub fn contains(&self, z: &Point) -> bool {
        !self.eval(z).is_negative()
    }

    /// Same set, primitive normal.
    pub fn normalized(&self) -> HalfPlane {
        let g = self.n.gcd();
        HalfPlane::new(self.n.primitive(), &self.a / int(g))
    }
}

/// Shoelace area of a polygon given by its vertex cycle (signed, ccw positive).
pub fn signed_area(poly: &[Point]) -> Rat {
    let mut s = Rat::zero();
    for k in 0..poly.len() {
        let p = &poly[k];
        let q = &poly[(k + 1) % poly.len()];
        s += p.cross(q);
    }
    s / int(2)
}

pub fn area(poly: &[Point]) -> Rat {
    signed_area(poly).abs()
}

/// Keeps the part of a convex polygon where the affine function `f` is
/// nonnegative. The result may be degenerate (segment or point) or empty.
pub fn clip_convex(poly: &[Point], f: impl Fn(&Point) -> Rat) -> Vec<Point> {
    let n = poly.len();
    if n == 0 {
        return Vec::new();
    }
    let vals: Vec<Rat> = poly.iter().map(&f).collect();
    if vals.iter().all(|v| !v.is_negative()) {
        return poly.to_vec();
    }
    let mut out: Vec<Point> = Vec::with_capacity(n + 1);
    for k in 0..n {
        let (p, fp) = (&poly[k], &vals[k]);
        let (q, fq) = (&poly[(k + 1) % n], &vals[(k + 1) % n]);
        if !fp.is_negative() {
            push_dedup(&mut out, p.clone());
        }
        if (fp.is_negative() && fq.is_positive()) || (fp.is_positive() && fq.is_negative()) {
            let t = fp / (fp - fq);
            push_dedup(&mut out, p.lerp(q, &t));
        }
    }
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

fn push_dedup(out: &mut Vec<Point>, p: Point) {
    if out.last() != Some(&p) {
        out.push(p);
    }
}

/// Intersection point of the boundary lines of two half-planes, if not parallel.
pub fn line_intersection(h: &HalfPlane, g: &HalfPlane) -> Option<Point> {
    let det = h.n.det(&g.n);
    if det == 0 {
        return None;
    }
    // n1·z = -a1, n2·z = -a2
    let d = int(det);
    let x = (-&h.a * int(g.n.j) + &g.a * int(h.n.j)) / &d;
    let y = (-&g.a * int(h.n.i) + &h.a * int(g.n.i)) / &d;
    Some(Point::new(x, y))
}

/// A ℚ-polygon: a closed intersection of finitely many rational half-planes
/// with nonempty interior. Half-planes are kept irredundant, with primitive
/// normals, sorted by normal angle.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPolygon", into = "RawPolygon")]
pub struct QPolygon {
    halfplanes: Vec<HalfPlane>,
    /// For bounded polygons: `vertices[k]` is the start of side `k` (ccw).
    /// For unbounded ones: all vertices, in boundary order.
    vertices: Vec<Point>,
    /// Extreme rays of the recession cone; empty iff bounded.
    rays: Vec<LatticeVec>,
}

#[derive(Serialize, Deserialize)]
struct RawPolygon {
    halfplanes: Vec<HalfPlane>,
}

impl TryFrom<RawPolygon> for QPolygon {
    type Error = Error;
    fn try_from(r: RawPolygon) -> Result<Self, Error> {
        QPolygon::new(r.halfplanes)
    }
}

impl From<QPolygon> for RawPolygon {
    fn from(p: QPolygon) -> Self {
        RawPolygon { halfplanes: p.halfplanes }
    }
}

impl fmt::Debug for QPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bounded() {
            write!(f, "QPolygon{:?}", self.vertices)
        } else {
            write!(f, "QPolygon{:?}", self.halfplanes)
        }
    }
}

impl QPolygon {
    pub fn new(halfplanes: Vec<HalfPlane>) -> Result<Self, Error> {
        if halfplanes.is_empty() {
            return Err(Error::InvalidDomain("empty half-plane list".into()));
        }
        if halfplanes.iter().any(|h| h.n.is_zero()) {
            return Err(Error::InvalidDomain("zero normal".into()));
        }
        // One half-plane per primitive normal, keeping the tightest.
        let mut hs: Vec<HalfPlane> = halfplanes.iter().map(HalfPlane::normalized).collect();
        hs.sort_by(|a, b| a.n.angle_cmp(&b.n).then_with(|| a.a.cmp(&b.a)));
        hs.dedup_by(|b, a| a.n == b.n);

        // Drop half-planes whose boundary line meets the region in at most a point.
        let keep: Vec<bool> = (0..hs.len())
            .map(|k| boundary_interval_has_length(&hs, k))
            .collect();
        let hs: Vec<HalfPlane> = hs
            .into_iter()
            .zip(keep)
            .filter_map(|(h, k)| k.then_some(h))
            .collect();
        if hs.is_empty() {
            return Err(Error::InvalidDomain("empty region".into()));
        }

        let rays = recession_rays(&hs);
        let vertices = if rays.is_empty() {
            let m = hs.len();
            if m < 3 {
                return Err(Error::InvalidDomain("empty interior".into()));
            }
            (0..m)
                .map(|k| line_intersection(&hs[(k + m - 1) % m], &hs[k]))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::InvalidDomain("empty interior".into()))?
        } else {
            let mut vs: Vec<Point> = Vec::new();
            for a in 0..hs.len() {
                for b in a + 1..hs.len() {
                    if let Some(z) = line_intersection(&hs[a], &hs[b]) {
                        if hs.iter().all(|h| h.contains(&z)) && !vs.contains(&z) {
                            vs.push(z);
                        }
                    }
                }
            }
            // boundary order: sort along the sum of the recession rays' normal
            let dir = rays.iter().fold(LatticeVec::ZERO, |acc, r| acc.add(r)).perp();
            vs.sort_by_key(|p| dir.apply(p));
            vs
        };
        let poly = QPolygon { halfplanes: hs, vertices, rays };
        let probe = poly.interior_probe();
        if !poly.strictly_contains(&probe) {
            return Err(Error::InvalidDomain("empty interior".into()));
        }
        Ok(poly)
    }

    /// Convex polygon through the given vertices (either orientation).
    pub fn from_vertices(pts: &[Point]) -> Result<Self, Error> {
        if pts.len() < 3 {
            return Err(Error::InvalidDomain("need at least three vertices".into()));
        }
        let sign = signed_area(pts);
        if sign.is_zero() {
            return Err(Error::InvalidDomain("degenerate vertex list".into()));
        }
        let mut hs = Vec::new();
        for k in 0..pts.len() {
            let (p, q) = (&pts[k], &pts[(k + 1) % pts.len()]);
            let d = q.sub(p);
            // inward normal for ccw is d rotated by +90°
            let (mut nx, mut ny) = (-d.y.clone(), d.x.clone());
            if sign.is_negative() {
                nx = -nx;
                ny = -ny;
            }
            let l = nx.denom().lcm(ny.denom());
            let nx = (nx * Rat::from_integer(l.clone())).to_integer();
            let ny = (ny * Rat::from_integer(l)).to_integer();
            let g = nx.gcd(&ny);
            let n = LatticeVec::new(
                i64::try_from(nx / &g).map_err(|_| Error::InvalidDomain("overflow".into()))?,
                i64::try_from(ny / &g).map_err(|_| Error::InvalidDomain("overflow".into()))?,
            );
            let a = -n.apply(p);
            hs.push(HalfPlane::new(n, a));
        }
        let poly = QPolygon::new(hs)?;
        if pts.iter().any(|p| !poly.contains(p)) || poly.vertices.len() != pts.len() {
            return Err(Error::InvalidDomain("vertex list is not strictly convex".into()));
        }
        Ok(poly)
    }

    pub fn lattice(pts: &[(i64, i64)]) -> Result<Self, Error> {
        let v: Vec<Point> = pts.iter().map(|&(x, y)| Point::from_ints(x, y)).collect();
        QPolygon::from_vertices(&v)
    }

    /// Axis-parallel rectangle `[x0,x1] × [y0,y1]`.
    pub fn rectangle(x0: Rat, y0: Rat, x1: Rat, y1: Rat) -> Result<Self, Error> {
        QPolygon::new(vec![
            HalfPlane::new(LatticeVec::new(1, 0), -x0),
            HalfPlane::new(LatticeVec::new(0, 1), -y0),
            HalfPlane::new(LatticeVec::new(-1, 0), x1),
            HalfPlane::new(LatticeVec::new(0, -1), y1),
        ])
    }

    pub fn unit_square() -> Self {
        QPolygon::rectangle(int(0), int(0), int(1), int(1)).expect("unit square")
    }

    pub fn halfplanes(&self) -> &[HalfPlane] {
        &self.halfplanes
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn recession_rays(&self) -> &[LatticeVec] {
        &self.rays
    }

    pub fn num_sides(&self) -> usize {
        self.halfplanes.len()
    }

    /// Endpoints of side `k` of a bounded polygon (ccw).
    pub fn side_segment(&self, k: usize) -> (Point, Point) {
        let m = self.vertices.len();
        (self.vertices[k].clone(), self.vertices[(k + 1) % m].clone())
    }

    pub fn contains(&self, z: &Point) -> bool {
        self.halfplanes.iter().all(|h| h.contains(z))
    }

    pub fn strictly_contains(&self, z: &Point) -> bool {
        self.halfplanes.iter().all(|h| h.eval(z).is_positive())
    }

    pub fn on_boundary(&self, z: &Point) -> bool {
        self.contains(z) && !self.strictly_contains(z)
    }

    pub fn area(&self) -> Option<Rat> {
        self.is_bounded().then(|| area(&self.vertices))
    }

    /// A point strictly inside.
    pub fn interior_probe(&self) -> Point {
        if self.vertices.is_empty() {
            // all normals parallel: a half-plane or a strip
            let n = self.halfplanes[0].n;
            let mut lo: Option<Rat> = None;
            let mut hi: Option<Rat> = None;
            for h in &self.halfplanes {
                let b = -&h.a;
                if h.n == n {
                    lo = Some(lo.map_or(b.clone(), |l: Rat| l.max(b.clone())));
                } else {
                    hi = Some(hi.map_or(-b.clone(), |u: Rat| u.min(-b.clone())));
                }
            }
            let t = match (lo, hi) {
                (Some(l), Some(u)) => (l + u) / int(2),
                (Some(l), None) => l + int(1),
                (None, Some(u)) => u - int(1),
                (None, None) => Rat::zero(),
            };
            return n.to_point().scale(&(t / int(n.norm2())));
        }
        let k = int(self.vertices.len() as i64);
        let mut c = self
            .vertices
            .iter()
            .fold(Point::origin(), |acc, v| acc.add(v))
            .scale(&(Rat::one() / k));
        for r in &self.rays {
            c = c.add(&r.to_point());
        }
        c
    }

    /// Corners (vertices) with their incident side normals.
    pub fn corners(&self) -> Vec<Corner> {
        if self.is_bounded() {
            let m = self.halfplanes.len();
            (0..m)
                .map(|k| Corner {
                    apex: self.vertices[k].clone(),
                    normals: (self.halfplanes[(k + m - 1) % m].n, self.halfplanes[k].n),
                    sides: ((k + m - 1) % m, k),
                })
                .collect()
        } else {
            self.vertices
                .iter()
                .map(|v| {
                    let active: Vec<usize> = (0..self.halfplanes.len())
                        .filter(|&k| self.halfplanes[k].eval(v).is_zero())
                        .collect();
                    let (a, b) = (active[0], *active.last().unwrap());
                    Corner {
                        apex: v.clone(),
                        normals: (self.halfplanes[a].n, self.halfplanes[b].n),
                        sides: (a, b),
                    }
                })
                .collect()
        }
    }

    /// Squared Euclidean distance from an interior point to the boundary.
    pub fn boundary_dist2(&self, z: &Point) -> Rat {
        self.halfplanes
            .iter()
            .map(|h| {
                let v = h.eval(z);
                &v * &v / int(h.n.norm2())
            })
            .min()
            .expect("nonempty")
    }

    /// Lattice distances `n_S·z + a_S` to every side.
    pub fn side_values(&self, z: &Point) -> Vec<Rat> {
        self.halfplanes.iter().map(|h| h.eval(z)).collect()
    }

    /// `inf_{z ∈ Δ} v·z`, or `None` when unbounded below.
    pub fn support_coeff(&self, v: &LatticeVec) -> Option<Rat> {
        if v.is_zero() {
            return Some(Rat::zero());
        }
        if self.rays.iter().any(|r| r.dot(v) < 0) {
            return None;
        }
        if !self.vertices.is_empty() {
            return self.vertices.iter().map(|z| v.apply(z)).min();
        }
        // parallel normals: v must be a multiple of them
        let n = self.halfplanes[0].n;
        if n.det(v) != 0 {
            return None;
        }
        let lambda = rat(v.dot(&n), n.norm2());
        let mut best: Option<Rat> = None;
        for h in &self.halfplanes {
            // h.n = ±n ; n·z ≥ -a (same) or n·z ≤ a (opposite)
            let same = h.n == n;
            if same == lambda.is_positive() {
                let bound = if same { -&h.a } else { h.a.clone() };
                let val = &lambda * bound;
                best = Some(best.map_or(val.clone(), |b| b.max(val)));
            }
        }
        best
    }

    /// Intersection with one more half-plane (must keep nonempty interior).
    pub fn intersect(&self, h: HalfPlane) -> Result<QPolygon, Error> {
        let mut hs = self.halfplanes.clone();
        hs.push(h);
        QPolygon::new(hs)
    }

    /// Vertex cycle of `Δ ∩ {f ≥ 0}` for an affine `f` (bounded polygons only).
    pub fn clip(&self, f: impl Fn(&Point) -> Rat) -> Vec<Point> {
        clip_convex(&self.vertices, f)
    }

    /// Scales the polygon about the origin by a positive factor.
    pub fn scaled(&self, s: &Rat) -> QPolygon {
        let hs = self
            .halfplanes
            .iter()
            .map(|h| HalfPlane::new(h.n, &h.a * s))
            .collect();
        QPolygon::new(hs).expect("scaling preserves validity")
    }
}

fn boundary_interval_has_length(hs: &[HalfPlane], k: usize) -> bool {
    let h = &hs[k];
    let d = h.n.perp();
    let z0 = h.n.to_point().scale(&(-&h.a / int(h.n.norm2())));
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    for (m, g) in hs.iter().enumerate() {
        if m == k {
            continue;
        }
        let g0 = g.eval(&z0);
        let slope = g.n.dot(&d);
        match slope.cmp(&0) {
            Ordering::Equal => {
                if g0.is_negative() {
                    return false;
                }
            }
            Ordering::Greater => {
                let s = -g0 / int(slope);
                lo = Some(lo.map_or(s.clone(), |l| l.max(s)));
            }
            Ordering::Less => {
                let s = -g0 / int(slope);
                hi = Some(hi.map_or(s.clone(), |u| u.min(s)));
            }
        }
    }
    match (lo, hi) {
        (Some(l), Some(u)) => l < u,
        _ => true,
    }
}

fn recession_rays(hs: &[HalfPlane]) -> Vec<LatticeVec> {
    let mut rays: BTreeSet<LatticeVec> = BTreeSet::new();
    for h in hs {
        for r in [h.n.perp(), h.n.perp().neg()] {
            if hs.iter().all(|g| g.n.dot(&r) >= 0) {
                rays.insert(r.primitive());
            }
        }
    }
    rays.into_iter().collect()
}

/// Support oracle for a general admissible convex domain.
pub type SupportFn = Arc<dyn Fn(&LatticeVec) -> Option<Rat> + Send + Sync>;

#[derive(Clone)]
pub struct OracleDomain {
    pub name: String,
    pub support: SupportFn,
    /// All enumerations of exponents are restricted to `|v| ≤ radius`.
    pub radius: i64,
}

impl fmt::Debug for OracleDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OracleDomain({}, N={})", self.name, self.radius)
    }
}

impl OracleDomain {
    /// The closed unit disk. Support values are exact when `i²+j²` is a
    /// perfect square and otherwise rounded down to denominator `den`, which
    /// keeps every certificate half-plane containing the disk.
    pub fn unit_disk(radius: i64, den: u64) -> Self {
        OracleDomain {
            name: "unit disk".into(),
            support: Arc::new(move |v: &LatticeVec| {
                Some(-crate::rat::sqrt_ceil(&int(v.norm2()), den))
            }),
            radius,
        }
    }

    /// The whole plane: only the zero exponent has finite support.
    pub fn plane(radius: i64) -> Self {
        OracleDomain {
            name: "plane".into(),
            support: Arc::new(|v: &LatticeVec| v.is_zero().then(Rat::zero)),
            radius,
        }
    }

    /// The segment `[(0,0),(1,0)]`: empty interior.
    pub fn unit_segment(radius: i64) -> Self {
        OracleDomain {
            name: "segment".into(),
            support: Arc::new(|v: &LatticeVec| Some(int(v.i.min(0)))),
            radius,
        }
    }
}

/// The domain Ω of a tropical series.
#[derive(Clone, Debug)]
pub enum ConvexDomain {
    Polygon(QPolygon),
    Oracle(OracleDomain),
}

impl From<QPolygon> for ConvexDomain {
    fn from(p: QPolygon) -> Self {
        ConvexDomain::Polygon(p)
    }
}

impl ConvexDomain {
    pub fn as_polygon(&self) -> Option<&QPolygon> {
        match self {
            ConvexDomain::Polygon(p) => Some(p),
            ConvexDomain::Oracle(_) => None,
        }
    }

    /// Bounded polygon or error.
    pub fn bounded_polygon(&self) -> Result<&QPolygon, Error> {
        match self {
            ConvexDomain::Polygon(p) if p.is_bounded() => Ok(p),
            _ => Err(Error::UnboundedDomain),
        }
    }

    /// Radius for exponent enumerations (`None` for polygons, which need none).
    pub fn truncation_radius(&self) -> Option<i64> {
        match self {
            ConvexDomain::Polygon(_) => None,
            ConvexDomain::Oracle(o) => Some(o.radius),
        }
    }
}

/// `c_v = inf_{z∈Ω} v·z`; `None` stands for −∞.
pub fn support_coeff(omega: &ConvexDomain, v: &LatticeVec) -> Option<Rat> {
    match omega {
        ConvexDomain::Polygon(p) => p.support_coeff(v),
        ConvexDomain::Oracle(o) => {
            if v.is_zero() {
                Some(Rat::zero())
            } else {
                (o.support)(v)
            }
        }
    }
}

/// Nonempty interior and some nonzero exponent with finite support.
pub fn is_admissible(omega: &ConvexDomain) -> bool {
    match omega {
        // QPolygon construction already guarantees a nonempty interior and at
        // least one half-plane, whose normal has finite support.
        ConvexDomain::Polygon(_) => true,
        ConvexDomain::Oracle(o) => {
            let vs = lattice_disk(&int(o.radius * o.radius));
            let mut some_finite = false;
            for v in &vs {
                if v.is_zero() {
                    continue;
                }
                if let Some(c) = (o.support)(v) {
                    some_finite = true;
                    // zero width in direction v means empty interior
                    if let Some(c_neg) = (o.support)(&v.neg()) {
                        if (&c + &c_neg).is_zero() {
                            return false;
                        }
                    }
                }
            }
            some_finite
        }
    }
}

/// All exponents that can take a value `≤ c` somewhere on the convex hull of
/// `k` while staying nonnegative on Ω. The returned set is a superset.
pub fn relevant_monomials(
    omega: &ConvexDomain,
    k: &[Point],
    c: &Rat,
) -> Result<BTreeSet<LatticeVec>, Error> {
    let finite = |v: &LatticeVec| support_coeff(omega, v).is_some();
    // squared distance from hull(k) to ∂Ω
    let r2: Option<Rat> = match omega {
        ConvexDomain::Polygon(p) => {
            if k.iter().any(|z| !p.strictly_contains(z)) {
                return Err(Error::DistanceZero);
            }
            Some(k.iter().map(|z| p.boundary_dist2(z)).min().expect("nonempty K"))
        }
        ConvexDomain::Oracle(o) => {
            let mut best: Option<Rat> = None;
            for v in lattice_disk(&int(o.radius * o.radius)) {
                if v.is_zero() {
                    continue;
                }
                if let Some(cv) = (o.support)(&v) {
                    for z in k {
                        let val = v.apply(z) - &cv;
                        if !val.is_positive() {
                            return Err(Error::DistanceZero);
                        }
                        let d2 = &val * &val / int(v.norm2());
                        best = Some(best.map_or(d2.clone(), |b: Rat| b.min(d2)));
                    }
                }
            }
            best
        }
    };
    let Some(r2) = r2 else {
        return Ok([LatticeVec::ZERO].into_iter().collect());
    };
    let bound2 = c * c / r2;
    Ok(lattice_disk(&bound2).into_iter().filter(finite).collect())
}

/// A polygon corner: apex and the inward normals of the two incident sides
/// (in ccw order for bounded polygons).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corner {
    pub apex: Point,
    pub normals: (LatticeVec, LatticeVec),
    /// Indices of the incident sides in the owning polygon.
    pub sides: (usize, usize),
}

impl Corner {
    pub fn is_unimodular(&self) -> bool {
        self.normals.0.primitive().det(&self.normals.1.primitive()).abs() == 1
    }
}

/// `v = α n₁ + β n₂` with `α, β ≥ 0`.
pub fn cone_lattice_contains(corner: &Corner, v: &LatticeVec) -> bool {
    cone_coordinates(corner, v).is_some_and(|(a, b)| !a.is_negative() && !b.is_negative())
}

/// Coordinates of `v` in the basis of the corner normals.
pub fn cone_coordinates(corner: &Corner, v: &LatticeVec) -> Option<(Rat, Rat)> {
    let (n1, n2) = corner.normals;
    let det = n1.det(&n2);
    if det == 0 {
        return None;
    }
    Some((rat(v.det(&n2), det), rat(n1.det(v), det)))
}

/// True iff every corner is unimodular.
pub fn is_unimodular(delta: &QPolygon) -> bool {
    delta.corners().iter().all(Corner::is_unimodular)
}

/// `Δ ∩ {v·(z − apex) ≥ ε}`, cutting exactly the given corner.
pub fn blow_up(delta: &QPolygon, corner: &Corner, v: &LatticeVec, eps: &Rat) -> Result<QPolygon, Error> {
    if !eps.is_positive() {
        return Err(Error::TooLarge);
    }
    match cone_coordinates(corner, v) {
        Some((a, b)) if a.is_positive() && b.is_positive() => {}
        _ => return Err(Error::BadDirection(v.to_string())),
    }
    let base = v.apply(&corner.apex);
    for z in delta.vertices() {
        if *z != corner.apex && v.apply(z) - &base <= *eps {
            return Err(Error::TooLarge);
        }
    }
    delta.intersect(HalfPlane::new(*v, -base - eps))
}

/// Convex hull of lattice points, ccw, without collinear points. Degenerate
/// inputs return their extreme points (one or two).
pub fn lattice_hull(pts: &[LatticeVec]) -> Vec<LatticeVec> {
    let mut ps: Vec<LatticeVec> = pts.to_vec();
    ps.sort();
    ps.dedup();
    if ps.len() <= 2 {
        return ps;
    }
    let turn = |o: &LatticeVec, a: &LatticeVec, b: &LatticeVec| a.sub(o).det(&b.sub(o));
    let mut lower: Vec<LatticeVec> = Vec::new();
    for p in &ps {
        while lower.len() >= 2 && turn(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<LatticeVec> = Vec::new();
    for p in ps.iter().rev() {
        while upper.len() >= 2 && turn(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// All lattice points of the convex hull of `pts`.
pub fn lattice_points_in_hull(pts: &[LatticeVec]) -> Vec<LatticeVec> {
    let hull = lattice_hull(pts);
    match hull.len() {
        0 => Vec::new(),
        1 => hull,
        2 => {
            let d = hull[1].sub(&hull[0]);
            let g = d.gcd();
            let step = d.primitive();
            (0..=g).map(|k| hull[0].add(&step.scale(k))).collect()
        }
        _ => {
            let (lo_i, hi_i) = (hull.iter().map(|p| p.i).min().unwrap(), hull.iter().map(|p| p.i).max().unwrap());
            let (lo_j, hi_j) = (hull.iter().map(|p| p.j).min().unwrap(), hull.iter().map(|p| p.j).max().unwrap());
            let mut out = Vec::new();
            for i in lo_i..=hi_i {
                for j in lo_j..=hi_j {
                    let q = LatticeVec::new(i, j);
                    let inside = (0..hull.len()).all(|k| {
                        let (a, b) = (&hull[k], &hull[(k + 1) % hull.len()]);
                        b.sub(a).det(&q.sub(a)) >= 0
                    });
                    if inside {
                        out.push(q);
                    }
                }
            }
            out
        }
    }
}

/// Twice the area of the lattice hull (an integer).
pub fn lattice_hull_area2(pts: &[LatticeVec]) -> i64 {
    let h = lattice_hull(pts);
    if h.len() < 3 {
        return 0;
    }
    (0..h.len()).map(|k| h[k].det(&h[(k + 1) % h.len()])).sum::<i64>().abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(pts: &[(i64, i64)]) -> QPolygon {
        QPolygon::lattice(pts).unwrap()
    }

    #[test]
    fn square_support_coefficients() {
        let sq: ConvexDomain = QPolygon::unit_square().into();
        assert_eq!(support_coeff(&sq, &LatticeVec::new(1, 0)), Some(int(0)));
        assert_eq!(support_coeff(&sq, &LatticeVec::new(-1, 0)), Some(int(-1)));
        assert_eq!(support_coeff(&sq, &LatticeVec::new(-2, 3)), Some(int(-2)));
    }

    #[test]
    fn disk_support_matches_circle_sampling() {
        // rational points ((1-s²)/(1+s²), 2s/(1+s²)) lie exactly on the circle
        let v = LatticeVec::new(3, 4);
        let mut best: Option<Rat> = None;
        for k in -400..=400 {
            let s = rat(k, 100);
            let den = int(1) + &s * &s;
            let p = Point::new((int(1) - &s * &s) / &den, int(2) * &s / &den);
            let val = v.apply(&p);
            best = Some(best.map_or(val.clone(), |b: Rat| b.min(val)));
        }
        let disk = ConvexDomain::Oracle(OracleDomain::unit_disk(8, 1000));
        assert_eq!(support_coeff(&disk, &v), best);
        assert_eq!(best, Some(int(-5)));
    }

    #[test]
    fn admissibility() {
        assert!(is_admissible(&QPolygon::unit_square().into()));
        assert!(!is_admissible(&ConvexDomain::Oracle(OracleDomain::plane(5))));
        assert!(!is_admissible(&ConvexDomain::Oracle(OracleDomain::unit_segment(5))));
        assert!(is_admissible(&ConvexDomain::Oracle(OracleDomain::unit_disk(5, 100))));
    }

    #[test]
    fn polygon_validation() {
        // a line segment as a polygon has empty interior
        let seg = QPolygon::new(vec![
            HalfPlane::new(LatticeVec::new(0, 1), int(0)),
            HalfPlane::new(LatticeVec::new(0, -1), int(0)),
            HalfPlane::new(LatticeVec::new(1, 0), int(0)),
            HalfPlane::new(LatticeVec::new(-1, 0), int(1)),
        ]);
        assert!(seg.is_err());
        // redundant constraints are dropped
        let p = QPolygon::new(vec![
            HalfPlane::new(LatticeVec::new(1, 0), int(0)),
            HalfPlane::new(LatticeVec::new(2, 0), int(1)),
            HalfPlane::new(LatticeVec::new(0, 1), int(0)),
            HalfPlane::new(LatticeVec::new(-1, 0), int(1)),
            HalfPlane::new(LatticeVec::new(0, -1), int(1)),
            HalfPlane::new(LatticeVec::new(-1, -1), int(5)),
        ])
        .unwrap();
        assert_eq!(p, QPolygon::unit_square());
        assert_eq!(p.area(), Some(int(1)));
    }

    #[test]
    fn unbounded_polygons() {
        let quadrant = QPolygon::new(vec![
            HalfPlane::new(LatticeVec::new(1, 0), int(0)),
            HalfPlane::new(LatticeVec::new(0, 1), int(0)),
        ])
        .unwrap();
        assert!(!quadrant.is_bounded());
        assert_eq!(quadrant.support_coeff(&LatticeVec::new(2, 3)), Some(int(0)));
        assert_eq!(quadrant.support_coeff(&LatticeVec::new(-1, 3)), None);
        let strip = QPolygon::new(vec![
            HalfPlane::new(LatticeVec::new(0, 1), int(0)),
            HalfPlane::new(LatticeVec::new(0, -1), int(2)),
        ])
        .unwrap();
        assert_eq!(strip.support_coeff(&LatticeVec::new(0, -3)), Some(int(-6)));
        assert_eq!(strip.support_coeff(&LatticeVec::new(1, 1)), None);
    }

    #[test]
    fn relevant_monomials_contains_brute_force_set() {
        let sq: ConvexDomain = QPolygon::unit_square().into();
        let k = [Point::new(rat(1, 2), rat(1, 2))];
        let set = relevant_monomials(&sq, &k, &rat(1, 2)).unwrap();
        // brute force: v with v·p - c_v ≤ 1/2 for v in a big box
        for i in -6i64..=6 {
            for j in -6i64..=6 {
                let v = LatticeVec::new(i, j);
                let c = sq.as_polygon().unwrap().support_coeff(&v).unwrap();
                if v.apply(&k[0]) - c <= rat(1, 2) {
                    assert!(set.contains(&v), "missing {v}");
                }
            }
        }
        for v in [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)] {
            assert!(set.contains(&LatticeVec::new(v.0, v.1)));
        }
        let tiny = relevant_monomials(&sq, &k, &rat(1, 100)).unwrap();
        assert_eq!(tiny.into_iter().collect::<Vec<_>>(), vec![LatticeVec::ZERO]);
        let plane = ConvexDomain::Oracle(OracleDomain::plane(4));
        let m = relevant_monomials(&plane, &k, &int(3)).unwrap();
        assert_eq!(m.into_iter().collect::<Vec<_>>(), vec![LatticeVec::ZERO]);
        let edge = [Point::new(int(0), rat(1, 2))];
        assert_eq!(relevant_monomials(&sq, &edge, &int(1)), Err(Error::DistanceZero));
    }

    #[test]
    fn unimodularity() {
        assert!(is_unimodular(&QPolygon::unit_square()));
        assert!(is_unimodular(&tri(&[(0, 0), (1, 0), (0, 1)])));
        let t = tri(&[(0, 0), (2, 0), (0, 1)]);
        assert!(!is_unimodular(&t));
        for c in t.corners() {
            let expect = c.apex != Point::from_ints(0, 1);
            assert_eq!(c.is_unimodular(), expect, "corner {:?}", c.apex);
        }
    }

    #[test]
    fn cone_membership() {
        let c = Corner {
            apex: Point::origin(),
            normals: (LatticeVec::new(1, 0), LatticeVec::new(0, 1)),
            sides: (0, 1),
        };
        assert!(cone_lattice_contains(&c, &LatticeVec::new(2, 3)));
        assert!(!cone_lattice_contains(&c, &LatticeVec::new(-1, 2)));
        let c2 = Corner { normals: (LatticeVec::new(1, 0), LatticeVec::new(1, 2)), ..c };
        assert!(cone_lattice_contains(&c2, &LatticeVec::new(1, 1)));
        assert!(!cone_lattice_contains(&c2, &LatticeVec::new(0, 1)));
    }

    #[test]
    fn blow_ups() {
        let sq = QPolygon::unit_square();
        let corner = sq.corners().into_iter().find(|c| c.apex == Point::origin()).unwrap();
        let cut = blow_up(&sq, &corner, &LatticeVec::new(1, 1), &rat(1, 4)).unwrap();
        assert_eq!(cut.num_sides(), 5);
        assert!(cut.halfplanes().contains(&HalfPlane::new(LatticeVec::new(1, 1), rat(-1, 4))));
        assert!(!cut.contains(&Point::origin()));
        let cut2 = blow_up(&sq, &corner, &LatticeVec::new(1, 2), &rat(1, 8)).unwrap();
        assert!(cut2.contains(&Point::new(rat(1, 8), int(0))));
        assert!(!cut2.contains(&Point::new(rat(1, 9), int(0))));
        assert!(matches!(
            blow_up(&sq, &corner, &LatticeVec::new(-1, 0), &rat(1, 4)),
            Err(Error::BadDirection(_))
        ));
        assert_eq!(blow_up(&sq, &corner, &LatticeVec::new(1, 1), &int(1)), Err(Error::TooLarge));
    }

    #[test]
    fn hull_lattice_points() {
        let pts = [LatticeVec::new(0, 0), LatticeVec::new(2, 0), LatticeVec::new(0, 2), LatticeVec::new(1, 0)];
        assert_eq!(lattice_hull(&pts).len(), 3);
        assert_eq!(lattice_points_in_hull(&pts).len(), 6);
        assert_eq!(lattice_hull_area2(&pts), 4);
        let seg = [LatticeVec::new(0, 0), LatticeVec::new(3, 3)];
        assert_eq!(lattice_points_in_hull(&seg).len(), 4);
    }

    #[test]
    fn clipping_keeps_degenerate_pieces() {
        let sq = QPolygon::unit_square();
        let half = sq.clip(|z| rat(1, 2) - &z.x);
        assert_eq!(area(&half), rat(1, 2));
        let line = sq.clip(|z| -z.x.clone());
        assert_eq!(line.len(), 2);
        let none = sq.clip(|z| -z.x.clone() - int(1));
        assert!(none.is_empty());
    }
}
