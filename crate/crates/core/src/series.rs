//! Tropical series on convex domains, stored in small canonical form.
//!
//! A series is a finite map `exponent → coefficient`; the function it
//! presents is the minimum of the affine forms `i x + j y + a`. Every stored
//! coefficient is canonical (as small as possible on the domain) and every
//! stored monomial attains the minimum at some interior point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{
    self, area, clip_convex, is_unimodular, lattice_disk, lattice_points_in_hull, support_coeff,
    ConvexDomain, LatticeVec, QPolygon,
};
use crate::rat::{fmt_rat, int, serde_rat, Point, Rat};

/// Dominance region of one monomial.
#[derive(Clone, Debug)]
pub struct Cell {
    pub exp: LatticeVec,
    pub coeff: Rat,
    pub(crate) approx_coeff: f64,
    /// Vertex cycle (ccw) of the closed region where this monomial is minimal.
    pub polygon: Vec<Point>,
}

/// Linearity decomposition of a series on a bounded polygon.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub cells: Vec<Cell>,
    /// Distinct vertices of all cells with the value of the series there.
    pub vertices: Vec<(Point, Rat)>,
    approx: Vec<(f64, f64, f64)>,
}

impl Subdivision {
    /// Floating point lower estimate of the canonical coefficient of `w`
    /// (exact up to rounding).
    pub fn approx_canonical(&self, w: &LatticeVec) -> f64 {
        let (wi, wj) = (w.i as f64, w.j as f64);
        self.approx
            .iter()
            .map(|(x, y, f)| f - wi * x - wj * y)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn cell(&self, v: &LatticeVec) -> Option<&Cell> {
        self.cells.iter().find(|c| c.exp == *v)
    }

    pub fn max_value(&self) -> Rat {
        self.vertices.iter().map(|(_, f)| f.clone()).max().unwrap_or_else(Rat::zero)
    }
}

/// Per-side multiplicities `m_f(S)` in the order of the polygon's sides.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuasiDegree(pub Vec<u64>);

impl QuasiDegree {
    /// Every side with multiplicity above one has both neighbours at one.
    pub fn is_nice(&self) -> bool {
        let m = self.0.len();
        (0..m).all(|k| self.0[k] <= 1 || (self.0[(k + m - 1) % m] == 1 && self.0[(k + 1) % m] == 1))
    }
}

#[derive(Clone)]
pub struct TropicalSeries {
    domain: ConvexDomain,
    support: BTreeMap<LatticeVec, Rat>,
    truncated: bool,
    sub: OnceLock<Arc<Subdivision>>,
}

impl PartialEq for TropicalSeries {
    fn eq(&self, o: &Self) -> bool {
        let same_domain = match (&self.domain, &o.domain) {
            (ConvexDomain::Polygon(a), ConvexDomain::Polygon(b)) => a == b,
            (ConvexDomain::Oracle(a), ConvexDomain::Oracle(b)) => a.name == b.name && a.radius == b.radius,
            _ => false,
        };
        same_domain && self.support == o.support
    }
}

impl Eq for TropicalSeries {}

impl fmt::Debug for TropicalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Formats `i x + j y + a` as e.g. `x+2/15`, `1-x`, `2x`.
pub fn format_monomial(v: &LatticeVec, a: &Rat) -> String {
    let mut s = String::new();
    let term = |s: &mut String, k: i64, name: &str| {
        if k == 0 {
            return;
        }
        if k < 0 {
            s.push('-');
        } else if !s.is_empty() {
            s.push('+');
        }
        if k.abs() != 1 {
            s.push_str(&k.abs().to_string());
        }
        s.push_str(name);
    };
    if !a.is_zero() || v.is_zero() {
        s.push_str(&fmt_rat(a));
    }
    term(&mut s, v.i, "x");
    term(&mut s, v.j, "y");
    s
}

impl fmt::Display for TropicalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.support.iter().map(|(v, a)| format_monomial(v, a)).collect();
        write!(f, "min({})", terms.join(", "))
    }
}

impl TropicalSeries {
    /// Validates and normalizes a presentation on a bounded polygon.
    /// Repeated exponents keep their smallest coefficient.
    pub fn new(
        domain: impl Into<ConvexDomain>,
        monomials: impl IntoIterator<Item = (LatticeVec, Rat)>,
    ) -> Result<Self, Error> {
        let domain = domain.into();
        let poly = domain.bounded_polygon()?.clone();
        let mut cand: BTreeMap<LatticeVec, Rat> = BTreeMap::new();
        for (v, a) in monomials {
            match cand.get(&v) {
                Some(b) if *b <= a => {}
                _ => {
                    cand.insert(v, a);
                }
            }
        }
        if cand.is_empty() {
            return Err(Error::InvalidSeries("empty support".into()));
        }
        for (v, a) in &cand {
            if poly.vertices().iter().any(|z| (v.apply(z) + a).is_negative()) {
                return Err(Error::InvalidSeries(format!(
                    "monomial {} is negative on the domain",
                    format_monomial(v, a)
                )));
            }
        }
        let (support, sub) = normalize(&poly, &cand);
        let f = TropicalSeries::from_normalized(domain, support, sub);
        f.quasi_degree()?;
        Ok(f)
    }

    fn from_normalized(domain: ConvexDomain, support: BTreeMap<LatticeVec, Rat>, sub: Subdivision) -> Self {
        let cell = OnceLock::new();
        let _ = cell.set(Arc::new(sub));
        TropicalSeries { domain, support, truncated: false, sub: cell }
    }

    /// Convenience constructor from `(i, j, a)` triples.
    pub fn from_triples(domain: impl Into<ConvexDomain>, terms: &[(i64, i64, Rat)]) -> Result<Self, Error> {
        TropicalSeries::new(domain, terms.iter().map(|(i, j, a)| (LatticeVec::new(*i, *j), a.clone())))
    }

    /// The zero series `0_Δ`.
    pub fn zero(domain: &QPolygon) -> Self {
        TropicalSeries::new(domain.clone(), [(LatticeVec::ZERO, Rat::zero())]).expect("zero series is valid")
    }

    /// The weighted distance function `l_Ω`.
    ///
    /// For a polygon every monomial that can be minimal somewhere has norm at
    /// most the largest side-normal norm: a form `v·z − c_v` is at least
    /// `|v|·dist(z, ∂Ω)` while the nearest side form is `|n_S|·dist(z, ∂Ω)`.
    /// For oracle domains the enumeration stops at the oracle radius and the
    /// result is flagged as truncated.
    pub fn distance_function(omega: &ConvexDomain) -> Result<Self, Error> {
        if !geometry::is_admissible(omega) {
            return Err(Error::NotAdmissible);
        }
        match omega {
            ConvexDomain::Polygon(_) => {
                let p = omega.bounded_polygon()?;
                let r2 = p.halfplanes().iter().map(|h| h.n.norm2()).max().expect("sides");
                let mons = lattice_disk(&int(r2))
                    .into_iter()
                    .filter(|v| !v.is_zero())
                    .filter_map(|v| p.support_coeff(&v).map(|c| (v, -c)));
                TropicalSeries::new(omega.clone(), mons)
            }
            ConvexDomain::Oracle(o) => {
                let support: BTreeMap<LatticeVec, Rat> = lattice_disk(&int(o.radius * o.radius))
                    .into_iter()
                    .filter(|v| !v.is_zero())
                    .filter_map(|v| support_coeff(omega, &v).map(|c| (v, -c)))
                    .collect();
                Ok(TropicalSeries { domain: omega.clone(), support, truncated: true, sub: OnceLock::new() })
            }
        }
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn polygon(&self) -> Result<&QPolygon, Error> {
        self.domain.bounded_polygon()
    }

    pub fn support(&self) -> &BTreeMap<LatticeVec, Rat> {
        &self.support
    }

    pub fn coeff(&self, v: &LatticeVec) -> Option<&Rat> {
        self.support.get(v)
    }

    /// True for oracle domains, where the support was cut at the oracle radius
    /// and boundary vanishing is not verified.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Minimum of the stored forms, without a domain check.
    pub fn value(&self, z: &Point) -> Rat {
        self.support
            .iter()
            .map(|(v, a)| v.apply(z) + a)
            .min()
            .expect("nonempty support")
    }

    pub fn value_f64(&self, x: f64, y: f64) -> f64 {
        self.support
            .iter()
            .map(|(v, a)| v.i as f64 * x + v.j as f64 * y + crate::rat::to_f64(a))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn eval(&self, z: &Point) -> Result<Rat, Error> {
        let inside = match &self.domain {
            ConvexDomain::Polygon(p) => p.contains(z),
            ConvexDomain::Oracle(o) => lattice_disk(&int(o.radius * o.radius))
                .iter()
                .all(|v| (o.support)(v).is_none_or(|c| v.apply(z) >= c)),
        };
        if !inside {
            return Err(Error::OutsideDomain(z.to_string()));
        }
        Ok(self.value(z))
    }

    /// The linearity decomposition (bounded polygon domains only).
    pub fn subdivision(&self) -> Arc<Subdivision> {
        self.sub
            .get_or_init(|| {
                let poly = self.polygon().expect("subdivision needs a bounded polygon");
                Arc::new(normalize(poly, &self.support).1)
            })
            .clone()
    }

    /// Monomials with a positive-area cell that attain the minimum at `z`.
    pub fn active_monomials(&self, z: &Point) -> Vec<LatticeVec> {
        let sub = self.subdivision();
        envelope_at(&sub.cells, z).1.into_iter().map(|c| c.exp).collect()
    }

    /// `sup_{z∈Ω} (f(z) − v·z)`.
    pub fn canonical_coefficient(&self, v: &LatticeVec) -> Result<Rat, Error> {
        if support_coeff(&self.domain, v).is_none() {
            return Err(Error::UnboundedMonomial(v.to_string()));
        }
        self.polygon()?;
        let sub = self.subdivision();
        let vals: Vec<(f64, f64)> = sub
            .approx
            .iter()
            .map(|(x, y, f)| {
                let (a, t) = approx_form(v, 0.0, *x, *y);
                (f - a, t + 1e-9 * f.abs())
            })
            .collect();
        let best = vals.iter().map(|(a, t)| a - t).fold(f64::NEG_INFINITY, f64::max);
        Ok(sub
            .vertices
            .iter()
            .zip(&vals)
            .filter(|(_, (a, t))| a + t >= best)
            .map(|((z, f), _)| f - v.apply(z))
            .max()
            .expect("vertices"))
    }

    pub fn max_value(&self) -> Rat {
        self.subdivision().max_value()
    }

    /// `m_f(S)` for every side of the polygon.
    pub fn quasi_degree(&self) -> Result<QuasiDegree, Error> {
        let poly = self.polygon()?;
        let mut out = Vec::with_capacity(poly.num_sides());
        for (k, h) in poly.halfplanes().iter().enumerate() {
            let (a, b) = poly.side_segment(k);
            let m = self
                .support
                .iter()
                .find(|(v, c)| (v.apply(&a) + *c).is_zero() && (v.apply(&b) + *c).is_zero())
                .map(|(v, _)| v);
            match m {
                // the zero series has no side monomial; record multiplicity 0
                Some(v) if v.is_zero() => out.push(0),
                Some(v) if v.det(&h.n) == 0 && v.dot(&h.n) > 0 => out.push((v.gcd() / h.n.gcd()) as u64),
                _ => return Err(Error::BoundaryMismatch(k)),
            }
        }
        Ok(QuasiDegree(out))
    }

    /// Unimodular polygon and nice quasi-degree.
    pub fn is_nice(&self) -> bool {
        match (self.polygon(), self.quasi_degree()) {
            (Ok(p), Ok(d)) => is_unimodular(p) && d.is_nice(),
            _ => false,
        }
    }

    /// Squared radius bounding every exponent that can become minimal after
    /// raising `v` (see `distance_function` for the estimate).
    pub(crate) fn enumeration_bound2(&self, v: &LatticeVec) -> Result<i64, Error> {
        let poly = self.polygon()?;
        let qd = self.quasi_degree()?;
        let mut best = 0;
        for (h, m) in poly.halfplanes().iter().zip(&qd.0) {
            let mut k = (*m as i64).max(1);
            if h.n.scale(k) == *v {
                k += 1;
            }
            best = best.max(k * k * h.n.norm2());
        }
        Ok(best)
    }

    /// Canonical monomials outside the support that are strictly below `bound`
    /// at some point of `region` (vertex cycle), with their canonical
    /// coefficients. `bound` is affine, so testing vertices suffices.
    pub(crate) fn canonical_monomials_below(
        &self,
        radius2: i64,
        skip: &LatticeVec,
        region: &[Point],
        bound: impl Fn(&Point) -> Rat + Sync,
    ) -> Vec<(LatticeVec, Rat)> {
        let sub = self.subdivision();
        let approx_region: Vec<(f64, f64, f64)> = region
            .iter()
            .map(|z| {
                let (x, y) = z.to_f64();
                (x, y, crate::rat::to_f64(&bound(z)))
            })
            .collect();
        let scale = 1.0
            + approx_region.iter().map(|t| t.2.abs()).fold(0.0, f64::max)
            + sub.approx.iter().map(|t| t.2.abs() + t.0.abs() + t.1.abs()).fold(0.0, f64::max);
        let tol = 1e-7 * scale * (1.0 + (radius2 as f64).sqrt());
        let candidates: Vec<LatticeVec> = lattice_disk(&int(radius2))
            .into_iter()
            .filter(|w| w != skip && !self.support.contains_key(w))
            .filter(|w| {
                let c = sub.approx_canonical(w);
                approx_region
                    .iter()
                    .any(|(x, y, b)| w.i as f64 * x + w.j as f64 * y + c < b + tol)
            })
            .collect();
        let check = |w: &LatticeVec| {
            let c = self.canonical_coefficient(w).ok()?;
            region.iter().any(|z| w.apply(z) + &c < bound(z)).then_some((*w, c))
        };
        crate::par::filter_map(&candidates, check)
    }

    /// `Add^c_v f`: raise the canonical coefficient of `v` by `c`.
    pub fn add_monomial(&self, v: &LatticeVec, c: &Rat) -> Result<TropicalSeries, Error> {
        if c.is_negative() {
            return Err(Error::NegativeIncrement);
        }
        let poly = self.polygon()?.clone();
        if support_coeff(&self.domain, v).is_none() {
            return Err(Error::UnboundedMonomial(v.to_string()));
        }
        let sub = self.subdivision();
        let Some(cell) = sub.cell(v) else {
            // a monomial without a cell does not shape the function
            return Ok(self.clone());
        };
        if c.is_zero() {
            return Ok(self.clone());
        }
        let raised = &cell.coeff + c;
        let extra = self.monomials_below_raised(v, &raised)?;
        Ok(self.raise_with(&poly, v, raised, &extra))
    }

    /// Canonical monomials outside the support that undercut `v` raised to
    /// coefficient `raised` somewhere on the cell of `v`.
    pub(crate) fn monomials_below_raised(&self, v: &LatticeVec, raised: &Rat) -> Result<Vec<(LatticeVec, Rat)>, Error> {
        let sub = self.subdivision();
        let cell = sub.cell(v).ok_or_else(|| Error::InvalidSeries(format!("{v} has no cell")))?;
        let r2 = self.enumeration_bound2(v)?;
        Ok(self.canonical_monomials_below(r2, v, &cell.polygon, |z| v.apply(z) + raised))
    }

    /// `min(v + raised, others)` where `extra` must contain every canonical
    /// monomial that matters below the raised form.
    pub(crate) fn raise_with(
        &self,
        poly: &QPolygon,
        v: &LatticeVec,
        raised: Rat,
        extra: &[(LatticeVec, Rat)],
    ) -> TropicalSeries {
        let mut cand = self.support.clone();
        cand.insert(*v, raised);
        cand.extend(extra.iter().cloned());
        let (support, sub) = normalize(poly, &cand);
        TropicalSeries::from_normalized(self.domain.clone(), support, sub)
    }

    /// Pointwise sum (the tropical product) of two series on the same domain.
    pub fn pointwise_sum(&self, g: &TropicalSeries) -> Result<TropicalSeries, Error> {
        let poly = self.polygon()?;
        if poly != g.polygon()? {
            return Err(Error::DomainMismatch);
        }
        let mut cand: BTreeMap<LatticeVec, Rat> = BTreeMap::new();
        for (u, a) in &self.support {
            for (w, b) in &g.support {
                let e = u.add(w);
                let c = a + b;
                match cand.get(&e) {
                    Some(old) if *old <= c => {}
                    _ => {
                        cand.insert(e, c);
                    }
                }
            }
        }
        let (support, sub) = normalize(poly, &cand);
        Ok(TropicalSeries::from_normalized(self.domain.clone(), support, sub))
    }

    /// `min(f, c)` for a constant `c ≥ 0`.
    pub fn clamp(&self, c: &Rat) -> Result<TropicalSeries, Error> {
        let poly = self.polygon()?;
        let mut cand = self.support.clone();
        let e = cand.entry(LatticeVec::ZERO).or_insert_with(|| c.clone());
        if *c < *e {
            *e = c.clone();
        }
        let (support, sub) = normalize(poly, &cand);
        Ok(TropicalSeries::from_normalized(self.domain.clone(), support, sub))
    }

    /// The series presented by `self` minus a constant, on a new domain.
    /// Used for restrictions to level sets; validated like `new`.
    pub fn restrict_shifted(&self, domain: &QPolygon, shift: &Rat) -> Result<TropicalSeries, Error> {
        TropicalSeries::new(domain.clone(), self.support.iter().map(|(v, a)| (*v, a - shift)))
    }

    pub fn to_json(&self) -> Result<String, Error> {
        let raw = RawSeries::from_series(self)?;
        Ok(serde_json::to_string_pretty(&raw).expect("serializable"))
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        let raw: RawSeries = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        raw.into_series()
    }
}

impl Serialize for TropicalSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawSeries::from_series(self).map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TropicalSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        RawSeries::deserialize(d)?.into_series().map_err(serde::de::Error::custom)
    }
}

/// `ρ(f, g)`: the largest difference of canonical coefficients.
pub fn rho(f: &TropicalSeries, g: &TropicalSeries) -> Result<Rat, Error> {
    if f.polygon()? != g.polygon()? {
        return Err(Error::DomainMismatch);
    }
    let keys: BTreeSet<&LatticeVec> = f.support.keys().chain(g.support.keys()).collect();
    let mut best = Rat::zero();
    for v in keys {
        let d = (f.canonical_coefficient(v)? - g.canonical_coefficient(v)?).abs();
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

/// Floating-point value of `e·(x, y) + c` together with a bound on its
/// rounding error. Used only to skip exact work whose outcome is certain.
#[inline]
pub(crate) fn approx_form(e: &LatticeVec, c: f64, x: f64, y: f64) -> (f64, f64) {
    let (a, b) = (e.i as f64 * x, e.j as f64 * y);
    (a + b + c, 1e-9 * (1.0 + a.abs() + b.abs() + c.abs()))
}

fn approx_point(z: &Point) -> (f64, f64) {
    z.to_f64()
}

fn clip_f64(poly: &[(f64, f64)], f: impl Fn(f64, f64) -> f64) -> Vec<(f64, f64)> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..n {
        let (p, q) = (poly[k], poly[(k + 1) % n]);
        let (fp, fq) = (f(p.0, p.1), f(q.0, q.1));
        if fp >= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
        }
    }
    out
}

/// Exact minimum of the cells' forms at `z`, and the cells attaining it.
fn envelope_at<'a>(cells: &'a [Cell], z: &Point) -> (Rat, Vec<&'a Cell>) {
    let (x, y) = approx_point(z);
    let vals: Vec<(f64, f64)> = cells.iter().map(|c| approx_form(&c.exp, c.approx_coeff, x, y)).collect();
    let best = vals.iter().map(|(v, t)| v + t).fold(f64::INFINITY, f64::min);
    let mut min: Option<Rat> = None;
    let mut near: Vec<(&Cell, Rat)> = Vec::new();
    for (c, (v, t)) in cells.iter().zip(&vals) {
        if v - t <= best {
            let e = c.exp.apply(z) + &c.coeff;
            if min.as_ref().is_none_or(|m| e < *m) {
                min = Some(e.clone());
            }
            near.push((c, e));
        }
    }
    let min = min.expect("cells cover the domain");
    let act = near.into_iter().filter(|(_, e)| *e == min).map(|(c, _)| c).collect();
    (min, act)
}

/// Small canonical form and linearity decomposition of `min(cand)` on `poly`.
fn normalize(poly: &QPolygon, cand: &BTreeMap<LatticeVec, Rat>) -> (BTreeMap<LatticeVec, Rat>, Subdivision) {
    let entries: Vec<(&LatticeVec, &Rat, f64)> =
        cand.iter().map(|(v, a)| (v, a, a.to_f64().unwrap_or(f64::NAN))).collect();
    let base: Vec<(f64, f64)> = poly.vertices().iter().map(approx_point).collect();
    let cell_of = |idx: &usize| -> Option<Cell> {
        let (u, au, fu) = entries[*idx];
        // 1. float clip to find the constraints that probably bind
        let mut region = base.clone();
        let mut binding = vec![false; entries.len()];
        for (m, (w, _, fw)) in entries.iter().enumerate() {
            if m == *idx {
                continue;
            }
            let d = w.sub(u);
            let off = fw - fu;
            if region.iter().all(|&(x, y)| {
                let (v, t) = approx_form(&d, off, x, y);
                v >= t
            }) {
                continue;
            }
            binding[m] = true;
            region = clip_f64(&region, |x, y| approx_form(&d, off, x, y).0);
        }
        // keep only constraints that are nearly tight on the final float region
        if region.len() >= 3 {
            for (m, (w, _, fw)) in entries.iter().enumerate() {
                if binding[m] {
                    let d = w.sub(u);
                    let off = fw - fu;
                    binding[m] = region.iter().any(|&(x, y)| {
                        let (v, t) = approx_form(&d, off, x, y);
                        v <= 1e3 * t
                    });
                }
            }
        }
        // 2. exact clip by those
        let mut exact = poly.vertices().to_vec();
        for (m, (w, aw, _)) in entries.iter().enumerate() {
            if !binding[m] {
                continue;
            }
            let d = w.sub(u);
            let off = *aw - au;
            exact = clip_convex(&exact, |z| d.apply(z) + &off);
            if exact.len() < 3 {
                return None;
            }
        }
        // 3. certify the remaining constraints, clipping if one fails
        loop {
            let approx: Vec<(f64, f64)> = exact.iter().map(approx_point).collect();
            let mut changed = false;
            for (m, (w, aw, fw)) in entries.iter().enumerate() {
                if m == *idx || binding[m] {
                    continue;
                }
                let d = w.sub(u);
                let off = fw - fu;
                let sure = approx.iter().all(|&(x, y)| {
                    let (v, t) = approx_form(&d, off, x, y);
                    v >= t
                });
                if sure {
                    continue;
                }
                let off = *aw - au;
                if exact.iter().any(|z| (d.apply(z) + &off).is_negative()) {
                    exact = clip_convex(&exact, |z| d.apply(z) + &off);
                    binding[m] = true;
                    changed = true;
                    if exact.len() < 3 {
                        return None;
                    }
                    break;
                }
            }
            if !changed {
                break;
            }
        }
        area(&exact).is_positive().then(|| Cell {
            exp: *u,
            coeff: au.clone(),
            approx_coeff: fu,
            polygon: exact,
        })
    };
    let idx: Vec<usize> = (0..entries.len()).collect();
    let cells: Vec<Cell> = crate::par::filter_map(&idx, cell_of);

    // Touching monomials can only appear where the float-active exponents
    // span a hull with extra lattice points; only those probes go exact.
    let mut points: BTreeSet<Point> = BTreeSet::new();
    let mut probes: BTreeSet<Point> = BTreeSet::new();
    let approx_cells: Vec<Vec<(f64, f64)>> = cells.iter().map(|c| c.polygon.iter().map(approx_point).collect()).collect();
    let needs_exact = |x: f64, y: f64| -> bool {
        let vals: Vec<(f64, f64)> = cells.iter().map(|c| approx_form(&c.exp, c.approx_coeff, x, y)).collect();
        let best = vals.iter().map(|(v, t)| v + t).fold(f64::INFINITY, f64::min);
        let exps: Vec<LatticeVec> = cells
            .iter()
            .zip(&vals)
            .filter(|(_, (v, t))| v - t <= best)
            .map(|(c, _)| c.exp)
            .collect();
        exps.len() >= 2 && lattice_points_in_hull(&exps).len() > exps.len()
    };
    for (c, ap) in cells.iter().zip(&approx_cells) {
        let n = c.polygon.len();
        for k in 0..n {
            let p = &c.polygon[k];
            points.insert(p.clone());
            let (a, b) = (ap[k], ap[(k + 1) % n]);
            if needs_exact(a.0, a.1) && poly.strictly_contains(p) {
                probes.insert(p.clone());
            }
            if needs_exact((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0) {
                let mid = p.midpoint(&c.polygon[(k + 1) % n]);
                if poly.strictly_contains(&mid) {
                    probes.insert(mid);
                }
            }
        }
    }

    let mut support: BTreeMap<LatticeVec, Rat> = cells.iter().map(|c| (c.exp, c.coeff.clone())).collect();
    let probes: Vec<Point> = probes.into_iter().collect();
    let touch = crate::par::map(&probes, |z| {
        let (f, act) = envelope_at(&cells, z);
        if act.len() < 2 {
            return Vec::new();
        }
        let exps: Vec<LatticeVec> = act.iter().map(|c| c.exp).collect();
        lattice_points_in_hull(&exps)
            .into_iter()
            .filter(|w| !exps.contains(w))
            .map(|w| {
                let a = &f - w.apply(z);
                (w, a)
            })
            .collect::<Vec<_>>()
    });
    for list in touch {
        for (w, a) in list {
            support.entry(w).or_insert(a);
        }
    }
    let points: Vec<Point> = points.into_iter().collect();
    let vertices: Vec<(Point, Rat)> = crate::par::map(&points, |z| (z.clone(), envelope_at(&cells, z).0));
    let approx = vertices
        .iter()
        .map(|(z, f)| {
            let (x, y) = z.to_f64();
            (x, y, f.to_f64().unwrap_or(f64::NAN))
        })
        .collect();
    (support, Subdivision { cells, vertices, approx })
}

#[derive(Serialize, Deserialize)]
struct RawMonomial {
    v: LatticeVec,
    #[serde(with = "serde_rat")]
    a: Rat,
}

#[derive(Serialize, Deserialize)]
struct RawSeries {
    domain: QPolygon,
    support: Vec<RawMonomial>,
}

impl RawSeries {
    fn from_series(f: &TropicalSeries) -> Result<Self, Error> {
        Ok(RawSeries {
            domain: f.polygon()?.clone(),
            support: f.support.iter().map(|(v, a)| RawMonomial { v: *v, a: a.clone() }).collect(),
        })
    }

    fn into_series(self) -> Result<TropicalSeries, Error> {
        TropicalSeries::new(self.domain, self.support.into_iter().map(|m| (m.v, m.a)))
    }
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
    fn evaluation() {
        let f = third();
        assert_eq!(f.eval(&Point::new(rat(1, 2), rat(1, 2))).unwrap(), rat(1, 3));
        assert_eq!(f.eval(&Point::origin()).unwrap(), int(0));
        assert_eq!(f.eval(&Point::new(rat(1, 5), rat(1, 2))).unwrap(), rat(1, 5));
        assert!(matches!(f.eval(&Point::from_ints(2, 0)), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn canonical_coefficients() {
        let f = third();
        assert_eq!(f.canonical_coefficient(&LatticeVec::new(0, 0)).unwrap(), rat(1, 3));
        assert_eq!(f.canonical_coefficient(&LatticeVec::new(1, 1)).unwrap(), int(0));
        assert_eq!(f.canonical_coefficient(&LatticeVec::new(2, 0)).unwrap(), int(0));
        assert_eq!(f.canonical_coefficient(&LatticeVec::new(-2, 0)).unwrap(), int(2));
    }

    #[test]
    fn square_distance_function() {
        let sq: ConvexDomain = QPolygon::unit_square().into();
        let l = TropicalSeries::distance_function(&sq).unwrap();
        assert_eq!(l.eval(&Point::new(rat(1, 2), rat(1, 2))).unwrap(), rat(1, 2));
        // the constant touches at the centre only
        assert_eq!(l.coeff(&LatticeVec::ZERO), Some(&rat(1, 2)));
        for v in [(1, 0), (0, 1), (-1, 0), (0, -1)] {
            assert!(l.coeff(&LatticeVec::new(v.0, v.1)).is_some());
        }
        let big: ConvexDomain = QPolygon::rectangle(int(0), int(0), int(2), int(2)).unwrap().into();
        let l2 = TropicalSeries::distance_function(&big).unwrap();
        assert_eq!(l2.eval(&Point::from_ints(1, 1)).unwrap(), int(1));
    }

    #[test]
    fn quasi_degrees_and_niceness() {
        let f = third();
        assert_eq!(f.quasi_degree().unwrap(), QuasiDegree(vec![1, 1, 1, 1]));
        assert!(f.is_nice());
        assert!(QuasiDegree(vec![2, 1, 2, 1]).is_nice());
        assert!(!QuasiDegree(vec![2, 2, 1, 1]).is_nice());
        let bad = TropicalSeries::from_triples(QPolygon::unit_square(), &[(1, 0, int(0)), (0, 1, int(0))]);
        assert!(matches!(bad, Err(Error::BoundaryMismatch(_))));
        let neg = TropicalSeries::from_triples(QPolygon::unit_square(), &[(1, 0, int(-1))]);
        assert!(matches!(neg, Err(Error::InvalidSeries(_))));
    }

    #[test]
    fn add_creates_new_face() {
        let f = third();
        let g = f.add_monomial(&LatticeVec::new(1, 0), &rat(2, 15)).unwrap();
        let expect = TropicalSeries::from_triples(
            QPolygon::unit_square(),
            &[
                (2, 0, int(0)),
                (1, 0, rat(2, 15)),
                (0, 1, int(0)),
                (-1, 0, int(1)),
                (0, -1, int(1)),
                (0, 0, rat(1, 3)),
            ],
        )
        .unwrap();
        assert_eq!(g, expect);
        assert_eq!(g.quasi_degree().unwrap(), QuasiDegree(vec![2, 1, 1, 1]));
        assert_eq!(f.add_monomial(&LatticeVec::new(1, 0), &int(0)).unwrap(), f);
        assert_eq!(f.add_monomial(&LatticeVec::new(1, 0), &rat(-1, 2)), Err(Error::NegativeIncrement));
    }

    #[test]
    fn raising_constant_past_maximum_leaves_max_value() {
        let sq: ConvexDomain = QPolygon::unit_square().into();
        let l = TropicalSeries::distance_function(&sq).unwrap();
        let g = l.add_monomial(&LatticeVec::ZERO, &int(1)).unwrap();
        assert_eq!(g, l);
        let f = third().add_monomial(&LatticeVec::ZERO, &int(1)).unwrap();
        assert_eq!(f, l);
        assert!(f.coeff(&LatticeVec::ZERO).is_some_and(|a| *a == rat(1, 2)));
    }

    #[test]
    fn rho_examples() {
        let f = third();
        let g = TropicalSeries::from_triples(
            QPolygon::unit_square(),
            &[(1, 0, int(0)), (0, 1, int(0)), (-1, 0, int(1)), (0, -1, int(1)), (0, 0, rat(1, 4))],
        )
        .unwrap();
        assert_eq!(rho(&f, &f).unwrap(), int(0));
        assert_eq!(rho(&f, &g).unwrap(), rat(1, 12));
    }

    #[test]
    fn zero_series() {
        let z = TropicalSeries::zero(&QPolygon::unit_square());
        assert_eq!(z.quasi_degree().unwrap(), QuasiDegree(vec![0, 0, 0, 0]));
        let g = z.add_monomial(&LatticeVec::ZERO, &rat(1, 2)).unwrap();
        let l = TropicalSeries::distance_function(&QPolygon::unit_square().into()).unwrap();
        assert_eq!(g, l);
    }

    #[test]
    fn json_round_trip() {
        let f = third();
        let s = f.to_json().unwrap();
        assert_eq!(TropicalSeries::from_json(&s).unwrap(), f);
    }

    #[test]
    fn display() {
        assert_eq!(third().to_string(), "min(1-x, 1-y, 1/3, y, x)");
    }
}
