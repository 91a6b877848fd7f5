//! Level sets, corner blow-ups, nice series, the verge construction and the
//! coarse smooth approximation of a dynamic.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::curve::{classify_dual, curves_within, extract_curve, point_curve_dist2, VertexClass};
use crate::error::Error;
use crate::geometry::{clip_convex, is_unimodular, signed_area, Corner, HalfPlane, LatticeVec, QPolygon};
use crate::rat::{int, serde_rat, serde_rat_vec, sqrt_ceil, sqrt_floor, Point, Rat};
use crate::series::{QuasiDegree, TropicalSeries};
use crate::wave::{
    compose_waves, run_dynamics, smooth_or_nodal, Schedule, StopReason, StopRule, WaveEvent, WavePlan,
};

const MAX_STEPS_PER_CORNER: usize = 64;
const MAX_MULTIPLIER: i64 = 64;
const MAX_HALVINGS: usize = 48;

/// `Ω_ε = {z ∈ Ω : f(z) ≥ ε}`.
pub fn level_set_polygon(f: &TropicalSeries, eps: &Rat) -> Result<QPolygon, Error> {
    let poly = f.polygon()?;
    if !eps.is_positive() {
        return Err(Error::EmptyLevelSet);
    }
    let mut hs = poly.halfplanes().to_vec();
    for (v, a) in f.support() {
        let c = a - eps;
        if v.is_zero() {
            if c.is_negative() {
                return Err(Error::EmptyLevelSet);
            }
        } else {
            hs.push(HalfPlane::new(*v, c));
        }
    }
    QPolygon::new(hs).map_err(|_| Error::EmptyLevelSet)
}

/// `(f − ε)` on `Ω_ε`, validated as a series there (it vanishes on the new
/// boundary).
pub fn level_restriction(f: &TropicalSeries, eps: &Rat) -> Result<TropicalSeries, Error> {
    let dom = level_set_polygon(f, eps)?;
    f.restrict_shifted(&dom, eps)
}

fn stabilize(f: &TropicalSeries, points: &[Point]) -> Result<TropicalSeries, Error> {
    let r = run_dynamics(f, points, &Schedule::RoundRobin, &StopRule::default())?;
    if r.stopped != StopReason::Stabilized {
        return Err(Error::CertificationFailed { step: r.events.len(), reason: "dynamics did not stabilize".into() });
    }
    Ok(r.series)
}

/// Checks `f_{Ω,P} = f_{Ω_ε,P} + ε` on `Ω_ε` and `f_{Ω_ε,P} + ε ≥ f_{Ω,P}`
/// on `Ω`, computing both sides by independent runs. Both comparisons are
/// exact: the first compares small canonical forms on `Ω_ε`, the second
/// checks every form of the inner series against every cell of the outer one.
pub fn level_shift_check(omega: &QPolygon, points: &[Point], eps: &Rat) -> Result<bool, Error> {
    if points.is_empty() {
        return Ok(true);
    }
    let outer = stabilize(&TropicalSeries::zero(omega), points)?;
    for p in points {
        if outer.value(p) <= *eps {
            return Err(Error::HypothesisViolated(format!("f({p}) does not exceed the level")));
        }
    }
    let inner_dom = level_set_polygon(&outer, eps)?;
    let inner = stabilize(&TropicalSeries::zero(&inner_dom), points)?;
    let equal = level_restriction(&outer, eps)? == inner;
    let dominates = forms_dominate(inner.support(), eps, &outer, omega.vertices(), false);
    Ok(equal && dominates)
}

/// `region` as a counter-clockwise vertex cycle.
fn ccw(region: &[Point]) -> Vec<Point> {
    let mut r = region.to_vec();
    if signed_area(&r).is_negative() {
        r.reverse();
    }
    r
}

/// Intersection of two convex polygons given by vertex cycles.
fn clip_to(poly: &[Point], region: &[Point]) -> Vec<Point> {
    let region = ccw(region);
    let mut out = poly.to_vec();
    for k in 0..region.len() {
        let (p, q) = (&region[k], &region[(k + 1) % region.len()]);
        let d = q.sub(p);
        out = clip_convex(&out, |z| d.cross(&z.sub(p)));
        if out.is_empty() {
            break;
        }
    }
    out
}

/// `min_w (w·z + a_w) + shift ≥ g(z)` on `region` (strictly if asked):
/// every form is compared with every cell of `g` at the cell's vertices.
fn forms_dominate(
    upper: &BTreeMap<LatticeVec, Rat>,
    shift: &Rat,
    lower: &TropicalSeries,
    region: &[Point],
    strict: bool,
) -> bool {
    let sub = lower.subdivision();
    sub.cells.iter().all(|c| {
        clip_to(&c.polygon, region).iter().all(|z| {
            let g = c.exp.apply(z) + &c.coeff;
            upper.iter().all(|(w, a)| {
                let d = w.apply(z) + a + shift - &g;
                if strict {
                    d.is_positive()
                } else {
                    !d.is_negative()
                }
            })
        })
    })
}

/// Maximum of `f` over a convex region (`None` if they do not meet).
fn max_on(f: &TropicalSeries, region: &[Point]) -> Option<Rat> {
    let sub = f.subdivision();
    sub.cells
        .iter()
        .flat_map(|c| clip_to(&c.polygon, region).into_iter().map(move |z| c.exp.apply(&z) + &c.coeff))
        .max()
}

/// Range of `f − g` over a convex region, from the overlay of the two
/// linearity decompositions.
fn difference_range(f: &TropicalSeries, g: &TropicalSeries, region: &[Point]) -> Option<(Rat, Rat)> {
    let (sf, sg) = (f.subdivision(), g.subdivision());
    let mut range: Option<(Rat, Rat)> = None;
    for c in &sf.cells {
        let piece = clip_to(&c.polygon, region);
        if piece.is_empty() {
            continue;
        }
        for d in &sg.cells {
            for z in clip_to(&piece, &d.polygon) {
                let x = c.exp.apply(&z) + &c.coeff - d.exp.apply(&z) - &d.coeff;
                range = Some(match range {
                    None => (x.clone(), x),
                    Some((lo, hi)) => (lo.min(x.clone()), hi.max(x)),
                });
            }
        }
    }
    range
}

/// One blow-up of a corner region: the side `direction·(z − apex) = eps` is
/// cut off, `apex` being the original corner, and the monomial
/// `direction·(z − apex) − eps` joins the series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupStep {
    pub corner: usize,
    /// `multiplier · u` with `u` primitive.
    pub direction: LatticeVec,
    pub multiplier: u64,
    #[serde(with = "serde_rat")]
    pub eps: Rat,
}

impl BlowupStep {
    /// The monomial `(direction, coefficient)` of the step for the given apex.
    pub fn monomial(&self, apex: &Point) -> (LatticeVec, Rat) {
        (self.direction, -self.direction.apply(apex) - &self.eps)
    }
}

/// The next direction to cut a bad corner with inward normals `a, b`
/// (`det(a, b) > 0`): for a non-unimodular corner the first vector of the
/// continued-fraction resolution (`det(a, u) = 1`, `det(u, b) < det(a, b)`),
/// otherwise `a + b`.
pub fn resolution_direction(a: &LatticeVec, b: &LatticeVec) -> Result<LatticeVec, Error> {
    let (a, b) = (a.primitive(), b.primitive());
    let d = a.det(&b);
    if d <= 0 {
        return Err(Error::InvalidDomain(format!("corner normals {a}, {b} are not a convex corner")));
    }
    if d == 1 {
        return Ok(a.add(&b));
    }
    let k = (1..d)
        .find(|k| (b.i + k * a.i).rem_euclid(d) == 0 && (b.j + k * a.j).rem_euclid(d) == 0)
        .expect("b is primitive, so some k works");
    Ok(LatticeVec::new((b.i + k * a.i) / d, (b.j + k * a.j) / d))
}

fn bad_corner(poly: &QPolygon, f: &TropicalSeries, apex: &Point, r2: &Rat) -> Result<Option<Corner>, Error> {
    let qd = f.quasi_degree()?;
    Ok(poly.corners().into_iter().find(|c| {
        c.apex.dist2(apex) < *r2 && (!c.is_unimodular() || (qd.0[c.sides.0] > 1 && qd.0[c.sides.1] > 1))
    }))
}

/// Whether cutting `poly` at `corner` by `v·(z − corner) ≥ λ` stays inside the
/// ball and the new monomial exceeds `f` outside the ball.
fn cut_ok(poly: &QPolygon, f: &TropicalSeries, corner: &Point, v: &LatticeVec, lambda: &Rat, apex: &Point, r2: &Rat) -> bool {
    let m = |z: &Point| v.apply(&z.sub(corner)) - lambda;
    if poly.vertices().iter().any(|z| z != corner && !m(z).is_positive()) {
        return false;
    }
    if poly.clip(m).iter().any(|z| !poly.vertices().contains(z) && z.dist2(apex) >= *r2) {
        return false;
    }
    below_region_inside(poly, f, &m, apex, r2)
}

/// `{z ∈ Δ : m(z) ≤ f(z)}` lies in the open ball around `apex`.
fn below_region_inside(poly: &QPolygon, f: &TropicalSeries, m: &impl Fn(&Point) -> Rat, apex: &Point, r2: &Rat) -> bool {
    let mut q = poly.vertices().to_vec();
    for (w, a) in f.support() {
        q = clip_convex(&q, |z| w.apply(z) + a - m(z));
        if q.is_empty() {
            return true;
        }
    }
    q.iter().all(|z| z.dist2(apex) < *r2)
}

/// Smallest multiplier and a cut level certified for direction `u`.
fn choose_cut(
    poly: &QPolygon,
    f: &TropicalSeries,
    corner: &Point,
    u: &LatticeVec,
    apex: &Point,
    r2: &Rat,
) -> Option<(LatticeVec, i64, Rat)> {
    let reach = poly
        .vertices()
        .iter()
        .filter(|z| *z != corner)
        .map(|z| u.apply(&z.sub(corner)))
        .min()?;
    for n in 1..=MAX_MULTIPLIER {
        let v = u.scale(n);
        // the limit λ → 0 must already pass
        let m0 = |z: &Point| v.apply(&z.sub(corner));
        if !below_region_inside(poly, f, &m0, apex, r2) {
            continue;
        }
        let mut lambda = &reach * int(n) / int(2);
        for _ in 0..MAX_HALVINGS {
            if cut_ok(poly, f, corner, &v, &lambda, apex, r2) {
                return Some((v, n, lambda));
            }
            lambda /= int(2);
        }
    }
    None
}

/// Blows up the corners of `Δ` inside balls of radius `eps` until the
/// polygon is unimodular and the series nice. Returns the new polygon, the
/// series `f̃ = min(f, cut monomials)` on it and the steps; `f̃ = f` outside
/// the balls.
pub fn make_nice(
    delta: &QPolygon,
    f: &TropicalSeries,
    eps: &Rat,
) -> Result<(QPolygon, TropicalSeries, Vec<BlowupStep>), Error> {
    if f.polygon()? != delta {
        return Err(Error::DomainMismatch);
    }
    if !eps.is_positive() {
        return Err(Error::EpsilonTooLarge("radius must be positive".into()));
    }
    let corners = delta.corners();
    let r2 = eps * eps;
    for (k, a) in corners.iter().enumerate() {
        for b in &corners[k + 1..] {
            if a.apex.dist2(&b.apex) <= int(4) * &r2 {
                return Err(Error::EpsilonTooLarge(format!("balls around {} and {} overlap", a.apex, b.apex)));
            }
        }
    }
    let mut poly = delta.clone();
    let mut cur = f.clone();
    let mut steps: Vec<BlowupStep> = Vec::new();
    for (ci, corner) in corners.iter().enumerate() {
        let apex = &corner.apex;
        let mut count = 0;
        while let Some(bad) = bad_corner(&poly, &cur, apex, &r2)? {
            if count == MAX_STEPS_PER_CORNER {
                return Err(Error::CertificationFailed {
                    step: steps.len(),
                    reason: format!("corner {ci} is not nice after {count} blow-ups"),
                });
            }
            count += 1;
            let u = resolution_direction(&bad.normals.0, &bad.normals.1)?;
            let (v, n, lambda) = choose_cut(&poly, &cur, &bad.apex, &u, apex, &r2).ok_or_else(|| {
                Error::CertificationFailed { step: steps.len(), reason: format!("no certified cut in direction {u}") }
            })?;
            let coeff = -v.apply(&bad.apex) - &lambda;
            poly = poly.intersect(HalfPlane::new(v, coeff.clone()))?;
            let mut support = cur.support().clone();
            support.entry(v).and_modify(|a| *a = a.clone().min(coeff.clone())).or_insert(coeff.clone());
            cur = TropicalSeries::new(poly.clone(), support)?;
            steps.push(BlowupStep { corner: ci, direction: v, multiplier: n as u64, eps: -coeff - v.apply(apex) });
        }
    }
    if !is_unimodular(&poly) || !cur.is_nice() {
        return Err(Error::CertificationFailed { step: steps.len(), reason: "result is not nice".into() });
    }
    // faces that are new or changed stay inside the balls
    for c in &cur.subdivision().cells {
        if f.coeff(&c.exp) == Some(&c.coeff) {
            continue;
        }
        if !corners.iter().any(|k| c.polygon.iter().all(|z| z.dist2(&k.apex) < r2)) {
            return Err(Error::CertificationFailed {
                step: steps.len(),
                reason: format!("face of {} leaves the corner balls", c.exp),
            });
        }
    }
    Ok((poly, cur, steps))
}

/// Each corner of the domain is met by exactly one curve edge, of weight one.
pub fn corners_have_single_edges(f: &TropicalSeries) -> Result<bool, Error> {
    let poly = f.polygon()?;
    let c = extract_curve(f);
    Ok(poly.vertices().iter().all(|z| {
        let es: Vec<_> = c.edges_at(z).collect();
        es.len() == 1 && es[0].weight == 1
    }))
}

/// Result of [`nice_restrict`] with its certified bounds.
#[derive(Clone, Debug)]
pub struct NiceRestriction {
    pub polygon: QPolygon,
    pub steps: Vec<BlowupStep>,
    /// Radius of the balls around the original corners.
    pub radius: Rat,
    /// `G 0_Δ` and `G 0_{Δ'}`.
    pub full: TropicalSeries,
    pub restricted: TropicalSeries,
    /// Range of `G 0_Δ − G 0_{Δ'}` on `Δ'`.
    pub gap: (Rat, Rat),
    /// Maximum of `G 0_Δ` on `Δ ∖ Δ'`.
    pub outside_max: Rat,
}

/// A unimodular `Δ' ⊂ Δ` with `G 0_{Δ'}` nice, `0 ≤ G 0_Δ − G 0_{Δ'} < ε`
/// on `Δ'` and `G 0_Δ ≤ ε` on `Δ ∖ Δ'`, for `G = G_{q_m} ⋯ G_{q_1}`.
pub fn nice_restrict(delta: &QPolygon, waves: &[Point], eps: &Rat) -> Result<NiceRestriction, Error> {
    if !eps.is_positive() {
        return Err(Error::EpsilonTooLarge("epsilon must be positive".into()));
    }
    let (full, _) = compose_waves(&TropicalSeries::zero(delta), waves)?;
    let qd = full.quasi_degree()?;
    let lip2 = delta
        .halfplanes()
        .iter()
        .zip(&qd.0)
        .map(|(h, m)| {
            let m = (*m).max(1) as i64;
            m * m * h.n.norm2()
        })
        .max()
        .expect("sides");
    let mut radius = eps / sqrt_ceil(&int(lip2), 1);
    let corners = delta.corners();
    let too_big = |r: &Rat| {
        let r2 = r * r;
        corners.iter().enumerate().any(|(k, a)| {
            waves.iter().any(|q| q.dist2(&a.apex) <= int(4) * &r2)
                || corners[k + 1..].iter().any(|b| a.apex.dist2(&b.apex) <= int(4) * &r2)
        })
    };
    while too_big(&radius) {
        radius /= int(2);
    }
    let mut last = String::new();
    for _ in 0..12 {
        match certify_restriction(delta, waves, eps, &full, &radius) {
            Ok(r) => return Ok(r),
            Err(e) => last = e.to_string(),
        }
        radius /= int(2);
    }
    Err(Error::CertificationFailed { step: 0, reason: last })
}

fn certify_restriction(
    delta: &QPolygon,
    waves: &[Point],
    eps: &Rat,
    full: &TropicalSeries,
    radius: &Rat,
) -> Result<NiceRestriction, Error> {
    let (poly, _, steps) = make_nice(delta, full, radius)?;
    let (restricted, _) = compose_waves(&TropicalSeries::zero(&poly), waves)?;
    let fail = |reason: &str| Error::CertificationFailed { step: steps.len(), reason: reason.into() };
    if !restricted.is_nice() {
        return Err(fail("G 0 on the restricted polygon is not nice"));
    }
    let gap = difference_range(full, &restricted, poly.vertices()).expect("nonempty");
    if gap.0.is_negative() || gap.1 >= *eps {
        return Err(fail("gap bound"));
    }
    let corners = delta.corners();
    let mut outside_max = Rat::zero();
    for s in &steps {
        let (v, a) = s.monomial(&corners[s.corner].apex);
        let piece = delta.clip(|z| -(v.apply(z) + &a));
        if let Some(m) = max_on(full, &piece) {
            outside_max = outside_max.max(m);
        }
    }
    if outside_max > *eps {
        return Err(fail("value outside the restriction"));
    }
    Ok(NiceRestriction { polygon: poly, steps, radius: radius.clone(), full: full.clone(), restricted, gap, outside_max })
}

/// Sufficient rational test for `ε` below the inradius: the polygon shrunk by
/// an upper bound of `ε·|n_S|` on every side keeps an interior.
fn below_inradius(delta: &QPolygon, eps: &Rat) -> bool {
    let hs = delta
        .halfplanes()
        .iter()
        .map(|h| HalfPlane::new(h.n, &h.a - eps * sqrt_ceil(&int(h.n.norm2()), 1 << 20)))
        .collect();
    QPolygon::new(hs).is_ok()
}

fn verge_forms(delta: &QPolygon, d: &QuasiDegree, plateau: &Rat, step: &Rat) -> Vec<(LatticeVec, Rat)> {
    let mut out = vec![(LatticeVec::ZERO, plateau.clone())];
    for (h, &m) in delta.halfplanes().iter().zip(&d.0) {
        let m = m as i64;
        for l in 1..=m {
            let off = step * int((m - l) * (m - l + 1) / 2);
            out.push((h.n.scale(l), &h.a * int(l) + off));
        }
    }
    out
}

fn verge_certified(g: &TropicalSeries, delta: &QPolygon, d: &QuasiDegree, eps: &Rat) -> Result<bool, Error> {
    if g.quasi_degree()? != *d {
        return Ok(false);
    }
    let c = extract_curve(g);
    if c.interior_vertices().any(|v| classify_dual(&v.dual) != VertexClass::Smooth) {
        return Ok(false);
    }
    if !corners_have_single_edges(g)? {
        return Ok(false);
    }
    let e2 = eps * eps;
    let near = |z: &Point, h: &HalfPlane| {
        let v = h.eval(z);
        &v * &v <= &e2 * int(h.n.norm2())
    };
    Ok(c.edges.iter().all(|e| delta.halfplanes().iter().any(|h| near(&e.a, h) && near(&e.b, h))))
}

/// A series of quasi-degree `d` whose curve is smooth and stays within `ε` of
/// the boundary: `min(κ, min_S min_l (l·h_S + δ·(d−l)(d−l+1)/2))`, with
/// `h_S` the lattice distance to side `S`. The hairs of a side of degree `d`
/// are the `d − 1` lines `h_S = δ, 2δ, …`. `κ = ε/2` and `δ` are shrunk
/// until the result is certified.
pub fn verge_polynomial(delta: &QPolygon, d: &QuasiDegree, eps: &Rat) -> Result<TropicalSeries, Error> {
    if !delta.is_bounded() {
        return Err(Error::UnboundedDomain);
    }
    if !is_unimodular(delta) {
        return Err(Error::NotUnimodular);
    }
    if d.0.len() != delta.num_sides() || d.0.contains(&0) || !d.is_nice() {
        return Err(Error::NotNice);
    }
    if !eps.is_positive() || !below_inradius(delta, eps) {
        return Err(Error::EpsilonTooLarge(format!("{eps} is not below the inradius")));
    }
    let dmax = *d.0.iter().max().expect("sides") as i64;
    let mut plateau = eps / int(2);
    for _ in 0..8 {
        let mut step = &plateau / int(dmax * dmax + 1);
        for _ in 0..32 {
            let g = TropicalSeries::new(delta.clone(), verge_forms(delta, d, &plateau, &step))?;
            if verge_certified(&g, delta, d, eps)? {
                return Ok(g);
            }
            step /= int(2);
        }
        plateau /= int(2);
    }
    Err(Error::CertificationFailed { step: 0, reason: "no certified verge polynomial".into() })
}

/// Decremented increments `e_k − M·h` of a coarse replay.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarsenPlan {
    #[serde(with = "serde_rat")]
    pub m: Rat,
    #[serde(with = "serde_rat")]
    pub h: Rat,
    #[serde(with = "serde_rat_vec")]
    pub increments: Vec<Rat>,
}

/// What was checked for one step of the replay.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCertificate {
    pub step: usize,
    /// Family parameters whose curves were classified.
    pub checked: usize,
    /// Nodal vertices seen across those curves.
    pub nodal_vertices: usize,
}

/// Largest `k/2^j ≤ √x` with the smallest `j ≤ 64` giving a positive value.
fn sqrt_lower(x: &Rat) -> Rat {
    let mut den = 1u64;
    loop {
        let s = sqrt_floor(x, den);
        if s.is_positive() || den >= 1 << 62 {
            return s;
        }
        den <<= 2;
    }
}

/// Replays the events of a dynamic started at a nice smooth `g` with every
/// positive increment lowered by `M·h`, certifying that every curve along
/// the way (including each `Add^{ct}` family) is smooth or nodal and that
/// the final curve is `ε`-close to the undecremented one in both directions.
pub fn coarsen_dynamics(
    g: &TropicalSeries,
    events: &[WaveEvent],
    eps: &Rat,
) -> Result<(CoarsenPlan, TropicalSeries, Vec<StepCertificate>), Error> {
    if !g.is_nice() {
        return Err(Error::HypothesisViolated("start series is not nice".into()));
    }
    if extract_curve(g).interior_vertices().any(|v| classify_dual(&v.dual) != VertexClass::Smooth) {
        return Err(Error::HypothesisViolated("start curve is not smooth".into()));
    }
    if !eps.is_positive() {
        return Err(Error::EpsilonTooLarge("epsilon must be positive".into()));
    }
    let mut full = vec![g.clone()];
    for ev in events {
        let next = full.last().expect("start").add_monomial(&ev.monomial, &ev.increment)?;
        full.push(next);
    }
    let target = full.last().expect("start").clone();
    if target.quasi_degree()? != g.quasi_degree()? {
        return Err(Error::HypothesisViolated("the dynamic changes the quasi-degree".into()));
    }
    if events.is_empty() {
        return Ok((CoarsenPlan { m: Rat::zero(), h: Rat::zero(), increments: Vec::new() }, g.clone(), Vec::new()));
    }
    let curves: Vec<_> = full.iter().map(extract_curve).collect();
    let d2 = events
        .iter()
        .flat_map(|ev| curves.iter().filter_map(|c| point_curve_dist2(&ev.point, c)))
        .filter(|d| d.is_positive())
        .min();
    let m = d2.map_or_else(Rat::one, |d| sqrt_lower(&d));
    let positive: Vec<&Rat> = events.iter().map(|e| &e.increment).filter(|e| e.is_positive()).collect();
    let count = int(positive.len().max(1) as i64);
    let e_min = positive.iter().map(|e| (*e).clone()).min().unwrap_or_else(Rat::one);
    let mut h = eps.clone().min(m.clone()).min(e_min) / (int(2) * count * &m);
    let mut last = None;
    for _ in 0..24 {
        match coarse_replay(g, events, &(&m * &h), eps, &target) {
            Ok((f, certs, increments)) => return Ok((CoarsenPlan { m, h, increments }, f, certs)),
            Err(e) => last = Some(e),
        }
        h /= int(2);
    }
    Err(last.expect("at least one attempt"))
}

fn coarse_replay(
    g: &TropicalSeries,
    events: &[WaveEvent],
    dec: &Rat,
    eps: &Rat,
    target: &TropicalSeries,
) -> Result<(TropicalSeries, Vec<StepCertificate>, Vec<Rat>), Error> {
    let mut cur = g.clone();
    let mut certs = Vec::with_capacity(events.len());
    let mut increments = Vec::with_capacity(events.len());
    for (k, ev) in events.iter().enumerate() {
        let fail = |reason: String| Error::CertificationFailed { step: k, reason };
        if !ev.increment.is_positive() {
            increments.push(Rat::zero());
            certs.push(StepCertificate { step: k, checked: 0, nodal_vertices: 0 });
            continue;
        }
        let c = &ev.increment - dec;
        if !c.is_positive() {
            return Err(fail("decrement exceeds the increment".into()));
        }
        let plan = WavePlan::for_monomial(&cur, &ev.monomial, &c, &ev.point).map_err(|e| fail(e.to_string()))?;
        let mut ts = plan.checkpoints();
        ts.push(int(1));
        let mut nodal = 0;
        let mut next = None;
        for t in &ts {
            let member = plan.member(&cur, t);
            let curve = extract_curve(&member);
            if !smooth_or_nodal(&curve) {
                return Err(fail(format!("singular curve at t = {t}")));
            }
            nodal += curve.interior_vertices().filter(|v| classify_dual(&v.dual) == VertexClass::Nodal).count();
            if t.is_one() {
                if member.subdivision().cell(&ev.monomial).is_none() {
                    return Err(fail("face contracted".into()));
                }
                next = Some(member);
            }
        }
        certs.push(StepCertificate { step: k, checked: ts.len(), nodal_vertices: nodal });
        increments.push(c);
        cur = next.expect("t = 1 is checked");
    }
    let half = eps / int(2);
    if !curves_within(&cur, target, &half) || !curves_within(target, &cur, &half) {
        return Err(Error::CertificationFailed { step: events.len(), reason: "final curves are not close".into() });
    }
    Ok((cur, certs, increments))
}
