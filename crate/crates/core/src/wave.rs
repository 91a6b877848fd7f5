//! The wave operator `G_p`, the dynamic `G_P`, and the `Add^{ct}` family
//! scan used to watch a face shrink.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{classify_vertex, extract_curve, TropicalCurve, VertexClass};
use crate::error::Error;
use crate::geometry::{area, clip_convex, lattice_disk, LatticeVec, QPolygon};
use crate::rat::{int, serde_rat, Point, Rat};
use crate::series::{rho, TropicalSeries};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveEvent {
    pub step: usize,
    pub point: Point,
    /// Dominating monomial at the point (for `c = 0`, the smallest active one).
    pub monomial: LatticeVec,
    #[serde(with = "serde_rat")]
    pub increment: Rat,
    /// Area of `{G_p f > f}`: the whole face of `p` whenever `c > 0`.
    #[serde(with = "serde_rat")]
    pub avalanche_area: Rat,
    /// Area lost by the face of `p` (face area before minus after).
    #[serde(with = "serde_rat")]
    pub shrink_area: Rat,
}

/// Everything needed to apply `G_p` and to scan its `Add^{ct}` family.
#[derive(Clone, Debug)]
pub struct WavePlan {
    pub point: Point,
    pub monomial: LatticeVec,
    pub coeff: Rat,
    pub increment: Rat,
    /// Face of `p` before the wave.
    pub face: Vec<Point>,
    /// Every other canonical monomial that can undercut the raised one on
    /// the face, with canonical coefficients.
    pub rivals: Vec<(LatticeVec, Rat)>,
}

impl WavePlan {
    pub fn new(f: &TropicalSeries, p: &Point) -> Result<WavePlan, Error> {
        let poly = f.polygon()?;
        if !poly.strictly_contains(p) {
            return Err(Error::OutsideDomain(p.to_string()));
        }
        let active = f.active_monomials(p);
        let sub = f.subdivision();
        if active.len() != 1 {
            let v = active[0];
            let cell = sub.cell(&v).expect("active cell");
            return Ok(WavePlan {
                point: p.clone(),
                monomial: v,
                coeff: cell.coeff.clone(),
                increment: Rat::zero(),
                face: cell.polygon.clone(),
                rivals: Vec::new(),
            });
        }
        let v = active[0];
        let cell = sub.cell(&v).expect("active cell");
        let r2 = f.enumeration_bound2(&v)?;
        let fprime = min_other_at(f, &v, p, r2);
        let increment = &fprime - v.apply(p) - &cell.coeff;
        WavePlan::for_monomial(f, &v, &increment, p)
    }

    /// Plan for `Add^c_v f` with a prescribed increment; `point` is only
    /// recorded (it should lie on the face of `v`).
    pub fn for_monomial(f: &TropicalSeries, v: &LatticeVec, c: &Rat, point: &Point) -> Result<WavePlan, Error> {
        if c.is_negative() {
            return Err(Error::NegativeIncrement);
        }
        let sub = f.subdivision();
        let cell = sub.cell(v).ok_or_else(|| Error::InvalidSeries(format!("{v} has no face")))?;
        let raised = &cell.coeff + c;
        let mut rivals = if c.is_zero() { Vec::new() } else { f.monomials_below_raised(v, &raised)? };
        if c.is_positive() {
            rivals.extend(
                f.support()
                    .iter()
                    .filter(|(w, _)| *w != v)
                    .filter(|(w, a)| cell.polygon.iter().any(|z| w.apply(z) + *a < v.apply(z) + &raised))
                    .map(|(w, a)| (*w, a.clone())),
            );
        }
        Ok(WavePlan {
            point: point.clone(),
            monomial: *v,
            coeff: cell.coeff.clone(),
            increment: c.clone(),
            face: cell.polygon.clone(),
            rivals,
        })
    }

    /// `Add^{ct}_v f`.
    pub fn member(&self, f: &TropicalSeries, t: &Rat) -> TropicalSeries {
        if self.increment.is_zero() || t.is_zero() {
            return f.clone();
        }
        let poly = f.polygon().expect("bounded");
        let raised = &self.coeff + &self.increment * t;
        let extra: Vec<(LatticeVec, Rat)> = self
            .rivals
            .iter()
            .filter(|(w, _)| !f.support().contains_key(w))
            .cloned()
            .collect();
        f.raise_with(poly, &self.monomial, raised, &extra)
    }

    /// `φ(z) = f'(z) − v·z − a_v` on the face, `f'` the minimum of the rivals.
    fn slack(&self, z: &Point) -> Option<Rat> {
        let base = self.monomial.apply(z) + &self.coeff;
        self.rivals.iter().map(|(w, a)| w.apply(z) + a - &base).min()
    }

    /// Parameters `t ∈ (0, 1]` where the combinatorics of the face may change:
    /// values `φ(z)/c` at vertices `z` of the rivals' envelope over the face.
    pub fn breakpoints(&self) -> Vec<Rat> {
        let mut ts: BTreeSet<Rat> = BTreeSet::new();
        if self.increment.is_zero() {
            return Vec::new();
        }
        ts.insert(int(1));
        for (k, (u, au)) in self.rivals.iter().enumerate() {
            let mut region = self.face.clone();
            for (m, (w, aw)) in self.rivals.iter().enumerate() {
                if m == k {
                    continue;
                }
                let d = w.sub(u);
                let off = aw - au;
                region = clip_convex(&region, |z| d.apply(z) + &off);
                if region.is_empty() {
                    break;
                }
            }
            for z in &region {
                if let Some(phi) = self.slack(z) {
                    let t = phi / &self.increment;
                    if t.is_positive() && t < int(1) {
                        ts.insert(t);
                    }
                }
            }
        }
        ts.into_iter().collect()
    }

    /// Breakpoints together with the midpoints of the intervals between them.
    pub fn checkpoints(&self) -> Vec<Rat> {
        let bps = self.breakpoints();
        let mut out = Vec::new();
        let mut prev = Rat::zero();
        for t in bps {
            out.push((&prev + &t) / int(2));
            out.push(t.clone());
            prev = t;
        }
        out
    }
}

/// `f'(p) = min_{w ≠ v} (w·p + can(w))` over the canonical support.
fn min_other_at(f: &TropicalSeries, v: &LatticeVec, p: &Point, radius2: i64) -> Rat {
    let sub = f.subdivision();
    let (px, py) = p.to_f64();
    let approx: Vec<(LatticeVec, f64)> = lattice_disk(&int(radius2))
        .into_iter()
        .filter(|w| w != v)
        .map(|w| {
            let c = sub.approx_canonical(&w);
            (w, w.i as f64 * px + w.j as f64 * py + c)
        })
        .collect();
    let best = approx.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
    let tol = 1e-7 * (1.0 + best.abs() + (radius2 as f64).sqrt() * (1.0 + px.abs() + py.abs()));
    let mut exact: Option<Rat> = None;
    for (w, val) in &approx {
        if *val <= best + tol {
            let c = f.canonical_coefficient(w).expect("bounded domain");
            let x = w.apply(p) + c;
            exact = Some(exact.map_or(x.clone(), |e: Rat| e.min(x)));
        }
    }
    exact.expect("the disk contains side monomials")
}

/// `G_p f`.
pub fn wave(f: &TropicalSeries, p: &Point) -> Result<(TropicalSeries, WaveEvent), Error> {
    let plan = WavePlan::new(f, p)?;
    let g = plan.member(f, &int(1));
    let (avalanche, shrink) = if plan.increment.is_zero() {
        (Rat::zero(), Rat::zero())
    } else {
        let before = area(&plan.face);
        let after = g
            .subdivision()
            .cell(&plan.monomial)
            .map_or_else(Rat::zero, |c| area(&c.polygon));
        (before.clone(), before - after)
    };
    let ev = WaveEvent {
        step: 0,
        point: p.clone(),
        monomial: plan.monomial,
        increment: plan.increment,
        avalanche_area: avalanche,
        shrink_area: shrink,
    };
    Ok((g, ev))
}

/// `G_{q_m} ⋯ G_{q_1} f`, returning the events in order.
pub fn compose_waves(f: &TropicalSeries, points: &[Point]) -> Result<(TropicalSeries, Vec<WaveEvent>), Error> {
    let mut cur = f.clone();
    let mut events = Vec::with_capacity(points.len());
    for (k, q) in points.iter().enumerate() {
        let (next, mut ev) = wave(&cur, q)?;
        ev.step = k;
        events.push(ev);
        cur = next;
    }
    Ok((cur, events))
}

/// Whether `p` lies on the tropical curve of `f`.
pub fn on_curve(f: &TropicalSeries, p: &Point) -> bool {
    f.active_monomials(p).len() >= 2
}

/// `f + Σ_p min(l_Ω, l_Ω(p))`, an explicit member of `V(Ω, P, f)`.
pub fn upper_bound_witness(f: &TropicalSeries, points: &[Point]) -> Result<TropicalSeries, Error> {
    let poly = f.polygon()?;
    let l = TropicalSeries::distance_function(&poly.clone().into())?;
    let mut g = f.clone();
    for p in points {
        let bump = l.clamp(&l.eval(p)?)?;
        g = g.pointwise_sum(&bump)?;
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// `p_1, …, p_n, p_1, …`
    RoundRobin,
    /// Each sweep visits `P` in a fresh seeded random order.
    SeededRandom { seed: u64 },
    /// Indices into `P`, repeated cyclically. Must mention every point.
    Explicit { order: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    /// Stop once a sweep changes the series by less than this in `ρ`.
    #[serde(default, with = "opt_rat")]
    pub tolerance: Option<Rat>,
    pub max_steps: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { tolerance: None, max_steps: 100_000 }
    }
}

mod opt_rat {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
        r.as_ref().map(crate::rat::fmt_rat).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rat>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| crate::rat::parse_rat(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Stabilized,
    ToleranceReached,
    StepLimit,
}

#[derive(Clone, Debug)]
pub struct DynamicsResult {
    pub series: TropicalSeries,
    pub events: Vec<WaveEvent>,
    pub stopped: StopReason,
    pub sweeps: usize,
    /// `ρ` change of the last completed sweep.
    pub last_sweep_rho: Rat,
}

/// Iterates `G_q` along the schedule until a full sweep changes nothing,
/// the sweep's `ρ` change drops below the tolerance, or the step limit.
pub fn run_dynamics(
    f: &TropicalSeries,
    points: &[Point],
    schedule: &Schedule,
    stop: &StopRule,
) -> Result<DynamicsResult, Error> {
    let poly = f.polygon()?;
    for p in points {
        if !poly.strictly_contains(p) {
            return Err(Error::OutsideDomain(p.to_string()));
        }
    }
    let mut cur = f.clone();
    let mut events = Vec::new();
    if points.is_empty() {
        return Ok(DynamicsResult { series: cur, events, stopped: StopReason::Stabilized, sweeps: 0, last_sweep_rho: Rat::zero() });
    }
    if let Schedule::Explicit { order } = schedule {
        let seen: BTreeSet<usize> = order.iter().copied().collect();
        if order.iter().any(|&k| k >= points.len()) || seen.len() != points.len() {
            return Err(Error::InvalidSeries("explicit schedule must visit every point".into()));
        }
    }
    let mut rng = match schedule {
        Schedule::SeededRandom { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut step = 0;
    let mut sweeps = 0;
    loop {
        let order: Vec<usize> = match schedule {
            Schedule::RoundRobin => (0..points.len()).collect(),
            Schedule::Explicit { order } => order.clone(),
            Schedule::SeededRandom { .. } => {
                let mut o: Vec<usize> = (0..points.len()).collect();
                o.shuffle(rng.as_mut().expect("rng"));
                o
            }
        };
        let start = cur.clone();
        let mut moved = false;
        for k in order {
            if step >= stop.max_steps {
                let r = rho(&start, &cur)?;
                return Ok(DynamicsResult { series: cur, events, stopped: StopReason::StepLimit, sweeps, last_sweep_rho: r });
            }
            let (next, mut ev) = wave(&cur, &points[k])?;
            ev.step = step;
            step += 1;
            moved |= ev.increment.is_positive();
            events.push(ev);
            cur = next;
        }
        sweeps += 1;
        if !moved {
            return Ok(DynamicsResult { series: cur, events, stopped: StopReason::Stabilized, sweeps, last_sweep_rho: Rat::zero() });
        }
        if let Some(tol) = &stop.tolerance {
            let r = rho(&start, &cur)?;
            if r < *tol {
                return Ok(DynamicsResult { series: cur, events, stopped: StopReason::ToleranceReached, sweeps, last_sweep_rho: r });
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerestroikaKind {
    NodalPerestroika,
    FaceCollapsedToPoint,
    FaceCollapsedToInterval,
    SideContracted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerestroikaEvent {
    #[serde(with = "serde_rat")]
    pub t: Rat,
    pub kind: PerestroikaKind,
    pub point: Point,
}

/// Local data of one side of the face at `t = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideReport {
    pub neighbor: LatticeVec,
    /// Lattice length at `t = 0`.
    #[serde(with = "serde_rat")]
    pub length: Rat,
    /// `n₁ + n₂`: the side grows iff this exceeds 2.
    #[serde(with = "serde_rat")]
    pub n_sum: Rat,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerestroikaReport {
    pub sides: Vec<SideReport>,
    pub events: Vec<PerestroikaEvent>,
    /// Sampled parameters whose curve has a vertex that is neither smooth nor nodal.
    #[serde(with = "crate::rat::serde_rat_vec")]
    pub singular_samples: Vec<Rat>,
}

/// Sides of the face of `v` keyed by the neighbouring monomial.
fn face_sides(c: &TropicalCurve, v: &LatticeVec) -> BTreeMap<LatticeVec, (Point, Point)> {
    c.edges
        .iter()
        .filter_map(|e| {
            if e.dual.0 == *v {
                Some((e.dual.1, (e.a.clone(), e.b.clone())))
            } else if e.dual.1 == *v {
                Some((e.dual.0, (e.a.clone(), e.b.clone())))
            } else {
                None
            }
        })
        .collect()
}

fn lattice_length(a: &Point, b: &Point, v: &LatticeVec, w: &LatticeVec) -> Rat {
    let e = w.sub(v).perp().primitive();
    e.apply(&b.sub(a)).abs() / int(e.norm2())
}

/// All vertices of every curve in the family are smooth or nodal.
pub fn smooth_or_nodal(c: &TropicalCurve) -> bool {
    c.interior_vertices()
        .all(|v| !matches!(crate::curve::classify_dual(&v.dual), VertexClass::Other(_)))
}

/// Watches the face of `p` shrink along `Add^{ct}_v f`, `t ∈ [0, 1]`.
pub fn wave_family_scan(f: &TropicalSeries, p: &Point, samples: usize) -> Result<PerestroikaReport, Error> {
    plan_family_scan(f, &WavePlan::new(f, p)?, samples)
}

/// Family scan for an arbitrary plan (e.g. a decremented increment).
pub fn plan_family_scan(f: &TropicalSeries, plan: &WavePlan, samples: usize) -> Result<PerestroikaReport, Error> {
    let p = &plan.point;
    if plan.increment.is_zero() {
        return Ok(PerestroikaReport::default());
    }
    let v = plan.monomial;
    let c0 = extract_curve(f);
    let sides0 = face_sides(&c0, &v);
    for (k, (_, (a, b))) in sides0.iter().enumerate() {
        for z in [a, b] {
            match classify_vertex(&c0, z) {
                Ok(VertexClass::Smooth) | Err(Error::NotAVertex) => {}
                _ => return Err(Error::UnclassifiableSide(k)),
            }
        }
    }
    let bps = plan.breakpoints();
    let t_half = &bps[0] / int(2);
    let c_half = extract_curve(&plan.member(f, &t_half));
    let sides_half = face_sides(&c_half, &v);
    let sides: Vec<SideReport> = sides0
        .iter()
        .map(|(w, (a, b))| {
            let l0 = lattice_length(a, b, &v, w);
            let lh = sides_half.get(w).map_or_else(Rat::zero, |(a, b)| lattice_length(a, b, &v, w));
            let rate = (&lh - &l0) / &t_half;
            SideReport { neighbor: *w, length: l0, n_sum: int(2) + rate / &plan.increment }
        })
        .collect();

    let mut events = Vec::new();
    let mut prev = Rat::zero();
    for t in &bps {
        let mid = (&prev + t) / int(2);
        let before = face_sides(&extract_curve(&plan.member(f, &mid)), &v);
        let ft = plan.member(f, t);
        let ct = extract_curve(&ft);
        let has_face = ft.subdivision().cell(&v).is_some();
        if !has_face {
            let region = collapsed_region(plan, t);
            let kind = if region.len() <= 1 {
                PerestroikaKind::FaceCollapsedToPoint
            } else {
                PerestroikaKind::FaceCollapsedToInterval
            };
            events.push(PerestroikaEvent { t: t.clone(), kind, point: region.first().cloned().unwrap_or_else(|| p.clone()) });
            break;
        }
        let after = face_sides(&ct, &v);
        let face = ft.subdivision().cell(&v).expect("face").polygon.clone();
        for (w, (a, b)) in &before {
            if a == b || after.contains_key(w) {
                continue;
            }
            // the side shrank to a vertex of the face on the line v = w
            let raised = &plan.coeff + &plan.increment * t;
            let aw = plan
                .rivals
                .iter()
                .find(|(u, _)| u == w)
                .map(|(_, a)| a.clone())
                .or_else(|| f.coeff(w).cloned());
            let Some(aw) = aw else { continue };
            let Some(q) = face
                .iter()
                .find(|z| w.apply(z) + &aw == v.apply(z) + &raised)
                .cloned()
            else {
                continue;
            };
            let kind = match classify_vertex(&ct, &q) {
                Ok(VertexClass::Nodal) => PerestroikaKind::NodalPerestroika,
                _ => PerestroikaKind::SideContracted,
            };
            let ev = PerestroikaEvent { t: t.clone(), kind, point: q };
            if !events.contains(&ev) {
                events.push(ev);
            }
        }
        prev = t.clone();
    }

    let mut ts: BTreeSet<Rat> = plan.checkpoints().into_iter().collect();
    for k in 1..=samples {
        ts.insert(Rat::new((k as i64).into(), (samples as i64).into()));
    }
    let singular_samples = ts
        .into_iter()
        .filter(|t| !smooth_or_nodal(&extract_curve(&plan.member(f, t))))
        .collect();
    Ok(PerestroikaReport { sides, events, singular_samples })
}

/// `{z ∈ Φ : φ(z) ≥ c t}` as a (possibly degenerate) vertex list.
fn collapsed_region(plan: &WavePlan, t: &Rat) -> Vec<Point> {
    let raised = &plan.coeff + &plan.increment * t;
    let v = plan.monomial;
    let mut region = plan.face.clone();
    for (w, a) in &plan.rivals {
        let d = w.sub(&v);
        let off = a - &raised;
        region = clip_convex(&region, |z| d.apply(z) + &off);
    }
    region
}

/// Area of the face containing `p` (zero if `p` is on the curve).
pub fn face_area_at(f: &TropicalSeries, p: &Point) -> Rat {
    let act = f.active_monomials(p);
    if act.len() != 1 {
        return Rat::zero();
    }
    f.subdivision().cell(&act[0]).map_or_else(Rat::zero, |c| area(&c.polygon))
}

/// Uniform points of the grid `(1/den)ℤ²` strictly inside `poly`.
pub fn sample_interior_points(poly: &QPolygon, n: usize, den: i64, rng: &mut impl rand::Rng) -> Vec<Point> {
    let vs = poly.vertices();
    let lo_x = vs.iter().map(|z| z.x.clone()).min().expect("bounded");
    let hi_x = vs.iter().map(|z| z.x.clone()).max().expect("bounded");
    let lo_y = vs.iter().map(|z| z.y.clone()).min().expect("bounded");
    let hi_y = vs.iter().map(|z| z.y.clone()).max().expect("bounded");
    let d = int(den);
    let grid = |r: &Rat, up: bool| -> i64 {
        let s = r * &d;
        let v = if up { s.ceil() } else { s.floor() };
        v.to_integer().try_into().expect("grid range")
    };
    let (x0, x1, y0, y1) = (grid(&lo_x, true), grid(&hi_x, false), grid(&lo_y, true), grid(&hi_y, false));
    let mut out = Vec::with_capacity(n);
    let mut guard = 0usize;
    while out.len() < n {
        guard += 1;
        assert!(guard < 1_000_000, "grid too coarse for the polygon");
        let z = Point::new(Rat::new(rng.gen_range(x0..=x1).into(), den.into()), Rat::new(rng.gen_range(y0..=y1).into(), den.into()));
        if poly.strictly_contains(&z) {
            out.push(z);
        }
    }
    out
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
    fn figure_wave() {
        let f = third();
        let p = Point::new(rat(1, 5), rat(1, 2));
        let (g, ev) = wave(&f, &p).unwrap();
        assert_eq!(ev.increment, rat(2, 15));
        assert_eq!(ev.monomial, LatticeVec::new(1, 0));
        let expect = TropicalSeries::from_triples(
            QPolygon::unit_square(),
            &[(2, 0, int(0)), (1, 0, rat(2, 15)), (0, 1, int(0)), (-1, 0, int(1)), (0, -1, int(1)), (0, 0, rat(1, 3))],
        )
        .unwrap();
        assert_eq!(g, expect);
        assert!(on_curve(&g, &p));
        // idempotent
        let (h, ev2) = wave(&g, &p).unwrap();
        assert_eq!(h, g);
        assert!(ev2.increment.is_zero());
        // face of (1,0) was the trapezoid of area 1/3·(1 + 1/3)/2 = 2/9
        assert_eq!(ev.avalanche_area, rat(2, 9));
        assert!(matches!(wave(&f, &Point::from_ints(2, 2)), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn zero_wave_is_clamped_distance() {
        let sq = QPolygon::unit_square();
        let l = TropicalSeries::distance_function(&sq.clone().into()).unwrap();
        let p = Point::new(rat(1, 5), rat(2, 7));
        let (g, _) = wave(&TropicalSeries::zero(&sq), &p).unwrap();
        assert_eq!(g, l.clamp(&l.eval(&p).unwrap()).unwrap());
    }

    #[test]
    fn witness_center() {
        let sq = QPolygon::unit_square();
        let w = upper_bound_witness(&TropicalSeries::zero(&sq), &[Point::new(rat(1, 2), rat(1, 2))]).unwrap();
        let l = TropicalSeries::distance_function(&sq.into()).unwrap();
        assert_eq!(w, l);
    }

    #[test]
    fn lattice_dynamics_stabilize() {
        let big = QPolygon::rectangle(int(0), int(0), int(3), int(3)).unwrap();
        let z = TropicalSeries::zero(&big);
        let pts = [Point::from_ints(1, 1), Point::from_ints(2, 2)];
        let a = run_dynamics(&z, &pts, &Schedule::RoundRobin, &StopRule::default()).unwrap();
        let b = run_dynamics(&z, &pts, &Schedule::Explicit { order: vec![1, 0] }, &StopRule::default()).unwrap();
        assert_eq!(a.stopped, StopReason::Stabilized);
        assert_eq!(a.series, b.series);
        for p in &pts {
            assert!(on_curve(&a.series, p));
        }
        for e in &a.events {
            assert!(e.increment.is_integer());
        }
        let none = run_dynamics(&z, &[], &Schedule::RoundRobin, &StopRule::default()).unwrap();
        assert_eq!(none.series, z);
    }

    #[test]
    fn family_scan_of_figure_wave() {
        let f = third();
        let rep = wave_family_scan(&f, &Point::new(rat(1, 5), rat(1, 2)), 4).unwrap();
        assert!(rep.singular_samples.is_empty());
        assert!(rep.events.is_empty());
        let on = wave_family_scan(&f, &Point::new(rat(1, 3), rat(1, 2)), 4).unwrap();
        assert_eq!(on, PerestroikaReport::default());
    }

    #[test]
    fn central_face_collapses() {
        // the constant face of min(x, y, 1-x, 1-y, 1/3) shrinks to the centre
        let f = third();
        let rep = wave_family_scan(&f, &Point::new(rat(1, 2), rat(1, 2)), 0).unwrap();
        assert_eq!(rep.events.len(), 1);
        assert_eq!(rep.events[0].kind, PerestroikaKind::FaceCollapsedToPoint);
        assert_eq!(rep.events[0].t, int(1));
        for s in &rep.sides {
            assert_eq!(s.n_sum, int(0));
        }
    }
}
