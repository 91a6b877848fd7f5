//! End-to-end acceptance run: one PASS/FAIL line per criterion, with the
//! tolerance and time budget it was held to. Exits nonzero on any failure.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use common::*;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropwave::curve::{
    boundary_area, classify_dual, curves_within, extract_curve, symplectic_area, VertexClass,
};
use tropwave::lift2::{lift_fuzz, lift_hypothesis, random_lift_instance, s_wave, val_point};
use tropwave::rat::{int, rat, Point, Rat};
use tropwave::geometry::is_unimodular;
use tropwave::refine::{coarsen_dynamics, make_nice, verge_polynomial};
use tropwave::stats::{avalanche_experiment, AvalancheConfig};
use tropwave::wave::{on_curve, run_dynamics, smooth_or_nodal, upper_bound_witness, wave, Schedule, StopRule, StopReason};
use tropwave::{Error, LatticeVec, QPolygon, QuasiDegree, TropicalSeries};

type Outcome = Result<String, String>;

/// Name, tolerance, time budget in seconds, check.
type Criterion = (&'static str, &'static str, u64, fn() -> Outcome);

macro_rules! ensure {
    ($c:expr, $($msg:tt)+) => {
        if !$c {
            return Err(format!($($msg)+));
        }
    };
}

fn err(e: Error) -> String {
    e.to_string()
}

fn tol_1e9() -> Rat {
    Rat::new(1.into(), 1_000_000_000.into())
}

/// Both dynamics results, stopped on a sweep `ρ` change below `10⁻⁹`.
fn limit(zero: &TropicalSeries, pts: &[Point], schedule: Schedule) -> Result<tropwave::wave::DynamicsResult, String> {
    let stop = StopRule { tolerance: Some(tol_1e9()), max_steps: 100_000 };
    let r = run_dynamics(zero, pts, &schedule, &stop).map_err(err)?;
    ensure!(r.stopped != StopReason::StepLimit, "step limit reached");
    Ok(r)
}

fn figure_wave() -> Outcome {
    let (g, ev) = wave(&third(), &Point::new(rat(1, 5), rat(1, 2))).map_err(err)?;
    let expect: BTreeMap<LatticeVec, Rat> = [
        ((2, 0), int(0)),
        ((1, 0), rat(2, 15)),
        ((0, 1), int(0)),
        ((-1, 0), int(1)),
        ((0, -1), int(1)),
        ((0, 0), rat(1, 3)),
    ]
    .into_iter()
    .map(|((i, j), a)| (LatticeVec::new(i, j), a))
    .collect();
    ensure!(*g.support() == expect, "support {:?}", g.support());
    ensure!(ev.increment == rat(2, 15), "increment {}", ev.increment);
    let d = g.quasi_degree().map_err(err)?;
    ensure!(d.0 == [2, 1, 1, 1], "quasi-degree {:?}", d.0);
    for i in 0..=30 {
        for j in 0..=30 {
            let (x, y) = (rat(i, 30), rat(j, 30));
            let direct = [&x * int(2), &x + rat(2, 15), y.clone(), int(1) - &x, int(1) - &y, rat(1, 3)]
                .into_iter()
                .min()
                .unwrap();
            ensure!(g.value(&Point::new(x, y)) == direct, "value differs at ({i}/30, {j}/30)");
        }
    }
    Ok("support, increment 2/15, degree [2,1,1,1], 961 grid values".into())
}

fn single_wave_formula() -> Outcome {
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = random_polygon(&mut rng);
        let p = random_points(&mut rng, &poly, 1, 16).remove(0);
        let (g, _) = wave(&TropicalSeries::zero(&poly), &p).map_err(err)?;
        let lp = oracle_distance(&poly, &p);
        for z in random_points(&mut rng, &poly, 50, 61) {
            ensure!(g.value(&z) == oracle_distance(&poly, &z).min(lp.clone()), "seed {seed}: differs at {z}");
        }
    }
    Ok("100 pairs x 50 samples".into())
}

fn convergence() -> Outcome {
    let mut exact = 0;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let poly = random_polygon(&mut rng);
        let n = rng.gen_range(1..=5);
        let pts = random_points(&mut rng, &poly, n, 16);
        let zero = TropicalSeries::zero(&poly);
        let a = limit(&zero, &pts, Schedule::RoundRobin)?;
        let b = limit(&zero, &pts, Schedule::SeededRandom { seed })?;
        let gap = tropwave::rho(&a.series, &b.series).map_err(err)?;
        if a.stopped == StopReason::Stabilized && b.stopped == StopReason::Stabilized {
            exact += 1;
            ensure!(gap.is_zero(), "seed {seed}: stabilized limits differ by {gap}");
            for p in &pts {
                ensure!(on_curve(&a.series, p), "seed {seed}: {p} is a smooth point of the limit");
            }
        } else {
            ensure!(gap < int(2) * tol_1e9(), "seed {seed}: schedules differ by {gap}");
        }
    }
    Ok(format!("20 instances, {exact} stabilized exactly"))
}

fn property_suite() -> Outcome {
    let mut lines = Vec::new();
    for (name, check) in common::checks::ALL {
        for seed in 0..200 {
            check(seed).map_err(|e| format!("{name}, seed {seed}: {e}"))?;
        }
        lines.push(*name);
    }
    Ok(format!("200 seeds each: {}", lines.join(", ")))
}

/// Members of `V(Δ, P, 0)`: limits for `P ∪ {q}` and the explicit witness
/// with random extra monomials, kept only while every `p` stays on the curve.
fn competitors(rng: &mut ChaCha8Rng, poly: &QPolygon, pts: &[Point], count: usize) -> Result<Vec<TropicalSeries>, String> {
    let zero = TropicalSeries::zero(poly);
    let witness = upper_bound_witness(&zero, pts).map_err(err)?;
    let mut out = vec![witness.clone()];
    while out.len() < count {
        if out.len() % 2 == 0 {
            let mut more = pts.to_vec();
            more.extend(random_points(rng, poly, 1, 16).into_iter().filter(|q| !pts.contains(q)));
            out.push(limit(&zero, &more, Schedule::RoundRobin)?.series);
        } else {
            let v = LatticeVec::new(rng.gen_range(-3..=3), rng.gen_range(-3..=3));
            let low = poly.vertices().iter().map(|w| v.apply(w)).min().unwrap();
            let c = rat(rng.gen_range(1..=32), 32) - low;
            let mut support = witness.support().clone();
            support.entry(v).and_modify(|a| *a = a.clone().min(c.clone())).or_insert(c);
            let g = TropicalSeries::new(poly.clone(), support).map_err(err)?;
            if pts.iter().all(|p| on_curve(&g, p)) {
                out.push(g);
            }
        }
    }
    Ok(out)
}

fn area_identities() -> Outcome {
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
        let poly = random_polygon(&mut rng);
        let n = rng.gen_range(1..=3);
        let pts = random_points(&mut rng, &poly, n, 16);
        let f = limit(&TropicalSeries::zero(&poly), &pts, Schedule::RoundRobin)?.series;
        let area = symplectic_area(&extract_curve(&f));
        let sides = boundary_area(&poly, &f.quasi_degree().map_err(err)?.0);
        ensure!(area == sides, "seed {seed}: area {area} but sides give {sides}");
        for g in competitors(&mut rng, &poly, &pts, 20)? {
            let other = symplectic_area(&extract_curve(&g));
            let bound = boundary_area(&poly, &g.quasi_degree().map_err(err)?.0);
            ensure!(other == bound, "seed {seed}: competitor area {other} but sides give {bound}");
            ensure!(area <= other, "seed {seed}: competitor has smaller area {other} < {area}");
        }
    }
    Ok("50 instances, 20 competitors each".into())
}

fn lift_theorem() -> Outcome {
    let rep = lift_fuzz(0, 1000, 5).map_err(err)?;
    ensure!(rep.failures.is_empty(), "{} failures, first {:?}", rep.failures.len(), rep.failures.first());
    ensure!(rep.checked == 1000, "only {} generic instances", rep.checked);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    while checked < 1000 {
        let (f, p) = random_lift_instance(&mut rng, 5);
        if lift_hypothesis(&f, &p).is_err() {
            continue;
        }
        checked += 1;
        let s = s_wave(&f, &p).map_err(err)?;
        ensure!(s.eval(&p).map_err(err)?.is_zero(), "(S_p F)(p) ≠ 0 for {}", f.to_text());
        ensure!(s_wave(&s, &p).map_err(err)? == s, "S_p is not idempotent on {}", f.to_text());
        let q = val_point(&p).map_err(err)?;
        let expect = oracle_single_wave(&f.trop().map_err(err)?.0, &q);
        ensure!(s.trop().map_err(err)?.0 == expect, "Trop(S_p F) ≠ wave for {}", f.to_text());
    }
    Ok(format!("1000 generic of {} drawn; 1000 more vs oracle", rep.checked + rep.skipped))
}

/// A nice quasi-degree: every second side may get multiplicity two.
fn nice_degree(rng: &mut ChaCha8Rng, sides: usize) -> QuasiDegree {
    let mut d = vec![1; sides];
    for k in (0..sides.saturating_sub(1)).step_by(2) {
        if rng.gen_bool(0.5) {
            d[k] = 2;
        }
    }
    QuasiDegree(d)
}

fn near_side(poly: &QPolygon, a: &Point, b: &Point, eps: &Rat) -> bool {
    let e2 = eps * eps;
    poly.halfplanes().iter().any(|h| {
        let (u, v) = (h.eval(a), h.eval(b));
        &u * &u <= &e2 * int(h.n.norm2()) && &v * &v <= &e2 * int(h.n.norm2())
    })
}

fn refinement() -> Outcome {
    let mut blowups = 0;
    let mut coarse_steps = 0;
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + seed);
        let poly = random_polygon(&mut rng);
        let n = rng.gen_range(1..=2);
        let pts = random_points(&mut rng, &poly, n, 16);
        let (f, _) = tropwave::wave::compose_waves(&TropicalSeries::zero(&poly), &pts).map_err(err)?;

        let mut eps = rat(1, 8);
        let (nice, g, steps) = loop {
            match make_nice(&poly, &f, &eps) {
                Err(Error::EpsilonTooLarge(_)) => eps /= int(2),
                r => break r.map_err(|e| format!("seed {seed}: make_nice: {e}"))?,
            }
        };
        blowups += steps.len();
        ensure!(is_unimodular(&nice) && g.is_nice(), "seed {seed}: make_nice output is not nice");
        let corners: Vec<Point> = poly.corners().into_iter().map(|c| c.apex).collect();
        let e2 = &eps * &eps;
        for z in random_points(&mut rng, &nice, 40, 67) {
            if corners.iter().all(|c| z.dist2(c) >= e2) {
                ensure!(g.value(&z) == f.value(&z), "seed {seed}: make_nice changed f at {z}");
            }
        }

        let d = nice_degree(&mut rng, nice.num_sides());
        let v = verge_polynomial(&nice, &d, &eps).map_err(|e| format!("seed {seed}: verge: {e}"))?;
        ensure!(v.is_nice() && v.quasi_degree().map_err(err)? == d, "seed {seed}: verge degree");
        let c = extract_curve(&v);
        ensure!(
            c.interior_vertices().all(|x| classify_dual(&x.dual) == VertexClass::Smooth),
            "seed {seed}: verge curve is not smooth"
        );
        ensure!(c.edges.iter().all(|e| near_side(&nice, &e.a, &e.b, &eps)), "seed {seed}: verge edge far from sides");

        let p = nice.interior_probe();
        ensure!(v.active_monomials(&p) == [LatticeVec::ZERO], "seed {seed}: probe is not on the plateau");
        let (_, ev) = wave(&v, &p).map_err(err)?;
        let (plan, coarse, certs) =
            coarsen_dynamics(&v, std::slice::from_ref(&ev), &eps).map_err(|e| format!("seed {seed}: coarsen: {e}"))?;
        coarse_steps += certs.len();
        ensure!(plan.increments[0] < ev.increment, "seed {seed}: increment not lowered");
        ensure!(smooth_or_nodal(&extract_curve(&coarse)), "seed {seed}: coarse curve has a worse vertex");
        let (full, _) = wave(&v, &p).map_err(err)?;
        ensure!(curves_within(&coarse, &full, &eps) && curves_within(&full, &coarse, &eps), "seed {seed}: not ε-close");
    }
    Ok(format!("10 instances, {blowups} blow-ups, {coarse_steps} certified coarse steps"))
}

fn avalanches() -> Outcome {
    let cfg = AvalancheConfig { n: 10, trials: 20, seed: 7, ..AvalancheConfig::default() };
    let sq = QPolygon::unit_square();
    let a = serde_json::to_string(&avalanche_experiment(&sq, &cfg).map_err(err)?).unwrap();
    let s = avalanche_experiment(&sq, &cfg).map_err(err)?;
    ensure!(a == serde_json::to_string(&s).unwrap(), "runs differ");
    ensure!(s.unstable_trials == 0, "{} unstable trials", s.unstable_trials);
    ensure!(s.ccdf.windows(2).all(|w| w[0].area < w[1].area && w[0].prob > w[1].prob), "CCDF not monotone");
    ensure!(s.ccdf.first().is_some_and(|c| c.prob == int(1)), "CCDF does not start at 1");
    let alpha = s.hill.alpha.ok_or("no Hill estimate")?;
    Ok(format!("{} avalanches, {} bytes identical, alpha ~ {alpha:.3} (k = {})", s.avalanches, a.len(), s.hill.k_tail))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("figure wave", "exact", 1, figure_wave),
        ("single-wave formula", "exact", 30, single_wave_formula),
        ("convergence & order independence", "exact, or rho gap < 2e-9", 120, convergence),
        ("property suite", "exact", 600, property_suite),
        ("area identities & minimality", "exact", 600, area_identities),
        ("lift theorem fuzz", "exact", 60, lift_theorem),
        ("refinement pipeline", "exact certificates", 300, refinement),
        ("avalanche determinism", "byte-identical", 600, avalanches),
    ];
    let mut failed = 0;
    for (name, tol, budget, run) in criteria {
        let t = Instant::now();
        let r = run();
        let dt = t.elapsed();
        let ok = r.is_ok() && dt <= Duration::from_secs(budget);
        failed += usize::from(!ok);
        let detail = match &r {
            Ok(s) if dt > Duration::from_secs(budget) => format!("{s}; over time budget"),
            Ok(s) | Err(s) => s.clone(),
        };
        println!(
            "{} {name:<34} tol={tol:<26} {:>7.2}s/{budget}s  {detail}",
            if ok { "PASS" } else { "FAIL" },
            dt.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
