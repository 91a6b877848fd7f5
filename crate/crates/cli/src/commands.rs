use std::path::PathBuf;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;
use tropwave::curve::{check_balancing, classify_dual, extract_curve, symplectic_area, TropicalCurve, VertexClass};
use tropwave::lift2::{lift_fuzz, verify_lift_theorem};
use tropwave::rat::{fmt_rat, parse_rat};
use tropwave::refine::{coarsen_dynamics, corners_have_single_edges, make_nice, verge_polynomial};
use tropwave::stats::{avalanche_experiment, AvalancheConfig};
use tropwave::svg::{render, SvgLayers};
use tropwave::wave::{
    plan_family_scan, run_dynamics, wave, PerestroikaKind, Schedule, StopReason, StopRule, WaveEvent, WavePlan,
};
use tropwave::{Point, QPolygon, QuasiDegree, Rat, TropicalSeries};

use crate::bundle::Bundle;
use crate::config::RunConfig;
use crate::fail::Failure;
use crate::{input, Cmd};

pub fn run(cmd: &Cmd, cfg: &RunConfig) -> Result<PathBuf, Failure> {
    match cmd {
        Cmd::Wave { domain, series, point } => cmd_wave(cfg, input::start(domain.as_deref(), series.as_deref())?, &input::point(point)?),
        Cmd::Dynamics { domain, series, points, shuffle } => {
            cmd_dynamics(cfg, input::start(domain.as_deref(), series.as_deref())?, &input::points(points)?, *shuffle)
        }
        Cmd::Stats { domain, n, trials, bins } => {
            let delta = match domain {
                Some(d) => input::domain(d)?,
                None => QPolygon::unit_square(),
            };
            cmd_stats(cfg, &delta, *n, *trials, *bins)
        }
        Cmd::LiftCheck { poly, point, trials, terms } => cmd_lift(cfg, poly.as_deref(), point.as_deref(), *trials, *terms),
        Cmd::MakeNice { domain, series, eps } => {
            let f = match (domain, series) {
                (Some(d), None) => TropicalSeries::distance_function(&input::domain(d)?.into())?,
                _ => input::start(domain.as_deref(), series.as_deref())?,
            };
            cmd_make_nice(cfg, &f, &parse_rat(eps)?)
        }
        Cmd::Verge { domain, degree, eps } => {
            cmd_verge(cfg, &input::domain(domain)?, QuasiDegree(input::degree(degree)?), &parse_rat(eps)?)
        }
        Cmd::Coarsen { series, points, eps } => {
            cmd_coarsen(cfg, &input::series(series)?, &input::points(points)?, &parse_rat(eps)?)
        }
        Cmd::Curve { series } => cmd_curve(cfg, &input::series(series)?),
    }
}

fn svg(f: &TropicalSeries, points: &[Point], highlight: Option<&[Point]>, title: Option<&str>) -> Result<String, Failure> {
    let layers = SvgLayers { highlight, points, title };
    Ok(render(f.polygon()?.vertices(), &extract_curve(f), &layers))
}

#[derive(Serialize)]
struct CurveSummary {
    edges: usize,
    interior_vertices: usize,
    smooth: usize,
    nodal: usize,
    other: usize,
    balanced: bool,
    symplectic_area: String,
}

fn summarize(c: &TropicalCurve) -> CurveSummary {
    let classes: Vec<VertexClass> = c.interior_vertices().map(|v| classify_dual(&v.dual)).collect();
    let count = |k: fn(&VertexClass) -> bool| classes.iter().filter(|c| k(c)).count();
    CurveSummary {
        edges: c.edges.len(),
        interior_vertices: classes.len(),
        smooth: count(|c| *c == VertexClass::Smooth),
        nodal: count(|c| *c == VertexClass::Nodal),
        other: count(|c| matches!(c, VertexClass::Other(_))),
        balanced: check_balancing(c),
        symplectic_area: fmt_rat(&symplectic_area(c)),
    }
}

fn cmd_wave(cfg: &RunConfig, f: TropicalSeries, p: &Point) -> Result<PathBuf, Failure> {
    let plan = WavePlan::new(&f, p)?;
    let (g, ev) = wave(&f, p)?;
    let mut b = Bundle::create(cfg)?;
    b.json("event.json", &ev)?;
    b.json("series.json", &g)?;
    let face = (!ev.avalanche_area.is_zero()).then_some(plan.face.as_slice());
    b.write("before.svg", &svg(&f, std::slice::from_ref(p), face, None)?)?;
    b.write("after.svg", &svg(&g, std::slice::from_ref(p), None, None)?)?;
    b.finish("wave", cfg)
}

fn events_jsonl(events: &[WaveEvent]) -> String {
    events.iter().map(|e| serde_json::to_string(e).expect("events serialize") + "\n").collect()
}

fn cmd_dynamics(cfg: &RunConfig, f: TropicalSeries, points: &[Point], shuffle: bool) -> Result<PathBuf, Failure> {
    let schedule = if shuffle { Schedule::SeededRandom { seed: cfg.seed } } else { Schedule::RoundRobin };
    let stop = StopRule { tolerance: Some(cfg.tol.clone()), max_steps: cfg.max_steps };
    let r = run_dynamics(&f, points, &schedule, &stop)?;
    let mut b = Bundle::create(cfg)?;
    b.write("events.jsonl", &events_jsonl(&r.events))?;
    b.json("series.json", &r.series)?;
    b.json(
        "result.json",
        &json!({
            "stopped_reason": r.stopped,
            "steps": r.events.len(),
            "sweeps": r.sweeps,
            "last_sweep_rho": fmt_rat(&r.last_sweep_rho),
            "schedule": schedule,
            "curve": summarize(&extract_curve(&r.series)),
        }),
    )?;
    b.write("final.svg", &svg(&r.series, points, None, Some("final"))?)?;
    let manifest = b.finish("dynamics", cfg)?;
    if r.stopped == StopReason::StepLimit {
        return Err(Failure::nonconvergence(format!("step limit {} reached; artifacts in {}", cfg.max_steps, manifest.display())));
    }
    Ok(manifest)
}

fn cmd_stats(cfg: &RunConfig, delta: &QPolygon, n: usize, trials: usize, bins: usize) -> Result<PathBuf, Failure> {
    let ac = AvalancheConfig { n, trials, seed: cfg.seed, denominator: cfg.denom_bound, max_steps: cfg.max_steps, bins };
    let s = avalanche_experiment(delta, &ac)?;
    let mut b = Bundle::create(cfg)?;
    b.json("stats.json", &s)?;
    let manifest = b.finish("stats", cfg)?;
    if s.unstable_trials > 0 {
        return Err(Failure::nonconvergence(format!("{} trials hit the step limit", s.unstable_trials)));
    }
    Ok(manifest)
}

fn cmd_lift(
    cfg: &RunConfig,
    poly: Option<&std::path::Path>,
    point: Option<&str>,
    trials: usize,
    terms: usize,
) -> Result<PathBuf, Failure> {
    let mut b = Bundle::create(cfg)?;
    let ok = if let (Some(poly), Some(point)) = (poly, point) {
        let f = input::lift_poly(poly)?;
        let check = verify_lift_theorem(&f, &input::lift_point(point)?)?;
        b.json("lift.json", &check)?;
        check.holds
    } else {
        let r = lift_fuzz(cfg.seed, trials, terms)?;
        b.json("lift.json", &r)?;
        r.failures.is_empty()
    };
    let manifest = b.finish("lift-check", cfg)?;
    if !ok {
        return Err(Failure::certificate("lift identity failed; see lift.json"));
    }
    Ok(manifest)
}

fn cmd_make_nice(cfg: &RunConfig, f: &TropicalSeries, eps: &Rat) -> Result<PathBuf, Failure> {
    let delta = f.polygon()?.clone();
    let (poly, g, steps) = make_nice(&delta, f, eps)?;
    let mut b = Bundle::create(cfg)?;
    b.json(
        "nice.json",
        &json!({
            "eps": fmt_rat(eps),
            "polygon": poly,
            "steps": steps,
            "series": g,
            "quasi_degree": g.quasi_degree()?,
            "nice": g.is_nice(),
            "unimodular": tropwave::geometry::is_unimodular(&poly),
        }),
    )?;
    b.write("nice.svg", &svg(&g, &[], None, Some("nice"))?)?;
    b.finish("make-nice", cfg)
}

fn cmd_verge(cfg: &RunConfig, delta: &QPolygon, d: QuasiDegree, eps: &Rat) -> Result<PathBuf, Failure> {
    let g = verge_polynomial(delta, &d, eps)?;
    let c = extract_curve(&g);
    let mut b = Bundle::create(cfg)?;
    b.json(
        "verge.json",
        &json!({
            "eps": fmt_rat(eps),
            "degree": d,
            "series": g,
            "curve": summarize(&c),
            "corners_single_edges": corners_have_single_edges(&g)?,
        }),
    )?;
    b.write("verge.svg", &svg(&g, &[], None, Some("verge"))?)?;
    b.finish("verge", cfg)
}

#[derive(Serialize)]
struct StepScan {
    step: usize,
    #[serde(with = "tropwave::rat::serde_rat")]
    increment: Rat,
    face_collapsed: usize,
    nodal_perestroikas: usize,
}

fn is_collapse(k: &PerestroikaKind) -> bool {
    matches!(k, PerestroikaKind::FaceCollapsedToPoint | PerestroikaKind::FaceCollapsedToInterval)
}

/// Replays `events` from `g` with the given increments and scans each family.
fn scan_replay(g: &TropicalSeries, events: &[WaveEvent], increments: &[Rat]) -> Result<Vec<StepScan>, Failure> {
    let mut cur = g.clone();
    let mut out = Vec::new();
    for (k, (ev, c)) in events.iter().zip(increments).enumerate() {
        if c.is_zero() {
            continue;
        }
        let plan = WavePlan::for_monomial(&cur, &ev.monomial, c, &ev.point)?;
        let rep = plan_family_scan(&cur, &plan, 8)?;
        out.push(StepScan {
            step: k,
            increment: c.clone(),
            face_collapsed: rep.events.iter().filter(|e| is_collapse(&e.kind)).count(),
            nodal_perestroikas: rep.events.iter().filter(|e| e.kind == PerestroikaKind::NodalPerestroika).count(),
        });
        cur = plan.member(&cur, &Rat::one());
    }
    Ok(out)
}

fn cmd_coarsen(cfg: &RunConfig, g: &TropicalSeries, points: &[Point], eps: &Rat) -> Result<PathBuf, Failure> {
    let stop = StopRule { tolerance: None, max_steps: cfg.max_steps };
    let r = run_dynamics(g, points, &Schedule::RoundRobin, &stop)?;
    if r.stopped != StopReason::Stabilized {
        return Err(Failure::nonconvergence("the dynamic did not stabilize"));
    }
    let (plan, f, certs) = coarsen_dynamics(g, &r.events, eps)?;
    let full: Vec<Rat> = r.events.iter().map(|e| e.increment.clone()).collect();
    let full_scan = scan_replay(g, &r.events, &full).ok();
    let coarse_scan = scan_replay(g, &r.events, &plan.increments)?;
    let collapsed: usize = coarse_scan.iter().map(|s| s.face_collapsed).sum();
    let mut b = Bundle::create(cfg)?;
    b.write("events.jsonl", &events_jsonl(&r.events))?;
    b.json(
        "coarsen.json",
        &json!({
            "eps": fmt_rat(eps),
            "plan": plan,
            "certificates": certs,
            "face_collapsed_events": collapsed,
            "coarse_scan": coarse_scan,
            "full_scan": full_scan,
        }),
    )?;
    b.json("series.json", &f)?;
    b.write("coarse.svg", &svg(&f, points, None, Some("coarse replay"))?)?;
    b.write("full.svg", &svg(&r.series, points, None, Some("full dynamic"))?)?;
    let manifest = b.finish("coarsen", cfg)?;
    if collapsed > 0 || certs.len() != r.events.len() {
        return Err(Failure::certificate("coarse replay collapses a face"));
    }
    Ok(manifest)
}

fn cmd_curve(cfg: &RunConfig, f: &TropicalSeries) -> Result<PathBuf, Failure> {
    let c = extract_curve(f);
    let mut b = Bundle::create(cfg)?;
    b.json("curve.json", &json!({ "summary": summarize(&c), "curve": c }))?;
    b.write("curve.svg", &svg(f, &[], None, Some("curve"))?)?;
    b.finish("curve", cfg)
}
