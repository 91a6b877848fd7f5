//! Seeded property checks, shared by the proptest suite and the acceptance run.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropwave::curve::{check_balancing, curves_within, extract_curve};
use tropwave::rat::{int, rat, Point, Rat};
use tropwave::wave::{compose_waves, on_curve, wave};
use tropwave::{rho, QPolygon, TropicalSeries};

use super::*;

pub type Check = fn(u64) -> Result<(), String>;

pub const ALL: &[(&str, Check)] = &[
    ("monotonicity", monotone),
    ("non-expansiveness", non_expansive),
    ("idempotence", idempotent),
    ("upper bound", upper_bound),
    ("balancing", balanced),
    ("edge weight = gcd", weights),
    ("2eps closeness", closeness),
    ("distance function", distance),
];

macro_rules! ensure {
    ($c:expr, $($msg:tt)+) => {
        if !$c {
            return Err(format!($($msg)+));
        }
    };
}

/// Grid samples plus all curve and domain vertices and edge midpoints.
pub fn samples(poly: &QPolygon, fs: &[&TropicalSeries], rng: &mut impl Rng) -> Vec<Point> {
    let mut out = poly.vertices().to_vec();
    for f in fs {
        let c = extract_curve(f);
        out.extend(c.vertices.iter().map(|v| v.point.clone()));
        for e in &c.edges {
            out.push(e.a.add(&e.b).scale(&rat(1, 2)));
        }
    }
    out.extend(random_points(rng, poly, 20, 97));
    out
}

/// A random polygon and `G_P 0` for one to four grid points `P`.
pub fn instance(seed: u64) -> (ChaCha8Rng, QPolygon, TropicalSeries, Vec<Point>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poly = random_polygon(&mut rng);
    let n = rng.gen_range(1..=4);
    let pts = random_points(&mut rng, &poly, n, 16);
    let (f, _) = compose_waves(&TropicalSeries::zero(&poly), &pts).unwrap();
    (rng, poly, f, pts)
}

/// `f` and `g = G_Q f ≥ f` with a third point `p`.
fn pair(seed: u64) -> (ChaCha8Rng, QPolygon, TropicalSeries, TropicalSeries, Point) {
    let (mut rng, poly, f, _) = instance(seed);
    let more = random_points(&mut rng, &poly, 2, 16);
    let (g, _) = compose_waves(&f, &more).unwrap();
    let p = random_points(&mut rng, &poly, 1, 16).remove(0);
    (rng, poly, f, g, p)
}

pub fn monotone(seed: u64) -> Result<(), String> {
    let (mut rng, poly, f, g, p) = pair(seed);
    let (gf, _) = wave(&f, &p).map_err(|e| e.to_string())?;
    let (gg, _) = wave(&g, &p).map_err(|e| e.to_string())?;
    let s = samples(&poly, &[&f, &g, &gf, &gg], &mut rng);
    ensure!(below_at(&f, &g, &s), "pair is not ordered");
    ensure!(below_at(&gf, &gg, &s), "G_p f ≰ G_p g at p = {p}");
    Ok(())
}

pub fn non_expansive(seed: u64) -> Result<(), String> {
    let (_, _, f, g, p) = pair(seed);
    let (gf, _) = wave(&f, &p).unwrap();
    let (gg, _) = wave(&g, &p).unwrap();
    let (after, before) = (rho(&gf, &gg).unwrap(), rho(&f, &g).unwrap());
    ensure!(after <= before, "ρ grew from {before} to {after}");
    Ok(())
}

pub fn idempotent(seed: u64) -> Result<(), String> {
    let (mut rng, poly, f, _) = instance(seed);
    let p = random_points(&mut rng, &poly, 1, 16).remove(0);
    let (once, _) = wave(&f, &p).unwrap();
    let (twice, ev) = wave(&once, &p).unwrap();
    ensure!(ev.increment.is_zero(), "second wave moved by {}", ev.increment);
    ensure!(rho(&once, &twice).unwrap().is_zero(), "G_p G_p f ≠ G_p f");
    ensure!(on_curve(&once, &p), "p is off the curve after its wave");
    Ok(())
}

pub fn upper_bound(seed: u64) -> Result<(), String> {
    let (mut rng, poly, f, pts) = instance(seed);
    let k = int(pts.len() as i64);
    for z in random_points(&mut rng, &poly, 10, 53).iter().chain(poly.vertices()) {
        let v = f.value(z);
        ensure!(v <= &k * oracle_distance(&poly, z), "bound fails at {z}");
        ensure!(nonneg(&v), "negative at {z}");
    }
    Ok(())
}

pub fn balanced(seed: u64) -> Result<(), String> {
    let c = extract_curve(&instance(seed).2);
    ensure!(check_balancing(&c), "library balancing check fails");
    ensure!(oracle_balanced(&c), "unbalanced vertex");
    Ok(())
}

pub fn weights(seed: u64) -> Result<(), String> {
    ensure!(oracle_weights(&extract_curve(&instance(seed).2)), "edge weight or direction mismatch");
    Ok(())
}

/// Raises every coefficient that is positive on the whole domain by at most
/// `ε` (so the result stays nonnegative and zero on the boundary).
pub fn closeness(seed: u64) -> Result<(), String> {
    let (mut rng, poly, f, _) = instance(seed);
    let k = rng.gen_range(1..=8);
    let eps = rat(k, 64);
    let terms: Vec<(i64, i64, Rat)> = f
        .support()
        .iter()
        .map(|(v, a)| {
            let low = poly.vertices().iter().map(|w| v.apply(w) + a).min().unwrap();
            let d = if low.is_positive() { rat(rng.gen_range(0..=k), 64) } else { Rat::zero() };
            (v.i, v.j, a + d)
        })
        .collect();
    let g = TropicalSeries::from_triples(poly, &terms).map_err(|e| e.to_string())?;
    ensure!(rho(&f, &g).unwrap() <= eps, "perturbation exceeds ε");
    ensure!(curves_within(&f, &g, &eps), "C(f) not within 2ε of C(g)");
    ensure!(curves_within(&g, &f, &eps), "C(g) not within 2ε of C(f)");
    Ok(())
}

pub fn distance(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poly = random_polygon(&mut rng);
    let l = TropicalSeries::distance_function(&poly.clone().into()).map_err(|e| e.to_string())?;
    for z in random_points(&mut rng, &poly, 10, 31).iter().chain(poly.vertices()) {
        ensure!(l.value(z) == oracle_distance(&poly, z), "l_Ω differs at {z}");
    }
    Ok(())
}
