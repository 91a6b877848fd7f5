//! Avalanche statistics of the wave dynamic from `0_Δ`.

use num_traits::{Signed, ToPrimitive, Zero};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{area, QPolygon};
use crate::par;
use crate::rat::{int, serde_rat, Rat};
use crate::series::TropicalSeries;
use crate::wave::{run_dynamics, sample_interior_points, Schedule, StopReason, StopRule};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvalancheConfig {
    /// Points per trial.
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Points are drawn from the grid `(1/denominator)ℤ²`.
    pub denominator: i64,
    pub max_steps: usize,
    /// Number of equal-width histogram bins over `[0, area(Δ)]`.
    pub bins: usize,
}

impl Default for AvalancheConfig {
    fn default() -> Self {
        AvalancheConfig { n: 20, trials: 100, seed: 0, denominator: 64, max_steps: 100_000, bins: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CcdfPoint {
    #[serde(with = "serde_rat")]
    pub area: Rat,
    /// Fraction of avalanches with area `≥ area`.
    #[serde(with = "serde_rat")]
    pub prob: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bin {
    #[serde(with = "serde_rat")]
    pub lo: Rat,
    #[serde(with = "serde_rat")]
    pub hi: Rat,
    pub count: usize,
}

/// Hill estimate of the tail index from the `k_tail` largest samples.
/// `alpha` is the only floating-point value in the bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hill {
    pub alpha: Option<f64>,
    pub k_tail: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvalancheStats {
    pub seed: u64,
    pub config: AvalancheConfig,
    pub avalanches: usize,
    /// Trials that hit the step limit before stabilizing.
    pub unstable_trials: usize,
    pub steps_per_trial: Vec<usize>,
    pub ccdf: Vec<CcdfPoint>,
    pub histogram: Vec<Bin>,
    pub hill: Hill,
}

/// Empirical `P(X ≥ x)` at each distinct sample, increasing in `x`.
pub fn ccdf(samples: &[Rat]) -> Vec<CcdfPoint> {
    let mut s = samples.to_vec();
    s.sort();
    let n = s.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        out.push(CcdfPoint { area: s[i].clone(), prob: Rat::new(((n - i) as i64).into(), (n as i64).into()) });
        while i < n && s[i] == out.last().expect("just pushed").area {
            i += 1;
        }
    }
    out
}

/// Counts over `bins` equal bins of `[0, top]`; the last bin is closed.
pub fn histogram(samples: &[Rat], top: &Rat, bins: usize) -> Vec<Bin> {
    let width = top / int(bins as i64);
    let mut out: Vec<Bin> = (0..bins)
        .map(|k| Bin { lo: &width * int(k as i64), hi: &width * int(k as i64 + 1), count: 0 })
        .collect();
    for x in samples {
        let k = (x / &width).floor().to_integer().to_usize().unwrap_or(usize::MAX).min(bins - 1);
        out[k].count += 1;
    }
    out
}

/// `α̂ = k / Σ_{i<k} ln(x_(i) / x_(k))` over the descending order statistics,
/// with `k = ⌈√N⌉` (capped at `N − 1`).
pub fn hill_estimate(samples: &[Rat]) -> Hill {
    let mut xs: Vec<f64> = samples.iter().filter(|x| x.is_positive()).map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    xs.sort_by(|a, b| b.total_cmp(a));
    let n = xs.len();
    if n < 2 {
        return Hill { alpha: None, k_tail: 0 };
    }
    let k = ((n as f64).sqrt().ceil() as usize).clamp(1, n - 1);
    let base = xs[k].ln();
    let sum: f64 = xs[..k].iter().map(|x| x.ln() - base).sum();
    Hill { alpha: (sum > 0.0).then(|| k as f64 / sum), k_tail: k }
}

/// Per trial: `n` seeded grid points, the dynamic from `0_Δ`, and every
/// positive avalanche area. Trials use independent streams of the seed and
/// are reduced in trial order, so the bundle depends only on the inputs.
pub fn avalanche_experiment(delta: &QPolygon, cfg: &AvalancheConfig) -> Result<AvalancheStats, Error> {
    if cfg.n == 0 || cfg.bins == 0 || cfg.denominator < 1 {
        return Err(Error::InvalidSeries("need n ≥ 1, bins ≥ 1 and a positive denominator".into()));
    }
    let zero = TropicalSeries::zero(delta);
    let stop = StopRule { tolerance: None, max_steps: cfg.max_steps };
    let trials: Vec<u64> = (0..cfg.trials as u64).collect();
    let runs = par::map(&trials, |&t| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(t);
        let pts = sample_interior_points(delta, cfg.n, cfg.denominator, &mut rng);
        run_dynamics(&zero, &pts, &Schedule::RoundRobin, &stop)
    });
    let mut areas = Vec::new();
    let mut unstable = 0;
    let mut steps = Vec::with_capacity(runs.len());
    for r in runs {
        let r = r?;
        unstable += usize::from(r.stopped == StopReason::StepLimit);
        steps.push(r.events.len());
        areas.extend(r.events.into_iter().map(|e| e.avalanche_area).filter(|a| !a.is_zero()));
    }
    Ok(AvalancheStats {
        seed: cfg.seed,
        config: cfg.clone(),
        avalanches: areas.len(),
        unstable_trials: unstable,
        steps_per_trial: steps,
        ccdf: ccdf(&areas),
        histogram: histogram(&areas, &area(delta.vertices()), cfg.bins),
        hill: hill_estimate(&areas),
    })
}
