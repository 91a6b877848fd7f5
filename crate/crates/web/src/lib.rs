//! Browser bindings: click to fire waves, replay the dynamic of all clicked
//! points, and switch between preset domains.

use num_traits::Signed;
use tropwave::curve::extract_curve;
use tropwave::rat::{int, rat, Point, Rat};
use tropwave::svg::{render, SvgLayers};
use tropwave::wave::{run_dynamics, wave, Schedule, StopReason, StopRule, WavePlan};
use tropwave::{QPolygon, TropicalSeries};
use wasm_bindgen::prelude::*;

/// Clicks snap to this grid so every input is an exact rational.
const GRID: i64 = 64;

fn snap(v: f64) -> Rat {
    rat((v * GRID as f64).round() as i64, GRID)
}

fn preset(name: &str) -> Result<(QPolygon, TropicalSeries), JsError> {
    let e = |e: tropwave::Error| JsError::new(&e.to_string());
    Ok(match name {
        "figure" => {
            let sq = QPolygon::unit_square();
            let f = TropicalSeries::from_triples(
                sq.clone(),
                &[(1, 0, int(0)), (0, 1, int(0)), (-1, 0, int(1)), (0, -1, int(1)), (0, 0, rat(1, 3))],
            )
            .map_err(e)?;
            (sq, f)
        }
        "square" => {
            let sq = QPolygon::unit_square();
            (sq.clone(), TropicalSeries::zero(&sq))
        }
        "pentagon" => {
            let p = QPolygon::from_vertices(&[
                Point::from_ints(0, 0),
                Point::from_ints(1, 0),
                Point::new(int(1), rat(7, 10)),
                Point::new(rat(7, 10), int(1)),
                Point::from_ints(0, 1),
            ])
            .map_err(e)?;
            (p.clone(), TropicalSeries::zero(&p))
        }
        "distance" => {
            let p = QPolygon::lattice(&[(0, 0), (2, -1), (2, 1), (0, 1)]).map_err(e)?;
            let f = TropicalSeries::distance_function(&p.clone().into()).map_err(e)?;
            (p, f)
        }
        _ => return Err(JsError::new(&format!("unknown preset {name:?}"))),
    })
}

#[wasm_bindgen]
pub struct Demo {
    domain: QPolygon,
    start: TropicalSeries,
    series: TropicalSeries,
    points: Vec<Point>,
    highlight: Option<Vec<Point>>,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(name: &str) -> Result<Demo, JsError> {
        let (domain, start) = preset(name)?;
        Ok(Demo { domain, series: start.clone(), start, points: Vec::new(), highlight: None })
    }

    /// Applies `G_p` at the clicked point (domain coordinates) and returns
    /// the wave event as JSON.
    pub fn wave(&mut self, x: f64, y: f64) -> Result<String, JsError> {
        let p = Point::new(snap(x), snap(y));
        let plan = WavePlan::new(&self.series, &p).map_err(|e| JsError::new(&e.to_string()))?;
        let (g, ev) = wave(&self.series, &p).map_err(|e| JsError::new(&e.to_string()))?;
        self.highlight = ev.increment.is_positive().then_some(plan.face);
        self.series = g;
        if !self.points.contains(&p) {
            self.points.push(p);
        }
        Ok(serde_json::to_string(&ev).expect("events serialize"))
    }

    /// Restarts from the preset series and iterates the waves of all clicked
    /// points until nothing moves; returns a JSON summary.
    pub fn dynamics(&mut self) -> Result<String, JsError> {
        let stop = StopRule { tolerance: None, max_steps: 20_000 };
        let r = run_dynamics(&self.start, &self.points, &Schedule::RoundRobin, &stop)
            .map_err(|e| JsError::new(&e.to_string()))?;
        self.series = r.series;
        self.highlight = None;
        let positive = r.events.iter().filter(|e| e.increment.is_positive()).count();
        Ok(format!(
            r#"{{"steps":{},"waves":{},"sweeps":{},"stabilized":{}}}"#,
            r.events.len(),
            positive,
            r.sweeps,
            r.stopped == StopReason::Stabilized
        ))
    }

    pub fn clear(&mut self) {
        self.series = self.start.clone();
        self.points.clear();
        self.highlight = None;
    }

    pub fn svg(&self) -> String {
        let layers = SvgLayers { highlight: self.highlight.as_deref(), points: &self.points, title: None };
        render(self.domain.vertices(), &extract_curve(&self.series), &layers)
    }

    /// The current series as JSON.
    pub fn series_json(&self) -> String {
        serde_json::to_string(&self.series).expect("series serialize")
    }
}
