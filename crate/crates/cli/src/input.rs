//! Input files: domains, series, points and lift polynomials.

use std::path::Path;

use serde::Deserialize;
use tropwave::lift2::{GF2RatFun, LaurentPoly2, LiftPoint};
use tropwave::rat::parse_rat;
use tropwave::{HalfPlane, Point, QPolygon, TropicalSeries};

use crate::config::read;
use crate::fail::Failure;

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum DomainFile {
    Halfplanes { halfplanes: Vec<HalfPlane> },
    Vertices { vertices: Vec<Point> },
}

/// `{"halfplanes": [{"n": [i, j], "a": "p/q"}, …]}` (meaning `n·z + a ≥ 0`)
/// or `{"vertices": [["x", "y"], …]}`.
pub fn domain(p: &Path) -> Result<QPolygon, Failure> {
    let d: DomainFile = serde_json::from_str(&read(p)?).map_err(|e| Failure::parse(format!("{}: {e}", p.display())))?;
    Ok(match d {
        DomainFile::Halfplanes { halfplanes } => QPolygon::new(halfplanes)?,
        DomainFile::Vertices { vertices } => QPolygon::from_vertices(&vertices)?,
    })
}

/// `{"domain": {...}, "support": [{"v": [i, j], "a": "p/q"}, …]}`.
pub fn series(p: &Path) -> Result<TropicalSeries, Failure> {
    TropicalSeries::from_json(&read(p)?).map_err(|e| {
        let f = Failure::from(e);
        Failure { message: format!("{}: {}", p.display(), f.message), ..f }
    })
}

/// The start series: the given series, or `0_Ω` on the given domain.
pub fn start(domain_file: Option<&Path>, series_file: Option<&Path>) -> Result<TropicalSeries, Failure> {
    match (domain_file, series_file) {
        (_, Some(s)) => {
            let f = series(s)?;
            if let Some(d) = domain_file {
                if domain(d)? != *f.polygon()? {
                    return Err(tropwave::Error::DomainMismatch.into());
                }
            }
            Ok(f)
        }
        (Some(d), None) => Ok(TropicalSeries::zero(&domain(d)?)),
        (None, None) => Err(Failure::parse("need --domain or --series")),
    }
}

/// `"x,y"` with rational coordinates.
pub fn point(s: &str) -> Result<Point, Failure> {
    let (x, y) = s.split_once(',').ok_or_else(|| Failure::parse(format!("point {s:?} is not x,y")))?;
    Ok(Point::new(parse_rat(x)?, parse_rat(y)?))
}

/// A JSON array of `["x", "y"]` pairs.
pub fn points(p: &Path) -> Result<Vec<Point>, Failure> {
    serde_json::from_str(&read(p)?).map_err(|e| Failure::parse(format!("{}: {e}", p.display())))
}

/// Lines `A(i,j)=(num)/(den)`.
pub fn lift_poly(p: &Path) -> Result<LaurentPoly2, Failure> {
    Ok(LaurentPoly2::parse(&read(p)?)?)
}

/// `"p1;p2"`, each a field element such as `(t^(1))/(t^(0))` or `t^(1/2)+1`.
pub fn lift_point(s: &str) -> Result<LiftPoint, Failure> {
    let (a, b) = s.split_once(';').ok_or_else(|| Failure::parse(format!("lift point {s:?} is not p1;p2")))?;
    Ok((a.parse::<GF2RatFun>()?, b.parse::<GF2RatFun>()?))
}

/// `"2,1,2,1"`.
pub fn degree(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| Failure::parse(format!("bad degree {s:?}"))))
        .collect()
}
