//! SVG rendering of a domain and a curve.
//!
//! Output is canonical: coordinates are the exact rationals rounded half-up
//! to six decimals, elements appear in curve order, and nothing depends on
//! floating point, so equal inputs give byte-identical files.

use std::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

use crate::curve::{classify_dual, TropicalCurve, VertexClass};
use crate::rat::{Point, Rat};

const DIGITS: u32 = 6;
const SIZE: u32 = 480;

/// `r` rounded half-up to six decimals.
pub fn decimal(r: &Rat) -> String {
    let scale = BigInt::from(10u32).pow(DIGITS);
    let n = (r * Rat::from_integer(scale.clone()) + Rat::new(1.into(), 2.into())).floor().to_integer();
    let (q, m) = n.abs().div_mod_floor(&scale);
    let sign = if n.is_negative() { "-" } else { "" };
    let frac = format!("{m:0>width$}", width = DIGITS as usize);
    let frac = frac.trim_end_matches('0');
    if frac.is_empty() {
        format!("{sign}{q}")
    } else {
        format!("{sign}{q}.{frac}")
    }
}

fn xy(p: &Point) -> String {
    format!("{},{}", decimal(&p.x), decimal(&-p.y.clone()))
}

#[derive(Clone, Debug, Default)]
pub struct SvgLayers<'a> {
    /// Polygon filled as the avalanche region.
    pub highlight: Option<&'a [Point]>,
    /// Marked points (the wave points).
    pub points: &'a [Point],
    pub title: Option<&'a str>,
}

/// Renders the domain outline, the curve (stroke width grows with the edge
/// weight), interior vertices coloured by type and the marked points.
pub fn render(domain: &[Point], curve: &TropicalCurve, layers: &SvgLayers<'_>) -> String {
    let xs = domain.iter().map(|p| &p.x);
    let ys = domain.iter().map(|p| &p.y);
    let (x0, x1) = (xs.clone().min().expect("nonempty"), xs.max().expect("nonempty"));
    let (y0, y1) = (ys.clone().min().expect("nonempty"), ys.max().expect("nonempty"));
    let (w, h) = (x1 - x0, y1 - y0);
    let pad = w.clone().max(h.clone()) / Rat::from_integer(20.into());
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="{} {} {} {}">"#,
        decimal(&(x0 - &pad)),
        decimal(&(-y1.clone() - &pad)),
        decimal(&(&w + &pad * Rat::from_integer(2.into()))),
        decimal(&(&h + &pad * Rat::from_integer(2.into()))),
    );
    if let Some(t) = layers.title {
        let _ = writeln!(s, "<title>{}</title>", t.replace('&', "&amp;").replace('<', "&lt;"));
    }
    let path = |pts: &[Point]| pts.iter().map(xy).collect::<Vec<_>>().join(" ");
    let _ = writeln!(s, r##"<g vector-effect="non-scaling-stroke" stroke-linejoin="round">"##);
    let _ = writeln!(s, r##"<polygon points="{}" fill="#f7f4ea" stroke="#888" stroke-width="0.004"/>"##, path(domain));
    if let Some(hl) = layers.highlight {
        let _ = writeln!(s, r##"<polygon points="{}" fill="#f4b860" fill-opacity="0.6" stroke="none"/>"##, path(hl));
    }
    for e in &curve.edges {
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#1d3557" stroke-width="{}"/>"##,
            decimal(&e.a.x),
            decimal(&-e.a.y.clone()),
            decimal(&e.b.x),
            decimal(&-e.b.y.clone()),
            decimal(&(&pad * Rat::new((e.weight as i64 + 1).into(), 10.into()))),
        );
    }
    let r = &pad / Rat::from_integer(4.into());
    for v in curve.interior_vertices() {
        let colour = match classify_dual(&v.dual) {
            VertexClass::Smooth => "#1d3557",
            VertexClass::Nodal => "#2a9d8f",
            VertexClass::Other(_) => "#9b2226",
        };
        let _ = writeln!(
            s,
            r##"<circle cx="{}" cy="{}" r="{}" fill="{colour}"/>"##,
            decimal(&v.point.x),
            decimal(&-v.point.y.clone()),
            decimal(&r)
        );
    }
    for p in layers.points {
        let _ = writeln!(
            s,
            r##"<circle cx="{}" cy="{}" r="{}" fill="#e63946" stroke="white" stroke-width="{}"/>"##,
            decimal(&p.x),
            decimal(&-p.y.clone()),
            decimal(&(&r * Rat::from_integer(2.into()))),
            decimal(&(&r / Rat::from_integer(2.into())))
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::extract_curve;
    use crate::geometry::QPolygon;
    use crate::rat::{int, rat};
    use crate::series::TropicalSeries;

    #[test]
    fn decimals() {
        assert_eq!(decimal(&rat(1, 3)), "0.333333");
        assert_eq!(decimal(&rat(2, 3)), "0.666667");
        assert_eq!(decimal(&rat(-1, 2)), "-0.5");
        assert_eq!(decimal(&int(3)), "3");
        assert_eq!(decimal(&rat(-1, 3)), "-0.333333");
    }

    #[test]
    fn renders_square_curve() {
        let sq = QPolygon::unit_square();
        let f = TropicalSeries::distance_function(&sq.clone().into()).unwrap();
        let c = extract_curve(&f);
        let pts = [Point::new(rat(1, 5), rat(1, 2))];
        let a = render(sq.vertices(), &c, &SvgLayers { points: &pts, ..Default::default() });
        let b = render(sq.vertices(), &c, &SvgLayers { points: &pts, ..Default::default() });
        assert_eq!(a, b);
        assert_eq!(a.matches("<line").count(), c.edges.len());
        assert!(a.contains(r#"cx="0.2" cy="-0.5""#));
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
    }
}
