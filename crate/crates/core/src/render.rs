//! SVG rendering of the first construction stages of `A_p`.
//!
//! Row `j` draws the depth-`j` cover as bars; a vertical tick marks every
//! bar endpoint that belongs to `A_p`. Coordinates are computed from exact
//! rationals and rounded to thousandths with integer arithmetic, so the
//! output is byte-for-byte reproducible.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::digits::DigitSet;
use crate::geometry::{self, CoverLimits, GeometryError, Interval};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderSpec {
    pub digits: DigitSet,
    pub steps: u32,
    pub width: u32,
    pub row_height: u32,
    pub tick_length: u32,
    pub margin: u32,
}

impl RenderSpec {
    pub fn new(digits: DigitSet, steps: u32) -> Self {
        RenderSpec { digits, steps, width: 1000, row_height: 40, tick_length: 20, margin: 20 }
    }

    fn validate(&self) -> Result<(), RenderError> {
        if self.steps < 1 {
            return Err(RenderError::Invalid("steps must be at least 1".into()));
        }
        if self.width <= 2 * self.margin {
            return Err(RenderError::Invalid(format!("width {} leaves no room inside the margins", self.width)));
        }
        if self.row_height == 0 || self.tick_length > self.row_height {
            return Err(RenderError::Invalid("tick length must fit in a positive row height".into()));
        }
        Ok(())
    }
}

/// Fixed-point number of thousandths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Milli(i64);

impl std::fmt::Display for Milli {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let v = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:03}", v / 1000, v % 1000)
    }
}

/// Affine map from the hull onto `[margin, width - margin]`, rounded half up.
struct XMap {
    lo: BigRational,
    span: BigRational,
    margin: i64,
    inner: i64,
}

impl XMap {
    fn at(&self, x: &BigRational) -> Milli {
        let offset = if self.span.is_zero() {
            BigRational::from_integer(BigInt::from(self.inner * 500))
        } else {
            (x - &self.lo) / &self.span * BigRational::from_integer(BigInt::from(self.inner * 1000))
        };
        // floor(offset + 1/2)
        let twice = offset * BigRational::from_integer(2.into()) + BigRational::from_integer(1.into());
        let rounded = twice.numer().div_floor(&(twice.denom() * 2));
        let v: i64 = rounded.try_into().expect("pixel offsets fit in i64");
        Milli(self.margin * 1000 + v)
    }
}

fn exact(x: &BigRational) -> String {
    if x.denom() == &BigInt::from(1) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn render_svg(spec: &RenderSpec) -> Result<String, RenderError> {
    render_svg_with(spec, &CoverLimits::default())
}

pub fn render_svg_with(spec: &RenderSpec, limits: &CoverLimits) -> Result<String, RenderError> {
    spec.validate()?;
    let a = &spec.digits;
    let rows = geometry::covers_upto(a, spec.steps, limits)?;
    let hull = geometry::tail_hull(a, 0);
    let map = XMap {
        lo: hull.lo.clone(),
        span: hull.length(),
        margin: spec.margin as i64,
        inner: (spec.width - 2 * spec.margin) as i64,
    };
    let height = 2 * spec.margin + (spec.steps + 1) * spec.row_height;
    let bar = Milli(spec.row_height as i64 * 300);
    let tick = Milli(spec.tick_length as i64 * 1000);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{height}" viewBox="0 0 {w} {height}">"#,
        w = spec.width
    )
    .unwrap();
    writeln!(s, "<title>{a}, steps 0..{}</title>", spec.steps).unwrap();
    writeln!(s, r#"<rect x="0" y="0" width="{}" height="{height}" fill="white"/>"#, spec.width).unwrap();
    for (j, cover) in rows.iter().enumerate() {
        let center = Milli(((spec.margin + j as u32 * spec.row_height) as i64 * 1000) + spec.row_height as i64 * 500);
        let bar_top = Milli(center.0 - bar.0 / 2);
        let (tick_top, tick_bottom) = (Milli(center.0 - tick.0 / 2), Milli(center.0 + tick.0 / 2));
        writeln!(s, r#"<g class="row" data-depth="{j}">"#).unwrap();
        for Interval { lo, hi } in cover.intervals() {
            let (x0, x1) = (map.at(lo), map.at(hi));
            writeln!(
                s,
                r#"<rect x="{x0}" y="{bar_top}" width="{}" height="{bar}" fill="black" data-lo="{}" data-hi="{}"/>"#,
                Milli(x1.0 - x0.0),
                exact(lo),
                exact(hi)
            )
            .unwrap();
            for (e, x) in [(lo, x0), (hi, x1)] {
                if geometry::endpoint_membership(e, a)?.is_in() {
                    writeln!(
                        s,
                        r#"<line x1="{x}" y1="{tick_top}" x2="{x}" y2="{tick_bottom}" stroke="black" stroke-width="1" data-x="{}"/>"#,
                        exact(e)
                    )
                    .unwrap();
                }
            }
        }
        writeln!(s, "</g>").unwrap();
    }
    writeln!(s, "</svg>").unwrap();
    Ok(s)
}

/// Parses the `data-lo`/`data-hi` bars and `data-x` ticks of one row back
/// into exact rationals.
pub fn parse_row(svg: &str, depth: u32) -> Option<(Vec<(BigRational, BigRational)>, Vec<BigRational>)> {
    let open = format!(r#"<g class="row" data-depth="{depth}">"#);
    let start = svg.find(&open)? + open.len();
    let body = &svg[start..start + svg[start..].find("</g>")?];
    let attr = |line: &str, name: &str| -> Option<BigRational> {
        let key = format!(r#"{name}=""#);
        let from = line.find(&key)? + key.len();
        let raw = &line[from..from + line[from..].find('"')?];
        parse_rational(raw)
    };
    let mut bars = Vec::new();
    let mut ticks = Vec::new();
    for line in body.lines() {
        if line.starts_with("<rect") {
            bars.push((attr(line, "data-lo")?, attr(line, "data-hi")?));
        } else if line.starts_with("<line") {
            ticks.push(attr(line, "data-x")?);
        }
    }
    Some((bars, ticks))
}

fn parse_rational(raw: &str) -> Option<BigRational> {
    let (n, d) = raw.split_once('/').unwrap_or((raw, "1"));
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    d.is_positive().then(|| BigRational::new(n, d))
}
