//! Alignment chart for `r / O_M = d1 + alpha (1 - d1 - d2)`.
//!
//! In unit coordinates the chart has three parts:
//!
//! * the `alpha` scale on `x = 0`, at height `alpha`;
//! * the `r / O_M` scale on `x = 1/2`, at height `r / 2`;
//! * the `(d1, d2)` grid, node `(1 / (1 + s), d1 / (1 + s))` with `s = d1 + d2`.
//!
//! A straight line from the `alpha` mark through a grid node crosses the
//! result scale at the royalty share. The grid comes from a parallel-scale
//! layout (grid at `x = 1 / s`) pushed through the projective map
//! `(x, y) -> (x, y) / (x + 1)`, which keeps collinearity, turns every grid
//! ruling into a straight line and bounds the chart to the unit box. The
//! unit box is then fitted to the canvas by an affine map (y pointing down).

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{check_weight, DisagreementPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

fn sub(a: Point, b: Point) -> Point {
    Point::new(a.x - b.x, a.y - b.y)
}

/// Unit-coordinate position of an `alpha` value.
pub fn unit_alpha_point(alpha: f64) -> Point {
    Point::new(0.0, alpha)
}

/// Unit-coordinate position of a disagreement point on the grid.
pub fn unit_grid_point(d1: f64, d2: f64) -> Point {
    let w = 1.0 + d1 + d2;
    Point::new(1.0 / w, d1 / w)
}

/// Unit-coordinate position of a royalty share.
pub fn unit_result_point(share: f64) -> Point {
    Point::new(0.5, share / 2.0)
}

/// Determinant of the homogeneous coordinates of three points; zero iff
/// they are collinear.
pub fn collinearity_determinant(a: Point, b: Point, c: Point) -> f64 {
    a.x * (b.y - c.y) - a.y * (b.x - c.x) + (b.x * c.y - b.y * c.x)
}

/// Tick spacing on each scale and grid family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TickSteps {
    pub alpha: f64,
    pub result: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Default for TickSteps {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            result: 0.1,
            d1: 0.1,
            d2: 0.1,
        }
    }
}

impl TickSteps {
    pub fn uniform(step: f64) -> Self {
        Self {
            alpha: step,
            result: step,
            d1: step,
            d2: step,
        }
    }
}

/// Number of intervals if `step` divides 1.
fn divisions(step: f64) -> Option<usize> {
    if !(step.is_finite() && step > 0.0 && step <= 1.0) {
        return None;
    }
    let n = (1.0 / step).round();
    ((1.0 / step - n).abs() <= 1e-9 * n).then_some(n as usize)
}

fn tick_values(step: f64) -> Vec<f64> {
    let n = divisions(step).expect("validated tick step");
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

/// Straight segment in canvas coordinates, parameterized from value 0 at
/// `start` to value 1 at `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub start: Point,
    pub end: Point,
}

impl Segment {
    pub fn at(&self, t: f64) -> Point {
        Point::new(
            self.start.x + t * (self.end.x - self.start.x),
            self.start.y + t * (self.end.y - self.start.y),
        )
    }
}

/// One ruling of the grid, in canvas coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridLine {
    pub value: f64,
    pub start: Point,
    pub end: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NomographLayout {
    pub width: f64,
    pub height: f64,
    pub margin_x: f64,
    pub margin_y: f64,
    pub ticks: TickSteps,
    pub alpha_scale: Segment,
    pub result_scale: Segment,
    /// Rays of constant `d1`, from `d2 = 0` to `d2 = 1 - d1`.
    pub iso_d1: Vec<GridLine>,
    /// Lines of constant `d2`, from `d1 = 0` to `d1 = 1 - d2`.
    pub iso_d2: Vec<GridLine>,
}

impl NomographLayout {
    /// Affine fit of the unit box into the canvas interior.
    pub fn to_canvas(&self, p: Point) -> Point {
        let plot_w = self.width - 2.0 * self.margin_x;
        let plot_h = self.height - 2.0 * self.margin_y;
        Point::new(
            self.margin_x + p.x * plot_w,
            self.margin_y + (1.0 - p.y) * plot_h,
        )
    }

    pub fn alpha_point(&self, alpha: f64) -> Point {
        self.to_canvas(unit_alpha_point(alpha))
    }

    pub fn grid_point(&self, d: &DisagreementPoint) -> Point {
        self.to_canvas(unit_grid_point(d.d1(), d.d2()))
    }

    pub fn result_point(&self, share: f64) -> Point {
        self.to_canvas(unit_result_point(share))
    }
}

/// Lays out the chart on a `width x height` canvas.
pub fn build_layout(width: f64, height: f64, ticks: TickSteps) -> Result<NomographLayout> {
    if !(width.is_finite() && height.is_finite() && width > 0.0 && height > 0.0) {
        return Err(Error::InvalidCanvas(format!(
            "canvas must have positive finite size, got {width} x {height}"
        )));
    }
    for (name, step) in [
        ("alpha", ticks.alpha),
        ("result", ticks.result),
        ("d1", ticks.d1),
        ("d2", ticks.d2),
    ] {
        if divisions(step).is_none() {
            return Err(Error::InvalidCanvas(format!(
                "{name} tick step {step} must divide 1"
            )));
        }
    }
    let mut layout = NomographLayout {
        width,
        height,
        margin_x: 0.12 * width,
        margin_y: 0.08 * height,
        ticks,
        alpha_scale: Segment {
            start: Point::new(0.0, 0.0),
            end: Point::new(0.0, 0.0),
        },
        result_scale: Segment {
            start: Point::new(0.0, 0.0),
            end: Point::new(0.0, 0.0),
        },
        iso_d1: Vec::new(),
        iso_d2: Vec::new(),
    };
    layout.alpha_scale = Segment {
        start: layout.to_canvas(unit_alpha_point(0.0)),
        end: layout.to_canvas(unit_alpha_point(1.0)),
    };
    layout.result_scale = Segment {
        start: layout.to_canvas(unit_result_point(0.0)),
        end: layout.to_canvas(unit_result_point(1.0)),
    };
    layout.iso_d1 = tick_values(ticks.d1)
        .into_iter()
        .map(|d1| GridLine {
            value: d1,
            start: layout.to_canvas(unit_grid_point(d1, 0.0)),
            end: layout.to_canvas(unit_grid_point(d1, 1.0 - d1)),
        })
        .collect();
    layout.iso_d2 = tick_values(ticks.d2)
        .into_iter()
        .map(|d2| GridLine {
            value: d2,
            start: layout.to_canvas(unit_grid_point(0.0, d2)),
            end: layout.to_canvas(unit_grid_point(1.0 - d2, d2)),
        })
        .collect();
    Ok(layout)
}

/// Reads the royalty share off the chart: intersects the line through the
/// `alpha` mark and the grid node with the result scale and inverts the
/// scale's parameterization. Uses only canvas geometry.
pub fn read_isopleth(layout: &NomographLayout, alpha: f64, d: &DisagreementPoint) -> Result<f64> {
    d.ensure_feasible()?;
    check_weight(alpha)?;
    let a = layout.alpha_point(alpha);
    let g = layout.grid_point(d);
    let scale = layout.result_scale;
    let q = sub(scale.end, scale.start);
    let r = sub(g, a);
    // Distance of the grid node from the result-scale line.
    let q_len = q.x.hypot(q.y);
    let offset = cross(q, sub(g, scale.start)).abs() / q_len;
    if offset <= 1e-9 * layout.width.max(layout.height) {
        return Err(Error::DegenerateLine);
    }
    let denominator = cross(q, r);
    if denominator == 0.0 {
        return Err(Error::DegenerateLine);
    }
    Ok(cross(sub(a, scale.start), r) / denominator)
}

/// A straight-edge reading drawn on the chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Isopleth {
    pub alpha: f64,
    pub d: DisagreementPoint,
    pub read_result: f64,
}

impl Isopleth {
    pub fn new(layout: &NomographLayout, alpha: f64, d: DisagreementPoint) -> Result<Self> {
        let read_result = read_isopleth(layout, alpha, &d)?;
        Ok(Self {
            alpha,
            d,
            read_result,
        })
    }
}

fn label_decimals(step: f64) -> usize {
    (-step.log10()).ceil().clamp(2.0, 6.0) as usize
}

struct Svg {
    out: String,
}

impl Svg {
    fn line(&mut self, class: &str, a: Point, b: Point, extra: &str) {
        let _ = writeln!(
            self.out,
            r#"<line class="{class}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"{extra}/>"#,
            a.x, a.y, b.x, b.y
        );
    }

    fn text(&mut self, class: &str, at: Point, anchor: &str, body: &str) {
        let _ = writeln!(
            self.out,
            r#"<text class="{class}" x="{:.3}" y="{:.3}" text-anchor="{anchor}">{body}</text>"#,
            at.x, at.y
        );
    }
}

/// Renders the chart as an SVG 1.1 document. Identical inputs give
/// identical bytes.
pub fn render_svg(layout: &NomographLayout, overlay: Option<&Isopleth>) -> String {
    let (w, h) = (layout.width, layout.height);
    let font = (0.022 * w.min(h)).max(1.0);
    let tick_len = 0.012 * w;
    let mut svg = Svg { out: String::new() };
    let _ = writeln!(svg.out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        svg.out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.3}" height="{h:.3}" viewBox="0 0 {w:.3} {h:.3}" font-family="sans-serif" font-size="{font:.3}">"#
    );
    let _ = writeln!(svg.out, r#"<rect x="0" y="0" width="{w:.3}" height="{h:.3}" fill="white"/>"#);

    let _ = writeln!(svg.out, r##"<g id="grid" stroke="#7a7a7a" stroke-width="{:.3}">"##, 0.0015 * w);
    let d1_decimals = label_decimals(layout.ticks.d1);
    for line in &layout.iso_d1 {
        svg.line("grid iso-d1", line.start, line.end, "");
    }
    let d2_decimals = label_decimals(layout.ticks.d2);
    for line in &layout.iso_d2 {
        svg.line("grid iso-d2", line.start, line.end, "");
    }
    let _ = writeln!(svg.out, "</g>");
    let _ = writeln!(svg.out, r##"<g id="grid-labels" fill="#444">"##);
    for line in &layout.iso_d1 {
        let at = Point::new(line.start.x + 0.6 * font, line.start.y - 0.3 * font);
        svg.text("grid-label iso-d1", at, "start", &format!("{:.*}", d1_decimals, line.value));
    }
    for line in &layout.iso_d2 {
        let at = Point::new(line.start.x, line.start.y + 1.3 * font);
        svg.text("grid-label iso-d2", at, "middle", &format!("{:.*}", d2_decimals, line.value));
    }
    let corner = layout.to_canvas(Point::new(1.0, 0.0));
    svg.text("axis-title", Point::new(corner.x + 0.6 * font, corner.y + 2.6 * font), "end", "d2 (normalized)");
    let top = layout.to_canvas(unit_grid_point(1.0, 0.0));
    svg.text("axis-title", Point::new(top.x + 2.0 * font, top.y - 1.2 * font), "middle", "d1 (normalized)");
    let _ = writeln!(svg.out, "</g>");

    for (id, class, segment, step, title) in [
        ("alpha-scale", "alpha-tick", layout.alpha_scale, layout.ticks.alpha, "α"),
        ("result-scale", "result-tick", layout.result_scale, layout.ticks.result, "r/O_M"),
    ] {
        let decimals = label_decimals(step);
        let _ = writeln!(svg.out, r#"<g id="{id}" stroke="black" fill="black">"#);
        svg.line("scale", segment.start, segment.end, r#" stroke-width="2""#);
        for value in tick_values(step) {
            let p = segment.at(value);
            let _ = writeln!(svg.out, r#"<g class="tick {class}">"#);
            svg.line("tick-mark", Point::new(p.x - tick_len, p.y), p, "");
            svg.text(
                "tick-label",
                Point::new(p.x - tick_len - 0.3 * font, p.y + 0.35 * font),
                "end",
                &format!("{value:.decimals$}"),
            );
            let _ = writeln!(svg.out, "</g>");
        }
        svg.text(
            "scale-title",
            Point::new(segment.end.x, segment.end.y - 1.0 * font),
            "middle",
            title,
        );
        let _ = writeln!(svg.out, "</g>");
    }

    if let Some(iso) = overlay {
        let a = layout.alpha_point(iso.alpha);
        let g = layout.grid_point(&iso.d);
        let r = layout.result_scale.at(iso.read_result);
        let _ = writeln!(svg.out, r#"<g id="isopleth" stroke="red" fill="red">"#);
        svg.line("isopleth", a, g, r#" stroke-width="2""#);
        for p in [a, r, g] {
            let _ = writeln!(
                svg.out,
                r#"<circle class="isopleth-point" cx="{:.3}" cy="{:.3}" r="{:.3}"/>"#,
                p.x,
                p.y,
                0.3 * font
            );
        }
        svg.text(
            "isopleth-label",
            Point::new(r.x + 0.6 * font, r.y - 0.6 * font),
            "start",
            &format!("r/O_M = {:.2}", iso.read_result),
        );
        let _ = writeln!(svg.out, "</g>");
    }
    let _ = writeln!(svg.out, "</svg>");
    svg.out
}
