use std::fmt::Write;

use anyhow::Result;
use zonofit::geom::hull2d::convex_hull_2d;
use zonofit::geom::{Polytope, Zonotope};
use zonofit::hausdorff::AchievingPair;
use zonofit::Settings;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 30.0;

struct Frame {
    min: [f64; 2],
    scale: f64,
}

impl Frame {
    fn fit(points: &[[f64; 2]]) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        let span = (max[0] - min[0]).max(max[1] - min[1]).max(1e-12);
        Frame { min, scale: (SIZE - 2.0 * MARGIN) / span }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (MARGIN + (p[0] - self.min[0]) * self.scale, SIZE - MARGIN - (p[1] - self.min[1]) * self.scale)
    }

    fn points(&self, poly: &[[f64; 2]]) -> String {
        poly.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn planar(v: &nalgebra::DVector<f64>) -> [f64; 2] {
    [v[0], v[1]]
}

/// P and Z as outlines, each achieving pair as a segment between two dots.
pub fn render(p: &Polytope, z: &Zonotope, pairs: &[AchievingPair], s: &Settings) -> Result<String> {
    let pv: Vec<[f64; 2]> = p.vertices().iter().map(planar).collect();
    let zv: Vec<[f64; 2]> = z.enumerate_vertices(s.rank_cap, &s.solver)?.iter().map(|(_, q)| planar(q)).collect();
    let (ppoly, zpoly) = (convex_hull_2d(&pv, 1e-12), convex_hull_2d(&zv, 1e-12));
    let frame = Frame::fit(&[pv.as_slice(), zv.as_slice()].concat());
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )?;
    writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#)?;
    writeln!(
        out,
        r#"  <polygon class="polytope" points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
        frame.points(&ppoly)
    )?;
    writeln!(
        out,
        r#"  <polygon class="zonotope" points="{}" fill="none" stroke="darkorange" stroke-width="2"/>"#,
        frame.points(&zpoly)
    )?;
    for pair in pairs {
        let (a, b) = (frame.map(planar(&pair.p)), frame.map(planar(&pair.q)));
        writeln!(out, r#"  <g class="pair">"#)?;
        writeln!(
            out,
            r#"    <line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-dasharray="4 3"/>"#,
            a.0, a.1, b.0, b.1
        )?;
        writeln!(out, r#"    <circle cx="{:.3}" cy="{:.3}" r="4" fill="black"/>"#, a.0, a.1)?;
        writeln!(out, r#"    <circle cx="{:.3}" cy="{:.3}" r="4" fill="black"/>"#, b.0, b.1)?;
        writeln!(out, "  </g>")?;
    }
    writeln!(out, "</svg>")?;
    Ok(out)
}
