//! Static SVG figure of a planar report: sites, tested balls, balls in G
//! highlighted, and the bisector of two-site scenes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{io_err, HarnessError, Result};
use crate::report::Report;

const SIZE_PX: f64 = 800.0;

pub fn render_svg(report: &Report) -> Result<String> {
    if report.scene.dim != 2 {
        return Err(HarnessError::Unsupported(format!(
            "SVG output needs a planar scene, got dimension {}",
            report.scene.dim
        )));
    }
    let sites = report.scene.sites.sites();
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    let mut grow = |x: f64, y: f64, r: f64| {
        lo[0] = lo[0].min(x - r);
        lo[1] = lo[1].min(y - r);
        hi[0] = hi[0].max(x + r);
        hi[1] = hi[1].max(y + r);
    };
    for s in sites {
        grow(s[0], s[1], 0.0);
    }
    for b in &report.balls {
        let c = b.membership.ball.center();
        grow(c[0], c[1], b.membership.ball.radius());
    }
    let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
    let pad = 0.05 * extent;
    let (x0, y0, side) = (lo[0] - pad, lo[1] - pad, extent + 2.0 * pad);
    let stroke = side / 600.0;
    // World y grows upward; SVG y grows downward.
    let fy = |y: f64| y0 + (y0 + side) - y;

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE_PX}" height="{SIZE_PX}" viewBox="{x0} {y0} {side} {side}">"#
    );
    let _ = writeln!(
        w,
        r#"<rect class="background" x="{x0}" y="{y0}" width="{side}" height="{side}" fill="white"/>"#
    );
    if sites.len() == 2 {
        let (a, b) = (&sites[0], &sites[1]);
        let (mx, my) = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0);
        let (dx, dy) = (-(b[1] - a[1]), b[0] - a[0]);
        let n = (dx * dx + dy * dy).sqrt();
        if n > 0.0 {
            let t = 2.0 * side / n;
            let _ = writeln!(
                w,
                r#"<line class="bisector" x1="{}" y1="{}" x2="{}" y2="{}" stroke="steelblue" stroke-width="{stroke}" stroke-dasharray="{} {}"/>"#,
                mx - t * dx,
                fy(my - t * dy),
                mx + t * dx,
                fy(my + t * dy),
                4.0 * stroke,
                3.0 * stroke
            );
        }
    }
    let _ = writeln!(w, r#"<g class="balls">"#);
    for flagged in [false, true] {
        for b in report.balls.iter().filter(|b| b.membership.in_g == flagged) {
            let c = b.membership.ball.center();
            let r = b.membership.ball.radius();
            let style = if flagged {
                r##"class="ball in-g" fill="#d62728" fill-opacity="0.15" stroke="#d62728""##
            } else {
                r##"class="ball" fill="none" stroke="#999999" stroke-opacity="0.5""##
            };
            let _ = writeln!(
                w,
                r#"<circle {style} data-index="{}" cx="{}" cy="{}" r="{r}" stroke-width="{stroke}"/>"#,
                b.index,
                c[0],
                fy(c[1])
            );
        }
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, r#"<g class="sites">"#);
    for s in sites {
        let _ = writeln!(
            w,
            r#"<circle class="site" cx="{}" cy="{}" r="{}" fill="black"/>"#,
            s[0],
            fy(s[1]),
            3.0 * stroke
        );
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, "</svg>");
    Ok(out)
}

pub fn save_svg(report: &Report, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_svg(report)?).map_err(io_err(path))
}
