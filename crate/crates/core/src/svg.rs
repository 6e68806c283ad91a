//! SVG rendering of a 2D discrete diagram and its dual complex.

use std::fmt::Write as _;

use crate::canvas::Canvas;
use crate::drvd::DiscreteDiagram;
use crate::error::{Error, Result};
use crate::realization::{RealizationMode, RealizedComplex};

const WIDTH: f64 = 800.0;

/// Colour of site `i`: hues spaced by the golden angle.
pub fn site_color(i: usize) -> String {
    let hue = (i as f64 * 137.507_764_050_037_85) % 360.0;
    let (r, g, b) = hsl_to_rgb(hue, 0.55, 0.72);
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn hsl_to_rgb(h: f64, s: f64, l: f64) -> (u8, u8, u8) {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    let q = |v: f64| ((v + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    (q(r), q(g), q(b))
}

/// Curved points along edge `e`, taken from the samples of a maximal
/// simplex containing it, ordered from `e[0]` to `e[1]`.
fn edge_samples<'a>(r: &'a RealizedComplex, e: &[u32]) -> Vec<&'a [f64]> {
    let Some((sx, samples)) = r.curved_samples.iter().find(|(sx, _)| e.iter().all(|v| sx.contains(v))) else {
        return Vec::new();
    };
    let pos: Vec<usize> = e.iter().map(|v| sx.iter().position(|w| w == v).unwrap_or(0)).collect();
    let mut pts: Vec<(f64, &[f64])> = samples
        .iter()
        .filter(|(b, _)| {
            b.iter()
                .enumerate()
                .all(|(k, x)| pos.contains(&k) || x.abs() < 1e-12)
        })
        .map(|(b, p)| (b[pos[1]], p.as_slice()))
        .collect();
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    pts.into_iter().map(|(_, p)| p).collect()
}

/// Renders canvas cells filled by site colour (white where colours mix),
/// sites as dots, and the dual edges: straight segments, or polylines
/// through the curved edge samples when `realized` is curved.
pub fn render_svg(c: &Canvas, d: &DiscreteDiagram, realized: Option<&RealizedComplex>) -> Result<String> {
    if c.dim() != 2 {
        return Err(Error::Unsupported("SVG rendering is 2D only".into()));
    }
    let bb = c.bbox();
    let ext = [bb.extent(0), bb.extent(1)];
    let scale = WIDTH / ext[0].max(ext[1]);
    let (w, h) = (ext[0] * scale, ext[1] * scale);
    let tx = |p: &[f64]| ((p[0] - bb.lo[0]) * scale, h - (p[1] - bb.lo[1]) * scale);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#
    );
    s.push_str("<g stroke=\"none\">\n");
    for cell in 0..c.num_cells() {
        let colors = d.cell_colors(cell);
        let fill = if colors.len() == 1 { site_color(colors[0] as usize) } else { "#ffffff".into() };
        let pts: Vec<String> = c
            .cell(cell)
            .iter()
            .map(|&v| {
                let (x, y) = tx(c.vertex(v as usize));
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(s, r#"<polygon points="{}" fill="{fill}"/>"#, pts.join(" "));
    }
    s.push_str("</g>\n");

    if let Some(r) = realized {
        s.push_str("<g stroke=\"#000000\" stroke-width=\"1.5\" fill=\"none\">\n");
        for e in r.complex.of_dim(1) {
            let a = tx(&r.site_coords[e[0] as usize]);
            let b = tx(&r.site_coords[e[1] as usize]);
            let curved = if r.mode == RealizationMode::Curved { edge_samples(r, e) } else { Vec::new() };
            match curved {
                pts if pts.len() >= 2 => {
                    let line: Vec<String> = pts
                        .iter()
                        .map(|p| {
                            let (x, y) = tx(p);
                            format!("{x:.3},{y:.3}")
                        })
                        .collect();
                    let _ = writeln!(s, r#"<polyline points="{}"/>"#, line.join(" "));
                }
                _ => {
                    let _ = writeln!(
                        s,
                        r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
                        a.0, a.1, b.0, b.1
                    );
                }
            }
        }
        s.push_str("</g>\n");
    }

    s.push_str("<g fill=\"#000000\">\n");
    for &v in &d.front.source_vertices {
        let (x, y) = tx(c.vertex(v));
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3"/>"#);
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}
