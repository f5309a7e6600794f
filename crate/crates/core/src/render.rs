//! SVG rendering of triangle chains in the upper half-plane or the unit
//! disk, with geodesic edges, labeled vertices, coincident-vertex markers
//! and machine-readable model coordinates on every vertex element.

use crate::chains::{TriangleChain, COINCIDE_TOL};
use crate::hyperbolic::HPoint;
use serde::{Deserialize, Serialize};

/// Polyline resolution per geodesic edge.
const SAMPLES_PER_EDGE: usize = 48;
/// Rendered image side length in pixels.
const CANVAS: f64 = 640.0;
/// Margin around the world bounding box, as a fraction of its size.
const MARGIN: f64 = 0.08;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    HalfPlane,
    Disk,
}

/// The standard conformal map w = (z - i)/(z + i) from the upper half-plane
/// onto the unit disk.
pub fn to_disk(p: HPoint) -> (f64, f64) {
    // (x + (y-1)i) / (x + (y+1)i)
    let (nx, ny) = (p.x, p.y - 1.0);
    let (dx, dy) = (p.x, p.y + 1.0);
    let den = dx * dx + dy * dy;
    ((nx * dx + ny * dy) / den, (ny * dx - nx * dy) / den)
}

/// Model coordinates of a half-plane point.
pub fn model_xy(p: HPoint, model: Model) -> (f64, f64) {
    match model {
        Model::HalfPlane => (p.x, p.y),
        Model::Disk => to_disk(p),
    }
}

/// Samples the geodesic from `p` to `q` in the half-plane (a vertical ray
/// segment or a semicircle centered on the real axis) as a polyline.
fn sample_geodesic(p: HPoint, q: HPoint) -> Vec<HPoint> {
    let mut out = Vec::with_capacity(SAMPLES_PER_EDGE + 1);
    if (p.x - q.x).abs() < 1e-9 {
        for k in 0..=SAMPLES_PER_EDGE {
            let f = k as f64 / SAMPLES_PER_EDGE as f64;
            // Interpolate height geometrically: vertical geodesics are
            // parametrized by log y.
            let y = p.y * (q.y / p.y).powf(f);
            out.push(HPoint { x: p.x, y });
        }
        return out;
    }
    let center = (q.x * q.x + q.y * q.y - p.x * p.x - p.y * p.y) / (2.0 * (q.x - p.x));
    let ang_p = (p.y).atan2(p.x - center);
    let ang_q = (q.y).atan2(q.x - center);
    for k in 0..=SAMPLES_PER_EDGE {
        let f = k as f64 / SAMPLES_PER_EDGE as f64;
        let a = ang_p + f * (ang_q - ang_p);
        let r = ((p.x - center).powi(2) + p.y * p.y).sqrt();
        out.push(HPoint {
            x: center + r * a.cos(),
            y: r * a.sin(),
        });
    }
    out
}

struct Screen {
    min_x: f64,
    min_y: f64,
    scale: f64,
}

impl Screen {
    fn fit(points: &[(f64, f64)]) -> Screen {
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for &(x, y) in points {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
        let span = (max_x - min_x).max(max_y - min_y).max(1e-6);
        let pad = span * MARGIN;
        Screen {
            min_x: min_x - pad,
            min_y: min_y - pad,
            scale: CANVAS / (span + 2.0 * pad),
        }
    }

    /// World to SVG pixels; the vertical axis is flipped.
    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (
            (x - self.min_x) * self.scale,
            CANVAS - (y - self.min_y) * self.scale,
        )
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// Renders the chain as a standalone SVG document. Every vertex element
/// carries `data-name`, `data-wx`, `data-wy` attributes holding its label
/// and full-precision model coordinates; clusters of coincident vertices
/// share one text label joining their names with `=`.
pub fn chain_svg(chain: &TriangleChain, model: Model) -> String {
    let n = chain.n();
    let mut named: Vec<(String, HPoint)> = Vec::with_capacity(2 * n - 3);
    for (k, &p) in chain.exterior.iter().enumerate() {
        named.push((format!("C{}", k + 1), p));
    }
    for (k, &p) in chain.shared.iter().enumerate() {
        named.push((format!("B{}", k + 1), p));
    }

    // Geodesic edges of every triangle, deduplicated across shared sides.
    let mut segs: Vec<(HPoint, HPoint)> = Vec::new();
    let mut seen: Vec<[i64; 4]> = Vec::new();
    for t in 1..=n - 2 {
        let (a, b, c) = chain.triangle(t);
        for (p, q) in [(a, b), (b, c), (c, a)] {
            if (p.x - q.x).abs() <= COINCIDE_TOL && (p.y - q.y).abs() <= COINCIDE_TOL {
                continue; // collapsed side of a degenerate triangle
            }
            let quant = |v: f64| (v / 1e-9).round() as i64;
            let mut key = [quant(p.x), quant(p.y), quant(q.x), quant(q.y)];
            let rev = [key[2], key[3], key[0], key[1]];
            if rev < key {
                key = rev;
            }
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            segs.push((p, q));
        }
    }

    // World-space content for the viewport fit.
    let mut world: Vec<(f64, f64)> = named.iter().map(|(_, p)| model_xy(*p, model)).collect();
    match model {
        Model::Disk => {
            world.push((-1.0, -1.0));
            world.push((1.0, 1.0));
        }
        Model::HalfPlane => {
            // Keep the real axis in view.
            for &(x, _) in world.clone().iter() {
                world.push((x, 0.0));
            }
        }
    }
    let screen = Screen::fit(&world);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{c}\" height=\"{c}\" \
         viewBox=\"0 0 {c} {c}\">\n",
        c = CANVAS
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");

    // Ideal boundary.
    match model {
        Model::Disk => {
            let (cx, cy) = screen.px(0.0, 0.0);
            let (rx, _) = screen.px(1.0, 0.0);
            svg.push_str(&format!(
                "<circle class=\"boundary\" cx=\"{}\" cy=\"{}\" r=\"{}\" \
                 fill=\"none\" stroke=\"#999999\"/>\n",
                fmt(cx),
                fmt(cy),
                fmt(rx - cx)
            ));
        }
        Model::HalfPlane => {
            let (_, y0) = screen.px(0.0, 0.0);
            svg.push_str(&format!(
                "<line class=\"boundary\" x1=\"0\" y1=\"{y}\" x2=\"{c}\" y2=\"{y}\" \
                 stroke=\"#999999\"/>\n",
                y = fmt(y0),
                c = CANVAS
            ));
        }
    }

    // Edges.
    svg.push_str("<g fill=\"none\" stroke=\"#1f6feb\" stroke-width=\"1.5\">\n");
    for (p, q) in &segs {
        let pts: Vec<String> = sample_geodesic(*p, *q)
            .into_iter()
            .map(|h| {
                let (wx, wy) = model_xy(h, model);
                let (sx, sy) = screen.px(wx, wy);
                format!("{},{}", fmt(sx), fmt(sy))
            })
            .collect();
        svg.push_str(&format!("<polyline points=\"{}\"/>\n", pts.join(" ")));
    }
    svg.push_str("</g>\n");

    // Vertices with machine-readable coordinates.
    svg.push_str("<g class=\"vertices\">\n");
    for (name, p) in &named {
        let (wx, wy) = model_xy(*p, model);
        let (sx, sy) = screen.px(wx, wy);
        svg.push_str(&format!(
            "<circle class=\"vertex\" data-name=\"{name}\" data-wx=\"{wx}\" \
             data-wy=\"{wy}\" cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"#d62728\"/>\n",
            fmt(sx),
            fmt(sy),
        ));
    }
    svg.push_str("</g>\n");

    // Labels: coincident vertices share one joined label.
    let mut used = vec![false; named.len()];
    svg.push_str("<g class=\"labels\" font-family=\"monospace\" font-size=\"14\">\n");
    for i in 0..named.len() {
        if used[i] {
            continue;
        }
        let mut label = named[i].0.clone();
        for j in i + 1..named.len() {
            if !used[j]
                && (named[i].1.x - named[j].1.x).abs() <= COINCIDE_TOL
                && (named[i].1.y - named[j].1.y).abs() <= COINCIDE_TOL
            {
                used[j] = true;
                label.push('=');
                label.push_str(&named[j].0);
            }
        }
        used[i] = true;
        let (wx, wy) = model_xy(named[i].1, model);
        let (sx, sy) = screen.px(wx, wy);
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{label}</text>\n",
            fmt(sx + 6.0),
            fmt(sy - 6.0)
        ));
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{build_chain, ActionAngle, AngleVector};
    use std::f64::consts::PI;

    fn jester_chain() -> TriangleChain {
        let alpha = AngleVector::from_rationals(&[(12, 7); 6]).unwrap();
        let coords = ActionAngle::from_parts(
            &alpha,
            vec![2.0 * PI / 3.0, PI, 4.0 * PI / 3.0],
            vec![Some(2.0 * PI / 3.0), Some(0.0), Some(2.0 * PI / 3.0)],
        )
        .unwrap();
        build_chain(&alpha, &coords).unwrap()
    }

    fn extract_attr(svg: &str, name: &str, attr: &str) -> f64 {
        let tag = format!("data-name=\"{name}\"");
        let start = svg.find(&tag).unwrap_or_else(|| panic!("{name} missing"));
        let rest = &svg[start..];
        let key = format!("{attr}=\"");
        let a = rest.find(&key).unwrap() + key.len();
        let b = a + rest[a..].find('"').unwrap();
        rest[a..b].parse().unwrap()
    }

    #[test]
    fn halfplane_svg_contains_labels_and_coords() {
        let chain = jester_chain();
        let svg = chain_svg(&chain, Model::HalfPlane);
        for k in 1..=6 {
            assert!(svg.contains(&format!("data-name=\"C{k}\"")));
        }
        for k in 1..=3 {
            assert!(svg.contains(&format!("data-name=\"B{k}\"")));
        }
        // Asserted coordinates match the chain in the half-plane model.
        for (k, p) in chain.exterior.iter().enumerate() {
            let name = format!("C{}", k + 1);
            assert!((extract_attr(&svg, &name, "data-wx") - p.x).abs() < 1e-12);
            assert!((extract_attr(&svg, &name, "data-wy") - p.y).abs() < 1e-12);
        }
        assert!(svg.contains("<polyline"));
    }

    #[test]
    fn jester_basepoint_marks_coincident_vertices() {
        // At the jester basepoint C3 = C4 and C1 = C6 geometrically.
        let chain = jester_chain();
        let svg = chain_svg(&chain, Model::HalfPlane);
        assert!(svg.contains(">C3=C4<"), "missing C3=C4 marker");
        assert!(svg.contains(">C1=C6<"), "missing C1=C6 marker");
    }

    #[test]
    fn disk_coordinates_lie_in_unit_disk() {
        let chain = jester_chain();
        let svg = chain_svg(&chain, Model::Disk);
        for k in 1..=6 {
            let name = format!("C{k}");
            let x = extract_attr(&svg, &name, "data-wx");
            let y = extract_attr(&svg, &name, "data-wy");
            assert!(x * x + y * y < 1.0, "{name} outside disk");
        }
    }

    #[test]
    fn cross_ratios_agree_between_models() {
        // Complex cross-ratio of four vertices is invariant under the
        // half-plane-to-disk map.
        let chain = jester_chain();
        let pts = [
            chain.exterior[0],
            chain.exterior[1],
            chain.shared[0],
            chain.shared[2],
        ];
        let cr = |z: [(f64, f64); 4]| -> (f64, f64) {
            let sub = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0, a.1 - b.1);
            let mul = |a: (f64, f64), b: (f64, f64)| {
                (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
            };
            let div = |a: (f64, f64), b: (f64, f64)| {
                let d = b.0 * b.0 + b.1 * b.1;
                ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
            };
            let num = mul(sub(z[0], z[2]), sub(z[1], z[3]));
            let den = mul(sub(z[0], z[3]), sub(z[1], z[2]));
            div(num, den)
        };
        let hp: [(f64, f64); 4] = pts.map(|p| (p.x, p.y));
        let dk: [(f64, f64); 4] = pts.map(to_disk);
        let a = cr(hp);
        let b = cr(dk);
        assert!((a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9);
    }

    #[test]
    fn single_triangle_chain_renders() {
        // n = 4 regular point: two triangles, five vertices.
        let alpha =
            AngleVector::from_rationals(&[(12, 7), (12, 7), (10, 7), (12, 7)]).unwrap();
        let coords = ActionAngle::from_parts(&alpha, vec![PI], vec![Some(0.75 * PI)]).unwrap();
        let chain = build_chain(&alpha, &coords).unwrap();
        let svg = chain_svg(&chain, Model::HalfPlane);
        assert!(svg.contains("data-name=\"B1\""));
        assert!(svg.contains("data-name=\"C4\""));
    }
}
