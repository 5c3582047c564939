//! Planar SVG scatter plots of image sets, or a coordinate CSV when the
//! image space is not two-dimensional.

use std::fmt::Write as _;

use crate::error::Result;
use crate::imagesets::{minimal_vertices, ImageSet};
use crate::instance::Instance;
use crate::scalar::{points_eq, to_f64_vec, Scalar};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;
const LEGEND_ROW: f64 = 18.0;

#[derive(Debug, Clone, PartialEq)]
pub enum Rendering {
    Svg(String),
    Csv(String),
}

impl Rendering {
    pub fn as_str(&self) -> &str {
        match self {
            Rendering::Svg(s) | Rendering::Csv(s) => s,
        }
    }
}

/// Per image, per point: coordinates and whether the point is a minimal
/// element of its image.
type Annotated = Vec<Vec<(Vec<f64>, bool)>>;

fn annotated<T: Scalar>(inst: &Instance<T>) -> Result<Annotated> {
    let tol = T::default_tolerance();
    inst.images
        .iter()
        .map(|img| {
            let min = match img {
                ImageSet::Finite(_) => img.min_elements(&inst.cone, false)?,
                ImageSet::Polytope(v) => minimal_vertices(v, &inst.cone)?,
            };
            Ok(img
                .points()
                .iter()
                .map(|p| (to_f64_vec(p), min.iter().any(|m| points_eq(m, p, &tol))))
                .collect())
        })
        .collect()
}

/// Renders the instance with `members` marking solution-set membership.
pub fn render<T: Scalar>(inst: &Instance<T>, members: &[String], title: &str) -> Result<Rendering> {
    let pts = annotated(inst)?;
    if inst.image_dim() == 2 {
        Ok(Rendering::Svg(svg(inst, &pts, members, title)))
    } else {
        Ok(Rendering::Csv(csv(inst, &pts, members)))
    }
}

fn csv<T: Scalar>(inst: &Instance<T>, pts: &[Vec<(Vec<f64>, bool)>], members: &[String]) -> String {
    let m = inst.image_dim();
    let mut out = String::from("label,kind,point,is_min,member");
    for k in 1..=m {
        let _ = write!(out, ",y{k}");
    }
    out.push('\n');
    for ((d, img), row) in inst.decisions.iter().zip(&inst.images).zip(pts) {
        let member = members.contains(&d.label);
        for (i, (p, is_min)) in row.iter().enumerate() {
            let _ = write!(out, "{},{},{i},{is_min},{member}", csv_field(&d.label), img.kind_name());
            for c in p {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Vertices ordered counterclockwise around their centroid.
fn outline(points: &[(Vec<f64>, bool)]) -> Vec<[f64; 2]> {
    let n = points.len() as f64;
    let cx = points.iter().map(|(p, _)| p[0]).sum::<f64>() / n;
    let cy = points.iter().map(|(p, _)| p[1]).sum::<f64>() / n;
    let mut v: Vec<[f64; 2]> = points.iter().map(|(p, _)| [p[0], p[1]]).collect();
    v.sort_by(|a, b| {
        let ta = (a[1] - cy).atan2(a[0] - cx);
        let tb = (b[1] - cy).atan2(b[0] - cx);
        ta.total_cmp(&tb)
    });
    v
}

fn svg<T: Scalar>(inst: &Instance<T>, pts: &[Vec<(Vec<f64>, bool)>], members: &[String], title: &str) -> String {
    let all = pts.iter().flatten().map(|(p, _)| p);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in all {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let sx = |x: f64| MARGIN + (x - x0) * scale;
    let sy = |y: f64| SIZE - MARGIN - (y - y0) * scale;
    let legend_h = LEGEND_ROW * (inst.len() as f64 + 1.0);
    let height = SIZE + legend_h;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{height}" viewBox="0 0 {SIZE} {height}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", xml_escape(title));
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{w}" fill="none" stroke="#ccc"/>"##,
        w = SIZE - 2.0 * MARGIN
    );
    for (k, ((d, img), row)) in inst.decisions.iter().zip(&inst.images).zip(pts).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let member = members.contains(&d.label);
        let dash = if member { "" } else { r#" stroke-dasharray="4 3""# };
        let _ = writeln!(
            out,
            r#"<g class="image" data-label="{}" data-member="{member}">"#,
            xml_escape(&d.label)
        );
        if matches!(img, ImageSet::Polytope(_)) && row.len() > 1 {
            let path: Vec<String> = outline(row)
                .iter()
                .map(|[x, y]| format!("{:.2},{:.2}", sx(*x), sy(*y)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}"{dash}/>"#,
                path.join(" ")
            );
        }
        for (p, is_min) in row {
            let (r, fill) = if *is_min { (5.0, color) } else { (3.5, "white") };
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}" stroke="{color}" stroke-width="1.5"{dash} data-min="{is_min}"/>"#,
                sx(p[0]),
                sy(p[1])
            );
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, r#"<g class="legend" font-family="sans-serif" font-size="12">"#);
    for (k, d) in inst.decisions.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let y = SIZE + LEGEND_ROW * k as f64;
        let member = members.contains(&d.label);
        let mark = if member { "member" } else { "not a member" };
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN}" y="{:.1}" width="10" height="10" fill="{}" stroke="{color}"/>"#,
            y - 9.0,
            if member { color } else { "white" }
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{y:.1}">{}: {mark}</text>"#,
            MARGIN + 16.0,
            xml_escape(&d.label)
        );
    }
    let _ = writeln!(out, "</g>\n</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{make_example, ExampleParams};
    use crate::scalar::Rational;

    #[test]
    fn mfdvp_svg_structure() {
        let inst = make_example::<Rational>("mfdvp", &ExampleParams::default()).unwrap();
        let members = vec!["0".to_string()];
        let Rendering::Svg(s) = render(&inst, &members, "mfdvp").unwrap() else {
            panic!("expected svg")
        };
        assert_eq!(s.matches("<circle").count(), 6);
        assert_eq!(s.matches(r#"class="image""#).count(), 3);
        assert_eq!(s.matches(r#"data-member="true""#).count(), 1);
        assert!(s.contains(r#"data-min="true""#));
    }

    #[test]
    fn polytopes_get_outlines() {
        let inst = make_example::<Rational>("t_one", &ExampleParams { grid: Some(3), ..Default::default() }).unwrap();
        let s = render(&inst, &[], "t").unwrap();
        assert_eq!(s.as_str().matches("<polygon").count(), 3);
    }

    #[test]
    fn other_dimensions_give_csv() {
        use crate::cone::Cone;
        use crate::instance::Decision;
        let q = |n| Rational::from_ratio(n, 1);
        let inst = Instance::new(
            Cone::orthant(3),
            vec![
                Decision { label: "a,b".into(), x: vec![q(0)] },
                Decision { label: "c".into(), x: vec![q(1)] },
            ],
            vec![
                ImageSet::Finite(vec![vec![q(0), q(0), q(1)], vec![q(1), q(1), q(1)]]),
                ImageSet::Finite(vec![vec![q(2), q(0), q(0)]]),
            ],
            Default::default(),
        )
        .unwrap();
        let Rendering::Csv(c) = render(&inst, &["c".to_string()], "r").unwrap() else {
            panic!("expected csv")
        };
        let lines: Vec<&str> = c.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "label,kind,point,is_min,member,y1,y2,y3");
        assert_eq!(lines[1], "\"a,b\",finite,0,true,false,0,0,1");
        assert_eq!(lines[2], "\"a,b\",finite,1,false,false,1,1,1");
        assert_eq!(lines[3], "c,finite,0,true,true,2,0,0");
    }
}
