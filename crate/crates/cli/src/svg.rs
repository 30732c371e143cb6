use std::fmt::Write;

use brown_core::brown::{lambda, BranchIndex};
use brown_core::BrownDescriptor;
use num_complex::Complex64;

pub const CURVE_POINTS: usize = 512;
const WIDTH: f64 = 720.0;
const PAD: f64 = 24.0;

struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(desc: &BrownDescriptor) -> Self {
        let p = desc.params;
        let (w, h) = (p.law_p.gap(), p.law_q.gap());
        let margin = 0.12 * w.max(h);
        let (x0, x1) = (p.law_p.pos_low - margin, p.law_p.pos_high + margin);
        let (y0, y1) = (p.law_q.pos_low - margin, p.law_q.pos_high + margin);
        let scale = (WIDTH - 2.0 * PAD) / (x1 - x0);
        Frame {
            x0,
            y1,
            scale,
            height: (y1 - y0) * scale + 2.0 * PAD,
        }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        (PAD + (z.re - self.x0) * self.scale, PAD + (self.y1 - z.im) * self.scale)
    }
}

/// Support arcs, rectangle, atoms (area proportional to mass) and an optional
/// eigenvalue scatter. The y axis points up.
pub fn render(desc: &BrownDescriptor, points: Option<&[Complex64]>) -> String {
    let f = Frame::new(desc);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{:.0}" viewBox="0 0 {WIDTH:.0} {:.2}">"#,
        f.height, f.height
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let p = desc.params;
    let (rx, ry) = f.map(Complex64::new(p.law_p.pos_low, p.law_q.pos_high));
    let _ = writeln!(
        s,
        r##"<rect x="{rx:.2}" y="{ry:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#888" stroke-dasharray="4 3"/>"##,
        p.law_p.gap() * f.scale,
        p.law_q.gap() * f.scale
    );

    if let Some(points) = points {
        let _ = writeln!(s, r##"<g fill="#1f5fbf" fill-opacity="0.45">"##);
        for z in points {
            let (x, y) = f.map(*z);
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.2"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }

    let [lo, hi] = desc.nu.support;
    for index in BranchIndex::BOTH {
        let branch = desc.branch(index);
        let pts: Vec<String> = (0..CURVE_POINTS)
            .filter_map(|k| {
                let theta = lo + (hi - lo) * k as f64 / (CURVE_POINTS - 1) as f64;
                lambda(&branch, theta).ok()
            })
            .map(|z| {
                let (x, y) = f.map(z);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline class="branch" fill="none" stroke="#c0392b" stroke-width="1.5" points="{}"/>"##,
            pts.join(" ")
        );
    }

    for atom in desc.nonzero_atoms() {
        let (x, y) = f.map(atom.position);
        let r = 3.0 + 18.0 * atom.mass.sqrt();
        let _ = writeln!(
            s,
            r##"<circle class="atom" cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="#2d2d2d" fill-opacity="0.7"><title>mass {:.6}</title></circle>"##,
            atom.mass
        );
    }
    s.push_str("</svg>\n");
    s
}
