//! Region map as an 800x600 SVG.

use std::fmt::Write;

use kirchhoff_core::{atlas::Overlay, RegionMapSpec, Status};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 610.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 530.0;

pub fn fill(status: Status) -> &'static str {
    match status {
        Status::Exists => "#2ca02c",
        Status::NotExists => "#d62728",
        Status::Unknown => "#9e9e9e",
    }
}

const OVERLAY_STYLES: [(&str, &str); 3] = [("#1f77b4", "6 3"), ("#000000", "none"), ("#ff7f0e", "2 2")];

struct Axes {
    b: (f64, f64),
    mu: (f64, f64),
}

impl Axes {
    fn new(spec: &RegionMapSpec) -> Self {
        let db = 0.5 * (spec.b_range.1 - spec.b_range.0) / (spec.b_steps - 1) as f64;
        let dm = 0.5 * (spec.mu_range.1 - spec.mu_range.0) / (spec.mu_steps - 1) as f64;
        Self {
            b: (spec.b_range.0 - db, spec.b_range.1 + db),
            mu: (spec.mu_range.0 - dm, spec.mu_range.1 + dm),
        }
    }

    fn x(&self, b: f64) -> f64 {
        LEFT + (RIGHT - LEFT) * (b - self.b.0) / (self.b.1 - self.b.0)
    }

    fn y(&self, mu: f64) -> f64 {
        BOTTOM - (BOTTOM - TOP) * (mu - self.mu.0) / (self.mu.1 - self.mu.0)
    }
}

fn label(v: f64) -> String {
    format!("{v:.3e}")
}

/// `statuses` is row-major as in [`RegionMapSpec::point`].
pub fn render(spec: &RegionMapSpec, statuses: &[Status], overlays: &[Overlay], title: &str) -> String {
    let ax = Axes::new(spec);
    let cw = (RIGHT - LEFT) / spec.b_steps as f64;
    let ch = (BOTTOM - TOP) / spec.mu_steps as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600" viewBox="0 0 800 600" font-family="sans-serif" font-size="12">"##
    );
    let _ = writeln!(s, r##"<rect x="0" y="0" width="800" height="600" fill="#ffffff"/>"##);
    let _ = writeln!(s, r##"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"##, 0.5 * (LEFT + RIGHT), escape(title));
    let _ = writeln!(
        s,
        r##"<defs><clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}"/></clipPath></defs>"##,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    let _ = writeln!(s, r##"<g id="cells" shape-rendering="crispEdges">"##);
    for (k, st) in statuses.iter().enumerate() {
        let (i, j) = (k % spec.b_steps, k / spec.b_steps);
        let x = LEFT + i as f64 * cw;
        let y = BOTTOM - (j + 1) as f64 * ch;
        let _ = writeln!(
            s,
            r##"<rect class="cell" x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"##,
            cw + 0.01,
            ch + 0.01,
            fill(*st)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g id="overlays" clip-path="url(#plot)" fill="none" stroke-width="2">"##);
    for (ov, (color, dash)) in overlays.iter().zip(OVERLAY_STYLES.iter().cycle()) {
        let pts: Vec<String> = ov
            .points
            .iter()
            .filter(|(b, m)| b.is_finite() && m.is_finite())
            .map(|&(b, m)| format!("{:.2},{:.2}", ax.x(b), ax.y(m)))
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline class="overlay" stroke="{color}" stroke-dasharray="{dash}" points="{}"><title>{}</title></polyline>"##,
            pts.join(" "),
            escape(&ov.label)
        );
    }
    let _ = writeln!(s, "</g>");
    axes(&mut s, &ax, spec);
    legend(&mut s, overlays);
    let _ = writeln!(s, "</svg>");
    s
}

fn axes(s: &mut String, ax: &Axes, spec: &RegionMapSpec) {
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="#000000"/>"##,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    for k in 0..5 {
        let b = spec.b_range.0 + (spec.b_range.1 - spec.b_range.0) * k as f64 / 4.0;
        let x = ax.x(b);
        let _ = writeln!(s, r##"<line x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{:.2}" stroke="#000000"/>"##, BOTTOM + 5.0);
        let _ = writeln!(s, r##"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##, BOTTOM + 20.0, label(b));
        let m = spec.mu_range.0 + (spec.mu_range.1 - spec.mu_range.0) * k as f64 / 4.0;
        let y = ax.y(m);
        let _ = writeln!(s, r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="#000000"/>"##, LEFT - 5.0);
        let _ = writeln!(s, r##"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##, LEFT - 8.0, y + 4.0, label(m));
    }
    let _ = writeln!(s, r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">b</text>"##, 0.5 * (LEFT + RIGHT), BOTTOM + 45.0);
    let _ = writeln!(s, r##"<text x="20" y="{:.2}" text-anchor="middle">mu</text>"##, 0.5 * (TOP + BOTTOM));
}

fn legend(s: &mut String, overlays: &[Overlay]) {
    let x = RIGHT + 20.0;
    let mut y = TOP + 10.0;
    let _ = writeln!(s, r##"<g id="legend">"##);
    for (st, name) in [(Status::Exists, "Exists"), (Status::NotExists, "NotExists"), (Status::Unknown, "Unknown")] {
        let _ = writeln!(s, r##"<rect x="{x:.2}" y="{y:.2}" width="14" height="14" fill="{}"/>"##, fill(st));
        let _ = writeln!(s, r##"<text x="{:.2}" y="{:.2}">{name}</text>"##, x + 20.0, y + 11.0);
        y += 22.0;
    }
    for (ov, (color, dash)) in overlays.iter().zip(OVERLAY_STYLES.iter().cycle()) {
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-dasharray="{dash}" stroke-width="2"/>"##,
            y + 7.0,
            x + 14.0,
            y + 7.0
        );
        let _ = writeln!(s, r##"<text x="{:.2}" y="{:.2}" font-size="10">{}</text>"##, x + 20.0, y + 11.0, escape(&ov.label));
        y += 22.0;
    }
    let _ = writeln!(s, "</g>");
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_rect_per_cell() {
        let spec = RegionMapSpec { b_range: (1.0, 2.0), mu_range: (1.0, 3.0), b_steps: 3, mu_steps: 2 };
        let st = vec![Status::Exists, Status::Unknown, Status::NotExists, Status::Exists, Status::Exists, Status::Exists];
        let svg = render(&spec, &st, &[], "t");
        assert_eq!(svg.matches(r##"class="cell""##).count(), 6);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("#d62728").count(), 2);
    }
}
