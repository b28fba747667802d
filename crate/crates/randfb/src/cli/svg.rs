//! Minimal SVG 1.1 line plots: axes, tick labels, line series, shaded
//! bands, histogram bars. Figures are a human convenience; CSV stays the
//! canonical output.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 32.0;
const MARGIN_B: f64 = 48.0;

pub(crate) struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    x_range: (f64, f64),
    y_range: (f64, f64),
    log2_x: bool,
    body: String,
    legend: Vec<(String, String)>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_range: (0.0, 1.0),
            y_range: (0.0, 1.0),
            log2_x: false,
            body: String::new(),
            legend: Vec::new(),
        }
    }

    /// Interpret x values on a log2 axis (tick labels show 2^k).
    pub fn log2_x(mut self) -> Self {
        self.log2_x = true;
        self
    }

    pub fn set_ranges(&mut self, xs: &[f64], ys: &[f64]) {
        let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &x in xs {
            let x = self.map_x_value(x);
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
        }
        let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &y in ys {
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
        if x_lo >= x_hi {
            x_hi = x_lo + 1.0;
        }
        if y_lo >= y_hi {
            y_hi = y_lo + 1.0;
        }
        let pad = 0.05 * (y_hi - y_lo);
        self.x_range = (x_lo, x_hi);
        self.y_range = (y_lo - pad, y_hi + pad);
    }

    fn map_x_value(&self, x: f64) -> f64 {
        if self.log2_x {
            x.log2()
        } else {
            x
        }
    }

    fn px(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        MARGIN_L + (self.map_x_value(x) - lo) / (hi - lo) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        HEIGHT - MARGIN_B - (y - lo) / (hi - lo) * (HEIGHT - MARGIN_T - MARGIN_B)
    }

    pub fn line(&mut self, points: &[(f64, f64)], color: &str, label: &str) {
        if points.is_empty() {
            return;
        }
        let path: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        if !label.is_empty() {
            self.legend.push((label.into(), color.into()));
        }
    }

    pub fn dashed_line(&mut self, points: &[(f64, f64)], color: &str, label: &str) {
        if points.is_empty() {
            return;
        }
        let path: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" stroke-dasharray="6 4" points="{}"/>"#,
            path.join(" ")
        );
        if !label.is_empty() {
            self.legend.push((label.into(), color.into()));
        }
    }

    /// Shaded band between an upper and lower series sharing x values.
    pub fn band(&mut self, upper: &[(f64, f64)], lower: &[(f64, f64)], color: &str) {
        if upper.is_empty() {
            return;
        }
        let mut pts: Vec<String> = upper
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        pts.extend(
            lower
                .iter()
                .rev()
                .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y))),
        );
        let _ = writeln!(
            self.body,
            r#"<polygon fill="{color}" fill-opacity="0.25" stroke="none" points="{}"/>"#,
            pts.join(" ")
        );
    }

    /// Histogram bars from (bin_lo, bin_hi, count) triplets.
    pub fn bars(&mut self, bins: &[(f64, f64, usize)], color: &str) {
        for &(lo, hi, count) in bins {
            let x0 = self.px(lo);
            let x1 = self.px(hi);
            let y0 = self.py(count as f64);
            let y1 = self.py(self.y_range.0.max(0.0));
            let _ = writeln!(
                self.body,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.7"/>"#,
                x0,
                y0,
                (x1 - x0).max(0.5),
                (y1 - y0).max(0.0),
            );
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(
            out,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            xml_escape(&self.title)
        );

        // frame
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="1"/>"#,
            WIDTH - MARGIN_L - MARGIN_R,
            HEIGHT - MARGIN_T - MARGIN_B
        );

        // ticks: 5 per axis
        for i in 0..=4 {
            let fx = i as f64 / 4.0;
            let xval = self.x_range.0 + fx * (self.x_range.1 - self.x_range.0);
            let x = MARGIN_L + fx * (WIDTH - MARGIN_L - MARGIN_R);
            let label = if self.log2_x {
                format!("2^{}", xval.round() as i64)
            } else {
                format!("{xval:.3}")
            };
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
                HEIGHT - MARGIN_B,
                HEIGHT - MARGIN_B + 4.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{label}</text>"#,
                HEIGHT - MARGIN_B + 16.0
            );

            let yval = self.y_range.0 + fx * (self.y_range.1 - self.y_range.0);
            let y = HEIGHT - MARGIN_B - fx * (HEIGHT - MARGIN_T - MARGIN_B);
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_L}" y2="{y:.2}" stroke="black"/>"#,
                MARGIN_L - 4.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{yval:.3}</text>"#,
                MARGIN_L - 6.0,
                y + 4.0
            );
        }

        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
            HEIGHT - 10.0,
            xml_escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="14" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            xml_escape(&self.y_label)
        );

        out.push_str(&self.body);

        for (i, (label, color)) in self.legend.iter().enumerate() {
            let y = MARGIN_T + 14.0 + 16.0 * i as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/>"#,
                MARGIN_L + 8.0,
                MARGIN_L + 28.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
                MARGIN_L + 34.0,
                y + 4.0,
                xml_escape(label)
            );
        }

        out.push_str("</svg>\n");
        out
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
