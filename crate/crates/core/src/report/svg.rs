//! Minimal SVG plotting: axes, polylines, bands and bars.
//!
//! Output is plain text with fixed number formatting, so equal inputs give
//! equal files.

use std::fmt::Write;

pub const WIDTH: f64 = 720.0;
pub const HEIGHT: f64 = 440.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 52.0;

pub const BLUE: &str = "#2b6cb0";
pub const ORANGE: &str = "#dd6b20";
pub const GREY: &str = "#a0aec0";
pub const GREEN: &str = "#2f855a";

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn n(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// A single plot panel with linear or log10 x scale.
pub struct Plot {
    body: String,
    x: (f64, f64),
    y: (f64, f64),
    log_x: bool,
    categorical: bool,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str, x: (f64, f64), y: (f64, f64), log_x: bool) -> Self {
        Self::build(title, x_label, y_label, x, y, log_x, false)
    }

    /// Panel for bar charts: `slots` slots of width 1, labelled with
    /// [`Plot::category`] instead of numeric x ticks.
    pub fn categorical(title: &str, x_label: &str, y_label: &str, slots: usize, y: (f64, f64)) -> Self {
        Self::build(title, x_label, y_label, (0.0, slots as f64), y, false, true)
    }

    fn build(
        title: &str,
        x_label: &str,
        y_label: &str,
        x: (f64, f64),
        y: (f64, f64),
        log_x: bool,
        categorical: bool,
    ) -> Self {
        let mut p = Self { body: String::new(), x, y, log_x, categorical };
        let (w, h) = (WIDTH, HEIGHT);
        let _ = writeln!(
            p.body,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            n(w / 2.0),
            esc(title)
        );
        let _ = writeln!(
            p.body,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#,
            n(LEFT + (w - LEFT - RIGHT) / 2.0),
            n(h - 10.0),
            esc(x_label)
        );
        let _ = writeln!(
            p.body,
            r#"<text transform="translate(16 {}) rotate(-90)" text-anchor="middle" font-size="12">{}</text>"#,
            n(TOP + (h - TOP - BOTTOM) / 2.0),
            esc(y_label)
        );
        let _ = writeln!(
            p.body,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
            n(LEFT),
            n(TOP),
            n(w - LEFT - RIGHT),
            n(h - TOP - BOTTOM)
        );
        p.ticks();
        p
    }

    /// Label under slot `i` of a categorical panel.
    pub fn category(&mut self, i: usize, text: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="11">{}</text>"#,
            n(self.tx(i as f64 + 0.5)),
            n(HEIGHT - BOTTOM + 16.0),
            esc(text)
        );
    }

    fn tx(&self, v: f64) -> f64 {
        let (a, b, v) = if self.log_x { (self.x.0.log10(), self.x.1.log10(), v.log10()) } else { (self.x.0, self.x.1, v) };
        LEFT + (v - a) / (b - a) * (WIDTH - LEFT - RIGHT)
    }

    fn ty(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - (v - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }

    fn ticks(&mut self) {
        let xs: Vec<f64> = if self.categorical {
            Vec::new()
        } else if self.log_x {
            let (a, b) = (self.x.0.log10().ceil() as i32, self.x.1.log10().floor() as i32);
            (a..=b).map(|e| 10f64.powi(e)).collect()
        } else {
            nice_ticks(self.x.0, self.x.1)
        };
        for v in xs {
            let px = self.tx(v);
            let _ = writeln!(
                self.body,
                r##"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#333"/><text x="{0}" y="{3}" text-anchor="middle" font-size="11">{4}</text>"##,
                n(px),
                n(HEIGHT - BOTTOM),
                n(HEIGHT - BOTTOM + 5.0),
                n(HEIGHT - BOTTOM + 18.0),
                short(v)
            );
        }
        for v in nice_ticks(self.y.0, self.y.1) {
            let py = self.ty(v);
            let _ = writeln!(
                self.body,
                r##"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="#333"/><text x="{3}" y="{4}" text-anchor="end" font-size="11">{5}</text>"##,
                n(LEFT - 5.0),
                n(py),
                n(LEFT),
                n(LEFT - 8.0),
                n(py + 4.0),
                short(v)
            );
        }
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], colour: &str, width: f64, opacity: f64) {
        if pts.is_empty() {
            return;
        }
        let mut d = String::new();
        for (i, &(x, y)) in pts.iter().enumerate() {
            if i > 0 {
                d.push(' ');
            }
            let _ = write!(d, "{},{}", n(self.tx(x)), n(self.ty(y)));
        }
        let _ = writeln!(
            self.body,
            r#"<polyline points="{d}" fill="none" stroke="{colour}" stroke-width="{}" stroke-opacity="{}"/>"#,
            n(width),
            n(opacity)
        );
    }

    /// Filled region between `lower` and `upper` over the same x values.
    pub fn band(&mut self, xs: &[f64], lower: &[f64], upper: &[f64], colour: &str) {
        if xs.is_empty() {
            return;
        }
        let mut d = String::new();
        for (x, y) in xs.iter().zip(upper).chain(xs.iter().zip(lower).rev()) {
            let _ = write!(d, "{},{} ", n(self.tx(*x)), n(self.ty(*y)));
        }
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="{colour}" fill-opacity="0.25" stroke="none"/>"#,
            d.trim_end()
        );
    }

    pub fn markers(&mut self, pts: &[(f64, f64)], colour: &str) {
        for &(x, y) in pts {
            let _ = writeln!(
                self.body,
                r#"<circle cx="{}" cy="{}" r="3.5" fill="{colour}"/>"#,
                n(self.tx(x)),
                n(self.ty(y))
            );
        }
    }

    pub fn hline(&mut self, y: f64, colour: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{}" y1="{2}" x2="{}" y2="{2}" stroke="{colour}" stroke-dasharray="5 4"/>"#,
            n(LEFT),
            n(WIDTH - RIGHT),
            n(self.ty(y))
        );
    }

    /// Vertical bar from the x axis baseline `y.0` up to `value`.
    pub fn bar(&mut self, x_lo: f64, x_hi: f64, value: f64, colour: &str) {
        let (a, b) = (self.tx(x_lo), self.tx(x_hi));
        let top = self.ty(value);
        let base = self.ty(self.y.0);
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{colour}"/>"#,
            n(a),
            n(top.min(base)),
            n(b - a),
            n((base - top).abs())
        );
    }

    /// Legend entries stacked in the top-left corner of the panel.
    pub fn legend(&mut self, entries: &[(&str, &str)]) {
        for (i, (colour, text)) in entries.iter().enumerate() {
            let y = TOP + 16.0 + 16.0 * i as f64;
            let _ = writeln!(
                self.body,
                r#"<rect x="{}" y="{}" width="12" height="10" fill="{colour}"/><text x="{}" y="{}" font-size="11">{}</text>"#,
                n(LEFT + 10.0),
                n(y - 9.0),
                n(LEFT + 28.0),
                n(y),
                esc(text)
            );
        }
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = WIDTH,
            h = HEIGHT
        )
    }
}

/// Round-numbered ticks (steps of 1, 2 or 5 times a power of ten) inside `[lo, hi]`.
pub fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return vec![lo];
    }
    // smallest round step giving at most 8 intervals
    let raw = (hi - lo) / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn short(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.2}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_is_well_formed_enough() {
        let mut p = Plot::new("a < b", "t", "x", (0.0, 1.0), (-1.0, 1.0), false);
        p.polyline(&[(0.0, 0.0), (1.0, 1.0)], BLUE, 1.0, 1.0);
        p.band(&[0.0, 1.0], &[-0.5, -0.5], &[0.5, 0.5], GREY);
        let s = p.finish();
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("a &lt; b"));
        assert_eq!(s.matches("<polyline").count(), 1);
    }

    #[test]
    fn ticks_are_round() {
        let t = nice_ticks(0.0, 1.0);
        assert_eq!(t.len(), 6);
        assert!(t.iter().zip([0.0, 0.2, 0.4, 0.6, 0.8, 1.0]).all(|(a, b)| (a - b).abs() < 1e-12));
        assert_eq!(nice_ticks(-36.0, 39.0), vec![-30.0, -20.0, -10.0, 0.0, 10.0, 20.0, 30.0]);
    }

    #[test]
    fn log_axis_ticks_at_decades() {
        let s = Plot::new("", "", "", (0.1, 100.0), (0.0, 1.0), true).finish();
        for t in [">0.1<", ">1<", ">10<", ">100<"] {
            assert!(s.contains(t), "{t}");
        }
    }
}
