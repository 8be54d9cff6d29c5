//! SVG bar chart of an adjudication report: one group per model, training
//! error in blue and test error in red, with 1σ bootstrap error bars.
//!
//! Output is a pure function of the report and options, so identical
//! reports render to identical bytes.

use std::fmt::Write;

use crate::selection::AdjudicationReport;

pub const TRAIN_COLOR: &str = "#1f5fbf";
pub const TEST_COLOR: &str = "#c8323c";

#[derive(Debug, Clone, PartialEq)]
pub struct ChartOptions {
    pub width: f64,
    pub height: f64,
    /// Logarithmic error axis; useful when one model is far off the rest.
    pub log_y: bool,
    pub title: String,
}

impl Default for ChartOptions {
    fn default() -> Self {
        Self {
            width: 640.0,
            height: 400.0,
            log_y: false,
            title: "Training and test error by model".into(),
        }
    }
}

const LEFT: f64 = 78.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 56.0;

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
    ticks: Vec<f64>,
}

impl Axis {
    fn linear(max: f64) -> Self {
        let max = if max > 0.0 && max.is_finite() { max } else { 1.0 };
        let raw = max / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let n = (max / step).ceil() as usize;
        Self {
            lo: 0.0,
            hi: n as f64 * step,
            log: false,
            ticks: (0..=n).map(|i| i as f64 * step).collect(),
        }
    }

    fn logarithmic(min: f64, max: f64) -> Self {
        let min = if min > 0.0 && min.is_finite() { min } else { 1e-6 };
        let max = if max > min && max.is_finite() { max } else { min * 10.0 };
        let lo = min.log10().floor() as i32;
        let hi = (max.log10().ceil() as i32).max(lo + 1);
        Self {
            lo: 10f64.powi(lo),
            hi: 10f64.powi(hi),
            log: true,
            ticks: (lo..=hi).map(|e| 10f64.powi(e)).collect(),
        }
    }

    /// Fraction of the axis height at value `v`, clamped to [0, 1].
    fn frac(&self, v: f64) -> f64 {
        let f = if self.log {
            let v = v.max(self.lo);
            (v.log10() - self.lo.log10()) / (self.hi.log10() - self.lo.log10())
        } else {
            (v - self.lo) / (self.hi - self.lo)
        };
        f.clamp(0.0, 1.0)
    }
}

fn tick_label(v: f64, log: bool) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if log || !(1e-3..1e4).contains(&v.abs()) {
        return format!("{v:e}");
    }
    let s = format!("{v:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `report` as a standalone SVG document.
pub fn render_svg(report: &AdjudicationReport, opts: &ChartOptions) -> String {
    let (w, h) = (opts.width, opts.height);
    let plot_w = (w - LEFT - RIGHT).max(1.0);
    let plot_h = (h - TOP - BOTTOM).max(1.0);
    let bars: Vec<(f64, f64)> = report
        .models
        .iter()
        .flat_map(|m| [(m.training_error, m.train_std), (m.test_error, m.test_std)])
        .collect();
    let axis = if opts.log_y {
        let min = bars
            .iter()
            .map(|(v, s)| if v - s > 0.0 { v - s } else { *v })
            .filter(|v| *v > 0.0)
            .fold(f64::INFINITY, f64::min);
        let max = bars.iter().map(|(v, s)| v + s).fold(0.0, f64::max);
        Axis::logarithmic(min, max)
    } else {
        Axis::linear(bars.iter().map(|(v, s)| v + s).fold(0.0, f64::max) * 1.05)
    };
    let y = |v: f64| TOP + plot_h * (1.0 - axis.frac(v));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        w / 2.0,
        escape(&opts.title)
    );

    // Gridlines and tick labels.
    for &t in &axis.ticks {
        let ty = y(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT:.2}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            ty + 4.0,
            tick_label(t, axis.log)
        );
    }
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}" stroke="black"/>"#,
        TOP + plot_h
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{LEFT:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">squared-error loss</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    let n = report.models.len().max(1) as f64;
    let group = plot_w / n;
    let bar = group * 0.3;
    for (i, m) in report.models.iter().enumerate() {
        let gx = LEFT + group * i as f64;
        let pairs = [
            (m.training_error, m.train_std, TRAIN_COLOR, "training"),
            (m.test_error, m.test_std, TEST_COLOR, "test"),
        ];
        for (k, (v, sd, color, what)) in pairs.into_iter().enumerate() {
            let x = gx + group * 0.2 + bar * k as f64;
            let top = y(v);
            let base = y(axis.lo);
            let _ = writeln!(
                svg,
                r#"<rect x="{x:.2}" y="{top:.2}" width="{bar:.2}" height="{:.2}" fill="{color}"><title>{} {what} error {v:e} ± {sd:e}</title></rect>"#,
                (base - top).max(0.0),
                m.family.label()
            );
            if sd > 0.0 {
                let cx = x + bar / 2.0;
                let (y0, y1) = (y(v - sd), y(v + sd));
                let cap = bar * 0.25;
                let _ = writeln!(
                    svg,
                    r#"<path d="M{cx:.2} {y0:.2}V{y1:.2}M{:.2} {y0:.2}H{:.2}M{:.2} {y1:.2}H{:.2}" stroke="black" fill="none"/>"#,
                    cx - cap,
                    cx + cap,
                    cx - cap,
                    cx + cap
                );
            }
        }
        let label = if m.family.is_classical() {
            format!("{} (d={})", m.family.label(), m.d)
        } else {
            m.family.label().to_string()
        };
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            gx + group / 2.0,
            TOP + plot_h + 20.0,
            escape(&label)
        );
    }

    // Legend.
    let lx = w - RIGHT - 150.0;
    for (k, (color, text)) in [(TRAIN_COLOR, "training error"), (TEST_COLOR, "test error")]
        .into_iter()
        .enumerate()
    {
        let ly = TOP - 22.0 + 16.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{lx:.2}" y="{ly:.2}" width="12" height="12" fill="{color}"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{text}</text>"#,
            lx + 18.0,
            ly + 10.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
