//! Hand-emitted SVG log-log plot of the tone gap against eps.

use plate_tone::quant::SharpnessReport;
use std::fmt::Write;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 56.0;

struct Axis {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Axis {
    /// Log axis over whole decades containing every value.
    fn decades(values: impl Iterator<Item = f64>, from: f64, to: f64) -> Self {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let (lo, hi) = if lo.is_finite() { (lo.log10().floor(), hi.log10().ceil()) } else { (0.0, 1.0) };
        Self { lo, hi: if hi > lo { hi } else { lo + 1.0 }, from, to }
    }

    fn map(&self, v: f64) -> f64 {
        self.from + (v.log10() - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }
}

pub fn log_log(rep: &SharpnessReport) -> String {
    let pts: Vec<(f64, f64)> =
        rep.records.iter().filter(|r| r.tone_gap > 0.0).map(|r| (r.eps, r.tone_gap)).collect();
    let x = Axis::decades(pts.iter().map(|p| p.0), MARGIN, WIDTH - MARGIN / 2.0);
    let y = Axis::decades(pts.iter().map(|p| p.1), HEIGHT - MARGIN, MARGIN / 2.0);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{:.1} {:.1}V{:.1}H{:.1}" fill="none" stroke="black"/>"#,
        x.from, y.to, y.from, x.to
    );
    for e in x.lo as i32..=x.hi as i32 {
        let px = x.map(10f64.powi(e));
        let _ = writeln!(s, r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">1e{e}</text>"#, y.from + 16.0);
    }
    for e in y.lo as i32..=y.hi as i32 {
        let py = y.map(10f64.powi(e));
        let _ = writeln!(s, r#"<text x="{:.1}" y="{py:.1}" text-anchor="end">1e{e}</text>"#, x.from - 6.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">eps</text>"#,
        (x.from + x.to) / 2.0,
        HEIGHT - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" transform="rotate(-90 14 {:.1})" text-anchor="middle">tone gap ({})</text>"#,
        (y.from + y.to) / 2.0,
        (y.from + y.to) / 2.0,
        rep.problem
    );

    // Fitted line through the centroid of the fitted points in log space.
    let fitted: Vec<(f64, f64)> =
        rep.records.iter().filter(|r| r.fitted && r.tone_gap > 0.0).map(|r| (r.eps.ln(), r.tone_gap.ln())).collect();
    if fitted.len() >= 2 && rep.slope.is_finite() {
        let n = fitted.len() as f64;
        let mx = fitted.iter().map(|p| p.0).sum::<f64>() / n;
        let my = fitted.iter().map(|p| p.1).sum::<f64>() / n;
        let (e0, e1) = (fitted[0].0, fitted[fitted.len() - 1].0);
        let at = |lx: f64| (x.map(lx.exp()), y.map((my + rep.slope * (lx - mx)).exp()));
        let (a, b) = (at(e0), at(e1));
        let _ = writeln!(
            s,
            r##"<path d="M{:.1} {:.1}L{:.1} {:.1}" stroke="#c33" stroke-dasharray="5 3"/>"##,
            a.0, a.1, b.0, b.1
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.1}" y="{:.1}" fill="#c33">slope {:.3}</text>"##,
            x.from + 10.0,
            y.to + 14.0,
            rep.slope
        );
    }
    for (e, g) in &pts {
        let _ = writeln!(s, r##"<circle cx="{:.1}" cy="{:.1}" r="3" fill="#236"/>"##, x.map(*e), y.map(*g));
    }
    s.push_str("</svg>\n");
    s
}
