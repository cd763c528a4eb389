//! Log-log chart of norms against time.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 64.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

pub struct Series {
    pub label: String,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// `(slope, intercept)` of `ln norm = intercept + slope ln t`.
    pub fit: Option<(f64, f64)>,
    /// Predicted slope, drawn through the first point.
    pub predicted: Option<f64>,
}

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
}

impl Axes {
    fn px(&self, log_t: f64) -> f64 {
        MARGIN + (log_t - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, log_n: f64) -> f64 {
        HEIGHT - MARGIN - (log_n - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn decade_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| *v > 0.0 && v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let (lo, hi) = (lo.log10().floor(), hi.log10().ceil());
    if hi > lo {
        (lo, hi)
    } else {
        (lo, lo + 1.0)
    }
}

/// Renders the series on shared decade-aligned log axes.
pub fn loglog_chart(title: &str, series: &[Series]) -> String {
    let axes = Axes {
        x: decade_range(series.iter().flat_map(|s| s.times.iter().copied())),
        y: decade_range(series.iter().flat_map(|s| s.norms.iter().copied())),
    };
    let l10 = std::f64::consts::LN_10;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    for d in axes.x.0 as i32..=axes.x.1 as i32 {
        let x = axes.px(d as f64);
        let _ =
            writeln!(svg, r##"<line x1="{x:.2}" y1="{MARGIN}" x2="{x:.2}" y2="{}" stroke="#ddd"/>"##, HEIGHT - MARGIN);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{d}</text>"#, HEIGHT - MARGIN + 18.0);
    }
    for d in axes.y.0 as i32..=axes.y.1 as i32 {
        let y = axes.py(d as f64);
        let _ =
            writeln!(svg, r##"<line x1="{MARGIN}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, WIDTH - MARGIN);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{d}</text>"#, MARGIN - 6.0, y + 4.0);
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#, WIDTH / 2.0, HEIGHT - 16.0);
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">norm</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> = s
            .times
            .iter()
            .zip(&s.norms)
            .filter(|(t, n)| **t > 0.0 && **n > 0.0)
            .map(|(t, n)| (t.log10(), n.log10()))
            .collect();
        let Some(&(lt0, ln0)) = pts.first() else { continue };
        let lt1 = pts.last().map_or(lt0, |p| p.0);
        for (lt, ln) in &pts {
            let _ =
                writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, axes.px(*lt), axes.py(*ln));
        }
        // both lines are straight in log-log, so two endpoints suffice
        if let Some((slope, intercept)) = s.fit {
            let at = |lt: f64| (intercept + slope * lt * l10) / l10;
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
                axes.px(lt0),
                axes.py(at(lt0)),
                axes.px(lt1),
                axes.py(at(lt1))
            );
        }
        if let Some(p) = s.predicted {
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-dasharray="6 4"/>"#,
                axes.px(lt0),
                axes.py(ln0),
                axes.px(lt1),
                axes.py(ln0 + p * (lt1 - lt0))
            );
        }
        let mut label = s.label.clone();
        if let Some((slope, _)) = s.fit {
            let _ = write!(label, ": slope {slope:.3}");
        }
        if let Some(p) = s.predicted {
            let _ = write!(label, " (predicted {p:.3}, dashed)");
        }
        let y = MARGIN + 16.0 * i as f64 + 8.0;
        let _ = writeln!(svg, r#"<text x="{}" y="{y:.2}" fill="{color}">{}</text>"#, MARGIN + 8.0, escape(&label));
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_has_points_and_lines() {
        let times = vec![10.0, 100.0, 1000.0];
        let norms: Vec<f64> = times.iter().map(|t: &f64| t.powf(-0.5)).collect();
        let s = Series { label: "wsup".into(), times, norms, fit: Some((-0.5, 0.0)), predicted: Some(-0.5) };
        let svg = loglog_chart("decay <test>", &[s]);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("decay &lt;test&gt;"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn decades_cover_data() {
        assert_eq!(decade_range([20.0, 2000.0].into_iter()), (1.0, 4.0));
        assert_eq!(decade_range([0.5].into_iter()), (-1.0, 0.0));
    }
}
