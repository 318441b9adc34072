//! Static SVG charts. Output depends only on the input values, so identical
//! runs produce identical files.

use std::fmt::Write;

use crate::evaluation::ComparisonRow;
use crate::pipeline::ForecastSeries;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 56.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 48.0;

const ACTUAL_COLOR: &str = "#1f77b4";
const PREDICTED_COLOR: &str = "#d62728";
const BASELINE_COLOR: &str = "#7f7f7f";

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    );
}

fn plot_area() -> (f64, f64, f64, f64) {
    (
        MARGIN_LEFT,
        MARGIN_TOP,
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
    )
}

/// Axes with horizontal grid lines at `ticks` evenly spaced values in
/// `[0, y_max]`; returns the y-scale in pixels per unit.
fn y_axis(out: &mut String, y_max: f64, ticks: usize, label: &str) -> f64 {
    let (x0, y0, w, h) = plot_area();
    let per_unit = h / y_max;
    for i in 0..=ticks {
        let v = y_max * i as f64 / ticks as f64;
        let y = y0 + h - v * per_unit;
        let _ = writeln!(
            out,
            "<line x1=\"{x0:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#e0e0e0\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            x0 + w,
            x0 - 6.0,
            y + 4.0,
            trim(v)
        );
    }
    let _ = writeln!(
        out,
        "<line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n\
         <line x1=\"{x0:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n\
         <text transform=\"translate(14 {:.2}) rotate(-90)\" text-anchor=\"middle\">{}</text>",
        y0 + h,
        y0 + h,
        x0 + w,
        y0 + h,
        y0 + h / 2.0,
        escape(label)
    );
    per_unit
}

fn trim(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn legend(out: &mut String, entries: &[(&str, &str)]) {
    let (x0, _, w, _) = plot_area();
    let mut x = x0 + w - 150.0 * entries.len() as f64;
    for (label, color) in entries {
        let _ = writeln!(
            out,
            "<rect x=\"{x:.2}\" y=\"{:.2}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            HEIGHT - 20.0,
            x + 18.0,
            HEIGHT - 10.0,
            escape(label)
        );
        x += 150.0;
    }
}

fn polyline(out: &mut String, points: &[(f64, f64)], color: &str) {
    out.push_str("<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"");
    out.push_str(color);
    out.push_str("\" points=\"");
    for (i, (x, y)) in points.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x:.2},{y:.2}");
    }
    out.push_str("\"/>\n");
}

/// Actual and predicted jam factor over time for one road.
pub fn forecast_chart(series: &ForecastSeries) -> String {
    let mut out = String::new();
    header(&mut out, &format!("Week-ahead forecast, road {}", series.road_id()));
    let per_unit = y_axis(&mut out, 10.0, 5, "jam factor");
    let (x0, y0, w, h) = plot_area();
    let pts = series.points();
    if let (Some(first), Some(last)) = (pts.first(), pts.last()) {
        let span = ((last.timestamp - first.timestamp) as f64).max(1.0);
        let x = |t: i64| x0 + (t - first.timestamp) as f64 / span * w;
        let y = |v: f64| y0 + h - v * per_unit;
        let actual: Vec<_> = pts.iter().map(|p| (x(p.timestamp), y(p.actual))).collect();
        let predicted: Vec<_> = pts.iter().map(|p| (x(p.timestamp), y(p.predicted))).collect();
        polyline(&mut out, &actual, ACTUAL_COLOR);
        polyline(&mut out, &predicted, PREDICTED_COLOR);
        // one tick per day
        let day = 86_400;
        let mut t = first.timestamp.div_euclid(day) * day;
        while t <= last.timestamp {
            if t >= first.timestamp {
                let date = chrono::DateTime::from_timestamp(t, 0)
                    .map(|d| d.format("%Y-%m-%d").to_string())
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{date}</text>",
                    x(t),
                    y0 + h + 16.0
                );
            }
            t += day;
        }
    }
    legend(&mut out, &[("actual", ACTUAL_COLOR), ("predicted", PREDICTED_COLOR)]);
    out.push_str("</svg>\n");
    out
}

/// Grouped bars of proposed vs. baseline RMSE per row.
pub fn comparison_chart(rows: &[ComparisonRow], proposed_label: &str, baseline_label: &str) -> String {
    let mut out = String::new();
    header(&mut out, &format!("RMSE: {proposed_label} vs {baseline_label}"));
    let top = rows
        .iter()
        .flat_map(|r| [r.proposed_rmse, r.baseline_rmse])
        .fold(0.0f64, f64::max);
    let y_max = if top > 0.0 { (top * 1.2 * 10.0).ceil() / 10.0 } else { 1.0 };
    let per_unit = y_axis(&mut out, y_max, 4, "RMSE");
    let (x0, y0, w, h) = plot_area();
    let group = w / rows.len().max(1) as f64;
    let bar = group * 0.3;
    for (i, r) in rows.iter().enumerate() {
        let gx = x0 + group * i as f64 + group * 0.2;
        for (k, (v, color)) in [(r.proposed_rmse, PREDICTED_COLOR), (r.baseline_rmse, BASELINE_COLOR)]
            .into_iter()
            .enumerate()
        {
            let bh = v * per_unit;
            let bx = gx + bar * k as f64;
            let _ = writeln!(
                out,
                "<rect x=\"{bx:.2}\" y=\"{:.2}\" width=\"{bar:.2}\" height=\"{bh:.2}\" fill=\"{color}\"/>\n\
                 <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"10\">{}</text>",
                y0 + h - bh,
                bx + bar / 2.0,
                y0 + h - bh - 4.0,
                trim(v)
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            gx + bar,
            y0 + h + 16.0,
            escape(&r.road_id)
        );
    }
    legend(&mut out, &[(proposed_label, PREDICTED_COLOR), (baseline_label, BASELINE_COLOR)]);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::ForecastPoint;

    #[test]
    fn forecast_chart_has_both_lines() {
        let pts = (0..10)
            .map(|k| ForecastPoint {
                timestamp: 1_555_286_400 + k * 300,
                predicted: k as f64 / 2.0,
                actual: 1.0,
            })
            .collect();
        let svg = forecast_chart(&ForecastSeries::new("a<b", pts).unwrap());
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a&lt;b"));
        assert!(svg.contains("2019-04-15"));
    }

    #[test]
    fn comparison_chart_bars() {
        let rows = vec![
            ComparisonRow {
                road_id: "r1".into(),
                proposed_rmse: 1.0,
                baseline_rmse: 0.5,
            },
            ComparisonRow {
                road_id: "average".into(),
                proposed_rmse: 1.0,
                baseline_rmse: 0.5,
            },
        ];
        let svg = comparison_chart(&rows, "proposed", "amwr");
        // two bars per row plus the background and two legend swatches
        assert_eq!(svg.matches("<rect").count(), 4 + 1 + 2);
        assert_eq!(svg, comparison_chart(&rows, "proposed", "amwr"));
    }
}
