//! CSV and SVG output.

use std::fmt::Write as _;
use std::io::Write;

use super::experiment::ExperimentResult;
use super::rates::RateCurve;
use super::table2::Table2Cell;
use crate::error::Result;

pub const RESULTS_HEADER: &str = "model,n,schedule,mean_excess,se,mean_risk,bayes_risk,reps,seed";
pub const TABLE2_HEADER: &str = "row,model,n,standard,standard_se,sliced,sliced_se,improvement_pct,paired_se,\
reference_standard,reference_standard_se,reference_sliced,reference_sliced_se,bayes_risk,reps,seed";
pub const RATES_HEADER: &str = "g,n,mean_excess,se,risk_excess,risk_excess_se,slope,intercept,r2,predicted_slope";

/// Quotes a field if it contains a comma or quote.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_results_csv<W: Write>(results: &[ExperimentResult], mut out: W) -> Result<()> {
    writeln!(out, "{RESULTS_HEADER}")?;
    for res in results {
        for s in &res.schedules {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                field(&res.model),
                res.n_train,
                s.schedule.label(),
                s.mean_excess,
                s.std_error,
                s.mean_risk,
                s.bayes_risk,
                s.replications,
                res.seed
            )?;
        }
    }
    Ok(())
}

pub fn write_table2_csv<W: Write>(cells: &[Table2Cell], mut out: W) -> Result<()> {
    writeln!(out, "{TABLE2_HEADER}")?;
    for c in cells {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            field(&c.row),
            field(&c.model),
            c.n,
            c.standard,
            c.standard_se,
            c.sliced,
            c.sliced_se,
            c.improvement_pct,
            c.paired_se,
            c.reference_standard.value,
            c.reference_standard.se,
            c.reference_sliced.value,
            c.reference_sliced.se,
            c.bayes_risk,
            c.reps,
            c.seed
        )?;
    }
    Ok(())
}

pub fn write_rates_csv<W: Write>(curves: &[RateCurve], mut out: W) -> Result<()> {
    writeln!(out, "{RATES_HEADER}")?;
    for c in curves {
        for p in &c.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                c.g,
                p.n,
                p.mean_excess,
                p.se,
                p.mean_risk_excess,
                p.risk_excess_se,
                c.fit.slope,
                c.fit.intercept,
                c.fit.r2,
                c.predicted_slope
            )?;
        }
    }
    Ok(())
}

/// A named polyline for [`svg_loglog`].
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Minimal log-log line plot. Non-positive coordinates are skipped.
pub fn svg_loglog(series: &[Series], title: &str, x_label: &str, y_label: &str) -> String {
    let (w, h, margin) = (640.0, 440.0, 60.0);
    let logs: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|(x, y)| *x > 0.0 && *y > 0.0)
                .map(|(x, y)| (x.log10(), y.log10()))
                .collect()
        })
        .collect();
    let all = logs.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-9 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-9 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| margin + (x - x0) / (x1 - x0) * (w - 2.0 * margin);
    let py = |y: f64| h - margin - (y - y0) / (y1 - y0) * (h - 2.0 * margin);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, w / 2.0, escape(title));
    let (left, right, top, bottom) = (margin, w - margin, margin, h - margin);
    let _ = writeln!(
        svg,
        r#"<path d="M{left},{top} L{left},{bottom} L{right},{bottom}" fill="none" stroke="black"/>"#
    );
    for (v, pos) in [(x0, left), (x1, right)] {
        let _ = writeln!(
            svg,
            r#"<text x="{pos}" y="{}" text-anchor="middle">{}</text>"#,
            bottom + 16.0,
            tick(v)
        );
    }
    for (v, pos) in [(y0, bottom), (y1, top)] {
        let _ = writeln!(svg, r#"<text x="{}" y="{pos}" text-anchor="end">{}</text>"#, left - 6.0, tick(v));
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 18.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(y_label)
    );
    for (i, (s, pts)) in series.iter().zip(&logs).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        if !path.is_empty() {
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                path.join(" ")
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            right - 120.0,
            top + 16.0 * (i as f64 + 1.0),
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn tick(log_value: f64) -> String {
    format!("{:.3e}", 10f64.powf(log_value))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_excess_risk, DensityChoice, ExperimentConfig};
    use crate::models::LocationModel;
    use crate::rules::KSchedule;

    #[test]
    fn results_csv_has_fixed_schema() {
        let res = run_excess_risk(&ExperimentConfig {
            model: LocationModel::gauss(2.0, 1.0).unwrap().into(),
            n_train: 30,
            n_test: 20,
            replications: 3,
            schedules: vec![KSchedule::Fixed { k: 1 }, KSchedule::CompactRate],
            seed: 9,
            density_source: DensityChoice::Kde,
        })
        .unwrap();
        let mut buf = Vec::new();
        write_results_csv(&[res], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], RESULTS_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("gauss("), "{}", lines[1]);
        assert_eq!(lines[1].rsplit(',').next(), Some("9"));
    }

    #[test]
    fn svg_is_well_formed() {
        let s = svg_loglog(
            &[Series { name: "a<b".into(), points: vec![(10.0, 0.1), (100.0, 0.01), (0.0, 1.0)] }],
            "t",
            "n",
            "excess",
        );
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("a&lt;b"));
        assert_eq!(s.matches("<polyline").count(), 1);
    }
}
