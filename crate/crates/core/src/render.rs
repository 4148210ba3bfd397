//! CSV, JSON and SVG emission.
//!
//! Every float is printed through [`fmt_sig`], so identical inputs give
//! byte-identical output.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::curves::{CurveKind, InformationCurve, PhaseScanResult};
use crate::numfmt::{fmt_sig, round_sig};

pub const CURVE_CSV_HEADER: &str = "kind,label,q,i";
pub const SCAN_CSV_HEADER: &str = "p,q_at,slope,chi";

fn envelope_row_kind(kind: CurveKind) -> &'static str {
    match kind {
        CurveKind::Formation => "envelope_formation",
        CurveKind::Extraction => "envelope_extraction",
    }
}

/// Points then envelope vertices of each curve, one row each.
pub fn curves_csv(curves: &[&InformationCurve]) -> String {
    let mut out = String::new();
    out.push_str(CURVE_CSV_HEADER);
    out.push('\n');
    for c in curves {
        for p in &c.points {
            let _ = writeln!(out, "{},{},{},{}", p.kind.as_str(), p.label, fmt_sig(p.q), fmt_sig(p.i));
        }
        for (k, v) in c.envelope.iter().enumerate() {
            let _ = writeln!(out, "{},v{},{},{}", envelope_row_kind(c.kind), k, fmt_sig(v.q), fmt_sig(v.i));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub kind: String,
    pub label: String,
    pub q: f64,
    pub i: f64,
}

/// Parses the output of [`curves_csv`].
pub fn parse_curves_csv(text: &str) -> Result<Vec<CurveRow>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CURVE_CSV_HEADER) {
        return Err("missing header".into());
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(format!("expected 4 fields: {line}"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{e}: {line}"));
            Ok(CurveRow {
                kind: f[0].to_string(),
                label: f[1].to_string(),
                q: num(f[2])?,
                i: num(f[3])?,
            })
        })
        .collect()
}

/// Rows `p,q_at,slope,chi` followed by a `# divergence_flag=` summary line.
pub fn scan_csv(result: &PhaseScanResult) -> String {
    let mut out = String::new();
    out.push_str(SCAN_CSV_HEADER);
    out.push('\n');
    for s in &result.samples {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_sig(s.p),
            fmt_sig(s.q_at),
            fmt_sig(s.slope),
            fmt_sig(s.chi)
        );
    }
    let degenerate: Vec<String> = result
        .samples
        .iter()
        .filter(|s| s.degenerate)
        .map(|s| fmt_sig(s.p))
        .collect();
    if !degenerate.is_empty() {
        let _ = writeln!(out, "# degenerate={}", degenerate.join(";"));
    }
    let _ = writeln!(out, "# divergence_flag={}", result.divergence_flag);
    out
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if !n.is_i64() && !n.is_u64() => serde_json::Number::from_f64(round_sig(x))
                .map(Value::Number)
                .unwrap_or(Value::Null),
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with every float rounded to the fixed significant digits;
/// non-finite values become `null`.
pub fn rounded_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).unwrap_or(Value::Null);
    let mut s = serde_json::to_string_pretty(&round_value(v)).unwrap_or_default();
    s.push('\n');
    s
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// One polyline plus optional point markers.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub line: Vec<(f64, f64)>,
    pub markers: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: u32,
    pub height: u32,
    pub series: Vec<Series>,
}

/// Canvas size and orientation for rendered curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSpec {
    /// Plot formation curves negated into the lower-left quadrant.
    pub negate_formation: bool,
    pub width: u32,
    pub height: u32,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            negate_formation: true,
            width: 640,
            height: 480,
        }
    }
}

/// Envelope and points of a curve as a chart series, applying the sign
/// convention.
pub fn curve_series(curve: &InformationCurve, name: &str, spec: &RenderSpec) -> Series {
    let sign = if spec.negate_formation && curve.kind == CurveKind::Formation {
        -1.0
    } else {
        1.0
    };
    Series {
        name: name.to_string(),
        line: curve.envelope.iter().map(|v| (sign * v.q, sign * v.i)).collect(),
        markers: curve.points.iter().map(|p| (sign * p.q, sign * p.i)).collect(),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn nice_step(range: f64) -> f64 {
    let raw = range / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac < 1.5 {
        1.0
    } else if frac < 3.5 {
        2.0
    } else if frac < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn px(x: f64) -> String {
    format!("{x:.2}")
}

/// Self-contained SVG: axes through the origin when it is in view, ticks,
/// one polyline per series, circle markers and a legend.
pub fn render_svg(chart: &Chart) -> String {
    let (w, h) = (chart.width as f64, chart.height as f64);
    let margin = 56.0;
    let all = chart
        .series
        .iter()
        .flat_map(|s| s.line.iter().chain(&s.markers))
        .copied()
        .chain(std::iter::once((0.0, 0.0)));
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let pad = |lo: f64, hi: f64| {
        let span = (hi - lo).max(1e-9);
        (lo - 0.05 * span, hi + 0.05 * span)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let sx = |x: f64| margin + (x - x0) / (x1 - x0) * (w - 2.0 * margin);
    let sy = |y: f64| h - margin - (y - y0) / (y1 - y0) * (h - 2.0 * margin);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        chart.width, chart.height, chart.width, chart.height
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, chart.width, chart.height);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        px(w / 2.0),
        escape(&chart.title)
    );

    // axes cross at the origin (always inside the padded bounds)
    let (ax, ay) = (sx(0.0), sy(0.0));
    let _ = writeln!(out, r#"<g stroke="black" stroke-width="1">"#);
    let _ = writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, px(margin), px(ay), px(w - margin), px(ay));
    let _ = writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, px(ax), px(margin), px(ax), px(h - margin));
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, r#"<g font-family="sans-serif" font-size="10" fill="black">"#);
    let step = nice_step(x1 - x0);
    let mut t = (x0 / step).ceil() * step;
    while t <= x1 {
        let x = sx(t);
        let _ = writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, px(x), px(ay - 3.0), px(x), px(ay + 3.0));
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, px(x), px(ay + 14.0), fmt_sig(round_tick(t, step)));
        t += step;
    }
    let step = nice_step(y1 - y0);
    let mut t = (y0 / step).ceil() * step;
    while t <= y1 {
        let y = sy(t);
        let _ = writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, px(ax - 3.0), px(y), px(ax + 3.0), px(y));
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, px(ax - 5.0), px(y + 3.0), fmt_sig(round_tick(t, step)));
        t += step;
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        px(w / 2.0),
        px(h - 12.0),
        escape(&chart.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {})">{}</text>"#,
        px(h / 2.0),
        px(h / 2.0),
        escape(&chart.y_label)
    );

    for (k, s) in chart.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = s.line.iter().map(|&(x, y)| format!("{},{}", px(sx(x)), px(sy(y)))).collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            color,
            pts.join(" "),
            escape(&s.name)
        );
        for &(x, y) in &s.markers {
            let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="3" fill="{}"/>"#, px(sx(x)), px(sy(y)), color);
        }
        let ly = margin + 14.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" fill="{}">{}</text>"#,
            px(w - margin - 90.0),
            px(ly),
            color,
            escape(&s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn round_tick(t: f64, step: f64) -> f64 {
    (t / step).round() * step
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{build_lower_envelope, pure_extraction_line, PhaseSample, PointKind, ProtocolPoint};

    fn bell_curve() -> InformationCurve {
        build_lower_envelope(&[
            ProtocolPoint::new(0.354578902665, 2.0, PointKind::FormationEndpointEc, "E_c"),
            ProtocolPoint::new(0.5, 1.5, PointKind::FormationIntermediate, "decomposition"),
            ProtocolPoint::new(1.0, 1.188721875540867, PointKind::FormationEndpointEr, "E_r"),
        ])
        .unwrap()
    }

    #[test]
    fn curve_csv_rows_and_parse() {
        let c = bell_curve();
        let csv = curves_csv(&[&c]);
        assert!(csv.starts_with("kind,label,q,i\nformation_endpoint_ec,E_c,0.354578903,2\n"));
        assert!(csv.contains("formation_intermediate,decomposition,0.5,1.5\n"));
        assert!(csv.contains("envelope_formation,v2,1,1.18872188\n"));
        let rows = parse_curves_csv(&csv).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(parse_curves_csv("nope").is_err());
    }

    #[test]
    fn scan_csv_summary() {
        let r = PhaseScanResult {
            samples: vec![PhaseSample {
                p: 0.25,
                q_at: 0.4,
                slope: -3.43829065,
                chi: -0.290842195,
                degenerate: false,
            }],
            divergence_flag: false,
        };
        assert_eq!(
            scan_csv(&r),
            "p,q_at,slope,chi\n0.25,0.4,-3.43829065,-0.290842195\n# divergence_flag=false\n"
        );
    }

    #[test]
    fn json_is_rounded_and_ordered() {
        #[derive(Serialize)]
        struct S {
            z: f64,
            a: f64,
            n: u32,
            inf: f64,
        }
        let s = rounded_json(&S {
            z: 1.0 / 3.0,
            a: 2.0,
            n: 4,
            inf: f64::INFINITY,
        });
        assert_eq!(s, "{\n  \"z\": 0.333333333,\n  \"a\": 2.0,\n  \"n\": 4,\n  \"inf\": null\n}\n");
    }

    #[test]
    fn svg_structure() {
        let spec = RenderSpec::default();
        let chart = Chart {
            title: "Q & I".into(),
            x_label: "Q (qubits)".into(),
            y_label: "I (bits)".into(),
            width: spec.width,
            height: spec.height,
            series: vec![
                curve_series(&bell_curve(), "formation", &spec),
                curve_series(&pure_extraction_line(2.0, 1.0).unwrap(), "extraction", &spec),
            ],
        };
        let svg = render_svg(&chart);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("Q &amp; I"));
        assert!(svg.contains("Q (qubits)") && svg.contains("I (bits)"));
        assert!(svg.ends_with("</svg>\n"));
        // formation negated into the lower-left quadrant
        let s = curve_series(&bell_curve(), "f", &spec);
        assert!(s.line.iter().all(|&(x, y)| x < 0.0 && y < 0.0));
    }
}
