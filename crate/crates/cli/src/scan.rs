//! Phase-scan CSV and SVG rendering.

use std::fmt::Write as _;

use tfn_core::PhaseScanResult;

pub const CSV_HEADER: &str = "phi,transmitted,analytic,abs_error";
pub const OUT_OF_REGIME_NOTE: &str = "width formula out of small-β regime";

const SVG_WIDTH: f64 = 800.0;
const SVG_HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 70.0;
const TICKS: usize = 5;

pub fn to_csv(scan: &PhaseScanResult) -> String {
    let mut out = String::with_capacity(scan.points.len() * 64);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in &scan.points {
        writeln!(out, "{},{},{},{}", p.phi, p.transmitted, p.analytic, p.abs_error()).unwrap();
    }
    writeln!(out, "# beta={}", scan.beta).unwrap();
    writeln!(out, "# theta={}", scan.theta).unwrap();
    match scan.fwhm_numeric {
        Some(w) => writeln!(out, "# fwhm_numeric={w}").unwrap(),
        None => writeln!(out, "# fwhm_numeric=absent").unwrap(),
    }
    writeln!(out, "# fwhm_predicted={}", scan.fwhm_predicted).unwrap();
    writeln!(out, "# max_abs_error={:e}", scan.max_abs_error()).unwrap();
    if scan.width_law_holds() == Some(false) {
        writeln!(out, "# {OUT_OF_REGIME_NOTE}").unwrap();
    }
    out
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

/// A single polyline of transmitted probability against phase, with axis
/// ticks, on an 800 x 600 canvas.
pub fn to_svg(scan: &PhaseScanResult) -> String {
    let x_min = scan.points.first().map_or(0.0, |p| p.phi);
    let x_max = scan.points.last().map_or(1.0, |p| p.phi);
    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| MARGIN_TOP + (1.0 - y) * plot_h;
    let bottom = MARGIN_TOP + plot_h;
    let right = MARGIN_LEFT + plot_w;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="30" font-family="sans-serif" font-size="16" text-anchor="middle">transmitted probability vs phi (beta={}, theta={})</text>"#,
        SVG_WIDTH / 2.0,
        scan.beta,
        scan.theta
    )
    .unwrap();

    writeln!(out, r#"<g stroke="black" stroke-width="1">"#).unwrap();
    writeln!(out, r#"<line x1="{MARGIN_LEFT}" y1="{bottom}" x2="{right}" y2="{bottom}"/>"#).unwrap();
    writeln!(out, r#"<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{bottom}"/>"#).unwrap();
    for k in 0..TICKS {
        let f = k as f64 / (TICKS - 1) as f64;
        let x = MARGIN_LEFT + f * plot_w;
        let y = MARGIN_TOP + (1.0 - f) * plot_h;
        writeln!(out, r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}"/>"#, bottom + 6.0).unwrap();
        writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}"/>"#, MARGIN_LEFT - 6.0).unwrap();
    }
    writeln!(out, "</g>").unwrap();

    writeln!(out, r#"<g font-family="sans-serif" font-size="12">"#).unwrap();
    for k in 0..TICKS {
        let f = k as f64 / (TICKS - 1) as f64;
        let x = MARGIN_LEFT + f * plot_w;
        let y = MARGIN_TOP + (1.0 - f) * plot_h;
        writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 22.0,
            tick_label(x_min + f * (x_max - x_min))
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 10.0,
            y + 4.0,
            tick_label(f)
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">phi (rad)</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        SVG_HEIGHT - 20.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">transmitted</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    )
    .unwrap();
    writeln!(out, "</g>").unwrap();

    let mut points = String::with_capacity(scan.points.len() * 16);
    for (k, p) in scan.points.iter().enumerate() {
        if k > 0 {
            points.push(' ');
        }
        write!(points, "{:.3},{:.3}", sx(p.phi), sy(p.transmitted.clamp(0.0, 1.0))).unwrap();
    }
    writeln!(
        out,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{points}"/>"#
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tfn_core::scenarios::phase_scan;

    #[test]
    fn csv_layout() {
        let scan = phase_scan(0.3, 0.0, -0.05, 0.05, 5).unwrap();
        let csv = to_csv(&scan);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
        assert_eq!(rows.len(), 5);
        for row in rows {
            let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cols.len(), 4);
            assert_eq!(cols[3], (cols[1] - cols[2]).abs());
        }
        assert!(csv.contains("# fwhm_predicted="));
        // the half-maximum crossings near +-0.094 lie outside the window
        assert!(csv.contains("# fwhm_numeric=absent"));
    }

    #[test]
    fn svg_has_one_polyline_and_ticks() {
        let scan = phase_scan(0.3, 0.0, -3.0, 3.0, 101).unwrap();
        let svg = to_svg(&scan);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r#"viewBox="0 0 800 600""#));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.matches("<text").count() >= 2 * TICKS);
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
