//! CSV and SVG renderings of a spectrum report.

use std::fmt::Write;

use super::spectrum::SpectrumReport;
use crate::error::{Error, Result};

pub const SVG_SIZE: f64 = 800.0;
pub const SVG_DOT_RADIUS: f64 = 1.5;

/// Header `t_1,..,t_d,sigma_min,deficiency`; one row per hit in lexicographic order of `t`.
pub fn spectrum_csv(report: &SpectrumReport) -> String {
    let mut out = String::new();
    let cols: Vec<String> = (1..=report.dimension).map(|j| format!("t_{}", j)).collect();
    writeln!(out, "{},sigma_min,deficiency", cols.join(",")).unwrap();
    for h in report.all_hits() {
        let t: Vec<String> = h.t.iter().map(|x| format!("{}", x)).collect();
        writeln!(out, "{},{:e},{}", t.join(","), h.sigma_min, h.deficiency).unwrap();
    }
    out
}

/// Scatter plot of the hits over the unit square, `t_1` rightward and `t_2` upward.
pub fn spectrum_svg(report: &SpectrumReport) -> Result<String> {
    if report.dimension != 2 {
        return Err(Error::Invalid(format!(
            "SVG output needs a two-dimensional spectrum, got dimension {}",
            report.dimension
        )));
    }
    let s = SVG_SIZE;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{s}" height="{s}" fill="white" stroke="black" stroke-width="1"/>"#).unwrap();
    for i in 1..4 {
        let p = s * i as f64 / 4.0;
        writeln!(
            out,
            r##"<line x1="{p}" y1="0" x2="{p}" y2="{s}" stroke="#ddd" stroke-width="0.5"/>"##
        )
        .unwrap();
        writeln!(
            out,
            r##"<line x1="0" y1="{p}" x2="{s}" y2="{p}" stroke="#ddd" stroke-width="0.5"/>"##
        )
        .unwrap();
    }
    writeln!(out, r#"<g fill="black">"#).unwrap();
    for h in report.all_hits() {
        let x = s * h.t[0];
        let y = s * (1.0 - h.t[1]);
        writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="{}"/>"#,
            x, y, SVG_DOT_RADIUS
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}

/// Plain-text summary printed alongside written spectra.
pub fn spectrum_summary(report: &SpectrumReport) -> String {
    let mut out = String::new();
    writeln!(out, "resolution: {}", report.resolution).unwrap();
    writeln!(out, "tolerance: {:e}", report.tolerance).unwrap();
    writeln!(out, "grid hits: {}", report.hits.len()).unwrap();
    writeln!(out, "curve points: {}", report.curve_points.len()).unwrap();
    writeln!(
        out,
        "singleton: {}",
        if report.singleton_flag { "yes" } else { "no" }
    )
    .unwrap();
    match report.estimated_dimension {
        Some(d) => writeln!(out, "RUM dimension (estimate): {}", d).unwrap(),
        None => writeln!(out, "RUM dimension (estimate): not computed").unwrap(),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rum::spectrum::SpectrumSample;

    fn report(d: usize) -> SpectrumReport {
        SpectrumReport {
            dimension: d,
            resolution: 4,
            tolerance: 1e-8,
            hits: vec![SpectrumSample {
                t: vec![0.0; d],
                index: Some(vec![0; d]),
                sigma_min: 0.0,
                deficiency: 2,
            }],
            curve_points: vec![],
            singleton_flag: true,
            estimated_dimension: Some(0),
        }
    }

    #[test]
    fn csv_layout() {
        assert_eq!(
            spectrum_csv(&report(2)),
            "t_1,t_2,sigma_min,deficiency\n0,0,0e0,2\n"
        );
    }

    #[test]
    fn svg_only_in_two_dimensions() {
        let svg = spectrum_svg(&report(2)).unwrap();
        assert!(svg.contains(r#"<circle cx="0.000" cy="800.000" r="1.5"/>"#));
        assert!(spectrum_svg(&report(3)).is_err());
    }
}
