//! Known redundancy exponents for k-batch codes at `k = n^ε`.
//!
//! Every curve is linear in ε on its domain and gives `δ(ε)` such that the
//! redundancy behaves like `n^δ`, with polylogarithmic factors dropped.
//! Domains are stored closed (the closures of the published ranges). The
//! AY17 curve with slope 5/3 is cut at ε = 1/5, beyond which it exceeds the
//! trivial exponent 1. The HPPV20 segments use plot-derived λ_m constants and
//! only approximate that construction.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Lower,
    Upper,
}

/// `δ(ε) = intercept + slope · ε` for ε in `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentCurve {
    pub name: &'static str,
    pub kind: BoundKind,
    pub lo: f64,
    pub hi: f64,
    pub intercept: f64,
    pub slope: f64,
}

const DOMAIN_TOL: f64 = 1e-12;

impl ExponentCurve {
    fn linear(
        name: &'static str,
        kind: BoundKind,
        lo: f64,
        hi: f64,
        intercept: f64,
        slope: f64,
    ) -> Self {
        ExponentCurve {
            name,
            kind,
            lo,
            hi,
            intercept,
            slope,
        }
    }

    pub fn contains(&self, eps: f64) -> bool {
        eps >= self.lo - DOMAIN_TOL && eps <= self.hi + DOMAIN_TOL
    }

    pub fn is_point(&self) -> bool {
        (self.hi - self.lo).abs() < DOMAIN_TOL
    }

    /// The formula itself, without a domain check.
    pub fn exponent(&self, eps: f64) -> f64 {
        self.intercept + self.slope * eps
    }

    pub fn at(&self, eps: f64) -> Option<f64> {
        self.contains(eps).then(|| self.exponent(eps))
    }
}

fn hppv20(name: &'static str, m: f64, lambda: f64, lo: f64, hi: f64) -> ExponentCurve {
    let l = lambda.log2();
    ExponentCurve::linear(
        name,
        BoundKind::Upper,
        lo,
        hi,
        (m - 1.0) * l / m - m + 2.0,
        m - l,
    )
}

pub fn curve_catalog() -> Vec<ExponentCurve> {
    use BoundKind::*;
    let log4_3 = 3f64.log(4.0);
    let log2_3 = 3f64.log2();
    vec![
        ExponentCurve::linear("distance-bound", Lower, 0.0, 1.0, 0.0, 1.0),
        ExponentCurve::linear("RV16+Woo16", Lower, 0.0, 1.0, 0.5, 0.0),
        ExponentCurve::linear("tensor-bound", Lower, 0.0, 1.0, 0.5, 0.5),
        ExponentCurve::linear("VY16", Upper, 0.0, 0.0, 0.5, 0.0),
        ExponentCurve::linear("PV19a", Upper, 0.0, 1.0 / 3.0, 0.5, 1.5),
        ExponentCurve::linear("PPV20", Upper, 0.0, 0.5, log4_3, 2.0 - log2_3),
        ExponentCurve::linear("AY17-a", Upper, 0.0, 0.2, 2.0 / 3.0, 5.0 / 3.0),
        ExponentCurve::linear("AY17-b", Upper, 0.0, 0.5, 5.0 / 6.0, 1.0 / 3.0),
        ExponentCurve::linear("DGRS14-a", Upper, 0.2, 7.0 / 32.0, 0.0, 4.0),
        ExponentCurve::linear("DGRS14-b", Upper, 0.25, 0.25, 0.875, 0.0),
        hppv20("HPPV20-m3", 3.0, 7.2361, 0.41, 0.64),
        hppv20("HPPV20-m4", 4.0, 15.5436, 0.63, 0.75),
        hppv20("HPPV20-m5", 5.0, 31.7877, 0.75, 0.8),
        hppv20("HPPV20-m6", 6.0, 63.9217, 0.8, 0.83),
        ExponentCurve::linear("HPPV20-tail", Upper, 0.8, 1.0, 1.0, 0.0),
    ]
}

/// Every catalog curve defined at `eps`, keyed by name.
pub fn evaluate(eps: f64) -> Result<BTreeMap<&'static str, f64>> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {eps} outside [0, 1]"
        )));
    }
    Ok(curve_catalog()
        .iter()
        .filter_map(|c| c.at(eps).map(|v| (c.name, v)))
        .collect())
}

/// `0, step, 2·step, …` up to 1, with 1 always included. Points are rounded
/// to 1e-9 so decimal steps print cleanly.
pub fn grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "grid step {step} must lie in (0, 1]"
        )));
    }
    let count = (1.0 / step + 1e-9).floor() as usize;
    let mut pts: Vec<f64> = (0..=count)
        .map(|i| (i as f64 * step * 1e9).round() / 1e9)
        .collect();
    if pts.last().is_some_and(|&l| l < 1.0 - 1e-9) {
        pts.push(1.0);
    }
    Ok(pts)
}

pub fn csv_string(step: f64) -> Result<String> {
    let catalog = curve_catalog();
    let mut out = String::from("epsilon,curve,exponent\n");
    for eps in grid(step)? {
        for c in &catalog {
            if let Some(v) = c.at(eps) {
                writeln!(out, "{eps},{},{v:.9}", c.name).expect("string write");
            }
        }
    }
    Ok(out)
}

const SIZE: f64 = 640.0;
const MARGIN: f64 = 60.0;
const LEGEND_W: f64 = 170.0;

fn px(eps: f64) -> f64 {
    MARGIN + eps * (SIZE - 2.0 * MARGIN)
}

fn py(delta: f64) -> f64 {
    SIZE - MARGIN - delta * (SIZE - 2.0 * MARGIN)
}

/// Self-contained SVG: lower bounds solid red, upper bounds dashed blue,
/// isolated points as open circles stroked the same way.
pub fn svg_string(step: f64) -> Result<String> {
    let pts = grid(step)?;
    let catalog = curve_catalog();
    let mut s = String::new();
    let w = SIZE + LEGEND_W;
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{SIZE}" viewBox="0 0 {w} {SIZE}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{w}" height="{SIZE}" fill="white"/>"#).unwrap();
    // Axes and ticks.
    let (x0, x1, y0, y1) = (px(0.0), px(1.0), py(0.0), py(1.0));
    writeln!(s, r#"<g id="axes" stroke="black" stroke-width="1">"#).unwrap();
    writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/>"#).unwrap();
    writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#).unwrap();
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        writeln!(
            s,
            r#"<line x1="{}" y1="{y0}" x2="{}" y2="{}"/>"#,
            px(v),
            px(v),
            y0 + 5.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<line x1="{x0}" y1="{}" x2="{}" y2="{}"/>"#,
            py(v),
            x0 - 5.0,
            py(v)
        )
        .unwrap();
    }
    writeln!(s, "</g>").unwrap();
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{v}</text>"#,
            px(v),
            y0 + 20.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{v}</text>"#,
            x0 - 8.0,
            py(v) + 4.0
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">log_N(k)</text>"#,
        (x0 + x1) / 2.0,
        SIZE - 15.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">log_N(N - n)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    )
    .unwrap();

    for c in &catalog {
        let (color, dash) = match c.kind {
            BoundKind::Lower => ("#c00000", ""),
            BoundKind::Upper => ("#0040c0", r#" stroke-dasharray="6,4""#),
        };
        let kind = match c.kind {
            BoundKind::Lower => "lower",
            BoundKind::Upper => "upper",
        };
        if c.is_point() {
            writeln!(
                s,
                r#"<circle class="{kind}" data-curve="{}" cx="{:.3}" cy="{:.3}" r="5" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
                c.name,
                px(c.lo),
                py(c.exponent(c.lo))
            )
            .unwrap();
            continue;
        }
        let mut xs: Vec<f64> = vec![c.lo];
        xs.extend(pts.iter().copied().filter(|&e| e > c.lo && e < c.hi));
        xs.push(c.hi);
        let points: Vec<String> = xs
            .iter()
            .map(|&e| format!("{:.3},{:.3}", px(e), py(c.exponent(e))))
            .collect();
        writeln!(
            s,
            r#"<polyline class="{kind}" data-curve="{}" fill="none" stroke="{color}" stroke-width="2"{dash} points="{}"/>"#,
            c.name,
            points.join(" ")
        )
        .unwrap();
    }

    let lx = SIZE + 5.0;
    writeln!(s, r#"<g id="legend">"#).unwrap();
    for (i, c) in catalog.iter().enumerate() {
        let y = MARGIN + 18.0 * i as f64;
        let (color, dash) = match c.kind {
            BoundKind::Lower => ("#c00000", ""),
            BoundKind::Upper => ("#0040c0", r#" stroke-dasharray="6,4""#),
        };
        writeln!(
            s,
            r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"{dash}/>"#,
            lx + 24.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 30.0,
            y + 4.0,
            c.name
        )
        .unwrap();
    }
    writeln!(s, "</g>\n</svg>").unwrap();
    Ok(s)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Writes the curve table as CSV and the diagram as SVG.
pub fn emit_plot(step: f64, csv_path: &Path, svg_path: &Path) -> Result<()> {
    let csv = csv_string(step)?;
    let svg = svg_string(step)?;
    write_file(csv_path, &csv)?;
    write_file(svg_path, &svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(name: &str) -> ExponentCurve {
        curve_catalog()
            .into_iter()
            .find(|c| c.name == name)
            .unwrap()
    }

    #[test]
    fn anchors() {
        let tb = curve("tensor-bound");
        assert_eq!(tb.at(0.0), Some(0.5));
        assert_eq!(tb.at(1.0), Some(1.0));
        assert!((curve("PV19a").at(1.0 / 3.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((curve("PPV20").at(0.0).unwrap() - 0.792_481_250_360_578).abs() < 1e-12);
    }

    #[test]
    fn evaluate_examples() {
        let v = evaluate(0.5).unwrap();
        assert_eq!(v["tensor-bound"], 0.75);
        let v = evaluate(0.25).unwrap();
        assert_eq!(v["distance-bound"], 0.25);
        assert_eq!(v["tensor-bound"], 0.625);
        assert_eq!(v["DGRS14-b"], 0.875);
        let v = evaluate(1.0).unwrap();
        assert_eq!(v["distance-bound"], v["tensor-bound"]);
        assert!(!v.contains_key("PV19a"));
        assert!(evaluate(1.5).is_err());
        assert!(evaluate(-0.1).is_err());
    }

    #[test]
    fn exponents_in_unit_interval() {
        for c in curve_catalog() {
            for i in 0..=1000 {
                let e = i as f64 / 1000.0;
                if let Some(v) = c.at(e) {
                    assert!((-1e-9..=1.0 + 1e-9).contains(&v), "{} at {e}: {v}", c.name);
                }
            }
        }
    }

    #[test]
    fn lower_never_exceeds_upper() {
        let cat = curve_catalog();
        for i in 0..=1000 {
            let e = i as f64 / 1000.0;
            for lo in cat.iter().filter(|c| c.kind == BoundKind::Lower) {
                for up in cat.iter().filter(|c| c.kind == BoundKind::Upper) {
                    if let (Some(a), Some(b)) = (lo.at(e), up.at(e)) {
                        assert!(a <= b + 1e-9, "{} > {} at {e}", lo.name, up.name);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_bound_beats_prior_lower_bounds() {
        let tb = curve("tensor-bound");
        for i in 1..1000 {
            let e = i as f64 / 1000.0;
            assert!(tb.exponent(e) > e.max(0.5));
        }
    }

    #[test]
    fn grid_and_csv() {
        assert_eq!(grid(0.5).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(grid(0.03).unwrap().last(), Some(&1.0));
        assert_eq!(grid(0.01).unwrap().len(), 101);
        assert!(grid(0.0).is_err());
        assert!(grid(1.5).is_err());
        assert_eq!(grid(1.0).unwrap(), vec![0.0, 1.0]);
        let csv = csv_string(0.1).unwrap();
        assert!(csv.starts_with("epsilon,curve,exponent\n"));
        assert!(csv.contains("0.5,tensor-bound,0.750000000\n"));
        assert!(csv.contains("0.3,PV19a,0.950000000\n"));
    }

    #[test]
    fn svg_styles() {
        let svg = svg_string(0.05).unwrap();
        for c in curve_catalog() {
            assert!(
                svg.contains(&format!("data-curve=\"{}\"", c.name)),
                "{}",
                c.name
            );
        }
        for line in svg.lines().filter(|l| l.contains("class=\"lower\"")) {
            assert!(!line.contains("stroke-dasharray"));
        }
        for line in svg.lines().filter(|l| l.contains("class=\"upper\"")) {
            assert!(line.contains("stroke-dasharray"));
        }
    }
}
