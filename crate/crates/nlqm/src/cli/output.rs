//! Trajectory CSV, drift-report JSON, and SVG plot writers.
//!
//! The trajectory CSV carries a fixed column order:
//! `t, Re_psi_0, Im_psi_0, …, Re_phi_0, Im_phi_0, …, N, tau, Re_gamma,
//! Im_gamma, delta, omega0_sq, schwarz, purity`. The observables CSV is the
//! same without the state columns. Floats are written with Rust's shortest
//! round-trip formatting, so identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hilbert::{ReducedState, C64};

/// One output row: time, optional state amplitudes, and the scalar columns.
#[derive(Clone, Debug)]
pub struct Row {
    pub t: f64,
    pub psi: Option<Vec<C64>>,
    pub phi: Option<Vec<C64>>,
    pub observables: ReducedState,
    /// Matrix-route purity where a density matrix is formed; scalar-identity
    /// purity otherwise.
    pub purity: f64,
}

impl Row {
    pub fn scalar_only(t: f64, observables: ReducedState) -> Self {
        Row {
            t,
            psi: None,
            phi: None,
            observables,
            purity: observables.purity_identity(),
        }
    }
}

fn fmt_f64(value: f64) -> String {
    if value == 0.0 {
        // Avoid "-0" artifacts so byte-identity does not depend on the sign
        // of a zero drift.
        "0".to_string()
    } else {
        format!("{value}")
    }
}

/// Render rows as trajectory CSV text (states + observables).
pub fn trajectory_csv(rows: &[Row]) -> Result<String> {
    let dim = rows
        .first()
        .and_then(|r| r.psi.as_ref())
        .map(|p| p.len())
        .ok_or_else(|| {
            Error::ContractViolation("trajectory CSV requires state columns".into())
        })?;
    let mut out = String::new();
    out.push('t');
    for field in ["psi", "phi"] {
        for n in 0..dim {
            let _ = write!(out, ",Re_{field}_{n},Im_{field}_{n}");
        }
    }
    out.push_str(",N,tau,Re_gamma,Im_gamma,delta,omega0_sq,schwarz,purity\n");
    for row in rows {
        let psi = row.psi.as_ref().expect("dim checked on first row");
        let phi = row.phi.as_ref().expect("dim checked on first row");
        if psi.len() != dim || phi.len() != dim {
            return Err(Error::ContractViolation(
                "inconsistent state dimensions across rows".into(),
            ));
        }
        out.push_str(&fmt_f64(row.t));
        for v in psi.iter().chain(phi.iter()) {
            let _ = write!(out, ",{},{}", fmt_f64(v.re), fmt_f64(v.im));
        }
        push_scalars(&mut out, row);
    }
    Ok(out)
}

/// Render rows as observables-only CSV text.
pub fn observables_csv(rows: &[Row]) -> String {
    let mut out =
        String::from("t,N,tau,Re_gamma,Im_gamma,delta,omega0_sq,schwarz,purity\n");
    for row in rows {
        out.push_str(&fmt_f64(row.t));
        push_scalars(&mut out, row);
    }
    out
}

fn push_scalars(out: &mut String, row: &Row) {
    let o = &row.observables;
    let _ = writeln!(
        out,
        ",{},{},{},{},{},{},{},{}",
        fmt_f64(o.norm_sum),
        fmt_f64(o.tau),
        fmt_f64(o.gamma.re),
        fmt_f64(o.gamma.im),
        fmt_f64(o.delta),
        fmt_f64(o.omega0_sq()),
        fmt_f64(o.schwarz()),
        fmt_f64(row.purity),
    );
}

/// CSV for single-vector (appendix) runs: `t, Re_psi_n, Im_psi_n, …, norm`
/// plus an optional closed-form `norm_law` column.
pub fn single_vector_csv(
    times: &[f64],
    states: &[Vec<C64>],
    law: Option<&[f64]>,
) -> Result<String> {
    let dim = states
        .first()
        .map(|s| s.len())
        .ok_or_else(|| Error::ContractViolation("empty single-vector trajectory".into()))?;
    let mut out = String::from("t");
    for n in 0..dim {
        let _ = write!(out, ",Re_psi_{n},Im_psi_{n}");
    }
    out.push_str(",norm");
    if law.is_some() {
        out.push_str(",norm_law");
    }
    out.push('\n');
    for (k, (t, s)) in times.iter().zip(states).enumerate() {
        out.push_str(&fmt_f64(*t));
        for v in s {
            let _ = write!(out, ",{},{}", fmt_f64(v.re), fmt_f64(v.im));
        }
        let norm: f64 = s.iter().map(|v| v.norm_sqr()).sum();
        let _ = write!(out, ",{}", fmt_f64(norm));
        if let Some(law) = law {
            let _ = write!(out, ",{}", fmt_f64(law[k]));
        }
        out.push('\n');
    }
    Ok(out)
}

/// CSV of final spatial fields: `x, Re_psi, Im_psi, Re_phi, Im_phi`.
pub fn spatial_fields_csv(xs: &[f64], psi: &[C64], phi: &[C64]) -> String {
    let mut out = String::from("x,Re_psi,Im_psi,Re_phi,Im_phi\n");
    for ((x, p), q) in xs.iter().zip(psi).zip(phi) {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(*x),
            fmt_f64(p.re),
            fmt_f64(p.im),
            fmt_f64(q.re),
            fmt_f64(q.im)
        );
    }
    out
}

// ---------------------------------------------------------------------------
// SVG line plots
// ---------------------------------------------------------------------------

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 400.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

/// A minimal deterministic line plot: one polyline, axes, and tick labels.
pub fn line_plot_svg(title: &str, ylabel: &str, xs: &[f64], ys: &[f64]) -> String {
    let (x_min, x_max) = bounds(xs);
    let (mut y_min, mut y_max) = bounds(ys);
    if (y_max - y_min).abs() < 1e-300 {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let plot_w = SVG_W - MARGIN_L - MARGIN_R;
    let plot_h = SVG_H - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| MARGIN_T + (y_max - y) / (y_max - y_min) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"24\" font-family=\"monospace\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>",
        SVG_W / 2.0,
        xml_escape(title)
    );
    // Axes.
    let _ = writeln!(
        svg,
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>"
    );
    // Ticks: 5 per axis.
    for k in 0..=4 {
        let fx = x_min + (x_max - x_min) * k as f64 / 4.0;
        let fy = y_min + (y_max - y_min) * k as f64 / 4.0;
        let px = sx(fx);
        let py = sy(fy);
        let _ = writeln!(
            svg,
            "<line x1=\"{px}\" y1=\"{}\" x2=\"{px}\" y2=\"{}\" stroke=\"black\"/>",
            MARGIN_T + plot_h,
            MARGIN_T + plot_h + 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{px}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>",
            MARGIN_T + plot_h + 18.0,
            tick_label(fx)
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{py}\" x2=\"{MARGIN_L}\" y2=\"{py}\" stroke=\"black\"/>",
            MARGIN_L - 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>",
            MARGIN_L - 8.0,
            py + 4.0,
            tick_label(fy)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" \
         text-anchor=\"middle\">t</text>",
        MARGIN_L + plot_w / 2.0,
        SVG_H - 12.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        xml_escape(ylabel)
    );
    // Data polyline.
    let mut points = String::new();
    for (x, y) in xs.iter().zip(ys) {
        let _ = write!(points, "{:.2},{:.2} ", sx(*x), sy(*y));
    }
    let _ = writeln!(
        svg,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\"/>",
        points.trim_end()
    );
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e-3 && v.abs() < 1e4 {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Write the standard plot set (|γ|, τ, N, purity vs t) into `dir`.
pub fn write_plots(dir: &Path, rows: &[Row]) -> Result<()> {
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let series: [(&str, &str, Vec<f64>); 4] = [
        (
            "gamma_abs",
            "|gamma|",
            rows.iter().map(|r| r.observables.gamma.norm()).collect(),
        ),
        ("tau", "tau", rows.iter().map(|r| r.observables.tau).collect()),
        (
            "norm",
            "N",
            rows.iter().map(|r| r.observables.norm_sum).collect(),
        ),
        ("purity", "Tr rho^2", rows.iter().map(|r| r.purity).collect()),
    ];
    for (name, label, ys) in &series {
        let svg = line_plot_svg(&format!("{label} vs t"), label, &ts, ys);
        write_text(&dir.join(format!("{name}.svg")), &svg)?;
    }
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| {
        Error::ContractViolation(format!("cannot write {}: {e}", path.display()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<Row> {
        (0..3)
            .map(|k| {
                let t = k as f64 * 0.5;
                let obs = ReducedState::from_parts(2.0, 0.1 * t, C64::new(0.3, -0.2));
                Row {
                    t,
                    psi: Some(vec![C64::new(1.0, 0.0), C64::new(0.0, -0.5)]),
                    phi: Some(vec![C64::new(0.0, 0.0), C64::new(0.7, 0.0)]),
                    observables: obs,
                    purity: obs.purity_identity(),
                }
            })
            .collect()
    }

    #[test]
    fn trajectory_header_has_fixed_column_order() {
        let csv = trajectory_csv(&sample_rows()).unwrap();
        let header = csv.lines().next().unwrap();
        assert_eq!(
            header,
            "t,Re_psi_0,Im_psi_0,Re_psi_1,Im_psi_1,Re_phi_0,Im_phi_0,Re_phi_1,Im_phi_1,\
             N,tau,Re_gamma,Im_gamma,delta,omega0_sq,schwarz,purity"
        );
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn csv_output_is_deterministic() {
        let a = trajectory_csv(&sample_rows()).unwrap();
        let b = trajectory_csv(&sample_rows()).unwrap();
        assert_eq!(a, b);
        let oa = observables_csv(&sample_rows());
        let ob = observables_csv(&sample_rows());
        assert_eq!(oa, ob);
    }

    #[test]
    fn svg_plot_contains_polyline() {
        let xs = vec![0.0, 1.0, 2.0];
        let ys = vec![0.5, 1.5, 1.0];
        let svg = line_plot_svg("test", "y", &xs, &ys);
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("</svg>"));
    }
}
