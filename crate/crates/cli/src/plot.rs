//! Minimal hand-written SVG: line/scatter charts and heat maps. Plots are
//! post-processing only and never feed a verdict.

use std::fmt::Write;

use barrier_bound::geometry::distance;
use barrier_bound::verify::{sample_indices, Sampling};
use rayon::prelude::*;

use crate::pipeline::Outcome;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 56.0;

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    /// Draw dots instead of a polyline.
    pub scatter: bool,
}

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        escape(title)
    );
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn axes(s: &mut String, x: (f64, f64), y: (f64, f64), xlabel: &str, ylabel: &str) {
    let (x0, x1, y0, y1) = (PAD, W - PAD / 2.0, H - PAD, PAD);
    let _ = writeln!(
        s,
        "<polyline points=\"{x0},{y1} {x0},{y0} {x1},{y0}\" fill=\"none\" stroke=\"black\"/>"
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let px = x0 + t * (x1 - x0);
        let py = y0 - t * (y0 - y1);
        let _ = write!(
            s,
            "<text x=\"{px:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{:.3e}</text>\n\
             <text x=\"{:.1}\" y=\"{py:.1}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{:.3e}</text>\n",
            y0 + 14.0,
            x.0 + t * (x.1 - x.0),
            x0 - 4.0,
            y.0 + t * (y.1 - y.0)
        );
    }
    let _ = write!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"14\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1})\">{}</text>\n",
        (x0 + x1) / 2.0,
        H - 14.0,
        escape(xlabel),
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(ylabel)
    );
}

pub fn chart(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let xb = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let yb = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let map = |p: (f64, f64)| {
        (
            PAD + (p.0 - xb.0) / (xb.1 - xb.0) * (W - 1.5 * PAD),
            H - PAD - (p.1 - yb.0) / (yb.1 - yb.0) * (H - 2.0 * PAD),
        )
    };
    let mut s = header(title);
    axes(&mut s, xb, yb, xlabel, ylabel);
    for (k, ser) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        if ser.scatter {
            for p in ser
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
            {
                let (x, y) = map(*p);
                let _ = writeln!(
                    s,
                    "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"1.6\" fill=\"{color}\"/>"
                );
            }
        } else {
            let pts: Vec<String> = ser
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|p| {
                    let (x, y) = map(*p);
                    format!("{x:.1},{y:.1}")
                })
                .collect();
            let _ = writeln!(
                s,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                pts.join(" ")
            );
        }
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{}</text>",
            W - 1.5 * PAD - 120.0,
            PAD + 14.0 * k as f64,
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let r = (255.0 * t) as u8;
    let b = (255.0 * (1.0 - t)) as u8;
    let g = (255.0 * (1.0 - (2.0 * t - 1.0).abs()) * 0.8) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Scalar values at scattered or gridded points, colored by value.
pub fn heat(title: &str, points: &[(f64, f64, f64)], cell: f64) -> String {
    let xb = bounds(points.iter().map(|p| p.0));
    let yb = bounds(points.iter().map(|p| p.1));
    let vb = bounds(points.iter().map(|p| p.2));
    let mut s = header(title);
    axes(&mut s, xb, yb, "x", "y");
    for p in points.iter().filter(|p| p.2.is_finite()) {
        let x = PAD + (p.0 - xb.0) / (xb.1 - xb.0) * (W - 1.5 * PAD - cell);
        let y = H - PAD - cell - (p.1 - yb.0) / (yb.1 - yb.0) * (H - 2.0 * PAD - cell);
        let _ = writeln!(
            s,
            "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{cell:.1}\" height=\"{cell:.1}\" fill=\"{}\"/>",
            color((p.2 - vb.0) / (vb.1 - vb.0))
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">blue {:.3e} .. red {:.3e}</text>",
        PAD,
        PAD - 8.0,
        vb.0,
        vb.1
    );
    s.push_str("</svg>\n");
    s
}

/// Every `stride`-th grid sample of a 2-D field.
fn thinned(
    values: &[f64],
    dims: &[usize],
    point: impl Fn(usize) -> Vec<f64>,
    max_side: usize,
) -> Vec<(f64, f64, f64)> {
    let (nx, ny) = (dims[0], dims[1]);
    let stride = (nx.max(ny) / max_side).max(1);
    let mut out = Vec::new();
    for j in (0..ny).step_by(stride) {
        for i in (0..nx).step_by(stride) {
            let p = i + nx * j;
            let x = point(p);
            out.push((x[0], x[1], values[p]));
        }
    }
    out
}

/// `u`, `|Du|` against `phi'(psi(u))`, per-sample `max_y Z(x, y)` and the
/// barrier curves of a run.
pub fn scenario_plots(outcome: &Outcome) -> Vec<(String, String)> {
    let art = &outcome.artifacts;
    let name = &outcome.report.scenario;
    let mut out = Vec::new();
    if let Some((n, field)) = art.fields.last() {
        let dims = &field.grid.dims;
        if dims.len() == 1 {
            let pts = (0..field.len())
                .map(|i| (field.point(i)[0], field.values[i]))
                .collect();
            out.push((
                "field.svg".to_string(),
                chart(
                    &format!("{name}: u at resolution {n}"),
                    "x",
                    "u",
                    &[Series {
                        name: "u".into(),
                        points: pts,
                        scatter: false,
                    }],
                ),
            ));
        } else if dims.len() == 2 {
            let pts = thinned(&field.values, dims, |p| field.point(p), 64);
            let cell = (W - 1.5 * PAD) / (pts.len() as f64).sqrt();
            out.push((
                "field.svg".to_string(),
                heat(&format!("{name}: u at resolution {n}"), &pts, cell),
            ));
        }
        if let Some(b) = art
            .barriers
            .iter()
            .find(|b| b.resolution.is_none_or(|r| r == *n))
        {
            let mut series = vec![Series {
                name: "|Du| at samples".into(),
                points: field
                    .values
                    .iter()
                    .zip(&field.gradient_norm)
                    .step_by((field.len() / 4096).max(1))
                    .map(|(u, g)| (*u, *g))
                    .collect(),
                scatter: true,
            }];
            let (lo, hi) = b.inverse.domain;
            let slopes = (0..=256)
                .filter_map(|k| {
                    let u = lo + (hi - lo) * k as f64 / 256.0;
                    b.inverse.slope_at(u).ok().map(|s| (u, s))
                })
                .collect();
            series.push(Series {
                name: format!("phi'(psi(u)) {}", b.sweep),
                points: slopes,
                scatter: false,
            });
            out.push((
                "gradient.svg".to_string(),
                chart(
                    &format!("{name}: gradient against barrier slope"),
                    "u",
                    "slope",
                    &series,
                ),
            ));
            if let Some(summary) = z_summary(outcome, *n) {
                if dims.len() == 1 {
                    let pts = summary.iter().map(|p| (p.0, p.2)).collect();
                    out.push((
                        "two-point.svg".to_string(),
                        chart(
                            &format!("{name}: max over y of Z(x, y)"),
                            "x",
                            "max Z",
                            &[Series {
                                name: "max_y Z".into(),
                                points: pts,
                                scatter: true,
                            }],
                        ),
                    ));
                } else {
                    out.push((
                        "two-point.svg".to_string(),
                        heat(&format!("{name}: max over y of Z(x, y)"), &summary, 6.0),
                    ));
                }
            }
        }
    }
    if !art.barriers.is_empty() {
        let series: Vec<Series> = art
            .barriers
            .iter()
            .take(COLORS.len())
            .map(|b| Series {
                name: if b.sweep.is_empty() {
                    "phi".into()
                } else {
                    b.sweep.clone()
                },
                points: b
                    .curve
                    .grid
                    .iter()
                    .copied()
                    .zip(b.curve.phi.iter().copied())
                    .collect(),
                scatter: false,
            })
            .collect();
        out.push((
            "barriers.svg".to_string(),
            chart(&format!("{name}: barrier curves"), "z", "phi", &series),
        ));
    }
    out
}

/// `(x, y, max_b Z(a, b))` over the two-point samples of the finest field.
fn z_summary(outcome: &Outcome, n: usize) -> Option<Vec<(f64, f64, f64)>> {
    let art = &outcome.artifacts;
    let (_, field) = art.fields.iter().find(|(m, _)| *m == n)?;
    let b = art
        .barriers
        .iter()
        .find(|b| b.resolution.is_none_or(|r| r == n))?;
    let model = art.model.as_ref()?;
    let sampling = Sampling {
        subsample: 1024,
        ..Sampling::default()
    };
    let idx = sample_indices(field, &sampling);
    let pts: Vec<Vec<f64>> = idx.iter().map(|&i| field.point(i)).collect();
    let psi: Vec<f64> = idx
        .iter()
        .map(|&i| b.inverse.psi(field.values[i]))
        .collect::<Result<_, _>>()
        .ok()?;
    let rows: Vec<Option<f64>> = (0..pts.len())
        .into_par_iter()
        .map(|a| {
            let mut best = f64::NEG_INFINITY;
            for b in 0..pts.len() {
                if a != b {
                    best = best.max(psi[b] - psi[a] - distance(model, &pts[a], &pts[b]).ok()?);
                }
            }
            Some(best)
        })
        .collect();
    Some(
        pts.iter()
            .zip(rows)
            .map(|(p, z)| {
                (
                    p[0],
                    p.get(1).copied().unwrap_or(0.0),
                    z.unwrap_or(f64::NAN),
                )
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_is_well_formed() {
        let svg = chart(
            "t <1>",
            "x",
            "y",
            &[Series {
                name: "s".into(),
                points: vec![(0.0, 1.0), (1.0, 2.0)],
                scatter: false,
            }],
        );
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("t &lt;1&gt;"));
        assert!(svg.contains("<polyline"));
    }

    #[test]
    fn constant_data_does_not_divide_by_zero() {
        let svg = heat("flat", &[(0.0, 0.0, 1.0), (1.0, 1.0, 1.0)], 4.0);
        assert!(!svg.contains("NaN"));
    }
}
