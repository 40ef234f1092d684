//! Self-contained SVG line plots: per-series medians with interquartile
//! ribbons, optional log axes, and least-squares slope annotations.

use std::path::Path;

use geodesy::error::Result;

use crate::experiments::Table;

/// One plotted series: x positions with replicate samples at each x.
#[derive(Debug, Clone)]
pub struct Series {
    /// Legend label.
    pub label: String,
    /// (x, replicate values); non-finite values are ignored.
    pub points: Vec<(f64, Vec<f64>)>,
}

/// Axis and annotation options of a plot.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    /// Annotate each series with the slope of log-median vs log-x.
    pub slope_annotation: bool,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 78.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 46.0;
const MARGIN_B: f64 = 58.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Median and quartiles of a replicate set (ignores non-finite entries).
fn quartiles(values: &[f64]) -> Option<(f64, f64, f64)> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let at = |q: f64| -> f64 {
        let pos = q * (v.len() as f64 - 1.0);
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        if i + 1 < v.len() {
            v[i] * (1.0 - frac) + v[i + 1] * frac
        } else {
            v[i]
        }
    };
    Some((at(0.25), at(0.5), at(0.75)))
}

/// Evenly spread "nice" tick positions covering [lo, hi].
fn ticks(lo: f64, hi: f64, log: bool) -> Vec<f64> {
    if log {
        let (a, b) = (lo.log10().floor() as i32, hi.log10().ceil() as i32);
        let mut t: Vec<f64> = (a..=b).map(|e| 10f64.powi(e)).filter(|&v| v >= lo * 0.999 && v <= hi * 1.001).collect();
        if t.len() < 3 {
            t = (2 * a..=2 * b)
                .map(|e| 10f64.powf(e as f64 / 2.0))
                .filter(|&v| v >= lo * 0.999 && v <= hi * 1.001)
                .collect();
        }
        return t;
    }
    let span = (hi - lo).abs().max(f64::MIN_POSITIVE);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|s| s * mag)
        .find(|&s| span / s <= 6.0)
        .unwrap_or(mag * 10.0);
    let first = (lo / step).ceil() * step;
    let mut t = Vec::new();
    let mut v = first;
    while v <= hi + step * 1e-9 {
        t.push(v);
        v += step;
    }
    t
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 0.01 && a < 10000.0 {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Least-squares slope of y against x.
fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Renders the series as a standalone SVG document. Series without any
/// finite data are skipped with a note on stderr.
pub fn render(series: &[Series], spec: &PlotSpec) -> String {
    // Collect medians/quartiles per series, in plot units.
    struct Prepared {
        label: String,
        rows: Vec<(f64, f64, f64, f64)>, // x, q1, med, q3
        slope: Option<f64>,
    }
    let mut prepared = Vec::new();
    for s in series {
        let mut rows: Vec<(f64, f64, f64, f64)> = s
            .points
            .iter()
            .filter_map(|(x, vals)| quartiles(vals).map(|(q1, m, q3)| (*x, q1, m, q3)))
            .filter(|(x, q1, m, q3)| {
                let pos_ok = (!spec.log_x || *x > 0.0) && (!spec.log_y || (*q1 > 0.0 && *m > 0.0 && *q3 > 0.0));
                x.is_finite() && m.is_finite() && pos_ok
            })
            .collect();
        rows.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite x"));
        if rows.is_empty() {
            eprintln!("plot: skipping empty series {:?}", s.label);
            continue;
        }
        let slope = if spec.slope_annotation && rows.len() >= 2 {
            let xs: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r.2.ln()).collect();
            Some(ls_slope(&xs, &ys))
        } else {
            None
        };
        prepared.push(Prepared { label: s.label.clone(), rows, slope });
    }

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"26\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        esc(&spec.title)
    ));
    if prepared.is_empty() {
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" text-anchor=\"middle\">no data</text>\n</svg>\n",
            WIDTH / 2.0,
            HEIGHT / 2.0
        ));
        return svg;
    }

    // Data ranges over medians and ribbons.
    let tx = |v: f64| if spec.log_x { v.ln() } else { v };
    let ty = |v: f64| if spec.log_y { v.ln() } else { v };
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for p in &prepared {
        for &(x, q1, m, q3) in &p.rows {
            x_min = x_min.min(tx(x));
            x_max = x_max.max(tx(x));
            for v in [q1, m, q3] {
                if v.is_finite() && (!spec.log_y || v > 0.0) {
                    y_min = y_min.min(ty(v));
                    y_max = y_max.max(ty(v));
                }
            }
        }
    }
    if x_max - x_min < 1e-12 {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if y_max - y_min < 1e-12 {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let x_pad = (x_max - x_min) * 0.05;
    let y_pad = (y_max - y_min) * 0.08;
    let (x_min, x_max) = (x_min - x_pad, x_max + x_pad);
    let (y_min, y_max) = (y_min - y_pad, y_max + y_pad);
    let px = |v: f64| MARGIN_L + (tx(v) - x_min) / (x_max - x_min) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |v: f64| HEIGHT - MARGIN_B - (ty(v) - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B);

    // Axes, ticks, labels.
    let (x0, y0) = (MARGIN_L, HEIGHT - MARGIN_B);
    let (x1, y1) = (WIDTH - MARGIN_R, MARGIN_T);
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"#333\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"#333\"/>\n"
    ));
    let back = |v: f64, log: bool| if log { v.exp() } else { v };
    for t in ticks(back(x_min, spec.log_x), back(x_max, spec.log_x), spec.log_x) {
        let x = px(t);
        svg.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{y0}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#333\"/>\n\
             <line x1=\"{x:.1}\" y1=\"{y1}\" x2=\"{x:.1}\" y2=\"{y0}\" stroke=\"#eee\"/>\n\
             <text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            y0 + 5.0,
            y0 + 20.0,
            tick_label(t)
        ));
    }
    for t in ticks(back(y_min, spec.log_y), back(y_max, spec.log_y), spec.log_y) {
        let y = py(t);
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{x0}\" y2=\"{y:.1}\" stroke=\"#333\"/>\n\
             <line x1=\"{x0}\" y1=\"{y:.1}\" x2=\"{x1}\" y2=\"{y:.1}\" stroke=\"#eee\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0,
            tick_label(t)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"18\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 16.0,
        esc(&spec.x_label),
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        esc(&spec.y_label)
    ));

    // Ribbons, median lines, markers, legend.
    for (si, p) in prepared.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        if p.rows.len() >= 2 {
            let mut d = String::from("M");
            for &(x, q1, _, _) in &p.rows {
                d.push_str(&format!(" {:.1} {:.1}", px(x), py(q1)));
            }
            for &(x, _, _, q3) in p.rows.iter().rev() {
                d.push_str(&format!(" L {:.1} {:.1}", px(x), py(q3)));
            }
            d.push('Z');
            svg.push_str(&format!(
                "<path d=\"{d}\" fill=\"{color}\" fill-opacity=\"0.15\" stroke=\"none\"/>\n"
            ));
            let pts: Vec<String> = p
                .rows
                .iter()
                .map(|&(x, _, m, _)| format!("{:.1},{:.1}", px(x), py(m)))
                .collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
                pts.join(" ")
            ));
        }
        for &(x, _, m, _) in &p.rows {
            svg.push_str(&format!(
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{color}\"/>\n",
                px(x),
                py(m)
            ));
        }
        let label = match p.slope {
            Some(s) => format!("{} (slope {s:.2})", p.label),
            None => p.label.clone(),
        };
        let ly = MARGIN_T + 16.0 * si as f64 + 8.0;
        svg.push_str(&format!(
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\">{}</text>\n",
            x1 - 190.0,
            ly - 10.0,
            x1 - 172.0,
            ly,
            esc(&label)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Renders and writes a plot file.
pub fn write_plot(path: &Path, series: &[Series], spec: &PlotSpec) -> Result<()> {
    std::fs::write(path, render(series, spec))?;
    Ok(())
}

/// Groups successful table rows into series keyed by one column, with x from
/// another column and replicate values from a third.
fn table_series(
    table: &Table,
    key_cols: &[&str],
    x_col: &str,
    y_col: &str,
) -> Vec<Series> {
    let status = table.column("status");
    let xc = table.column(x_col).expect("x column exists");
    let yc = table.column(y_col).expect("y column exists");
    let keys: Vec<usize> = key_cols.iter().map(|k| table.column(k).expect("key column")).collect();
    let mut order: Vec<String> = Vec::new();
    let mut buckets: std::collections::BTreeMap<String, std::collections::BTreeMap<u64, (f64, Vec<f64>)>> =
        Default::default();
    for row in &table.rows {
        if let Some(sc) = status {
            if !row[sc].starts_with("ok") {
                continue;
            }
        }
        let (Ok(x), Ok(y)) = (row[xc].parse::<f64>(), row[yc].parse::<f64>()) else {
            continue;
        };
        let label = keys
            .iter()
            .map(|&c| row[c].clone())
            .filter(|v| !v.is_empty())
            .collect::<Vec<_>>()
            .join(" ");
        if !order.contains(&label) {
            order.push(label.clone());
        }
        buckets
            .entry(label)
            .or_default()
            .entry(x.to_bits())
            .or_insert((x, Vec::new()))
            .1
            .push(y);
    }
    order
        .into_iter()
        .map(|label| Series {
            points: buckets[&label].values().cloned().collect(),
            label,
        })
        .collect()
}

/// Writes the error-vs-n log-log plot of a distance experiment table.
pub fn emit_distance_plots(rows: &Table, outdir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let path = outdir.join("errors_vs_n.svg");
    let series = table_series(rows, &["method", "radius"], "n", "mean_rel_error");
    // "mesh mesh" reads poorly; collapse the duplicated key.
    let series: Vec<Series> = series
        .into_iter()
        .map(|mut s| {
            if s.label == "mesh mesh" {
                s.label = "mesh".into();
            } else {
                s.label = format!("graph r={}", s.label.trim_start_matches("graph "));
                if let Ok(v) = s.label.trim_start_matches("graph r=").parse::<f64>() {
                    s.label = format!("graph r={v}");
                }
            }
            s
        })
        .collect();
    write_plot(
        &path,
        &series,
        &PlotSpec {
            title: "mean relative distance error vs sample size".into(),
            x_label: "sample size n".into(),
            y_label: "mean relative error".into(),
            log_x: true,
            log_y: true,
            slope_annotation: true,
        },
    )?;
    Ok(vec![path])
}

/// Writes the Procrustes-error plot of an embedding experiment table: the
/// graph method against its radius, the mesh method as a flat reference line.
pub fn emit_isomap_plots(rows: &Table, outdir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let path = outdir.join("isomap_rmse.svg");
    let mut series = table_series(rows, &["method"], "radius", "procrustes_rmse");
    // Mesh rows carry no numeric radius; spread their replicate values across
    // the radius range so the series reads as a horizontal reference band.
    let radii: Vec<f64> = series
        .iter()
        .find(|s| s.label == "isomap")
        .map(|s| s.points.iter().map(|p| p.0).collect())
        .unwrap_or_default();
    let status = rows.column("status").expect("status column");
    let method = rows.column("method").expect("method column");
    let rmse = rows.column("procrustes_rmse").expect("rmse column");
    let mesh_vals: Vec<f64> = rows
        .rows
        .iter()
        .filter(|r| r[method] == "mesh-isomap" && r[status].starts_with("ok"))
        .filter_map(|r| r[rmse].parse::<f64>().ok())
        .collect();
    if !mesh_vals.is_empty() && !radii.is_empty() {
        series.push(Series {
            label: "mesh-isomap".into(),
            points: radii.iter().map(|&r| (r, mesh_vals.clone())).collect(),
        });
    }
    write_plot(
        &path,
        &series,
        &PlotSpec {
            title: "embedding error vs neighborhood radius".into(),
            x_label: "radius".into(),
            y_label: "Procrustes rmse".into(),
            log_x: false,
            log_y: false,
            slope_annotation: false,
        },
    )?;
    Ok(vec![path])
}

/// Writes the gap-ratio and embedding-gap plots of a lower-bound table.
pub fn emit_lower_bound_plots(rows: &Table, outdir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let ratio_path = outdir.join("lowerbound_ratio.svg");
    let mut series = Vec::new();
    for (col, label) in [
        ("min_gap_ratio", "min over pairs"),
        ("median_gap_ratio", "median over pairs"),
        ("cubic_coefficient_oracle", "quadrature value"),
    ] {
        let mut s = table_series(rows, &[], "m", col);
        if let Some(mut one) = s.pop() {
            one.label = label.into();
            series.push(one);
        }
    }
    write_plot(
        &ratio_path,
        &series,
        &PlotSpec {
            title: "distance gap ratio vs grid resolution".into(),
            x_label: "grid resolution m".into(),
            y_label: "(d2 - d1) / (eps^2 d1)".into(),
            log_x: false,
            log_y: false,
            slope_annotation: false,
        },
    )?;
    let gap_path = outdir.join("lowerbound_gap.svg");
    let mut series = table_series(rows, &[], "m", "embedding_gap_ratio");
    if let Some(s) = series.first_mut() {
        s.label = "embedding gap / eps^2".into();
    }
    write_plot(
        &gap_path,
        &series,
        &PlotSpec {
            title: "embedding gap vs grid resolution".into(),
            x_label: "grid resolution m".into(),
            y_label: "gap ratio".into(),
            log_x: false,
            log_y: false,
            slope_annotation: false,
        },
    )?;
    Ok(vec![ratio_path, gap_path])
}


#[cfg(test)]
mod tests {
    use super::*;

    fn sample_series() -> Vec<Series> {
        vec![
            Series {
                label: "quadratic".into(),
                points: (1..=4)
                    .map(|i| {
                        let x = i as f64 * 0.1;
                        (x, vec![x * x * 0.9, x * x, x * x * 1.1])
                    })
                    .collect(),
            },
            Series {
                label: "linear".into(),
                points: (1..=4).map(|i| (i as f64 * 0.1, vec![i as f64 * 0.1])).collect(),
            },
        ]
    }

    #[test]
    fn log_log_plot_carries_slope_annotations() {
        let spec = PlotSpec {
            title: "error scaling".into(),
            x_label: "scale".into(),
            y_label: "error".into(),
            log_x: true,
            log_y: true,
            slope_annotation: true,
        };
        let svg = render(&sample_series(), &spec);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("slope 2.00"), "quadratic series slope: {svg}");
        assert!(svg.contains("slope 1.00"), "linear series slope");
        assert!(!svg.contains("href="), "no external references beyond the namespace");
        assert!(!svg.contains("url("), "no external references beyond the namespace");
    }

    #[test]
    fn empty_and_degenerate_series_do_not_break_rendering() {
        let spec = PlotSpec {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            log_x: false,
            log_y: false,
            slope_annotation: false,
        };
        let svg = render(
            &[
                Series { label: "empty".into(), points: vec![] },
                Series { label: "nan".into(), points: vec![(0.1, vec![f64::NAN])] },
            ],
            &spec,
        );
        assert!(svg.contains("no data"));
        let single = Series { label: "one".into(), points: vec![(1.0, vec![2.0])] };
        let svg = render(&[single], &spec);
        assert!(svg.contains("<circle"));
    }

    #[test]
    fn quartiles_interpolate() {
        let (q1, m, q3) = quartiles(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((q1 - 1.75).abs() < 1e-12);
        assert!((m - 2.5).abs() < 1e-12);
        assert!((q3 - 3.25).abs() < 1e-12);
        assert!(quartiles(&[f64::NAN]).is_none());
    }
}
