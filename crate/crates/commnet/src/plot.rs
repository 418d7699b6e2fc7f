//! Minimal SVG line charts for sweep results: one polyline per strategy,
//! g on the x axis, the metric mean on the y axis.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::ResultRow;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 9] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22",
];

/// Render the rows for one metric as an SVG line chart string. Rows are
/// averaged across networks per (strategy, g).
pub fn svg_string(rows: &[ResultRow], metric: &str) -> Result<String> {
    // strategy -> g -> (sum, count), BTreeMaps for deterministic iteration
    let mut series: BTreeMap<&str, BTreeMap<u64, (f64, f64, usize)>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.metric == metric) {
        let cell = series
            .entry(&row.strategy)
            .or_default()
            .entry(row.g.to_bits())
            .or_insert((row.g, 0.0, 0));
        cell.1 += row.mean;
        cell.2 += 1;
    }
    if series.is_empty() {
        return Err(Error::EmptyPlot);
    }

    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for points in series.values() {
        for &(g, sum, count) in points.values() {
            let mean = sum / count as f64;
            x_min = x_min.min(g);
            x_max = x_max.max(g);
            y_max = y_max.max(mean);
        }
    }
    if x_max <= x_min {
        x_max = x_min + 1.0;
    }
    if y_max <= 0.0 {
        y_max = 1.0;
    }

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |g: f64| MARGIN_LEFT + (g - x_min) / (x_max - x_min) * plot_w;
    let y_of = |v: f64| MARGIN_TOP + (1.0 - v / y_max) * plot_h;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();

    // axes
    writeln!(
        svg,
        r#"<line x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#,
        l = MARGIN_LEFT,
        b = MARGIN_TOP + plot_h,
        r = MARGIN_LEFT + plot_w
    )
    .unwrap();
    writeln!(
        svg,
        r#"<line x1="{l}" y1="{t}" x2="{l}" y2="{b}" stroke="black"/>"#,
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = MARGIN_TOP + plot_h
    )
    .unwrap();

    // ticks: five per axis
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        let g = x_min + frac * (x_max - x_min);
        let x = x_of(g);
        writeln!(
            svg,
            r#"<text x="{x:.1}" y="{y:.1}" text-anchor="middle">{g:.2}</text>"#,
            y = MARGIN_TOP + plot_h + 18.0
        )
        .unwrap();
        let v = frac * y_max;
        let y = y_of(v);
        writeln!(
            svg,
            r#"<text x="{x:.1}" y="{y:.1}" text-anchor="end">{v:.3}</text>"#,
            x = MARGIN_LEFT - 6.0,
            y = y + 4.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{x:.1}" y="{y:.1}" text-anchor="middle">g (removed fraction)</text>"#,
        x = MARGIN_LEFT + plot_w / 2.0,
        y = HEIGHT - 10.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="16" y="{y:.1}" text-anchor="middle" transform="rotate(-90 16 {y:.1})">{metric}</text>"#,
        y = MARGIN_TOP + plot_h / 2.0
    )
    .unwrap();

    // one polyline per strategy plus a legend entry
    for (idx, (strategy, points)) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut coords: Vec<(f64, f64)> = points
            .values()
            .map(|&(g, sum, count)| (g, sum / count as f64))
            .collect();
        coords.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = coords
            .iter()
            .map(|&(g, v)| format!("{:.1},{:.1}", x_of(g), y_of(v)))
            .collect();
        writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        )
        .unwrap();
        let ly = MARGIN_TOP + 16.0 * idx as f64 + 8.0;
        writeln!(
            svg,
            r#"<line x1="{x}" y1="{ly:.1}" x2="{x2}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            x = WIDTH - MARGIN_RIGHT + 10.0,
            x2 = WIDTH - MARGIN_RIGHT + 34.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{x}" y="{y:.1}">{strategy}</text>"#,
            x = WIDTH - MARGIN_RIGHT + 40.0,
            y = ly + 4.0
        )
        .unwrap();
    }

    writeln!(svg, "</svg>").unwrap();
    Ok(svg)
}

/// Write the chart for `metric` to `path`.
pub fn emit_svg_curves(rows: &[ResultRow], metric: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let svg = svg_string(rows, metric)?;
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|source| Error::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    std::fs::write(path, svg).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(strategy: &str, g: f64, mean: f64) -> ResultRow {
        ResultRow {
            network_id: 0,
            strategy: strategy.to_string(),
            g,
            metric: "lcc_size".to_string(),
            mean,
            std: 0.0,
            trials: 1,
        }
    }

    #[test]
    fn one_polyline_per_strategy() {
        let mut rows = Vec::new();
        for i in 0..11 {
            let g = i as f64 * 0.05;
            rows.push(row("degree", g, 100.0 - i as f64));
            rows.push(row("commn", g, 90.0 - i as f64));
        }
        let svg = svg_string(&rows, "lcc_size").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        // 11 points per polyline
        for line in svg.lines().filter(|l| l.starts_with("<polyline")) {
            let points = line.split('"').nth(1).unwrap();
            assert_eq!(points.split(' ').count(), 11);
        }
        assert!(svg.contains("g (removed fraction)"));
    }

    #[test]
    fn empty_rows_error() {
        assert!(matches!(svg_string(&[], "lcc_size"), Err(Error::EmptyPlot)));
    }

    #[test]
    fn deterministic_output() {
        let rows = vec![row("degree", 0.0, 5.0), row("degree", 0.1, 3.0)];
        assert_eq!(
            svg_string(&rows, "lcc_size").unwrap(),
            svg_string(&rows, "lcc_size").unwrap()
        );
    }
}
