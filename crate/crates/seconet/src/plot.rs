//! Self-contained SVG scatter charts of epidemiological metrics against
//! topology metrics: one colored marker per run plus a binned-mean
//! polyline per strategy, mirroring how sweep results are read — does a
//! denser/flatter/longer-path network change a strategy's outcome?

use crate::config::Strategy;
use crate::error::{Error, Result};
use crate::harness::SUMMARY_HEADER;
use std::fmt::Write as FmtWrite;
use std::io::{BufRead, Write};

/// Topology metric columns selectable as the x axis.
pub const TOPOLOGY_METRICS: [&str; 5] =
    ["avg_degree", "gamma", "aspl", "clustering_sq", "clustering_tri"];
/// Epidemiological metric columns selectable as the y axis.
pub const EPI_METRICS: [&str; 9] = [
    "peak_inc",
    "peak_day",
    "cum_inc",
    "peak_inc_f",
    "peak_day_f",
    "cum_inc_f",
    "peak_inc_m",
    "peak_day_m",
    "cum_inc_m",
];

pub const DEFAULT_BINS: usize = 8;

/// Fixed strategy palette (legend and marker colors).
pub fn strategy_color(strategy: Strategy) -> &'static str {
    match strategy {
        Strategy::None => "#444444",
        Strategy::Age => "#1f77b4",
        Strategy::Ring => "#ff7f0e",
        Strategy::Degree => "#2ca02c",
        Strategy::Betweenness => "#d62728",
        Strategy::Closeness => "#9467bd",
        Strategy::Percolation => "#8c564b",
        Strategy::Eigenvector => "#e377c2",
    }
}

/// One parsed summary row; error rows come back with all-None values.
#[derive(Debug, Clone)]
pub struct PlotRow {
    pub strategy: Strategy,
    /// Values aligned with [`TOPOLOGY_METRICS`].
    pub topology: [Option<f64>; 5],
    /// Values aligned with [`EPI_METRICS`].
    pub metrics: [Option<f64>; 9],
}

/// Parses a sweep summary CSV (as produced by
/// [`crate::harness::write_summary`]) into plottable rows.
pub fn read_summary(reader: impl BufRead) -> Result<Vec<PlotRow>> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("summary CSV is empty".into()))??;
    if header != SUMMARY_HEADER {
        return Err(Error::Config(format!(
            "unrecognized summary header: {header}"
        )));
    }
    let expected_fields = SUMMARY_HEADER.split(',').count();
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected_fields {
            return Err(Error::Config(format!(
                "summary line {}: expected {expected_fields} fields, found {}",
                lineno + 2,
                fields.len()
            )));
        }
        let strategy: Strategy = fields[2]
            .parse()
            .map_err(|e| Error::Config(format!("summary line {}: {e}", lineno + 2)))?;
        let parse = |field: &str| -> Result<Option<f64>> {
            if field.is_empty() {
                return Ok(None);
            }
            field
                .parse::<f64>()
                .map(Some)
                .map_err(|e| Error::Config(format!("summary line {}: {e}", lineno + 2)))
        };
        let mut topology = [None; 5];
        for (slot, field) in topology.iter_mut().zip(&fields[3..8]) {
            *slot = parse(field)?;
        }
        let mut metrics = [None; 9];
        for (slot, field) in metrics.iter_mut().zip(&fields[8..17]) {
            *slot = parse(field)?;
        }
        rows.push(PlotRow {
            strategy,
            topology,
            metrics,
        });
    }
    Ok(rows)
}

fn metric_index(names: &[&str], name: &str, axis: &str) -> Result<usize> {
    names.iter().position(|&n| n == name).ok_or_else(|| {
        Error::Config(format!(
            "unknown {axis} metric '{name}' (valid: {})",
            names.join(", ")
        ))
    })
}

/// Mean y per equal-width x bin; bins without data are omitted.
/// Returns (bin center, mean) pairs in x order.
pub fn binned_means(points: &[(f64, f64)], bins: usize, x_min: f64, x_max: f64) -> Vec<(f64, f64)> {
    if points.is_empty() || bins == 0 {
        return Vec::new();
    }
    let width = (x_max - x_min) / bins as f64;
    if width <= 0.0 {
        // Degenerate range: everything lands in one notional bin.
        let mean = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
        return vec![(x_min, mean)];
    }
    let mut sums = vec![(0.0f64, 0u32); bins];
    for &(x, y) in points {
        let b = (((x - x_min) / width) as usize).min(bins - 1);
        sums[b].0 += y;
        sums[b].1 += 1;
    }
    sums.iter()
        .enumerate()
        .filter(|(_, (_, n))| *n > 0)
        .map(|(b, (sum, n))| (x_min + (b as f64 + 0.5) * width, sum / f64::from(*n)))
        .collect()
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 56.0;

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(f64::MIN_POSITIVE);
        MARGIN_LEFT + (x - self.x_min) / span * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(f64::MIN_POSITIVE);
        HEIGHT - MARGIN_BOTTOM - (y - self.y_min) / span * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn axis_ticks(min: f64, max: f64) -> Vec<f64> {
    (0..=5).map(|i| min + (max - min) * i as f64 / 5.0).collect()
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 1000.0 {
        format!("{v:.0}")
    } else if a >= 10.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

/// Renders the scatter-with-binned-means chart as a self-contained SVG
/// (no scripts, no external fonts). One series per strategy present in
/// the rows, drawn and listed in the canonical strategy order.
pub fn render_plot(
    rows: &[PlotRow],
    topo_metric: &str,
    epi_metric: &str,
    bins: usize,
    mut w: impl Write,
) -> Result<()> {
    let xi = metric_index(&TOPOLOGY_METRICS, topo_metric, "topology")?;
    let yi = metric_index(&EPI_METRICS, epi_metric, "epidemiological")?;
    if bins == 0 {
        return Err(Error::Config("bin count must be at least 1".into()));
    }

    // Collect plottable points per strategy, in canonical order.
    let mut series: Vec<(Strategy, Vec<(f64, f64)>)> = Vec::new();
    for strategy in Strategy::ALL {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.strategy == strategy)
            .filter_map(|r| Some((r.topology[xi]?, r.metrics[yi]?)))
            .collect();
        if !points.is_empty() {
            series.push((strategy, points));
        }
    }
    if series.is_empty() {
        return Err(Error::Config(format!(
            "no plottable rows for {topo_metric} vs {epi_metric}"
        )));
    }

    let all: Vec<(f64, f64)> = series.iter().flat_map(|(_, p)| p.iter().copied()).collect();
    let (mut x_min, mut x_max) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    let (mut y_min, mut y_max) = all
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.1), hi.max(p.1))
        });
    let bin_range = (x_min, x_max);
    if x_min == x_max {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if y_min == y_max {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let y_pad = (y_max - y_min) * 0.05;
    y_min -= y_pad;
    y_max += y_pad;
    let frame = Frame {
        x_min,
        x_max,
        y_min,
        y_max,
    };

    let mut svg = String::new();
    let plot_right = WIDTH - MARGIN_RIGHT;
    let plot_bottom = HEIGHT - MARGIN_BOTTOM;
    write!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"##
    )
    .expect("writing to String cannot fail");
    svg.push_str(r##"<rect width="100%" height="100%" fill="white"/>"##);

    // Axes, ticks, grid.
    svg.push_str(&format!(
        r##"<line x1="{MARGIN_LEFT}" y1="{plot_bottom}" x2="{plot_right}" y2="{plot_bottom}" stroke="#222" stroke-width="1"/>"##,
    ));
    svg.push_str(&format!(
        r##"<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{plot_bottom}" stroke="#222" stroke-width="1"/>"##,
    ));
    for tx in axis_ticks(frame.x_min, frame.x_max) {
        let px = frame.px(tx);
        svg.push_str(&format!(
            r##"<line x1="{px:.1}" y1="{plot_bottom}" x2="{px:.1}" y2="{:.1}" stroke="#222" stroke-width="1"/>"##,
            plot_bottom + 5.0
        ));
        svg.push_str(&format!(
            r##"<text x="{px:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle" fill="#222">{}</text>"##,
            plot_bottom + 18.0,
            tick_label(tx)
        ));
    }
    for ty in axis_ticks(frame.y_min, frame.y_max) {
        let py = frame.py(ty);
        svg.push_str(&format!(
            r##"<line x1="{:.1}" y1="{py:.1}" x2="{MARGIN_LEFT}" y2="{py:.1}" stroke="#222" stroke-width="1"/>"##,
            MARGIN_LEFT - 5.0
        ));
        svg.push_str(&format!(
            r##"<line x1="{MARGIN_LEFT}" y1="{py:.1}" x2="{plot_right}" y2="{py:.1}" stroke="#eee" stroke-width="1"/>"##,
        ));
        svg.push_str(&format!(
            r##"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end" fill="#222">{}</text>"##,
            MARGIN_LEFT - 8.0,
            py + 4.0,
            tick_label(ty)
        ));
    }
    svg.push_str(&format!(
        r##"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" fill="#222">{topo_metric}</text>"##,
        (MARGIN_LEFT + plot_right) / 2.0,
        HEIGHT - 14.0
    ));
    svg.push_str(&format!(
        r##"<text x="18" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" fill="#222" transform="rotate(-90 18 {:.1})">{epi_metric}</text>"##,
        (MARGIN_TOP + plot_bottom) / 2.0,
        (MARGIN_TOP + plot_bottom) / 2.0
    ));

    // Scatter markers then binned-mean polylines, per strategy.
    for (strategy, points) in &series {
        let color = strategy_color(*strategy);
        for &(x, y) in points {
            svg.push_str(&format!(
                r##"<circle cx="{:.1}" cy="{:.1}" r="2.5" fill="{color}" fill-opacity="0.35"/>"##,
                frame.px(x),
                frame.py(y)
            ));
        }
        let means = binned_means(points, bins, bin_range.0, bin_range.1);
        if means.len() == 1 {
            svg.push_str(&format!(
                r##"<circle cx="{:.1}" cy="{:.1}" r="4" fill="none" stroke="{color}" stroke-width="2"/>"##,
                frame.px(means[0].0),
                frame.py(means[0].1)
            ));
        } else if !means.is_empty() {
            let pts: Vec<String> = means
                .iter()
                .map(|&(x, y)| format!("{:.1},{:.1}", frame.px(x), frame.py(y)))
                .collect();
            svg.push_str(&format!(
                r##"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"##,
                pts.join(" ")
            ));
        }
    }

    // Legend, strategies-present in canonical order.
    let legend_x = plot_right + 16.0;
    for (i, (strategy, _)) in series.iter().enumerate() {
        let y = MARGIN_TOP + 10.0 + i as f64 * 20.0;
        svg.push_str(&format!(
            r##"<rect x="{legend_x}" y="{:.1}" width="12" height="12" fill="{}"/>"##,
            y - 10.0,
            strategy_color(*strategy)
        ));
        svg.push_str(&format!(
            r##"<text x="{:.1}" y="{y:.1}" font-family="sans-serif" font-size="12" fill="#222">{}</text>"##,
            legend_x + 18.0,
            strategy.name()
        ));
    }

    svg.push_str("</svg>");
    w.write_all(svg.as_bytes())?;
    Ok(())
}
