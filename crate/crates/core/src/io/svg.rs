use std::fmt::Write as _;

use serde::Serialize;

use super::table::Table;
use crate::error::{Error, Result};

/// What to draw from a [`Table`].
#[derive(Debug, Clone, Serialize)]
pub struct PlotSpec {
    pub title: String,
    pub x: String,
    pub series: Vec<String>,
    pub x_log: bool,
    pub y_log: bool,
}

impl PlotSpec {
    pub fn new(title: &str, x: &str, series: &[&str]) -> Self {
        Self {
            title: title.to_string(),
            x: x.to_string(),
            series: series.iter().map(|s| s.to_string()).collect(),
            x_log: false,
            y_log: false,
        }
    }

    pub fn log_x(mut self) -> Self {
        self.x_log = true;
        self
    }

    pub fn log_y(mut self) -> Self {
        self.y_log = true;
        self
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn column(table: &Table, name: &str, log: bool) -> Result<Vec<f64>> {
    let j = table
        .column_index(name)
        .ok_or_else(|| Error::InvalidParameter(format!("plot column '{name}' not in table")))?;
    table
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let v = row[j].as_f64().ok_or_else(|| {
                Error::InvalidParameter(format!("column '{name}' row {i} is not numeric: {:?}", row[j]))
            })?;
            if log {
                if v <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "column '{name}' row {i} is {v}; log scale needs positive values"
                    )));
                }
                Ok(v.log10())
            } else {
                Ok(v)
            }
        })
        .collect()
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        format!("1e{}", v.round() as i64)
    } else {
        format!("{v:.3}")
    }
}

/// Standalone SVG line plot, one `<polyline>` per series.
pub fn emit_svg_lineplot(table: &Table, spec: &PlotSpec) -> Result<String> {
    if table.rows.len() < 2 {
        return Err(Error::InvalidParameter("a line plot needs at least 2 rows".into()));
    }
    if spec.series.is_empty() {
        return Err(Error::InvalidParameter("no series to plot".into()));
    }
    let x = column(table, &spec.x, spec.x_log)?;
    let ys = spec
        .series
        .iter()
        .map(|s| column(table, s, spec.y_log))
        .collect::<Result<Vec<_>>>()?;
    let (x0, x1) = span(x.iter().copied());
    let (y0, y1) = span(ys.iter().flatten().copied());
    let px = |v: f64| MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .expect("write");
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).expect("write");
    writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(&spec.title)
    )
    .expect("write");
    writeln!(
        s,
        r#"<path d="M{m} {t} L{m} {b} L{r} {b}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    )
    .expect("write");
    for (v, anchor_x) in [(x0, px(x0)), (x1, px(x1))] {
        writeln!(
            s,
            r#"<text x="{anchor_x:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            HEIGHT - MARGIN + 16.0,
            tick_label(v, spec.x_log)
        )
        .expect("write");
    }
    for v in [y0, y1] {
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            MARGIN - 6.0,
            py(v) + 4.0,
            tick_label(v, spec.y_log)
        )
        .expect("write");
    }
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(&spec.x)
    )
    .expect("write");
    for (i, (name, y)) in spec.series.iter().zip(&ys).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = x
            .iter()
            .zip(y)
            .map(|(a, b)| format!("{:.3},{:.3}", px(*a), py(*b)))
            .collect();
        writeln!(
            s,
            r#"<polyline data-series="{}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            escape(name),
            points.join(" ")
        )
        .expect("write");
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            WIDTH - MARGIN + 4.0,
            MARGIN + 14.0 * i as f64,
            escape(name)
        )
        .expect("write");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
