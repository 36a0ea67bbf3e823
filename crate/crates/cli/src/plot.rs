//! Minimal SVG line plots of CSV columns against `t`.
//!
//! Empty cells (undefined outcomes) are skipped; the polyline joins the
//! neighbouring points.

use std::fmt::Write as _;

use crate::error::{CliError, Result};

pub const DEFAULT_COLUMNS: [&str; 6] = ["P_g", "P_e", "I_g", "I_e", "F_g", "F_e"];

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 120.0;
const MARGIN_Y: f64 = 32.0;
const TICKS: usize = 5;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct Table {
    t: Vec<f64>,
    columns: Vec<(String, Vec<Option<f64>>)>,
}

fn read_table(csv_text: &str, columns: &[&str]) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new().from_reader(csv_text.as_bytes());
    let fmt = |e: csv::Error| CliError::Format(e.to_string());
    let header = r.headers().map_err(fmt)?.clone();
    let index = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::config(format!("column `{name}` not found")))
    };
    let t_idx = index("t")?;
    let picked = columns
        .iter()
        .map(|c| index(c))
        .collect::<Result<Vec<_>>>()?;

    let parse = |cell: &str| -> Result<Option<f64>> {
        if cell.is_empty() {
            return Ok(None);
        }
        cell.parse::<f64>()
            .map(Some)
            .map_err(|_| CliError::Format(format!("`{cell}` is not a number")))
    };
    let mut t = Vec::new();
    let mut values = vec![Vec::new(); picked.len()];
    for rec in r.records() {
        let rec = rec.map_err(fmt)?;
        t.push(parse(&rec[t_idx])?.ok_or_else(|| CliError::Format("empty t cell".into()))?);
        for (v, &i) in values.iter_mut().zip(&picked) {
            v.push(parse(&rec[i])?);
        }
    }
    if t.len() < 2 {
        return Err(CliError::config(format!(
            "need at least 2 data rows, found {}",
            t.len()
        )));
    }
    Ok(Table {
        t,
        columns: columns.iter().map(|c| c.to_string()).zip(values).collect(),
    })
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Renders the selected columns of `csv_text` against its `t` column.
pub fn plot_csv(csv_text: &str, columns: &[&str]) -> Result<String> {
    if columns.is_empty() {
        return Err(CliError::config("no columns selected"));
    }
    let table = read_table(csv_text, columns)?;
    let (x0, x1) = range(table.t.iter().copied());
    let (y0, y1) = range(
        table
            .columns
            .iter()
            .flat_map(|(_, v)| v.iter().flatten().copied()),
    );
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| MARGIN_Y + (y1 - y) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_Y}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let (x, y) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(x), sy(y));
        let bottom = HEIGHT - MARGIN_Y;
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{bottom}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{x:.3}</text>"#,
            bottom + 5.0,
            bottom + 18.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{y:.3}</text>"#,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 4.0
    );
    for (i, (name, values)) in table.columns.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = table
            .t
            .iter()
            .zip(values)
            .filter_map(|(&t, v)| v.map(|v| format!("{:.2},{:.2}", sx(t), sy(v))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = MARGIN_Y + 16.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{name}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
