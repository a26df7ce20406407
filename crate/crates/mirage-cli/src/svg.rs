//! Minimal line plots of a result table. Convenience output only.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::table::{number, Table};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// One polyline per case and plotted column; `None` when nothing is plottable.
pub fn render(table: &Table) -> Option<String> {
    let x_col = table.column(table.x.as_deref()?)?;
    let keys: Vec<usize> = core::iter::once("case").chain(table.group.iter().map(String::as_str)).filter_map(|c| table.column(c)).collect();
    let ys: Vec<(usize, &str)> = table.plot.iter().filter_map(|name| Some((table.column(name)?, name.as_str()))).collect();
    if ys.is_empty() {
        return None;
    }
    let mut curves: BTreeMap<(Vec<i64>, usize), Vec<(f64, f64)>> = BTreeMap::new();
    for row in &table.rows {
        // Group keys are case indices and integer labels.
        let case: Vec<i64> = keys.iter().map(|&c| row[c].as_f64().unwrap_or(0.0) as i64).collect();
        let Some(x) = row[x_col].as_f64() else { continue };
        for (k, (col, _)) in ys.iter().enumerate() {
            if let Some(y) = row[*col].as_f64().filter(|y| y.is_finite()) {
                curves.entry((case.clone(), k)).or_default().push((x, y));
            }
        }
    }
    let points = curves.values().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0.is_finite() && y0.is_finite()) {
        return None;
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#, WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let short = |v: f64| format!("{:.4}", number(v).parse::<f64>().unwrap_or(v));
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}">{}</text>"#, HEIGHT - MARGIN + 16.0, short(x0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, WIDTH - MARGIN, HEIGHT - MARGIN + 16.0, short(x1));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 16.0, table.x.as_deref().unwrap_or(""));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN - 4.0, HEIGHT - MARGIN, short(y0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN - 4.0, MARGIN + 8.0, short(y1));
    for (i, ((case, k), pts)) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#, path.join(" "));
        let _ = writeln!(s, r#"<text x="{}" y="{}" fill="{color}">{:?}: {}</text>"#, WIDTH - MARGIN + 4.0 - 120.0, MARGIN + 14.0 * (i as f64 + 1.0), case, ys[*k].1);
    }
    s.push_str("</svg>\n");
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_one_line_per_case() {
        let mut t = Table::new(&["case", "t", "n"]).plotting("t", &["n"]);
        for case in 0..2i64 {
            for i in 0..5 {
                t.push(vec![case.into(), (i as f64).into(), ((i * i) as f64).into()]);
            }
        }
        let svg = render(&t).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn text_only_tables_are_skipped() {
        let mut t = Table::new(&["case", "label"]).plotting("label", &["label"]);
        t.push(vec![0i64.into(), "x".into()]);
        assert!(render(&t).is_none());
    }
}
