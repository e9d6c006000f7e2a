use std::fmt::Write;

use super::{ConsistencyReport, GridRow};

const HEADER: [&str; 8] = ["k", "n", "type", "a_p", "char", "I", "e_p", "W"];

fn char_label(r: &GridRow) -> String {
    match &r.character {
        Some(c) if c.level() > 0 => {
            let b = c.wild_exponents();
            format!("a={};b={},{}", c.tame_exponent(), b[0], b[1])
        }
        _ => "1".into(),
    }
}

fn cells(r: &GridRow) -> [String; 8] {
    [
        r.k.to_string(),
        r.n.to_string(),
        r.ptype.to_string(),
        r.a_p.to_string(),
        char_label(r),
        r.unb.to_string(),
        r.e_p.to_string(),
        r.root_number.as_ref().map_or_else(|| "-".into(), |w| w.to_string()),
    ]
}

/// Aligned columns, one line per grid point, then a failure count.
pub fn render_text(report: &ConsistencyReport) -> String {
    let rows: Vec<[String; 8]> = report.rows.iter().map(cells).collect();
    let mut width = HEADER.map(str::len);
    for r in &rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cols: &[String]| -> String {
        let padded: Vec<String> =
            cols.iter().zip(&width).map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
        padded.join("  ").trim_end().to_string()
    };
    writeln!(out, "{}", line(&HEADER.map(String::from))).unwrap();
    for r in &rows {
        writeln!(out, "{}", line(r)).unwrap();
    }
    writeln!(out, "# p={} rows={} failures={}", report.p, report.rows.len(), report.failures()).unwrap();
    out
}

/// The same table as CSV; cells containing commas are quoted.
pub fn render_csv(report: &ConsistencyReport) -> String {
    let quote = |c: &str| if c.contains(',') { format!("\"{c}\"") } else { c.to_string() };
    let mut out = HEADER.join(",");
    out.push('\n');
    for r in &report.rows {
        let row: Vec<String> = cells(r).iter().map(|c| quote(c)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
