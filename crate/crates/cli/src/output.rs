use nashroyalty_core::schema::{AlphaResponse, SolveResponse};

pub const DEFAULT_PRECISION: usize = 6;

/// Formats `x` with `digits` significant digits in fixed notation.
pub fn significant(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}

pub fn solve_table(r: &SolveResponse, digits: usize) -> String {
    let num = |x: f64| significant(x, digits);
    let mut rows = vec![("royalty share r/O_M", num(r.royalty_share))];
    if let Some(rate) = r.royalty_rate {
        rows.push(("royalty rate r/O_R", num(rate)));
    }
    rows.push(("alpha", num(r.alpha)));
    rows.push(("d1", num(r.d1)));
    rows.push(("d2", num(r.d2)));
    rows.push(("surplus share", num(r.surplus_share)));
    if let Some(p) = &r.profits {
        rows.push(("licensor profit", num(p.profit_1)));
        rows.push(("licensee profit", num(p.profit_2)));
        rows.push(("surplus", num(p.surplus)));
    }
    rows.push(("model", r.model.clone()));
    let mut out = table(&rows);
    for w in &r.warnings {
        out.push_str(&format!("note: {w}\n"));
    }
    out
}

pub fn alpha_table(r: &AlphaResponse, digits: usize) -> String {
    let num = |x: f64| significant(x, digits);
    let rows = [
        ("alpha", num(r.alpha)),
        ("d1", num(r.d1)),
        ("d2", num(r.d2)),
        ("model", r.model.clone()),
    ];
    let mut out = table(&rows);
    for w in &r.warnings {
        out.push_str(&format!("note: {w}\n"));
    }
    out
}

pub fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("response types serialize");
    s.push('\n');
    s
}
