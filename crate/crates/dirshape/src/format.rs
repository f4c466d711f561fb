//! Text artifacts: descriptor records, matrix and report CSVs, text tables.

use std::fmt::Write as _;

use dirshape_core::{DescriptorGrid, DistanceMatrix, RetrievalReport};

use crate::{Error, Result};

/// How floating-point values are written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Nine significant digits, `%.9g` style.
    Significant9,
    /// Shortest text that parses back to the same `f64`.
    RoundTrip,
}

impl Precision {
    pub fn format(self, v: f64) -> String {
        match self {
            Precision::Significant9 => format_g(v, 9),
            Precision::RoundTrip => format!("{v:?}"),
        }
    }
}

/// C's `%.{digits}g`: fixed or scientific notation, trailing zeros removed.
pub fn format_g(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn join(values: impl IntoIterator<Item = f64>, p: Precision) -> String {
    values.into_iter().map(|v| p.format(v)).collect::<Vec<_>>().join(",")
}

/// `# key = value` lines.
pub fn header(echo: &[(String, String)]) -> String {
    echo.iter().map(|(k, v)| format!("# {k} = {v}\n")).collect()
}

/// The grid as CSV: a `theta\beta` header naming the β columns, then one
/// row per θ.
pub fn grid_csv(grid: &DescriptorGrid, p: Precision) -> String {
    let mut out = format!("theta\\beta,{}\n", join(grid.betas.iter().copied(), p));
    for (i, &theta) in grid.thetas.iter().enumerate() {
        let _ = writeln!(out, "{},{}", p.format(theta), join(grid.row(i).iter().copied(), p));
    }
    out
}

/// A descriptor record: comment header, `key = value` lines for the id and
/// the normalization parameters, then `[grid]` and [`grid_csv`].
pub fn write_record(id: &str, grid: &DescriptorGrid, echo: &[(String, String)], p: Precision) -> String {
    let mut out = String::from("# dirshape descriptor\n");
    out += &header(echo);
    let _ = writeln!(out, "id = {id}");
    let _ = writeln!(out, "epsilon = {}", p.format(grid.epsilon));
    let _ = writeln!(out, "area = {}", p.format(grid.area));
    out += "[grid]\n";
    out += &grid_csv(grid, p);
    out
}

/// Parses [`write_record`] output back into `(id, grid)`.
pub fn parse_record(text: &str, origin: &str) -> Result<(String, DescriptorGrid)> {
    let err = |line: usize, message: String| Error::Parse { origin: origin.into(), line, message };
    let number = |line: usize, s: &str| s.trim().parse::<f64>().map_err(|_| err(line, format!("not a number: {s:?}")));
    let (mut id, mut epsilon, mut area) = (None, None, None);
    let mut in_grid = false;
    let (mut betas, mut thetas, mut values) = (None::<Vec<f64>>, Vec::new(), Vec::new());
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "[grid]" {
            in_grid = true;
            continue;
        }
        if !in_grid {
            let (key, value) = line.split_once('=').ok_or_else(|| err(line_no, "expected key = value".into()))?;
            match key.trim() {
                "id" => id = Some(value.trim().to_string()),
                "epsilon" => epsilon = Some(number(line_no, value)?),
                "area" => area = Some(number(line_no, value)?),
                other => return Err(err(line_no, format!("unknown key {other:?}"))),
            }
            continue;
        }
        let mut fields = line.split(',');
        let first = fields.next().unwrap_or_default();
        match &betas {
            None => {
                if first.trim() != "theta\\beta" {
                    return Err(err(line_no, "expected theta\\beta header".into()));
                }
                betas = Some(fields.map(|f| number(line_no, f)).collect::<Result<_>>()?);
            }
            Some(b) => {
                thetas.push(number(line_no, first)?);
                let row: Vec<f64> = fields.map(|f| number(line_no, f)).collect::<Result<_>>()?;
                if row.len() != b.len() {
                    return Err(err(line_no, format!("{} values for {} betas", row.len(), b.len())));
                }
                values.extend(row);
            }
        }
    }
    let missing = |what: &str| err(text.lines().count(), format!("missing {what}"));
    let grid = DescriptorGrid::new(
        thetas,
        betas.ok_or_else(|| missing("[grid]"))?,
        values,
        epsilon.ok_or_else(|| missing("epsilon"))?,
        area.ok_or_else(|| missing("area"))?,
    )?;
    Ok((id.ok_or_else(|| missing("id"))?, grid))
}

/// Square CSV with the ids as header row and first column.
pub fn matrix_csv(matrix: &DistanceMatrix, echo: &[(String, String)]) -> String {
    let mut out = header(echo);
    let _ = writeln!(out, "id,{}", matrix.ids().join(","));
    let n = matrix.len();
    for (i, id) in matrix.ids().iter().enumerate() {
        let _ = writeln!(out, "{id},{}", join((0..n).map(|j| matrix.get(i, j)), Precision::Significant9));
    }
    out
}

/// One row per class and a final `TOTAL` row; columns `n=1..N` in percent.
pub fn report_csv(report: &RetrievalReport, echo: &[(String, String)]) -> String {
    let mut out = header(echo);
    let cols: Vec<String> = (1..=report.max_n).map(|n| format!("n={n}")).collect();
    let _ = writeln!(out, "class,size,{}", cols.join(","));
    for c in &report.classes {
        let _ = writeln!(out, "{},{},{}", c.class, c.size, join(c.percent(), Precision::Significant9));
    }
    let _ = writeln!(out, "TOTAL,{},{}", report.total_queries(), join(report.totals(), Precision::Significant9));
    out
}

/// Fixed-width table with one decimal per percentage.
pub fn report_table(report: &RetrievalReport, echo: &[(String, String)]) -> String {
    let mut out = header(echo);
    let width = report.classes.iter().map(|c| c.class.len()).max().unwrap_or(0).max(5);
    let _ = write!(out, "{:<width$} {:>5}", "class", "size");
    for n in 1..=report.max_n {
        let _ = write!(out, " {:>6}", format!("n={n}"));
    }
    out.push('\n');
    let mut row = |name: &str, size: usize, pct: &[f64]| {
        let _ = write!(out, "{name:<width$} {size:>5}");
        for p in pct {
            let _ = write!(out, " {p:>6.1}");
        }
        out.push('\n');
    };
    for c in &report.classes {
        row(&c.class, c.size, &c.percent());
    }
    row("TOTAL", report.total_queries(), &report.totals());
    out
}
