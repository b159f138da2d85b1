//! Number formatting for CSV output and the operator text dump.

use belltransfer_core::{Complex64, OperatorMatrix};

use crate::CliError;

/// Decimal rendering with 12 digits after the leading significant digit.
///
/// Magnitudes outside `[1e-6, 1e15)` switch to exponent form with the same mantissa length.
pub fn csv_number(v: f64) -> String {
    if v == 0.0 {
        return "0.000000000000".to_string();
    }
    let mag = v.abs();
    if !(1e-6..1e15).contains(&mag) {
        return format!("{v:.12e}");
    }
    // Exponent after rounding to 13 significant digits, so 0.99999999999999978 counts as 1.
    let sci = format!("{v:.12e}");
    let exponent: i32 = sci[sci.find('e').map_or(0, |i| i + 1)..].parse().unwrap_or(0);
    let decimals = (12 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}

/// `re+imi` with 17 significant digits in each part.
pub fn operator_entry(z: Complex64) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}

pub fn write_operator<W: std::io::Write>(op: &OperatorMatrix, w: &mut W) -> std::io::Result<()> {
    let dim = op.dim();
    let mut line = String::new();
    for row in 0..dim {
        line.clear();
        for col in 0..dim {
            if col > 0 {
                line.push(' ');
            }
            line.push_str(&operator_entry(op.get(row, col)));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn parse_entry(token: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("operator entry `{token}` is not re+imi"));
    let body = token.strip_suffix('i').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re = body[..split].parse::<f64>().map_err(|_| bad())?;
    let im = body[split..].parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

/// Inverse of [`write_operator`]. The result carries no kind or provenance.
pub fn parse_operator(text: &str) -> Result<OperatorMatrix, CliError> {
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let dim = rows.len();
    let mut entries = Vec::with_capacity(dim * dim);
    for (r, row) in rows.iter().enumerate() {
        let before = entries.len();
        for token in row.split(' ') {
            entries.push(parse_entry(token)?);
        }
        if entries.len() - before != dim {
            return Err(CliError::Usage(format!(
                "operator row {r} has {} entries, expected {dim}",
                entries.len() - before
            )));
        }
    }
    Ok(OperatorMatrix::from_entries(dim, entries)?)
}
