//! Plain-text export helpers shared by the library and the command-line front end.

/// Fixed 17-significant-digit formatting used for every numeric CSV cell.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comma-separated table with a header row and LF line endings.
pub fn csv_table(headers: &[&str], columns: &[&[f64]]) -> String {
    let rows = columns.iter().map(|c| c.len()).min().unwrap_or(0);
    let mut out = headers.join(",");
    out.push('\n');
    for i in 0..rows {
        let cells: Vec<String> = columns.iter().map(|c| fmt_f64(c[i])).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_layout() {
        let t = csv_table(&["a", "b"], &[&[1.0, 2.0], &[0.5, -0.25]]);
        assert_eq!(t, "a,b\n1.0000000000000000e0,5.0000000000000000e-1\n2.0000000000000000e0,-2.5000000000000000e-1\n");
    }

    #[test]
    fn round_trips_exactly() {
        for &x in &[std::f64::consts::PI, 1e-300, -2.0 / 3.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}
