//! Text renderings shared by the commands. Every rational is written both
//! as `p/q` and as a decimal.

use num_traits::ToPrimitive;
use wmdim_core::invariants::{Cell, MmdimReport};
use wmdim_core::Rational;

/// `p/q`, or `p` for integers.
pub fn rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering of a rational.
pub fn decimal(r: &Rational) -> String {
    float(r.to_f64().unwrap_or(f64::NAN))
}

/// Fixed-precision float.
pub fn float(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.9}")
    }
}

/// Header of the count table.
pub const CELL_HEADER: &str = "n,eps,log_lower,log_upper,mode,eps_decimal,log_lower_exact,log_upper_exact";

/// One row of the count table.
pub fn cell_row(cell: &Cell) -> String {
    let (upper, upper_exact) = match &cell.upper {
        Some(u) => (float(u.ln()), u.render()),
        None => ("inf".into(), "inf".into()),
    };
    format!(
        "{},{},{},{},{},{},{},{}",
        cell.n,
        rational(&cell.eps),
        float(cell.lower.ln()),
        upper,
        cell.mode.name(),
        decimal(&cell.eps),
        cell.lower.render(),
        upper_exact
    )
}

/// Table, per-scale summary and final slope line, separated by blank lines.
pub fn mmdim_report(report: &MmdimReport) -> String {
    let mut out = String::new();
    out.push_str(CELL_HEADER);
    out.push('\n');
    for cell in &report.cells {
        out.push_str(&cell_row(cell));
        out.push('\n');
    }
    out.push_str("\neps,S_upper,S_lower,eps_decimal,S_upper_largest_n\n");
    for e in &report.estimates {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            rational(&e.eps),
            float(e.upper_extrapolated),
            e.lower_extrapolated.map_or_else(|| "nan".into(), float),
            decimal(&e.eps),
            float(e.upper_at_largest_n)
        ));
    }
    out.push_str("\nslope_lo,slope_hi\n");
    out.push_str(&format!("{},{}\n", float(report.slope_lo), float(report.slope_hi)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use wmdim_core::parse_ratio;

    #[test]
    fn rationals_round_trip() {
        for text in ["1/4", "3", "-7/9", "1024/3"] {
            let r = parse_ratio(text).unwrap();
            assert_eq!(parse_ratio(&rational(&r)).unwrap(), r);
        }
        assert_eq!(rational(&parse_ratio("6/8").unwrap()), "3/4");
        assert_eq!(decimal(&parse_ratio("1/4").unwrap()), "0.250000000");
    }
}
