//! CSV rendering with C `%.9g`-style numbers.

use std::fmt::Write;

pub const HEADER: &str = "t,na_rwa,nb_rwa,na_full,nb_full,norm_full";

/// Formats `x` like C's `%.{sig}g`: shortest of fixed or exponent notation,
/// trailing zeros removed.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sig = sig.max(1);
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn fmt9(x: f64) -> String {
    format_sig(x, 9)
}

/// One output line. Models that were not run leave their columns empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub t: f64,
    /// `(n̄_a, n̄_b)`
    pub rwa: Option<(f64, f64)>,
    /// `(n̄_a, n̄_b, norm)`
    pub full: Option<(f64, f64, f64)>,
}

pub fn render_csv(rows: &[CsvRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&fmt9(r.t));
        match r.rwa {
            Some((a, b)) => write!(out, ",{},{}", fmt9(a), fmt9(b)).unwrap(),
            None => out.push_str(",,"),
        }
        match r.full {
            Some((a, b, n)) => write!(out, ",{},{},{}", fmt9(a), fmt9(b), fmt9(n)).unwrap(),
            None => out.push_str(",,,"),
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_c_g_format() {
        let cases: &[(f64, &str)] = &[
            (0.0, "0"),
            (1.0, "1"),
            (6.0, "6"),
            (0.01, "0.01"),
            (3.0, "3"),
            (0.1 + 0.2, "0.3"),
            (2.0 / 3.0, "0.666666667"),
            (5.123456789123, "5.12345679"),
            (-1.5, "-1.5"),
            (1e-5, "1e-05"),
            (1.2345e-7, "1.2345e-07"),
            (0.0001234, "0.0001234"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (9.9999999996, "10"),
            (0.99999999996, "1"),
            (1e300, "1e+300"),
        ];
        for &(x, want) in cases {
            assert_eq!(fmt9(x), want, "formatting {x:e}");
        }
        assert_eq!(format_sig(f64::NAN, 9), "nan");
    }

    #[test]
    fn empty_columns_for_missing_models() {
        let rows = [
            CsvRow { t: 0.0, rwa: Some((6.0, 0.0)), full: None },
            CsvRow { t: 0.01, rwa: None, full: Some((5.9, 0.1, 0.999)) },
        ];
        let csv = render_csv(&rows);
        assert_eq!(
            csv,
            "t,na_rwa,nb_rwa,na_full,nb_full,norm_full\n0,6,0,,,\n0.01,,,5.9,0.1,0.999\n"
        );
    }
}
