/// Fixed display of a float: rounded to 9 significant digits, printed in the
/// shortest form that reads back to the rounded value. Magnitudes below
/// `1e-12` print as `0.0`.
pub fn fmt_sig(x: f64) -> String {
    fmt_digits(x, 9)
}

/// As [`fmt_sig`] with `digits` significant digits.
pub fn fmt_digits(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x.abs() < 1e-12 {
        return "0.0".to_string();
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("scientific notation parses");
    format!("{rounded:?}")
}

/// Comma-separated set in braces, `{0,2,4}`.
pub fn fmt_set(set: &[u64]) -> String {
    let body: Vec<String> = set.iter().map(u64::to_string).collect();
    format!("{{{}}}", body.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.473_952_458_199_156_55), "0.473952458");
        assert_eq!(fmt_sig(1.0), "1.0");
        assert_eq!(fmt_sig(0.2), "0.2");
        assert_eq!(fmt_sig(-3.0e-17), "0.0");
        assert_eq!(fmt_sig(1.234_567_891_234e-5), "1.23456789e-5");
        assert_eq!(fmt_sig(3317.7), "3317.7");
        assert_eq!(fmt_digits(0.119_535_706_598_829_59, 5), "0.11954");
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
    }

    #[test]
    fn sets() {
        assert_eq!(fmt_set(&[0, 2, 4]), "{0,2,4}");
        assert_eq!(fmt_set(&[]), "{}");
    }
}
