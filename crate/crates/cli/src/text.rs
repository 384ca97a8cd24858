//! Number formatting for the human-readable report.

pub fn fmt_f(x: f64) -> String {
    if x.is_finite() && (x - x.round()).abs() < 1e-9 {
        return format!("{}", x.round() as i64);
    }
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn fmt_list(xs: &[f64]) -> String {
    format!("({})", xs.iter().map(|&x| fmt_f(x)).collect::<Vec<_>>().join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_and_decimals() {
        assert_eq!(fmt_f(3.0000000000001), "3");
        assert_eq!(fmt_f(-0.0), "0");
        assert_eq!(fmt_f(0.25), "0.25");
        assert_eq!(fmt_list(&[1.0, -1.5]), "(1, -1.5)");
    }
}
