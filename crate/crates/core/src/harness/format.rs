//! Number formatting for CSV and report output.

/// Formats `x` with nine significant digits, `%.9g` style: fixed notation
/// for decimal exponents in [-5, 9), scientific otherwise, trailing zeros
/// removed.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(sig9).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(100.0), "100");
        assert_eq!(sig9(0.1), "0.1");
        assert_eq!(sig9(std::f64::consts::PI), "3.14159265");
        assert_eq!(sig9(-0.000_123_456_789_12), "-0.000123456789");
        assert_eq!(sig9(1.234_567_891e-7), "1.23456789e-7");
        assert_eq!(sig9(123_456_789_012.0), "1.23456789e11");
        assert_eq!(sig9(9.999_999_999_9), "10");
        assert_eq!(sig9(f64::NAN), "nan");
        assert_eq!(opt(None), "");
    }
}
