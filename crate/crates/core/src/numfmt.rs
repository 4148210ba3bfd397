//! Locale-free decimal formatting with a fixed number of significant digits.

/// Significant digits used for every emitted float.
pub const SIG_DIGITS: usize = 9;

/// Largest number of fractional digits ever printed; smaller magnitudes print
/// as zero.
const MAX_DECIMALS: i32 = 17;

/// Formats `x` with [`SIG_DIGITS`] significant digits in plain decimal
/// notation, trimming trailing zeros. Negative zero prints as `0`, infinities
/// as `inf` / `-inf`.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (SIG_DIGITS as i32 - 1 - magnitude).clamp(0, MAX_DECIMALS) as usize;
    let mut s = format!("{:.*}", decimals, x);
    // rounding can carry into a new leading digit (9.9999999996 -> 10.00000000)
    if s.contains('.') {
        let digits = s.chars().filter(|c| c.is_ascii_digit()).count();
        let leading_zeros = s
            .trim_start_matches('-')
            .chars()
            .take_while(|c| *c == '0' || *c == '.')
            .filter(|c| *c == '0')
            .count();
        if digits - leading_zeros > SIG_DIGITS && decimals > 0 {
            s = format!("{:.*}", decimals - 1, x);
        }
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        s = trimmed.to_string();
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

/// Rounds `x` to [`SIG_DIGITS`] significant digits, returning a float whose
/// shortest representation is the same decimal [`fmt_sig`] prints.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    fmt_sig(x).parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_typical_values() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(2.0), "2");
        assert_eq!(fmt_sig(1.5), "1.5");
        assert_eq!(fmt_sig(-3.438291), "-3.438291");
        assert_eq!(fmt_sig(0.35457852998), "0.35457853");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig(52.91234567891), "52.9123457");
        assert_eq!(fmt_sig(0.09999999999999998), "0.1");
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
        assert_eq!(fmt_sig(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn rounding_carry_keeps_digit_count() {
        assert_eq!(fmt_sig(9.9999999996), "10");
        assert_eq!(fmt_sig(0.99999999996), "1");
        assert_eq!(fmt_sig(123456789.4), "123456789");
    }

    #[test]
    fn tiny_values_stay_decimal() {
        assert_eq!(fmt_sig(1.234e-7), "0.0000001234");
        assert!(!fmt_sig(1e-30).contains('e'));
    }

    #[test]
    fn round_sig_matches_printed_value() {
        let x = 0.8112781244591328;
        assert_eq!(round_sig(x).to_string(), fmt_sig(x));
    }
}
