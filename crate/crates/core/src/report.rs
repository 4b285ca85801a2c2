//! Number formatting shared by reports and data files.

/// Rounds half away from zero to `decimals` places after first snapping to
/// nine decimals, so values such as `0.71375 − 1e−17` round like the decimal
/// they stand for. Returns the decimal text.
pub fn format_reported(value: f64, decimals: u32) -> String {
    assert!(decimals <= 9, "at most nine reported decimals");
    if !value.is_finite() {
        return format!("{value}");
    }
    let snapped = (value.abs() * 1e9).round() as u128;
    let div = 10u128.pow(9 - decimals);
    let (mut q, r) = (snapped / div, snapped % div);
    if 2 * r >= div {
        q += 1;
    }
    let scale = 10u128.pow(decimals);
    let sign = if value < 0.0 && q != 0 { "-" } else { "" };
    if decimals == 0 {
        format!("{sign}{q}")
    } else {
        format!(
            "{sign}{}.{:0width$}",
            q / scale,
            q % scale,
            width = decimals as usize
        )
    }
}

pub fn round_reported(value: f64, decimals: u32) -> f64 {
    format_reported(value, decimals).parse().unwrap_or(value)
}

/// Positional notation with 17 significant digits, enough to round-trip any
/// `f64`.
pub fn fmt_sig17(value: f64) -> String {
    if !value.is_finite() {
        return format!("{value}");
    }
    let sci = format!("{:.16e}", value);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if value == 0.0 {
        return format!("{sign}0.{}", &digits[1..]);
    }
    if exp >= 0 {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            format!("{sign}{digits}{}", "0".repeat(int_len - digits.len()))
        } else {
            format!("{sign}{}.{}", &digits[..int_len], &digits[int_len..])
        }
    } else {
        format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
    }
}
