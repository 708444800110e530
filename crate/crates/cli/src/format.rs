/// Significant digits of every number written to CSV or tables.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Formats `x` with [`SIGNIFICANT_DIGITS`] significant digits, dropping
/// trailing zeros. Magnitudes outside `[1e-4, 1e9)` use exponent notation.
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..9).contains(&magnitude) {
        return format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
