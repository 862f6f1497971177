//! Number formatting for the CSV outputs.

/// `%.9g`-style rendering: 9 significant digits, trailing zeros trimmed, scientific
/// notation outside `1e-5 ≤ |x| < 1e9`.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // rounding can carry into the next decade, so check the rendered mantissa
    let sci = format!("{:.8e}", x);
    let (mantissa, e) = sci.split_once('e').expect("exponent marker");
    let e: i32 = e.parse().expect("integer exponent");
    if (-5..9).contains(&e) {
        let decimals = (8 - e).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}{:02}", trim(mantissa), if e < 0 { '-' } else { '+' }, e.abs())
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
