//! Number formatting for CSV and report lines: shortest form at a
//! fixed significant-digit budget, byte-stable across runs.

/// Format with up to 12 significant digits, trimming trailing zeros.
///
/// Values in [1e-4, 1e12) render in plain decimal, everything else in
/// scientific notation with a sign and two-digit exponent, so `600`
/// stays `600`, `149.5` stays `149.5`, and tiny error rates come out
/// like `3.52906189231e-07`.
pub fn fmt_g12(v: f64) -> String {
    fmt_g(v, 12)
}

fn fmt_g(v: f64, sig: usize) -> String {
    debug_assert!(sig >= 1);
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v < 0.0 { "-inf" } else { "inf" }.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    // Rounding to `sig` digits can carry over into the next decade
    // (9.9999e-5 becomes 1e-4), so take the decimal exponent from the
    // already-rounded scientific rendering.
    let sci_prec = sig - 1;
    let sci = format!("{v:.sci_prec$e}");
    let e_pos = sci.find('e').expect("float in scientific notation");
    let exp: i32 = sci[e_pos + 1..].parse().expect("exponent digits");
    if exp >= -4 && exp < sig as i32 {
        let frac_digits = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.frac_digits$}"))
    } else {
        let mantissa = trim_zeros(sci[..e_pos].to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}
