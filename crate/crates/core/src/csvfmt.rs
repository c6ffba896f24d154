//! Locale-free float formatting for CSV output.

/// Scientific notation with 17 significant digits; round-trips every `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
