//! Structured pass/fail records for the verification layer, with a
//! deterministic JSON rendering.
//!
//! Floats are always written with 17 significant digits in scientific
//! notation, so identical runs produce byte-identical output regardless of
//! the shortest-representation quirks of generic serializers. The schema is
//! versioned in `docs/verification-report.schema.json`.

/// One verified identity or inequality.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    /// Stable machine-readable check identifier.
    pub id: String,
    /// Human-readable name of the checked statement.
    pub anchor: String,
    /// Measured left-hand side (residual, ratio numerator, or observed value).
    pub lhs: f64,
    /// Reference right-hand side the check compares against.
    pub rhs: f64,
    /// Normalized comparison value; `pass` requires `ratio ≤ threshold`
    /// (range checks additionally require `ratio ≥ 0`).
    pub ratio: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Configuration provenance (grids, windows, orders, seed).
    pub config: String,
}

/// 17-significant-digit scientific rendering, valid as a JSON number.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        // JSON has no NaN; an impossible sentinel keeps the schema numeric.
        return "-1e999".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "1e999" } else { "-1e999" }.to_string();
    }
    format!("{v:.16e}")
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        format!(
            "{{\"id\":\"{}\",\"anchor\":\"{}\",\"lhs\":{},\"rhs\":{},\"ratio\":{},\"threshold\":{},\"pass\":{},\"config\":\"{}\"}}",
            escape(&self.id),
            escape(&self.anchor),
            fmt_float(self.lhs),
            fmt_float(self.rhs),
            fmt_float(self.ratio),
            fmt_float(self.threshold),
            self.pass,
            escape(&self.config),
        )
    }
}

/// Render a whole report list as a JSON array (one report per line).
pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    let mut out = String::from("[\n");
    for (i, r) in reports.iter().enumerate() {
        out.push_str("  ");
        out.push_str(&r.to_json());
        if i + 1 < reports.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push(']');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_17_digits() {
        let s = fmt_float(0.3);
        assert_eq!(s, "2.9999999999999999e-1");
        assert_eq!(fmt_float(f64::INFINITY), "1e999");
    }

    #[test]
    fn json_is_deterministic_and_escaped() {
        let r = VerificationReport {
            id: "check".into(),
            anchor: "some \"identity\"".into(),
            lhs: 1.0,
            rhs: 2.0,
            ratio: 0.5,
            threshold: 1.0,
            pass: true,
            config: "n=3".into(),
        };
        let a = r.to_json();
        let b = r.to_json();
        assert_eq!(a, b);
        assert!(a.contains("\\\"identity\\\""));
        assert!(reports_to_json(&[r]).starts_with("[\n  {\"id\""));
    }
}
