//! Count reports: the human-readable form and the machine-readable JSON with
//! the fixed field set {rows, cols, ones, density, codensity, count,
//! t_context_ms, t_count_ms}.

use serde_json::json;
use trfca_core::context::FormalContext;
use trfca_core::formulas::{decimal_string, ExactRational};

pub struct CountReport {
    pub rows: usize,
    pub cols: usize,
    pub ones: u64,
    pub density: Option<ExactRational>,
    pub codensity: Option<ExactRational>,
    pub count: u64,
    pub t_context_ms: u128,
    pub t_count_ms: u128,
}

impl CountReport {
    pub fn from_context(
        ctx: &FormalContext,
        count: u64,
        t_context_ms: u128,
        t_count_ms: u128,
    ) -> CountReport {
        CountReport {
            rows: ctx.n_objects(),
            cols: ctx.n_attributes(),
            ones: ctx.ones(),
            density: ctx.density().ok(),
            codensity: ctx.codensity().ok(),
            count,
            t_context_ms,
            t_count_ms,
        }
    }

    pub fn to_json(&self) -> String {
        let value = json!({
            "rows": self.rows,
            "cols": self.cols,
            "ones": self.ones,
            "density": self.density.as_ref().map(rational_string),
            "codensity": self.codensity.as_ref().map(rational_string),
            "count": self.count,
            "t_context_ms": self.t_context_ms,
            "t_count_ms": self.t_count_ms,
        });
        value.to_string()
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "context: {} x {} ({} ones)\n",
            self.rows, self.cols, self.ones
        ));
        if let (Some(d), Some(c)) = (&self.density, &self.codensity) {
            out.push_str(&format!("density: {}\n", rational_with_decimal(d)));
            out.push_str(&format!("codensity: {}\n", rational_with_decimal(c)));
        }
        out.push_str(&format!(
            "concepts: {} ({})\n",
            self.count,
            group_digits(self.count)
        ));
        out.push_str(&format!(
            "t_context_ms: {}\nt_count_ms: {}\n",
            self.t_context_ms, self.t_count_ms
        ));
        out
    }
}

pub fn rational_string(r: &ExactRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_with_decimal(r: &ExactRational) -> String {
    format!("{} = {}", rational_string(r), decimal_string(r, 12))
}

/// 37799146070 -> "37,799,146,070"
pub fn group_digits(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}
