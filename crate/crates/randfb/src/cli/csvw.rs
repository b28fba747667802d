//! Deterministic CSV assembly (RFC 4180: CRLF records, fixed headers).
//!
//! Floats are written with 17 significant digits so every value survives
//! a parse round-trip bit-exactly.

pub(crate) struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push_str("\r\n");
        Self {
            buf,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        self.buf.push_str(&fields.join(","));
        self.buf.push_str("\r\n");
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

/// 17 significant digits, lossless for f64.
pub(crate) fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn int(v: usize) -> String {
    v.to_string()
}

/// Optional value; empty field when absent.
pub(crate) fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}
