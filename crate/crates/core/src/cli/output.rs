//! Deterministic report formatting: reals rounded to 12 significant digits,
//! complex numbers as `{"re": x, "im": y}`.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::linalg::C64;
use crate::simulate::EnergyRow;

pub const CSV_HEADER: &str =
    "t,method,kind,mode,energy_re,energy_im,power_re,power_im,sum_re,sum_im,total_energy,total_power";

/// `x` rounded to 12 significant digits; `-0` becomes `0`.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Shortest text that reads back as `round12(x)`.
pub fn fmt_real(x: f64) -> String {
    let r = round12(x);
    if r.is_finite() {
        serde_json::to_string(&r).expect("finite float serializes")
    } else {
        format!("{r}")
    }
}

pub fn real(x: f64) -> Value {
    json!(round12(x))
}

pub fn complex(c: C64) -> Value {
    json!({ "re": round12(c.re), "im": round12(c.im) })
}

pub fn real_matrix(m: &DMatrix<f64>) -> Value {
    Value::Array(m.row_iter().map(|r| Value::Array(r.iter().map(|&v| real(v)).collect())).collect())
}

pub fn complex_matrix(m: &DMatrix<C64>) -> Value {
    Value::Array(m.row_iter().map(|r| Value::Array(r.iter().map(|&v| complex(v)).collect())).collect())
}

pub fn to_json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json value serializes");
    s.push('\n');
    s
}

fn mode_label(mode: Option<usize>) -> String {
    mode.map_or_else(|| "ALL".to_string(), |i| i.to_string())
}

pub fn csv_rows(rows: &[EnergyRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_real(r.t),
            r.method.name(),
            r.kind.name(),
            mode_label(r.mode),
            fmt_real(r.energy.re),
            fmt_real(r.energy.im),
            fmt_real(r.power.re),
            fmt_real(r.power.im),
            fmt_real(r.sum.re),
            fmt_real(r.sum.im),
            fmt_real(r.total_energy),
            fmt_real(r.total_power),
        );
    }
    out
}

pub fn json_rows(rows: &[EnergyRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| {
                json!({
                    "t": real(r.t),
                    "method": r.method.name(),
                    "kind": r.kind.name(),
                    "mode": mode_label(r.mode),
                    "energy": complex(r.energy),
                    "power": complex(r.power),
                    "sum": complex(r.sum),
                    "total_energy": real(r.total_energy),
                    "total_power": real(r.total_power),
                })
            })
            .collect(),
    )
}
