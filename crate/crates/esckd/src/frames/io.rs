//! Frame file format: a JSON document
//! `{"d": int, "n": int, "vectors": [[[re, im], … d pairs], … n entries]}`
//! with amplitudes in the standard basis. Writers emit 17 significant digits
//! so the round trip is bit-exact.

// Parsing relies on serde_json's `float_roundtrip` feature so that the 17
// significant digits written here reproduce each amplitude bit for bit.
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{C64, CVector, StateVector};

use super::Ensemble;

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes an ensemble; output is byte-stable for identical input.
pub fn frame_to_json(e: &Ensemble) -> String {
    let mut out = String::new();
    out.push_str(&format!("{{\"d\":{},\"n\":{},\"vectors\":[", e.dim(), e.len()));
    for (k, v) in e.vectors().iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push('[');
        for (i, amp) in v.amplitudes().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("[{},{}]", fmt_f64(amp.re), fmt_f64(amp.im)));
        }
        out.push(']');
    }
    out.push_str("]}\n");
    out
}

#[derive(Deserialize)]
struct FrameFile {
    d: usize,
    n: usize,
    vectors: Vec<Vec<[f64; 2]>>,
}

/// Parses a frame document and validates dimensions and unit norms.
pub fn frame_from_json(text: &str) -> Result<Ensemble> {
    let file: FrameFile = serde_json::from_str(text)?;
    if file.vectors.len() != file.n {
        return Err(Error::InvalidParameter(format!(
            "frame file declares n={} but carries {} vectors",
            file.n,
            file.vectors.len()
        )));
    }
    let vectors = file
        .vectors
        .iter()
        .enumerate()
        .map(|(k, amps)| {
            if amps.len() != file.d {
                return Err(Error::InvalidParameter(format!(
                    "vector {k} has {} amplitudes but d={}",
                    amps.len(),
                    file.d
                )));
            }
            StateVector::new(CVector::from_iterator(
                file.d,
                amps.iter().map(|&[re, im]| C64::new(re, im)),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(file.d, vectors)
}
