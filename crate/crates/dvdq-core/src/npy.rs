//! NPY v1.0 file interchange.
//!
//! Writing always emits little-endian float32, C order, 2-D shape, with the
//! header padded so the payload starts on a 64-byte boundary. Reading
//! accepts `<f4` and `<f8` (float64 is narrowed to float32 with
//! round-to-nearest), 1-D or 2-D shapes (1-D becomes a single row), C order
//! only.

use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::Tensor2D;

const MAGIC: &[u8; 6] = b"\x93NUMPY";

/// Serializes `t` as NPY v1.0 `<f4`, C order.
///
/// `load_npy(save_npy(t))` reproduces the payload bit-for-bit.
pub fn save_npy(t: &Tensor2D, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let dict = format!(
        "{{'descr': '<f4', 'fortran_order': False, 'shape': ({}, {}), }}",
        t.rows(),
        t.cols()
    );
    // magic(6) + version(2) + header_len(2) + dict + padding + '\n', padded
    // to a multiple of 64 bytes.
    let unpadded = 10 + dict.len() + 1;
    let total = unpadded.div_ceil(64) * 64;
    let header_len = total - 10;
    if header_len > u16::MAX as usize {
        return Err(Error::validation("NPY v1.0 header limit exceeded".to_string()));
    }

    let mut bytes = Vec::with_capacity(total + t.len() * 4);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&[0x01, 0x00]);
    bytes.extend_from_slice(&(header_len as u16).to_le_bytes());
    bytes.extend_from_slice(dict.as_bytes());
    bytes.resize(total - 1, b' ');
    bytes.push(b'\n');
    for &v in t.data() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, &bytes).map_err(|e| Error::io(path, e))
}

/// Reads an NPY file into a [`Tensor2D`]. 1-D arrays become `1 x n`.
pub fn load_npy(path: impl AsRef<Path>) -> Result<Tensor2D> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 10 {
        return Err(Error::format(format!("{}: shorter than the NPY preamble", path.display())));
    }
    if &bytes[..6] != MAGIC {
        return Err(Error::format(format!("{}: bad NPY magic", path.display())));
    }
    let (major, minor) = (bytes[6], bytes[7]);
    if (major, minor) != (1, 0) {
        return Err(Error::unsupported(format!(
            "{}: NPY version {major}.{minor} (only 1.0 handled)",
            path.display()
        )));
    }
    let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let payload_start = 10 + header_len;
    if bytes.len() < payload_start {
        return Err(Error::format(format!("{}: truncated NPY header", path.display())));
    }
    let header = std::str::from_utf8(&bytes[10..payload_start])
        .map_err(|_| Error::format(format!("{}: NPY header is not UTF-8", path.display())))?;

    let descr = extract_str_value(header, "descr")
        .ok_or_else(|| Error::format(format!("{}: header missing 'descr'", path.display())))?;
    let item_size = match descr {
        "<f4" => 4,
        "<f8" => 8,
        other => {
            return Err(Error::unsupported(format!(
                "{}: dtype '{other}' (only '<f4'/'<f8' handled)",
                path.display()
            )))
        }
    };

    match extract_bool_value(header, "fortran_order") {
        Some(false) => {}
        Some(true) => {
            return Err(Error::unsupported(format!("{}: Fortran-order NPY", path.display())))
        }
        None => {
            return Err(Error::format(format!(
                "{}: header missing 'fortran_order'",
                path.display()
            )))
        }
    }

    let dims = extract_shape(header)
        .ok_or_else(|| Error::format(format!("{}: malformed 'shape' entry", path.display())))?;
    let (rows, cols) = match dims.as_slice() {
        [n] => (1, *n),
        [r, c] => (*r, *c),
        _ => {
            return Err(Error::unsupported(format!(
                "{}: rank-{} array (only 1-D/2-D handled)",
                path.display(),
                dims.len()
            )))
        }
    };

    let expected = rows
        .checked_mul(cols)
        .and_then(|count| count.checked_mul(item_size))
        .ok_or_else(|| Error::format(format!("{}: shape overflow", path.display())))?;
    let payload = &bytes[payload_start..];
    if payload.len() != expected {
        return Err(Error::format(format!(
            "{}: payload is {} bytes, expected {expected}",
            path.display(),
            payload.len()
        )));
    }
    let count = rows * cols;

    let mut data = Vec::with_capacity(count);
    match item_size {
        4 => {
            for chunk in payload.chunks_exact(4) {
                data.push(f32::from_le_bytes(chunk.try_into().unwrap()));
            }
        }
        _ => {
            for chunk in payload.chunks_exact(8) {
                data.push(f64::from_le_bytes(chunk.try_into().unwrap()) as f32);
            }
        }
    }

    Tensor2D::new(rows, cols, data)
        .map_err(|e| Error::validation(format!("{}: {e}", path.display())))
}

/// Finds `'key': 'value'` in the header dict and returns the value.
fn extract_str_value<'a>(header: &'a str, key: &str) -> Option<&'a str> {
    let rest = after_key(header, key)?;
    let rest = rest.strip_prefix('\'')?;
    let end = rest.find('\'')?;
    Some(&rest[..end])
}

fn extract_bool_value(header: &str, key: &str) -> Option<bool> {
    let rest = after_key(header, key)?;
    if rest.starts_with("True") {
        Some(true)
    } else if rest.starts_with("False") {
        Some(false)
    } else {
        None
    }
}

fn extract_shape(header: &str) -> Option<Vec<usize>> {
    let rest = after_key(header, "shape")?;
    let rest = rest.strip_prefix('(')?;
    let end = rest.find(')')?;
    let inner = &rest[..end];
    let mut dims = Vec::new();
    for part in inner.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue; // trailing comma of a 1-tuple
        }
        dims.push(part.parse().ok()?);
    }
    if dims.is_empty() {
        None // 0-d scalar
    } else {
        Some(dims)
    }
}

fn after_key<'a>(header: &'a str, key: &str) -> Option<&'a str> {
    let pat = format!("'{key}':");
    let pos = header.find(&pat)?;
    Some(header[pos + pat.len()..].trim_start())
}
