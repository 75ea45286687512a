//! Bit-exact packed container for quantized tensors (`.dvdq`).
//!
//! Layout (little-endian throughout, documented in FORMATS.md):
//!
//! ```text
//! offset size  field
//! 0      4    magic "DVDQ"
//! 4      1    version = 1
//! 5      1    bits (2, 3, 4, 6, 8)
//! 6      1    channel axis (0 = row, 1 = col)
//! 7      1    reserved, 0
//! 8      4    rows (u32)
//! 12     4    cols (u32)
//! 16     4n   per-channel alpha (f32)
//! 16+4n  4n   per-channel beta (f32)
//! 16+8n  ...  payload
//! ```
//!
//! The payload packs each logical row independently into
//! `ceil(cols * bits / 8)` bytes: codes are appended least-significant-bit
//! first, and the row's trailing byte is zero-padded. For 4-bit this puts
//! element `2k` in the low nibble of byte `k`; 3-bit groups 8 elements into
//! 3 bytes; 6-bit groups 4 elements into 3 bytes. Bounds are carried as raw
//! f32 pairs so `unpack(pack(q)) == q` reproduces codes and params
//! bit-identically.

use crate::error::{Error, Result};
use crate::quant::{ChannelAxis, QuantParams, QuantizedTensor};

pub const MAGIC: [u8; 4] = *b"DVDQ";
pub const VERSION: u8 = 1;

const SUPPORTED_BITS: [u8; 5] = [2, 3, 4, 6, 8];

/// Packed bytes per logical row.
pub fn row_bytes(cols: usize, bits: u8) -> usize {
    (cols * bits as usize).div_ceil(8)
}

/// Serializes a quantized tensor into the container format.
pub fn pack(q: &QuantizedTensor) -> Result<Vec<u8>> {
    let bits = q.bits();
    if !SUPPORTED_BITS.contains(&bits) {
        return Err(Error::validation(format!(
            "bit-width {bits} not packable (supported: {SUPPORTED_BITS:?})"
        )));
    }
    if q.rows() > u32::MAX as usize || q.cols() > u32::MAX as usize {
        return Err(Error::validation("shape exceeds u32 header fields".to_string()));
    }
    let params = q.params();
    let n_channels = params.num_channels();
    let payload_len = q.rows() * row_bytes(q.cols(), bits);
    let mut out = Vec::with_capacity(16 + 8 * n_channels + payload_len);

    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(bits);
    out.push(match q.channel_axis() {
        ChannelAxis::Row => 0,
        ChannelAxis::Col => 1,
    });
    out.push(0);
    out.extend_from_slice(&(q.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(q.cols() as u32).to_le_bytes());
    for c in 0..n_channels {
        out.extend_from_slice(&params.alpha(c).to_le_bytes());
    }
    for c in 0..n_channels {
        out.extend_from_slice(&params.beta(c).to_le_bytes());
    }

    for row in q.codes().chunks_exact(q.cols()) {
        let mut acc: u32 = 0;
        let mut filled: u8 = 0;
        for &code in row {
            acc |= (code as u32) << filled;
            filled += bits;
            while filled >= 8 {
                out.push((acc & 0xFF) as u8);
                acc >>= 8;
                filled -= 8;
            }
        }
        if filled > 0 {
            out.push((acc & 0xFF) as u8);
        }
    }
    Ok(out)
}

/// Exact inverse of [`pack`].
pub fn unpack(bytes: &[u8]) -> Result<QuantizedTensor> {
    if bytes.len() < 16 {
        return Err(Error::format("stream shorter than the header".to_string()));
    }
    if bytes[..4] != MAGIC {
        return Err(Error::format("bad magic".to_string()));
    }
    let version = bytes[4];
    if version != VERSION {
        return Err(Error::unsupported(format!("container version {version}")));
    }
    let bits = bytes[5];
    if !SUPPORTED_BITS.contains(&bits) {
        return Err(Error::format(format!("invalid bit-width byte {bits}")));
    }
    let channel_axis = match bytes[6] {
        0 => ChannelAxis::Row,
        1 => ChannelAxis::Col,
        other => return Err(Error::format(format!("invalid channel axis byte {other}"))),
    };
    let rows = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    if rows == 0 || cols == 0 {
        return Err(Error::format(format!("empty shape {rows}x{cols}")));
    }
    let n_channels = channel_axis.channel_count(rows, cols);
    let expected = cols
        .checked_mul(bits as usize)
        .map(|bits_per_row| bits_per_row.div_ceil(8))
        .and_then(|stride| stride.checked_mul(rows))
        .and_then(|payload| payload.checked_add(16 + 8 * n_channels))
        .ok_or_else(|| Error::format(format!("shape {rows}x{cols} overflows")))?;
    if bytes.len() != expected {
        return Err(Error::format(format!(
            "stream is {} bytes, expected {expected}",
            bytes.len()
        )));
    }
    let payload_start = 16 + 8 * n_channels;

    let mut lo = Vec::with_capacity(n_channels);
    let mut hi = Vec::with_capacity(n_channels);
    for c in 0..n_channels {
        let at = 16 + 4 * c;
        lo.push(f32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()));
    }
    for c in 0..n_channels {
        let at = 16 + 4 * (n_channels + c);
        hi.push(f32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()));
    }
    let params = QuantParams::new(bits, lo, hi)
        .map_err(|e| Error::format(format!("corrupt channel bounds: {e}")))?;

    let mask = (1u32 << bits) - 1;
    let stride = row_bytes(cols, bits);
    let mut codes = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let row = &bytes[payload_start + r * stride..payload_start + (r + 1) * stride];
        let mut acc: u32 = 0;
        let mut filled: u8 = 0;
        let mut consumed = 0usize;
        for _ in 0..cols {
            while filled < bits {
                acc |= (row[consumed] as u32) << filled;
                consumed += 1;
                filled += 8;
            }
            codes.push((acc & mask) as u8);
            acc >>= bits;
            filled -= bits;
        }
    }
    QuantizedTensor::from_parts(codes, params, rows, cols, channel_axis)
        .map_err(|e| Error::format(format!("corrupt payload: {e}")))
}

/// Storage ratio of the unquantized tensor (`original_bits` per element)
/// over the full packed stream, header and params included.
pub fn memory_ratio(original_bits: u8, packed: &[u8]) -> Result<f64> {
    if packed.len() < 16 || packed[..4] != MAGIC {
        return Err(Error::format("not a packed tensor stream".to_string()));
    }
    let rows = u32::from_le_bytes(packed[8..12].try_into().unwrap()) as f64;
    let cols = u32::from_le_bytes(packed[12..16].try_into().unwrap()) as f64;
    Ok(rows * cols * original_bits as f64 / 8.0 / packed.len() as f64)
}
