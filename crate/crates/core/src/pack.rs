//! Little-endian, LSB-first bit packing.
//!
//! Stream bit `i` lives in byte `i / 8` at bit position `i % 8`. Value `k` occupies stream bits
//! `[k*w, (k+1)*w)` with its least significant bit first.

use crate::error::{Error, Result};

/// Number of bytes needed to hold `count` values of `width` bits.
pub fn packed_len(count: usize, width: u32) -> usize {
    (count * width as usize).div_ceil(8)
}

pub fn pack_bits(values: &[u16], width: u32) -> Result<Vec<u8>> {
    assert!((1..=16).contains(&width), "pack width must be in 1..=16");
    let mut out = vec![0u8; packed_len(values.len(), width)];
    let mut acc: u32 = 0;
    let mut filled = 0u32;
    let mut pos = 0;
    for &v in values {
        if width < 16 && (v as u32) >> width != 0 {
            return Err(Error::Overflow { value: v as u64, width });
        }
        acc |= (v as u32) << filled;
        filled += width;
        while filled >= 8 {
            out[pos] = acc as u8;
            pos += 1;
            acc >>= 8;
            filled -= 8;
        }
    }
    if filled > 0 {
        out[pos] = acc as u8;
    }
    Ok(out)
}

/// Inverse of [`pack_bits`]. Reads exactly `count` values; trailing bytes are ignored.
pub fn unpack_bits(bytes: &[u8], width: u32, count: usize) -> Result<Vec<u16>> {
    assert!((1..=16).contains(&width), "pack width must be in 1..=16");
    let needed = packed_len(count, width);
    if bytes.len() < needed {
        return Err(Error::Length { expected: needed, got: bytes.len() });
    }
    let mask = ((1u32 << width) - 1) as u32;
    let mut out = Vec::with_capacity(count);
    let mut acc: u32 = 0;
    let mut filled = 0u32;
    let mut pos = 0;
    for _ in 0..count {
        while filled < width {
            acc |= (bytes[pos] as u32) << filled;
            pos += 1;
            filled += 8;
        }
        out.push((acc & mask) as u16);
        acc >>= width;
        filled -= width;
    }
    Ok(out)
}

/// Reads bit `i` of an LSB-first bitstream.
#[inline]
pub fn get_bit(bytes: &[u8], i: usize) -> u8 {
    (bytes[i / 8] >> (i % 8)) & 1
}
