//! PackBits run-length baseline over byte planes, laid out like DICOM RLE.
//!
//! Output: a 64-byte header (little-endian u32 segment count, then fifteen
//! u32 segment offsets from the start of the header, unused ones zero),
//! followed by the high-byte plane segment and the low-byte plane segment.
//!
//! Control byte `n`: `0..=127` copies the next `n + 1` bytes, `129..=255`
//! repeats the next byte `257 - n` times, `128` is a no-op.

use crate::error::{Error, Result};
use crate::image::{pixel_count, validate_image, ImageBuffer};

pub const HEADER_LEN: usize = 64;
const MAX_RUN: usize = 128;
const MIN_RUN: usize = 3;
const SEGMENTS: usize = 2;

pub fn rle_encode(img: &ImageBuffer) -> Result<Vec<u8>> {
    validate_image(img)?;
    let high: Vec<u8> = img.samples().iter().map(|s| (s >> 8) as u8).collect();
    let low: Vec<u8> = img.samples().iter().map(|&s| s as u8).collect();
    let segments = [packbits_encode(&high), packbits_encode(&low)];

    let mut out = vec![0u8; HEADER_LEN];
    out[..4].copy_from_slice(&(SEGMENTS as u32).to_le_bytes());
    let mut offset = HEADER_LEN;
    for (i, seg) in segments.iter().enumerate() {
        out[4 + 4 * i..8 + 4 * i].copy_from_slice(&(offset as u32).to_le_bytes());
        offset += seg.len();
    }
    for seg in segments {
        out.extend(seg);
    }
    Ok(out)
}

pub fn rle_decode(bytes: &[u8], width: u32, height: u32) -> Result<ImageBuffer> {
    let n = pixel_count(width, height)?;
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedRun);
    }
    let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().expect("4 bytes"));
    if word(0) as usize != SEGMENTS {
        return Err(Error::UnsupportedFormat(format!(
            "{} RLE segments",
            word(0)
        )));
    }
    let (start_hi, start_lo) = (word(1) as usize, word(2) as usize);
    if start_hi < HEADER_LEN || start_lo < start_hi || start_lo > bytes.len() {
        return Err(Error::TruncatedRun);
    }
    let high = packbits_decode(&bytes[start_hi..start_lo], n)?;
    let low = packbits_decode(&bytes[start_lo..], n)?;
    let samples = high
        .iter()
        .zip(&low)
        .map(|(&h, &l)| u16::from_be_bytes([h, l]))
        .collect();
    ImageBuffer::new(width, height, samples)
}

/// Greedy PackBits: runs of three or more repeat, everything else is literal.
pub fn packbits_encode(data: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(data.len() / 2 + 2);
    let mut literal_start = 0;
    let mut i = 0;
    while i < data.len() {
        let run = data[i..]
            .iter()
            .take(MAX_RUN)
            .take_while(|&&b| b == data[i])
            .count();
        if run >= MIN_RUN {
            flush_literals(&mut out, &data[literal_start..i]);
            out.push((257 - run) as u8);
            out.push(data[i]);
            i += run;
            literal_start = i;
        } else {
            i += 1;
        }
    }
    flush_literals(&mut out, &data[literal_start..]);
    out
}

fn flush_literals(out: &mut Vec<u8>, mut lit: &[u8]) {
    while !lit.is_empty() {
        let k = lit.len().min(MAX_RUN);
        out.push((k - 1) as u8);
        out.extend_from_slice(&lit[..k]);
        lit = &lit[k..];
    }
}

/// Decode one segment that must expand to exactly `expected` bytes.
pub fn packbits_decode(seg: &[u8], expected: usize) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(expected);
    let mut i = 0;
    while i < seg.len() && out.len() < expected {
        let control = seg[i];
        i += 1;
        match control {
            0..=127 => {
                let k = usize::from(control) + 1;
                let lit = seg.get(i..i + k).ok_or(Error::TruncatedRun)?;
                out.extend_from_slice(lit);
                i += k;
            }
            128 => {}
            _ => {
                let &b = seg.get(i).ok_or(Error::TruncatedRun)?;
                out.extend(std::iter::repeat_n(b, 257 - usize::from(control)));
                i += 1;
            }
        }
    }
    if out.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: out.len(),
        });
    }
    Ok(out)
}
