//! Tagged delta token stream.
//!
//! | kind       | layout                | payload                     |
//! |------------|-----------------------|-----------------------------|
//! | ShortDelta | `0ddddddd`            | `d = delta + 63`, delta in [-63, 64] |
//! | MeshFlag   | `10oooooo`            | forward partner ordinal - 1 |
//! | FullDelta  | `1110hhhh llllllll`   | `hl = delta + 2047`, delta in [-2047, 2048] |
//!
//! Byte prefixes `110` and `1111` are unassigned. Deltas are taken modulo
//! 4096 so every 12-bit transition fits the FullDelta payload, and each
//! pixel is predicted from whichever pixel was emitted just before it.

use crate::config::BLOCK_SIZE;
use crate::error::{Error, Result};
use crate::image::MAX_SAMPLE;
use crate::segment::{block_len, EmissionPlan, PlanItem};

pub const SHORT_MIN: i32 = -63;
pub const SHORT_MAX: i32 = 64;
pub const FULL_MIN: i32 = -2047;
pub const FULL_MAX: i32 = 2048;

const SHORT_BIAS: i32 = 63;
const FULL_BIAS: i32 = 2047;
const MESH_TAG: u8 = 0b1000_0000;
const FULL_TAG: u8 = 0b1110_0000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Token {
    ShortDelta(i16),
    MeshFlag(u8),
    FullDelta(i16),
}

impl Token {
    /// The pixel token for `delta`; short deltas are only used when `qoi` is on.
    pub fn for_delta(delta: i32, qoi: bool) -> Result<Token> {
        if !(FULL_MIN..=FULL_MAX).contains(&delta) {
            return Err(Error::DeltaOutOfRange(delta));
        }
        Ok(if qoi && is_short(delta) {
            Token::ShortDelta(delta as i16)
        } else {
            Token::FullDelta(delta as i16)
        })
    }

    pub fn encoded_len(self) -> usize {
        match self {
            Token::ShortDelta(_) | Token::MeshFlag(_) => 1,
            Token::FullDelta(_) => 2,
        }
    }

    pub fn write(self, out: &mut Vec<u8>) {
        match self {
            Token::ShortDelta(d) => out.push((i32::from(d) + SHORT_BIAS) as u8),
            Token::MeshFlag(code) => out.push(MESH_TAG | (code & 0x3F)),
            Token::FullDelta(d) => {
                let v = (i32::from(d) + FULL_BIAS) as u16;
                out.push(FULL_TAG | (v >> 8) as u8);
                out.push(v as u8);
            }
        }
    }

    /// Parse one token at `pos`, returning it with the number of bytes used.
    pub fn read(bytes: &[u8], pos: usize) -> Result<(Token, usize)> {
        let &b0 = bytes.get(pos).ok_or(Error::TruncatedStream)?;
        if b0 & 0x80 == 0 {
            Ok((Token::ShortDelta(i16::from(b0) - SHORT_BIAS as i16), 1))
        } else if b0 & 0xC0 == MESH_TAG {
            Ok((Token::MeshFlag(b0 & 0x3F), 1))
        } else if b0 & 0xF0 == FULL_TAG {
            let &b1 = bytes.get(pos + 1).ok_or(Error::TruncatedStream)?;
            let v = (u16::from(b0 & 0x0F) << 8) | u16::from(b1);
            Ok((Token::FullDelta(v as i16 - FULL_BIAS as i16), 2))
        } else {
            Err(Error::ReservedTag {
                offset: pos,
                byte: b0,
            })
        }
    }
}

/// Whether a modular delta fits a one-byte ShortDelta.
#[inline]
pub fn is_short(delta: i32) -> bool {
    (SHORT_MIN..=SHORT_MAX).contains(&delta)
}

/// Signed difference `cur - prev` wrapped into [-2047, 2048] (mod 4096).
pub fn modular_delta(cur: u16, prev: u16) -> Result<i32> {
    for s in [cur, prev] {
        if s > MAX_SAMPLE {
            return Err(Error::SampleOverflow { value: s.into() });
        }
    }
    Ok(wrap_delta(cur, prev))
}

#[inline]
pub(crate) fn wrap_delta(cur: u16, prev: u16) -> i32 {
    (i32::from(cur) - i32::from(prev) - FULL_MIN).rem_euclid(4096) + FULL_MIN
}

#[inline]
pub(crate) fn apply_delta(prev: u16, delta: i32) -> u16 {
    (i32::from(prev) + delta).rem_euclid(4096) as u16
}

/// Serialize `stream` in the order given by `plan`.
///
/// Every mesh item writes its flag byte and then the 32 interlaced pixels of
/// its two blocks. The first pixel is predicted from an implicit 0.
pub fn encode_tokens(plan: &EmissionPlan, stream: &[u16], qoi: bool) -> Result<Vec<u8>> {
    plan.validate(stream.len())?;
    if let Some(&value) = stream.iter().find(|&&s| s > MAX_SAMPLE) {
        return Err(Error::SampleOverflow {
            value: value.into(),
        });
    }

    let mut out = Vec::with_capacity(stream.len() + stream.len() / 2);
    let mut prev = 0u16;
    let mut emit = |pixel: u16, out: &mut Vec<u8>| {
        let delta = wrap_delta(pixel, prev);
        let token = if qoi && is_short(delta) {
            Token::ShortDelta(delta as i16)
        } else {
            Token::FullDelta(delta as i16)
        };
        token.write(out);
        prev = pixel;
    };

    for item in plan.items() {
        match *item {
            PlanItem::Plain(block) => {
                let start = block * BLOCK_SIZE;
                for &pixel in &stream[start..start + block_len(block, stream.len())] {
                    emit(pixel, &mut out);
                }
            }
            PlanItem::Mesh {
                block,
                partner,
                offset_code,
            } => {
                Token::MeshFlag(offset_code).write(&mut out);
                let a = &stream[block * BLOCK_SIZE..(block + 1) * BLOCK_SIZE];
                let b = &stream[partner * BLOCK_SIZE..(partner + 1) * BLOCK_SIZE];
                for (&pa, &pb) in a.iter().zip(b) {
                    emit(pa, &mut out);
                    emit(pb, &mut out);
                }
            }
        }
    }
    Ok(out)
}

/// Inverse of [`encode_tokens`]: rebuild the traversal-ordered stream of a
/// `width x height` image split into `block_count` blocks.
pub fn decode_tokens(
    bytes: &[u8],
    width: u32,
    height: u32,
    block_count: usize,
) -> Result<Vec<u16>> {
    let n = crate::image::pixel_count(width, height)?;
    if block_count != n.div_ceil(BLOCK_SIZE) {
        return Err(Error::DimensionMismatch {
            expected: n.div_ceil(BLOCK_SIZE),
            actual: block_count,
        });
    }
    // every pixel costs at least one byte
    if bytes.len() < n {
        return Err(Error::TruncatedStream);
    }

    let mut stream = vec![0u16; n];
    let mut consumed = vec![false; block_count];
    let mut reader = PixelReader {
        bytes,
        pos: 0,
        prev: 0,
    };

    for block in 0..block_count {
        if consumed[block] {
            continue;
        }
        consumed[block] = true;
        let start = block * BLOCK_SIZE;
        let len = block_len(block, n);

        if let Some(&flag) = bytes.get(reader.pos).filter(|&&b| b & 0xC0 == MESH_TAG) {
            let offset_code = flag & 0x3F;
            if len != BLOCK_SIZE {
                return Err(Error::MisplacedMeshFlag {
                    offset: reader.pos,
                    byte: flag,
                });
            }
            reader.pos += 1;
            let partner = (block + 1..block_count)
                .filter(|&p| !consumed[p])
                .nth(usize::from(offset_code))
                .filter(|&p| block_len(p, n) == BLOCK_SIZE)
                .ok_or(Error::OffsetOutOfRange { block, offset_code })?;
            consumed[partner] = true;
            let other = partner * BLOCK_SIZE;
            for i in 0..BLOCK_SIZE {
                stream[start + i] = reader.next_pixel()?;
                stream[other + i] = reader.next_pixel()?;
            }
        } else {
            for slot in &mut stream[start..start + len] {
                *slot = reader.next_pixel()?;
            }
        }
    }

    if reader.pos != bytes.len() {
        return Err(Error::TrailingGarbage {
            remaining: bytes.len() - reader.pos,
        });
    }
    Ok(stream)
}

struct PixelReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    prev: u16,
}

impl PixelReader<'_> {
    fn next_pixel(&mut self) -> Result<u16> {
        let (token, used) = Token::read(self.bytes, self.pos)?;
        let delta = match token {
            Token::ShortDelta(d) | Token::FullDelta(d) => i32::from(d),
            Token::MeshFlag(_) => {
                return Err(Error::MisplacedMeshFlag {
                    offset: self.pos,
                    byte: self.bytes[self.pos],
                })
            }
        };
        self.pos += used;
        self.prev = apply_delta(self.prev, delta);
        Ok(self.prev)
    }
}
