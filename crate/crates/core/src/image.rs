//! Monochrome 12-bit image buffers and binary PGM interchange.

use crate::error::{Error, Result};

/// Largest value a 12-bit sample may take.
pub const MAX_SAMPLE: u16 = 4095;
pub const CHANNELS: u8 = 1;
pub const BIT_DEPTH: u8 = 12;

/// A row-major grid of 12-bit monochrome samples.
///
/// Buffers built through [`ImageBuffer::new`] always satisfy the codec's
/// invariants. [`ImageBuffer::from_raw_parts`] skips the checks so callers
/// can hold foreign data and run [`validate_image`] on it later.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    channels: u8,
    bit_depth: u8,
    samples: Vec<u16>,
}

impl ImageBuffer {
    pub fn new(width: u32, height: u32, samples: Vec<u16>) -> Result<Self> {
        let img = Self::from_raw_parts(width, height, CHANNELS, BIT_DEPTH, samples);
        validate_image(&img)?;
        Ok(img)
    }

    pub fn from_raw_parts(
        width: u32,
        height: u32,
        channels: u8,
        bit_depth: u8,
        samples: Vec<u16>,
    ) -> Self {
        Self {
            width,
            height,
            channels,
            bit_depth,
            samples,
        }
    }

    /// A `width x height` image with every sample set to `value`.
    pub fn filled(width: u32, height: u32, value: u16) -> Result<Self> {
        let n = pixel_count(width, height)?;
        Self::new(width, height, vec![value; n])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u16> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Size of the image when stored at two bytes per sample.
    pub fn raw_size(&self) -> usize {
        self.samples.len() * 2
    }

    pub fn get(&self, x: u32, y: u32) -> Option<u16> {
        if x >= self.width || y >= self.height {
            return None;
        }
        self.samples
            .get(y as usize * self.width as usize + x as usize)
            .copied()
    }
}

/// `width * height` as a `usize`, rejecting zero or unrepresentable sizes.
pub fn pixel_count(width: u32, height: u32) -> Result<usize> {
    if width == 0 || height == 0 {
        return Err(Error::ZeroDimension {
            width: width.into(),
            height: height.into(),
        });
    }
    (width as usize)
        .checked_mul(height as usize)
        .ok_or_else(|| Error::UnsupportedFormat(format!("{width}x{height} is too large")))
}

pub fn validate_image(img: &ImageBuffer) -> Result<()> {
    if img.channels != CHANNELS || img.bit_depth != BIT_DEPTH {
        return Err(Error::UnsupportedFormat(format!(
            "{} channel(s) at {} bits; only 1 channel at 12 bits is supported",
            img.channels, img.bit_depth
        )));
    }
    let expected = pixel_count(img.width, img.height)?;
    if img.samples.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: img.samples.len(),
        });
    }
    if let Some(&value) = img.samples.iter().find(|&&s| s > MAX_SAMPLE) {
        return Err(Error::SampleOverflow {
            value: value.into(),
        });
    }
    Ok(())
}

/// Parse a binary (`P5`) PGM holding two bytes per sample.
pub fn read_pgm16(bytes: &[u8]) -> Result<ImageBuffer> {
    let mut header = PgmHeader { bytes, pos: 0 };
    if bytes.get(..2) != Some(b"P5") {
        return Err(Error::MalformedHeader("missing P5 magic".into()));
    }
    header.pos = 2;
    let width = header.next_number("width")?;
    let height = header.next_number("height")?;
    let maxval = header.next_number("maxval")?;
    // exactly one whitespace byte separates maxval from the raster
    match bytes.get(header.pos) {
        Some(b) if b.is_ascii_whitespace() => header.pos += 1,
        _ => return Err(Error::MalformedHeader("no whitespace after maxval".into())),
    }
    if !(256..=65535).contains(&maxval) {
        return Err(Error::MaxvalOutOfRange(maxval));
    }

    let n = pixel_count(width, height)?;
    let data = &bytes[header.pos..];
    let needed = n
        .checked_mul(2)
        .ok_or_else(|| Error::MalformedHeader("dimensions overflow".into()))?;
    if data.len() < needed {
        return Err(Error::TruncatedPixelData {
            expected: needed,
            actual: data.len(),
        });
    }
    let samples = data[..needed]
        .chunks_exact(2)
        .map(|pair| u16::from_be_bytes([pair[0], pair[1]]))
        .collect();
    ImageBuffer::new(width, height, samples)
}

/// Serialize as `P5\n<w> <h>\n4095\n` followed by big-endian samples.
pub fn write_pgm16(img: &ImageBuffer) -> Result<Vec<u8>> {
    validate_image(img)?;
    let header = format!("P5\n{} {}\n{}\n", img.width, img.height, MAX_SAMPLE);
    let mut out = Vec::with_capacity(header.len() + img.raw_size());
    out.extend_from_slice(header.as_bytes());
    for &s in &img.samples {
        out.extend_from_slice(&s.to_be_bytes());
    }
    Ok(out)
}

struct PgmHeader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl PgmHeader<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn next_number(&mut self, what: &str) -> Result<u32> {
        let before = self.pos;
        self.skip_whitespace_and_comments();
        if self.pos == before {
            return Err(Error::MalformedHeader(format!(
                "expected whitespace before {what}"
            )));
        }
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| Error::MalformedHeader(format!("invalid {what}")))
    }
}
