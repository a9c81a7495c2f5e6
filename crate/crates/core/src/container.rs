//! The `pact` file: a 16-byte header followed by the token payload.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "pact"
//!      4     1  version (1)
//!      5     4  width, big-endian
//!      9     4  height, big-endian
//!     13     1  channels (1)
//!     14     1  bytes per channel (2)
//!     15     1  flags: bit0 fractal scan, bit1 segmentation, bit2 DEFLATE
//! ```
//!
//! When bit2 is set the payload is a raw DEFLATE stream of the tokens.

use std::io::{Read, Write};

use flate2::bufread::DeflateDecoder;
use flate2::write::DeflateEncoder;
use flate2::Compression;

use crate::config::{PipelineConfig, BLOCK_SIZE};
use crate::delta::{decode_tokens, encode_tokens};
use crate::error::{Error, Result};
use crate::image::{pixel_count, validate_image, ImageBuffer};
use crate::scan::{flatten, generate_scan, unflatten, Traversal};
use crate::segment::{block_count, plan_segmentation, EmissionPlan};

pub const MAGIC: [u8; 4] = *b"pact";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 16;
/// DEFLATE level used for every container; part of the canonical output.
pub const DEFLATE_LEVEL: u32 = 9;

pub const FLAG_FRACTAL: u8 = 1 << 0;
pub const FLAG_SEGMENTATION: u8 = 1 << 1;
pub const FLAG_DEFLATE: u8 = 1 << 2;
const RESERVED_FLAGS: u8 = !(FLAG_FRACTAL | FLAG_SEGMENTATION | FLAG_DEFLATE);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ContainerHeader {
    pub width: u32,
    pub height: u32,
    pub channels: u8,
    pub bytes_per_channel: u8,
    pub flags: u8,
}

impl ContainerHeader {
    pub fn for_image(img: &ImageBuffer, config: &PipelineConfig) -> Self {
        let mut flags = 0;
        if config.fractal_enabled {
            flags |= FLAG_FRACTAL;
        }
        if config.segmentation_enabled {
            flags |= FLAG_SEGMENTATION;
        }
        if config.deflate_enabled {
            flags |= FLAG_DEFLATE;
        }
        Self {
            width: img.width(),
            height: img.height(),
            channels: 1,
            bytes_per_channel: 2,
            flags,
        }
    }

    pub fn fractal(&self) -> bool {
        self.flags & FLAG_FRACTAL != 0
    }

    pub fn segmentation(&self) -> bool {
        self.flags & FLAG_SEGMENTATION != 0
    }

    pub fn deflate(&self) -> bool {
        self.flags & FLAG_DEFLATE != 0
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..4].copy_from_slice(&MAGIC);
        out[4] = VERSION;
        out[5..9].copy_from_slice(&self.width.to_be_bytes());
        out[9..13].copy_from_slice(&self.height.to_be_bytes());
        out[13] = self.channels;
        out[14] = self.bytes_per_channel;
        out[15] = self.flags;
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            let mut magic = [0u8; 4];
            let k = bytes.len().min(4);
            magic[..k].copy_from_slice(&bytes[..k]);
            if magic != MAGIC {
                return Err(Error::BadMagic(magic));
            }
            return Err(Error::TruncatedStream);
        }
        let magic: [u8; 4] = bytes[..4].try_into().expect("4 bytes");
        if magic != MAGIC {
            return Err(Error::BadMagic(magic));
        }
        if bytes[4] != VERSION {
            return Err(Error::UnsupportedVersion(bytes[4]));
        }
        let header = Self {
            width: u32::from_be_bytes(bytes[5..9].try_into().expect("4 bytes")),
            height: u32::from_be_bytes(bytes[9..13].try_into().expect("4 bytes")),
            channels: bytes[13],
            bytes_per_channel: bytes[14],
            flags: bytes[15],
        };
        if header.channels != 1 || header.bytes_per_channel != 2 {
            return Err(Error::UnsupportedFormat(format!(
                "{} channel(s) at {} byte(s) each",
                header.channels, header.bytes_per_channel
            )));
        }
        if header.flags & RESERVED_FLAGS != 0 {
            return Err(Error::BadFlags(header.flags));
        }
        pixel_count(header.width, header.height)?;
        Ok(header)
    }
}

pub fn compact_encode(img: &ImageBuffer, config: &PipelineConfig) -> Result<Vec<u8>> {
    validate_image(img)?;
    config.validate()?;

    let stream = if config.fractal_enabled {
        let order = generate_scan(img.width(), img.height())?;
        flatten(img, Traversal::Curve(&order))?
    } else {
        flatten(img, Traversal::Raster)?
    };
    let plan = if config.segmentation_enabled {
        plan_segmentation(&stream, config)?
    } else {
        EmissionPlan::all_plain(stream.len())
    };
    let tokens = encode_tokens(&plan, &stream, config.qoi_short_deltas_enabled)?;

    let header = ContainerHeader::for_image(img, config);
    let mut out = header.to_bytes().to_vec();
    if config.deflate_enabled {
        out.extend(deflate_wrap(&tokens));
    } else {
        out.extend(tokens);
    }
    Ok(out)
}

pub fn compact_decode(bytes: &[u8]) -> Result<ImageBuffer> {
    let header = ContainerHeader::parse(bytes)?;
    let n = pixel_count(header.width, header.height)?;
    let payload = &bytes[HEADER_LEN..];

    let inflated;
    let tokens = if header.deflate() {
        // two bytes per pixel plus at most one flag per two blocks
        let limit = n.saturating_mul(2).saturating_add(n / BLOCK_SIZE);
        inflated = inflate_limited(payload, limit)?;
        &inflated[..]
    } else {
        payload
    };

    let stream = decode_tokens(tokens, header.width, header.height, block_count(n))?;
    if stream.len() != n {
        return Err(Error::PixelCountMismatch {
            expected: n,
            actual: stream.len(),
        });
    }
    if header.fractal() {
        let order = generate_scan(header.width, header.height)?;
        unflatten(
            &stream,
            Traversal::Curve(&order),
            header.width,
            header.height,
        )
    } else {
        unflatten(&stream, Traversal::Raster, header.width, header.height)
    }
}

/// Compress into a raw (RFC 1951) DEFLATE stream at [`DEFLATE_LEVEL`].
pub fn deflate_wrap(bytes: &[u8]) -> Vec<u8> {
    let mut enc = DeflateEncoder::new(
        Vec::with_capacity(bytes.len() / 2 + 64),
        Compression::new(DEFLATE_LEVEL),
    );
    enc.write_all(bytes).expect("writing to a Vec cannot fail");
    enc.finish().expect("writing to a Vec cannot fail")
}

pub fn deflate_unwrap(bytes: &[u8]) -> Result<Vec<u8>> {
    inflate_limited(bytes, usize::MAX)
}

/// Inflate a raw DEFLATE stream that must end exactly at the end of `bytes`
/// and expand to at most `limit` bytes.
fn inflate_limited(bytes: &[u8], limit: usize) -> Result<Vec<u8>> {
    let mut dec = DeflateDecoder::new(bytes);
    let mut out = Vec::new();
    let cap = u64::try_from(limit).unwrap_or(u64::MAX).saturating_add(1);
    (&mut dec)
        .take(cap)
        .read_to_end(&mut out)
        .map_err(|e| Error::InflateError(e.to_string()))?;
    if out.len() > limit {
        return Err(Error::InflateError(format!(
            "stream expands past {limit} bytes"
        )));
    }
    if dec.total_in() < bytes.len() as u64 {
        return Err(Error::TrailingGarbage {
            remaining: bytes.len() - dec.total_in() as usize,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pixel_full_pipeline() {
        let img = ImageBuffer::new(1, 1, vec![0]).unwrap();
        let bytes = compact_encode(&img, &PipelineConfig::canonical()).unwrap();
        assert_eq!(
            &bytes[..HEADER_LEN],
            &[b'p', b'a', b'c', b't', 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 2, 0b111]
        );
        assert_eq!(deflate_unwrap(&bytes[HEADER_LEN..]).unwrap(), vec![0x3F]);
        assert_eq!(bytes[HEADER_LEN..], deflate_wrap(&[0x3F])[..]);
        assert_eq!(compact_decode(&bytes).unwrap(), img);
    }

    #[test]
    fn header_round_trip_and_layout() {
        let h = ContainerHeader {
            width: 0x0102_0304,
            height: 512,
            channels: 1,
            bytes_per_channel: 2,
            flags: FLAG_FRACTAL | FLAG_DEFLATE,
        };
        let bytes = h.to_bytes();
        assert_eq!(&bytes[5..9], &[1, 2, 3, 4]);
        assert_eq!(&bytes[9..13], &[0, 0, 2, 0]);
        assert_eq!(ContainerHeader::parse(&bytes), Ok(h));
    }

    #[test]
    fn header_errors() {
        let good = ContainerHeader::for_image(
            &ImageBuffer::filled(3, 3, 0).unwrap(),
            &PipelineConfig::canonical(),
        )
        .to_bytes();
        let with = |i: usize, v: u8| {
            let mut b = good;
            b[i] = v;
            ContainerHeader::parse(&b)
        };
        assert_eq!(with(3, b'x'), Err(Error::BadMagic(*b"pacx")));
        assert_eq!(with(4, 2), Err(Error::UnsupportedVersion(2)));
        assert_eq!(with(15, 0b1000_0111), Err(Error::BadFlags(0b1000_0111)));
        assert_eq!(with(13, 3).unwrap_err().name(), "UnsupportedFormat");
        assert_eq!(with(14, 1).unwrap_err().name(), "UnsupportedFormat");
        assert_eq!(with(8, 0).unwrap_err().name(), "ZeroDimension");
        assert_eq!(
            ContainerHeader::parse(b"pac"),
            Err(Error::BadMagic(*b"pac\0"))
        );
        assert_eq!(
            ContainerHeader::parse(b"pact\x01"),
            Err(Error::TruncatedStream)
        );
    }

    #[test]
    fn constant_image_compresses() {
        let img = ImageBuffer::filled(64, 64, 1000).unwrap();
        let bytes = compact_encode(&img, &PipelineConfig::canonical()).unwrap();
        assert!(bytes.len() < 8192, "{}", bytes.len());
        assert_eq!(compact_decode(&bytes).unwrap(), img);
    }

    #[test]
    fn truncated_payload_is_an_error() {
        let samples = (0..32 * 32).map(|i| ((i * 37) % 4096) as u16).collect();
        let img = ImageBuffer::new(32, 32, samples).unwrap();
        for config in [
            PipelineConfig::canonical(),
            PipelineConfig::canonical().with_deflate(false),
        ] {
            let bytes = compact_encode(&img, &config).unwrap();
            let cut = &bytes[..bytes.len() - 5];
            let err = compact_decode(cut).unwrap_err();
            assert!(
                matches!(err.name(), "InflateError" | "TruncatedStream"),
                "{err:?}"
            );
        }
    }

    #[test]
    fn deflate_round_trips() {
        assert_eq!(
            deflate_unwrap(&deflate_wrap(&[])).unwrap(),
            Vec::<u8>::new()
        );
        let zeros = vec![0u8; 1 << 20];
        let packed = deflate_wrap(&zeros);
        assert!(packed.len() < 4096, "{}", packed.len());
        assert_eq!(deflate_unwrap(&packed).unwrap(), zeros);
        let noise: Vec<u8> = (0..5000u32)
            .map(|i| (i.wrapping_mul(2_654_435_761) >> 13) as u8)
            .collect();
        assert_eq!(deflate_unwrap(&deflate_wrap(&noise)).unwrap(), noise);
    }

    #[test]
    fn inflate_rejects_junk_and_trailing_bytes() {
        assert_eq!(
            deflate_unwrap(&[0xFF, 0xFF, 0xFF]).unwrap_err().name(),
            "InflateError"
        );
        let mut packed = deflate_wrap(b"hello hello hello");
        packed.push(0);
        assert_eq!(
            deflate_unwrap(&packed).unwrap_err().name(),
            "TrailingGarbage"
        );
        let packed = deflate_wrap(&[7u8; 100]);
        assert_eq!(
            inflate_limited(&packed, 99).unwrap_err().name(),
            "InflateError"
        );
        assert_eq!(inflate_limited(&packed, 100).unwrap(), vec![7u8; 100]);
    }

    #[test]
    fn flags_follow_config() {
        let img = ImageBuffer::filled(4, 4, 1).unwrap();
        let c = PipelineConfig::canonical().with_segmentation(false);
        let bytes = compact_encode(&img, &c).unwrap();
        assert_eq!(bytes[15], FLAG_FRACTAL | FLAG_DEFLATE);
        let c = PipelineConfig::canonical()
            .with_fractal(false)
            .with_deflate(false)
            .with_qoi_short_deltas(false);
        let bytes = compact_encode(&img, &c).unwrap();
        assert_eq!(bytes[15], FLAG_SEGMENTATION);
        // no short deltas: two bytes per pixel
        assert_eq!(bytes.len(), HEADER_LEN + 32);
        assert_eq!(compact_decode(&bytes).unwrap(), img);
    }
}
