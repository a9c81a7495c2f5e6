//! Minimal DICOM Part 10 reader for uncompressed 12-bit monochrome slices.
//!
//! Supported: a 128-byte preamble and `DICM`, an explicit VR little endian
//! file meta group, and an explicit or implicit VR little endian dataset
//! whose pixel data is 16 bits allocated, 12 bits stored, unsigned, one
//! sample per pixel and one frame. Sequences are skipped without being
//! interpreted.

use crate::error::{Error, Result};
use crate::image::{ImageBuffer, MAX_SAMPLE};

pub const IMPLICIT_VR_LITTLE_ENDIAN: &str = "1.2.840.10008.1.2";
pub const EXPLICIT_VR_LITTLE_ENDIAN: &str = "1.2.840.10008.1.2.1";

const PREAMBLE_LEN: usize = 128;
const MAX_SEQUENCE_DEPTH: usize = 32;

const TRANSFER_SYNTAX: Tag = Tag(0x0002, 0x0010);
const SAMPLES_PER_PIXEL: Tag = Tag(0x0028, 0x0002);
const PHOTOMETRIC: Tag = Tag(0x0028, 0x0004);
const NUMBER_OF_FRAMES: Tag = Tag(0x0028, 0x0008);
const ROWS: Tag = Tag(0x0028, 0x0010);
const COLUMNS: Tag = Tag(0x0028, 0x0011);
const BITS_ALLOCATED: Tag = Tag(0x0028, 0x0100);
const BITS_STORED: Tag = Tag(0x0028, 0x0101);
const PIXEL_REPRESENTATION: Tag = Tag(0x0028, 0x0103);
const PIXEL_DATA: Tag = Tag(0x7FE0, 0x0010);
const ITEM: Tag = Tag(0xFFFE, 0xE000);
const ITEM_DELIMITER: Tag = Tag(0xFFFE, 0xE00D);
const SEQUENCE_DELIMITER: Tag = Tag(0xFFFE, 0xE0DD);

const UNDEFINED_LENGTH: u32 = 0xFFFF_FFFF;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag(pub u16, pub u16);

impl Tag {
    fn missing(self) -> Error {
        Error::MissingTag {
            group: self.0,
            element: self.1,
        }
    }
}

/// One data element header plus its value bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DicomElement<'a> {
    pub tag: Tag,
    /// `None` for implicit VR datasets and item/delimiter tags.
    pub vr: Option<[u8; 2]>,
    pub length: u32,
    /// Empty when `length` is undefined.
    pub value: &'a [u8],
}

impl DicomElement<'_> {
    fn u16_value(&self) -> Result<u16> {
        match self.value {
            [a, b, ..] => Ok(u16::from_le_bytes([*a, *b])),
            _ => Err(Error::MalformedDicom(format!(
                "({:04X},{:04X}) too short for US",
                self.tag.0, self.tag.1
            ))),
        }
    }

    fn text_value(&self) -> String {
        String::from_utf8_lossy(self.value)
            .trim_end_matches(['\0', ' '])
            .trim_start()
            .to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DicomImageMeta {
    pub rows: u16,
    pub columns: u16,
    pub bits_allocated: u16,
    pub bits_stored: u16,
    pub pixel_representation: u16,
    pub transfer_syntax: String,
}

/// What kind of file a byte buffer holds, judged by its magic bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Dicom,
    Pgm,
    Pact,
    Unknown,
}

pub fn sniff_format(bytes: &[u8]) -> Format {
    if bytes.get(PREAMBLE_LEN..PREAMBLE_LEN + 4) == Some(b"DICM") {
        Format::Dicom
    } else if bytes.starts_with(b"pact") {
        Format::Pact
    } else if bytes.starts_with(b"P5") {
        Format::Pgm
    } else {
        Format::Unknown
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    explicit: bool,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| {
                Error::MalformedDicom(format!("{n} bytes needed at offset {}", self.pos))
            })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u16(&mut self) -> Result<u16> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn peek_group(&self) -> Option<u16> {
        self.bytes
            .get(self.pos..self.pos + 2)
            .map(|b| u16::from_le_bytes([b[0], b[1]]))
    }

    /// Read an element header and, for defined lengths, its value.
    fn element(&mut self) -> Result<DicomElement<'a>> {
        let tag = Tag(self.u16()?, self.u16()?);
        let (vr, length) = if tag.0 == 0xFFFE || !self.explicit {
            (None, self.u32()?)
        } else {
            let vr: [u8; 2] = self.take(2)?.try_into().expect("2 bytes");
            if !vr.iter().all(u8::is_ascii_uppercase) {
                return Err(Error::MalformedDicom(format!(
                    "invalid VR {vr:02x?} for ({:04X},{:04X})",
                    tag.0, tag.1
                )));
            }
            let length = if has_long_length(vr) {
                self.take(2)?;
                self.u32()?
            } else {
                u32::from(self.u16()?)
            };
            (Some(vr), length)
        };
        let value = if length == UNDEFINED_LENGTH {
            &[][..]
        } else {
            self.take(length as usize)?
        };
        Ok(DicomElement {
            tag,
            vr,
            length,
            value,
        })
    }

    /// Skip the items of an undefined-length sequence, up to and including
    /// its sequence delimiter.
    fn skip_sequence(&mut self, depth: usize) -> Result<()> {
        if depth > MAX_SEQUENCE_DEPTH {
            return Err(Error::MalformedDicom("sequences nested too deeply".into()));
        }
        loop {
            let el = self.element()?;
            match el.tag {
                SEQUENCE_DELIMITER => return Ok(()),
                ITEM if el.length == UNDEFINED_LENGTH => self.skip_item(depth + 1)?,
                ITEM => {}
                other => {
                    return Err(Error::MalformedDicom(format!(
                        "({:04X},{:04X}) inside a sequence",
                        other.0, other.1
                    )))
                }
            }
        }
    }

    fn skip_item(&mut self, depth: usize) -> Result<()> {
        loop {
            let el = self.element()?;
            if el.tag == ITEM_DELIMITER {
                return Ok(());
            }
            if el.length == UNDEFINED_LENGTH {
                self.skip_sequence(depth + 1)?;
            }
        }
    }
}

fn has_long_length(vr: [u8; 2]) -> bool {
    matches!(
        &vr,
        b"OB"
            | b"OD"
            | b"OF"
            | b"OL"
            | b"OV"
            | b"OW"
            | b"SQ"
            | b"SV"
            | b"UC"
            | b"UN"
            | b"UR"
            | b"UT"
            | b"UV"
    )
}

#[derive(Default)]
struct Collected<'a> {
    rows: Option<u16>,
    columns: Option<u16>,
    bits_allocated: Option<u16>,
    bits_stored: Option<u16>,
    pixel_representation: Option<u16>,
    samples_per_pixel: Option<u16>,
    photometric: Option<String>,
    frames: Option<String>,
    pixel_data: Option<&'a [u8]>,
}

/// Extract image metadata and the 12-bit pixel grid from a DICOM file.
pub fn parse_dicom(bytes: &[u8]) -> Result<(DicomImageMeta, ImageBuffer)> {
    if sniff_format(bytes) != Format::Dicom {
        return Err(Error::NotDicom);
    }
    let mut reader = Reader {
        bytes,
        pos: PREAMBLE_LEN + 4,
        explicit: true,
    };

    // file meta information, always explicit VR little endian
    let mut transfer_syntax = None;
    let mut last = None;
    while reader.peek_group() == Some(0x0002) {
        let el = reader.element()?;
        check_order(&mut last, el.tag)?;
        if el.length == UNDEFINED_LENGTH {
            return Err(Error::MalformedDicom(
                "undefined length in file meta".into(),
            ));
        }
        if el.tag == TRANSFER_SYNTAX {
            transfer_syntax = Some(el.text_value());
        }
    }
    let transfer_syntax = transfer_syntax.ok_or(TRANSFER_SYNTAX.missing())?;
    reader.explicit = match transfer_syntax.as_str() {
        EXPLICIT_VR_LITTLE_ENDIAN => true,
        IMPLICIT_VR_LITTLE_ENDIAN => false,
        _ => return Err(Error::UnsupportedTransferSyntax(transfer_syntax)),
    };

    let mut found = Collected::default();
    let mut last = None;
    while !reader.at_end() && found.pixel_data.is_none() {
        let el = reader.element()?;
        check_order(&mut last, el.tag)?;
        if el.length == UNDEFINED_LENGTH {
            if el.tag == PIXEL_DATA {
                return Err(Error::UnsupportedTransferSyntax(format!(
                    "{transfer_syntax} with encapsulated pixel data"
                )));
            }
            reader.skip_sequence(0)?;
            continue;
        }
        match el.tag {
            ROWS => found.rows = Some(el.u16_value()?),
            COLUMNS => found.columns = Some(el.u16_value()?),
            BITS_ALLOCATED => found.bits_allocated = Some(el.u16_value()?),
            BITS_STORED => found.bits_stored = Some(el.u16_value()?),
            PIXEL_REPRESENTATION => found.pixel_representation = Some(el.u16_value()?),
            SAMPLES_PER_PIXEL => found.samples_per_pixel = Some(el.u16_value()?),
            PHOTOMETRIC => found.photometric = Some(el.text_value()),
            NUMBER_OF_FRAMES => found.frames = Some(el.text_value()),
            PIXEL_DATA => found.pixel_data = Some(el.value),
            _ => {}
        }
    }

    let rows = found.rows.ok_or(ROWS.missing())?;
    let columns = found.columns.ok_or(COLUMNS.missing())?;
    let bits_allocated = found.bits_allocated.ok_or(BITS_ALLOCATED.missing())?;
    let bits_stored = found.bits_stored.ok_or(BITS_STORED.missing())?;
    let pixel_representation = found.pixel_representation.unwrap_or(0);
    let pixel_data = found.pixel_data.ok_or(PIXEL_DATA.missing())?;

    let unsupported = |what: String| Err(Error::UnsupportedFormat(what));
    if bits_allocated != 16 || bits_stored != 12 {
        return unsupported(format!(
            "{bits_stored} bits stored in {bits_allocated} allocated; need 12 in 16"
        ));
    }
    if pixel_representation != 0 {
        return unsupported("signed pixel representation".into());
    }
    if found.samples_per_pixel.is_some_and(|s| s != 1) {
        return unsupported("more than one sample per pixel".into());
    }
    if found
        .photometric
        .as_deref()
        .is_some_and(|p| !p.starts_with("MONOCHROME"))
    {
        return unsupported("photometric interpretation is not monochrome".into());
    }
    if found
        .frames
        .as_deref()
        .is_some_and(|f| f.parse::<u32>().map_or(true, |n| n > 1))
    {
        return unsupported("multi-frame object".into());
    }

    let expected = usize::from(rows) * usize::from(columns) * 2;
    if pixel_data.len() != expected {
        return Err(Error::PixelLengthMismatch {
            expected,
            actual: pixel_data.len(),
        });
    }
    let samples: Vec<u16> = pixel_data
        .chunks_exact(2)
        .map(|p| u16::from_le_bytes([p[0], p[1]]))
        .collect();
    if let Some(&value) = samples.iter().find(|&&s| s > MAX_SAMPLE) {
        return Err(Error::SampleOverflow {
            value: value.into(),
        });
    }
    let image = ImageBuffer::new(u32::from(columns), u32::from(rows), samples)?;
    Ok((
        DicomImageMeta {
            rows,
            columns,
            bits_allocated,
            bits_stored,
            pixel_representation,
            transfer_syntax,
        },
        image,
    ))
}

fn check_order(last: &mut Option<Tag>, tag: Tag) -> Result<()> {
    if last.is_some_and(|prev| tag <= prev) {
        return Err(Error::MalformedDicom(format!(
            "({:04X},{:04X}) out of order",
            tag.0, tag.1
        )));
    }
    *last = Some(tag);
    Ok(())
}
