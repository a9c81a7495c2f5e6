//! Minimal DICOM Part 10 writer for test corpora and fuzz seeds.

use compact_core::dicom::{EXPLICIT_VR_LITTLE_ENDIAN, IMPLICIT_VR_LITTLE_ENDIAN};
use compact_core::ImageBuffer;

fn long_length(vr: &[u8; 2]) -> bool {
    matches!(vr, b"OB" | b"OW" | b"OF" | b"SQ" | b"UT" | b"UN")
}

struct Writer {
    out: Vec<u8>,
    explicit: bool,
}

impl Writer {
    fn element(&mut self, group: u16, element: u16, vr: &[u8; 2], value: &[u8]) {
        let mut value = value.to_vec();
        if value.len() % 2 == 1 {
            value.push(if vr == b"UI" { 0 } else { b' ' });
        }
        self.out.extend_from_slice(&group.to_le_bytes());
        self.out.extend_from_slice(&element.to_le_bytes());
        if self.explicit || group == 0x0002 {
            self.out.extend_from_slice(vr);
            if long_length(vr) {
                self.out.extend_from_slice(&[0, 0]);
                self.out
                    .extend_from_slice(&(value.len() as u32).to_le_bytes());
            } else {
                self.out
                    .extend_from_slice(&(value.len() as u16).to_le_bytes());
            }
        } else {
            self.out
                .extend_from_slice(&(value.len() as u32).to_le_bytes());
        }
        self.out.extend_from_slice(&value);
    }

    fn us(&mut self, group: u16, element: u16, v: u16) {
        self.element(group, element, b"US", &v.to_le_bytes());
    }
}

/// Single-frame 12-bit MONOCHROME2 slice. Dimensions must fit in u16.
pub fn write_dicom(img: &ImageBuffer, explicit_vr: bool) -> Vec<u8> {
    let syntax = if explicit_vr {
        EXPLICIT_VR_LITTLE_ENDIAN
    } else {
        IMPLICIT_VR_LITTLE_ENDIAN
    };
    let mut w = Writer {
        out: vec![0; 128],
        explicit: explicit_vr,
    };
    w.out.extend_from_slice(b"DICM");
    w.element(0x0002, 0x0010, b"UI", syntax.as_bytes());
    w.element(0x0008, 0x0060, b"CS", b"CT");
    w.us(0x0028, 0x0002, 1);
    w.element(0x0028, 0x0004, b"CS", b"MONOCHROME2");
    w.us(0x0028, 0x0010, img.height() as u16);
    w.us(0x0028, 0x0011, img.width() as u16);
    w.us(0x0028, 0x0100, 16);
    w.us(0x0028, 0x0101, 12);
    w.us(0x0028, 0x0102, 11);
    w.us(0x0028, 0x0103, 0);
    let data: Vec<u8> = img.samples().iter().flat_map(|s| s.to_le_bytes()).collect();
    w.element(0x7FE0, 0x0010, b"OW", &data);
    w.out
}
