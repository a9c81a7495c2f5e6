//! Lossless compression for 12-bit monochrome medical images.
//!
//! The encoder walks the image along a generalized Hilbert curve, cuts the
//! resulting pixel stream into 16-pixel blocks, interlaces hard-to-code
//! blocks with a forward partner when that shortens the token stream,
//! writes one- or two-byte delta tokens, and finishes with raw DEFLATE.
//!
//! ```
//! use compact_core::{compact_decode, compact_encode, ImageBuffer, PipelineConfig};
//!
//! let img = ImageBuffer::new(3, 2, vec![0, 10, 20, 4095, 4000, 3990]).unwrap();
//! let packed = compact_encode(&img, &PipelineConfig::canonical()).unwrap();
//! assert_eq!(compact_decode(&packed).unwrap(), img);
//! ```

pub mod config;
pub mod container;
pub mod delta;
pub mod dicom;
mod error;
pub mod image;
pub mod rle;
pub mod scan;
pub mod segment;

pub use config::PipelineConfig;
pub use container::{
    compact_decode, compact_encode, deflate_unwrap, deflate_wrap, ContainerHeader,
};
pub use dicom::{parse_dicom, sniff_format, DicomImageMeta, Format};
pub use error::{Error, Result};
pub use image::{read_pgm16, validate_image, write_pgm16, ImageBuffer};
pub use scan::{flatten, generate_scan, unflatten, ScanOrder, Traversal};
pub use segment::{plan_segmentation, EmissionPlan, PlanItem};
