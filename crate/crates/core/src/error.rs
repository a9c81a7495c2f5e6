use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the codec, its parsers and its baselines can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // image
    #[error("expected {expected} samples, found {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("sample value {value} does not fit in 12 bits")]
    SampleOverflow { value: u32 },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("image dimensions must be positive, got {width}x{height}")]
    ZeroDimension { width: u64, height: u64 },

    // pgm
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("PGM maxval {0} outside [256, 65535]")]
    MaxvalOutOfRange(u32),
    #[error("PGM pixel data holds {actual} bytes, {expected} required")]
    TruncatedPixelData { expected: usize, actual: usize },

    // segmentation
    #[error("delta {0} outside [-2047, 2048]")]
    DeltaOutOfRange(i32),
    #[error("input is empty")]
    EmptyInput,
    #[error("index {index} out of range for {len} blocks")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("meshing requires two full 16-pixel blocks")]
    PartialBlock,

    // token stream
    #[error("invalid emission plan: {0}")]
    InvalidPlan(String),
    #[error("reserved tag byte {byte:#04x} at offset {offset}")]
    ReservedTag { offset: usize, byte: u8 },
    #[error("mesh flag byte {byte:#04x} at offset {offset} inside a pixel run")]
    MisplacedMeshFlag { offset: usize, byte: u8 },
    #[error("token stream ends mid-token or before all pixels were decoded")]
    TruncatedStream,
    #[error("mesh offset code {offset_code} from block {block} has no full partner block")]
    OffsetOutOfRange { block: usize, offset_code: u8 },
    #[error("{remaining} bytes left after the last pixel")]
    TrailingGarbage { remaining: usize },

    // container
    #[error("bad magic {0:02x?}, expected \"pact\"")]
    BadMagic([u8; 4]),
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),
    #[error("reserved flag bits set in {0:#010b}")]
    BadFlags(u8),
    #[error("DEFLATE stream error: {0}")]
    InflateError(String),
    #[error("decoded {actual} pixels, header declares {expected}")]
    PixelCountMismatch { expected: usize, actual: usize },
    #[error("unsupported pipeline configuration: {0}")]
    UnsupportedConfig(String),

    // dicom
    #[error("missing \"DICM\" marker at offset 128")]
    NotDicom,
    #[error("unsupported transfer syntax {0}")]
    UnsupportedTransferSyntax(String),
    #[error("required tag ({group:04X},{element:04X}) not found")]
    MissingTag { group: u16, element: u16 },
    #[error("pixel data holds {actual} bytes, {expected} expected")]
    PixelLengthMismatch { expected: usize, actual: usize },
    #[error("malformed DICOM data: {0}")]
    MalformedDicom(String),

    // rle
    #[error("PackBits run exceeds the available input")]
    TruncatedRun,
    #[error("RLE segment decodes to {actual} bytes, {expected} expected")]
    LengthMismatch { expected: usize, actual: usize },
}

impl Error {
    /// Stable variant name, used for diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::SampleOverflow { .. } => "SampleOverflow",
            Error::UnsupportedFormat(_) => "UnsupportedFormat",
            Error::ZeroDimension { .. } => "ZeroDimension",
            Error::MalformedHeader(_) => "MalformedHeader",
            Error::MaxvalOutOfRange(_) => "MaxvalOutOfRange",
            Error::TruncatedPixelData { .. } => "TruncatedPixelData",
            Error::DeltaOutOfRange(_) => "DeltaOutOfRange",
            Error::EmptyInput => "EmptyInput",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::PartialBlock => "PartialBlock",
            Error::InvalidPlan(_) => "InvalidPlan",
            Error::ReservedTag { .. } => "ReservedTag",
            Error::MisplacedMeshFlag { .. } => "MisplacedMeshFlag",
            Error::TruncatedStream => "TruncatedStream",
            Error::OffsetOutOfRange { .. } => "OffsetOutOfRange",
            Error::TrailingGarbage { .. } => "TrailingGarbage",
            Error::BadMagic(_) => "BadMagic",
            Error::UnsupportedVersion(_) => "UnsupportedVersion",
            Error::BadFlags(_) => "BadFlags",
            Error::InflateError(_) => "InflateError",
            Error::PixelCountMismatch { .. } => "PixelCountMismatch",
            Error::UnsupportedConfig(_) => "UnsupportedConfig",
            Error::NotDicom => "NotDicom",
            Error::UnsupportedTransferSyntax(_) => "UnsupportedTransferSyntax",
            Error::MissingTag { .. } => "MissingTag",
            Error::PixelLengthMismatch { .. } => "PixelLengthMismatch",
            Error::MalformedDicom(_) => "MalformedDicom",
            Error::TruncatedRun => "TruncatedRun",
            Error::LengthMismatch { .. } => "LengthMismatch",
        }
    }
}
