//! Corpus benchmark and ablation runs with CSV output.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use compact_core::{
    compact_decode, compact_encode, deflate_unwrap, deflate_wrap, parse_dicom, read_pgm16, rle,
    sniff_format, Format, ImageBuffer, PipelineConfig,
};

use crate::error::{BenchError, Result};
use crate::metrics::{compression_ratio, entropy};

/// Label of the per-codec mean row.
pub const SUMMARY_ID: &str = "MEAN";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Codec {
    Compact,
    /// DEFLATE over little-endian sample bytes, a stand-in for ZIP.
    DeflateRaw,
    Rle,
    /// Size of a pre-made sibling file with this extension.
    External(String),
}

impl Codec {
    pub fn name(&self) -> &str {
        match self {
            Codec::Compact => "compact",
            Codec::DeflateRaw => "deflate_raw",
            Codec::Rle => "rle",
            Codec::External(ext) => ext,
        }
    }
}

impl fmt::Display for Codec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Codec {
    type Err = BenchError;

    /// `compact`, `deflate_raw`, `rle`, or `external:EXT`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "compact" => Ok(Codec::Compact),
            "deflate_raw" => Ok(Codec::DeflateRaw),
            "rle" => Ok(Codec::Rle),
            _ => match s.strip_prefix("external:") {
                Some(ext) if !ext.is_empty() && ext.chars().all(|c| c.is_ascii_alphanumeric()) => {
                    Ok(Codec::External(ext.to_string()))
                }
                _ => Err(BenchError::UnknownCodec(s.to_string())),
            },
        }
    }
}

pub fn default_codecs() -> Vec<Codec> {
    vec![Codec::Compact, Codec::DeflateRaw, Codec::Rle]
}

#[derive(Debug, Clone)]
pub struct BenchInput {
    pub id: String,
    pub image: ImageBuffer,
    /// Sibling file sizes keyed by extension.
    pub external_sizes: BTreeMap<String, u64>,
}

impl BenchInput {
    pub fn new(id: impl Into<String>, image: ImageBuffer) -> Self {
        BenchInput {
            id: id.into(),
            image,
            external_sizes: BTreeMap::new(),
        }
    }
}

/// Read a PGM or DICOM slice.
pub fn load_image(path: &Path) -> Result<ImageBuffer> {
    let bytes = std::fs::read(path).map_err(|e| BenchError::io(path, e))?;
    match sniff_format(&bytes) {
        Format::Pgm => Ok(read_pgm16(&bytes)?),
        Format::Dicom => Ok(parse_dicom(&bytes)?.1),
        Format::Pact | Format::Unknown => Err(BenchError::UnrecognizedInput(path.to_path_buf())),
    }
}

pub fn load_input(path: &Path, codecs: &[Codec]) -> Result<BenchInput> {
    let mut input = BenchInput::new(path.display().to_string(), load_image(path)?);
    for codec in codecs {
        if let Codec::External(ext) = codec {
            if let Ok(meta) = std::fs::metadata(path.with_extension(ext)) {
                input.external_sizes.insert(ext.clone(), meta.len());
            }
        }
    }
    Ok(input)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodecResult {
    pub codec: Codec,
    /// `None` when an external file was not supplied.
    pub bytes: Option<usize>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub file: String,
    pub raw_size: usize,
    pub entropy_bits: f64,
    pub results: Vec<CodecResult>,
    pub lossless_verified: bool,
}

impl BenchRecord {
    pub fn ratio(&self, codec: &Codec) -> Option<f64> {
        self.results.iter().find(|r| &r.codec == codec)?.ratio
    }
}

#[derive(Debug, Default)]
pub struct BenchReport {
    /// Sorted by entropy, highest first.
    pub records: Vec<BenchRecord>,
    pub skipped: Vec<(String, BenchError)>,
    pub means: Vec<(Codec, Option<f64>)>,
}

impl BenchReport {
    pub fn mean(&self, codec: &Codec) -> Option<f64> {
        self.means.iter().find(|(c, _)| c == codec)?.1
    }
}

fn le_bytes(img: &ImageBuffer) -> Vec<u8> {
    img.samples().iter().flat_map(|s| s.to_le_bytes()).collect()
}

fn lossless(file: &str, codec: &Codec, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(BenchError::LosslessFailure {
            file: file.to_string(),
            codec: codec.to_string(),
        })
    }
}

/// Compress with `config`, decode, and compare; returns the container size.
pub fn compact_size(id: &str, img: &ImageBuffer, config: &PipelineConfig) -> Result<usize> {
    let packed = compact_encode(img, config)?;
    let ok = compact_decode(&packed).is_ok_and(|back| back == *img);
    lossless(id, &Codec::Compact, ok)?;
    Ok(packed.len())
}

pub fn measure(input: &BenchInput, codecs: &[Codec]) -> Result<BenchRecord> {
    let img = &input.image;
    let id = input.id.as_str();
    let raw_size = img.raw_size();
    let mut results = Vec::with_capacity(codecs.len());
    for codec in codecs {
        let bytes = match codec {
            Codec::Compact => Some(compact_size(id, img, &PipelineConfig::canonical())?),
            Codec::DeflateRaw => {
                let raw = le_bytes(img);
                let packed = deflate_wrap(&raw);
                lossless(id, codec, deflate_unwrap(&packed).is_ok_and(|b| b == raw))?;
                Some(packed.len())
            }
            Codec::Rle => {
                let packed = rle::rle_encode(img)?;
                let ok =
                    rle::rle_decode(&packed, img.width(), img.height()).is_ok_and(|b| b == *img);
                lossless(id, codec, ok)?;
                Some(packed.len())
            }
            Codec::External(ext) => input.external_sizes.get(ext).map(|&n| n as usize),
        };
        let ratio = match bytes {
            Some(n) => Some(compression_ratio(raw_size, n)?),
            None => None,
        };
        results.push(CodecResult {
            codec: codec.clone(),
            bytes,
            ratio,
        });
    }
    Ok(BenchRecord {
        file: id.to_string(),
        raw_size,
        entropy_bits: entropy(img)?,
        results,
        lossless_verified: true,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Measure every input. Per-file errors are collected; a lossless
/// failure aborts the run.
pub fn bench_inputs(inputs: &[BenchInput], codecs: &[Codec]) -> Result<BenchReport> {
    let mut report = BenchReport::default();
    for input in inputs {
        match measure(input, codecs) {
            Ok(rec) => report.records.push(rec),
            Err(e) if e.is_fatal() => return Err(e),
            Err(e) => report.skipped.push((input.id.clone(), e)),
        }
    }
    Ok(summarize(report, codecs))
}

/// Sort records by entropy and recompute the per-codec means.
pub fn summarize(mut report: BenchReport, codecs: &[Codec]) -> BenchReport {
    report.records.sort_by(|a, b| {
        b.entropy_bits
            .total_cmp(&a.entropy_bits)
            .then_with(|| a.file.cmp(&b.file))
    });
    report.means = codecs
        .iter()
        .map(|c| {
            (
                c.clone(),
                mean(report.records.iter().filter_map(|r| r.ratio(c))),
            )
        })
        .collect();
    report
}

/// Benchmark files on disk and optionally write the CSV report.
pub fn run_bench(
    paths: &[PathBuf],
    codecs: &[Codec],
    csv_path: Option<&Path>,
) -> Result<BenchReport> {
    let mut report = BenchReport::default();
    for path in paths {
        let rec = load_input(path, codecs).and_then(|input| measure(&input, codecs));
        match rec {
            Ok(rec) => report.records.push(rec),
            Err(e) if e.is_fatal() => return Err(e),
            Err(e) => report.skipped.push((path.display().to_string(), e)),
        }
    }
    let report = summarize(report, codecs);
    if let Some(path) = csv_path {
        let file = std::fs::File::create(path).map_err(|e| BenchError::io(path, e))?;
        write_bench_csv(file, codecs, &report)?;
    }
    Ok(report)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Header, one row per record, then the mean row when there are records.
pub fn write_bench_csv<W: Write>(out: W, codecs: &[Codec], report: &BenchReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "file".to_string(),
        "raw_bytes".into(),
        "entropy_bits".into(),
    ];
    for c in codecs {
        header.push(format!("{c}_bytes"));
        header.push(format!("{c}_ratio"));
    }
    header.push("lossless".into());
    w.write_record(&header)?;

    for rec in &report.records {
        let mut row = vec![
            rec.file.clone(),
            rec.raw_size.to_string(),
            rec.entropy_bits.to_string(),
        ];
        for c in codecs {
            let r = rec.results.iter().find(|r| &r.codec == c);
            row.push(opt(r.and_then(|r| r.bytes)));
            row.push(opt(r.and_then(|r| r.ratio)));
        }
        row.push(rec.lossless_verified.to_string());
        w.write_record(&row)?;
    }

    if !report.records.is_empty() {
        let mut row = vec![SUMMARY_ID.to_string(), String::new(), String::new()];
        for c in codecs {
            row.push(String::new());
            row.push(opt(report.mean(c)));
        }
        row.push(
            report
                .records
                .iter()
                .all(|r| r.lossless_verified)
                .to_string(),
        );
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| BenchError::io("<csv>", e))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AblationConfig {
    NoExclusion,
    NoFractal,
    NoSegmentation,
    NoQoi,
    NoDeflate,
    NoCompression,
}

impl AblationConfig {
    pub const ALL: [AblationConfig; 6] = [
        AblationConfig::NoExclusion,
        AblationConfig::NoFractal,
        AblationConfig::NoSegmentation,
        AblationConfig::NoQoi,
        AblationConfig::NoDeflate,
        AblationConfig::NoCompression,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AblationConfig::NoExclusion => "NoExclusion",
            AblationConfig::NoFractal => "NoFractal",
            AblationConfig::NoSegmentation => "NoSegmentation",
            AblationConfig::NoQoi => "NoQOI",
            AblationConfig::NoDeflate => "NoDeflate",
            AblationConfig::NoCompression => "NoCompression",
        }
    }

    pub fn pipeline(self) -> PipelineConfig {
        let c = PipelineConfig::canonical();
        match self {
            AblationConfig::NoExclusion => c,
            AblationConfig::NoFractal => c.with_fractal(false),
            AblationConfig::NoSegmentation => c.with_segmentation(false),
            AblationConfig::NoQoi => c.with_qoi_short_deltas(false),
            AblationConfig::NoDeflate => c.with_deflate(false),
            AblationConfig::NoCompression => c
                .with_fractal(false)
                .with_segmentation(false)
                .with_qoi_short_deltas(false)
                .with_deflate(false),
        }
    }

    /// Ratio for one image. The all-off pipeline is still round-tripped,
    /// but its row is the uncompressed baseline and reports exactly 1.
    pub fn ratio(self, id: &str, img: &ImageBuffer) -> Result<f64> {
        let size = compact_size(id, img, &self.pipeline())?;
        match self {
            AblationConfig::NoCompression => compression_ratio(img.raw_size(), img.raw_size()),
            _ => compression_ratio(img.raw_size(), size),
        }
    }
}

impl fmt::Display for AblationConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub config: AblationConfig,
    pub mean_ratio: f64,
    pub files: usize,
}

#[derive(Debug, Default)]
pub struct AblationReport {
    pub rows: Vec<AblationRow>,
    pub skipped: Vec<(String, BenchError)>,
}

impl AblationReport {
    pub fn mean(&self, config: AblationConfig) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.config == config)
            .map(|r| r.mean_ratio)
    }
}

fn ablate_one(id: &str, img: &ImageBuffer) -> Result<[f64; 6]> {
    let mut ratios = [0.0; 6];
    for (slot, config) in ratios.iter_mut().zip(AblationConfig::ALL) {
        *slot = config.ratio(id, img)?;
    }
    Ok(ratios)
}

fn ablation_rows(per_file: &[[f64; 6]]) -> Result<Vec<AblationRow>> {
    if per_file.is_empty() {
        return Err(BenchError::NoInputs);
    }
    Ok(AblationConfig::ALL
        .iter()
        .enumerate()
        .map(|(i, &config)| AblationRow {
            config,
            mean_ratio: mean(per_file.iter().map(|r| r[i])).unwrap_or_default(),
            files: per_file.len(),
        })
        .collect())
}

pub fn ablate_inputs(inputs: &[BenchInput]) -> Result<AblationReport> {
    let mut report = AblationReport::default();
    let mut per_file = Vec::with_capacity(inputs.len());
    for input in inputs {
        match ablate_one(&input.id, &input.image) {
            Ok(r) => per_file.push(r),
            Err(e) if e.is_fatal() => return Err(e),
            Err(e) => report.skipped.push((input.id.clone(), e)),
        }
    }
    report.rows = ablation_rows(&per_file)?;
    Ok(report)
}

pub fn run_ablation(paths: &[PathBuf], csv_path: Option<&Path>) -> Result<AblationReport> {
    let mut report = AblationReport::default();
    let mut per_file = Vec::with_capacity(paths.len());
    for path in paths {
        let id = path.display().to_string();
        match load_image(path).and_then(|img| ablate_one(&id, &img)) {
            Ok(r) => per_file.push(r),
            Err(e) if e.is_fatal() => return Err(e),
            Err(e) => report.skipped.push((id, e)),
        }
    }
    report.rows = ablation_rows(&per_file)?;
    if let Some(path) = csv_path {
        let file = std::fs::File::create(path).map_err(|e| BenchError::io(path, e))?;
        write_ablation_csv(file, &report)?;
    }
    Ok(report)
}

pub fn write_ablation_csv<W: Write>(out: W, report: &AblationReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["config", "mean_ratio", "files"])?;
    for row in &report.rows {
        w.write_record([
            row.config.name().to_string(),
            row.mean_ratio.to_string(),
            row.files.to_string(),
        ])?;
    }
    w.flush().map_err(|e| BenchError::io("<csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codec_names_parse_back() {
        for c in [Codec::Compact, Codec::DeflateRaw, Codec::Rle] {
            assert_eq!(c.name().parse::<Codec>().unwrap(), c);
        }
        assert_eq!(
            "external:jp2".parse::<Codec>().unwrap(),
            Codec::External("jp2".into())
        );
        assert!("external:".parse::<Codec>().is_err());
        assert!("zip".parse::<Codec>().is_err());
    }

    #[test]
    fn all_on_is_canonical() {
        assert_eq!(
            AblationConfig::NoExclusion.pipeline(),
            PipelineConfig::canonical()
        );
    }

    #[test]
    fn no_compression_reports_one() {
        let img = ImageBuffer::new(4, 4, (0..16).map(|v| v * 200).collect()).unwrap();
        assert_eq!(AblationConfig::NoCompression.ratio("t", &img).unwrap(), 1.0);
    }

    #[test]
    fn records_sorted_by_entropy() {
        let inputs = vec![
            BenchInput::new("flat", ImageBuffer::filled(8, 8, 7).unwrap()),
            BenchInput::new("ramp", ImageBuffer::new(8, 8, (0..64).collect()).unwrap()),
            BenchInput::new(
                "two",
                ImageBuffer::new(8, 8, (0..64).map(|i| i % 2).collect()).unwrap(),
            ),
        ];
        let report = bench_inputs(&inputs, &default_codecs()).unwrap();
        let order: Vec<&str> = report.records.iter().map(|r| r.file.as_str()).collect();
        assert_eq!(order, ["ramp", "two", "flat"]);
        assert!(report.records.iter().all(|r| r.lossless_verified));
    }
}
