//! `compact` command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use compact_core::container::HEADER_LEN;
use compact_core::{compact_decode, compact_encode, write_pgm16, ContainerHeader, PipelineConfig};

use crate::error::{BenchError, Result};
use crate::harness::{
    ablate_inputs, bench_inputs, default_codecs, load_image, run_ablation, run_bench, summarize,
    write_ablation_csv, write_bench_csv, BenchInput, Codec,
};
use crate::phantom::phantom_set;

#[derive(Debug, Parser)]
#[command(
    name = "compact",
    version,
    about = "Lossless 12-bit medical image codec"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scan in raster order instead of along the curve
    #[arg(long, global = true)]
    no_fractal: bool,
    /// Skip block meshing
    #[arg(long, global = true)]
    no_segmentation: bool,
    /// Code every delta as a two-byte token
    #[arg(long, global = true)]
    no_qoi: bool,
    /// Store tokens without DEFLATE
    #[arg(long, global = true)]
    no_deflate: bool,
    /// Write the report here (bench, ablate)
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// First phantom seed (bench, ablate)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compress a PGM or DICOM slice into a pact file
    Encode { input: PathBuf, output: PathBuf },
    /// Expand a pact file into a 16-bit PGM
    Decode { input: PathBuf, output: PathBuf },
    /// Check that a pact file reproduces the original exactly
    Verify { original: PathBuf, packed: PathBuf },
    /// Print a pact header
    Info { input: PathBuf },
    /// Compare codecs over a corpus
    Bench {
        /// Comma-separated: compact, deflate_raw, rle, external:EXT
        #[arg(long, value_delimiter = ',', default_value = "compact,deflate_raw,rle")]
        codecs: Vec<String>,
        /// Add this many synthetic phantoms to the corpus
        #[arg(long, default_value_t = 0)]
        phantoms: usize,
        /// Phantom edge length
        #[arg(long, default_value_t = 256)]
        size: u32,
        inputs: Vec<PathBuf>,
    },
    /// Mean ratio with each pipeline stage removed in turn
    Ablate {
        #[arg(long, default_value_t = 0)]
        phantoms: usize,
        #[arg(long, default_value_t = 256)]
        size: u32,
        inputs: Vec<PathBuf>,
    },
}

impl Cli {
    fn pipeline(&self) -> PipelineConfig {
        PipelineConfig::canonical()
            .with_fractal(!self.no_fractal)
            .with_segmentation(!self.no_segmentation)
            .with_qoi_short_deltas(!self.no_qoi)
            .with_deflate(!self.no_deflate)
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| BenchError::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| BenchError::io(path, e))
}

fn print(out: &mut dyn Write, line: std::fmt::Arguments<'_>) -> Result<()> {
    writeln!(out, "{line}").map_err(|e| BenchError::io("<stdout>", e))
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", e.name());
            1
        }
    }
}

fn phantom_inputs(count: usize, size: u32, seed: u64) -> Result<Vec<BenchInput>> {
    Ok(phantom_set(count, size, size, seed)?
        .into_iter()
        .map(|(id, img)| BenchInput::new(id, img))
        .collect())
}

fn report_skipped(err: &mut dyn Write, skipped: &[(String, BenchError)]) {
    for (id, e) in skipped {
        let _ = writeln!(err, "skipped {id}: {}: {e}", e.name());
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Encode { input, output } => {
            let img = load_image(input)?;
            let packed = compact_encode(&img, &cli.pipeline())?;
            write(output, &packed)?;
            print(
                out,
                format_args!(
                    "{} -> {}: {} -> {} bytes",
                    input.display(),
                    output.display(),
                    img.raw_size(),
                    packed.len()
                ),
            )
        }
        Command::Decode { input, output } => {
            let img = compact_decode(&read(input)?)?;
            write(output, &write_pgm16(&img)?)?;
            print(
                out,
                format_args!(
                    "{} -> {}: {}x{}",
                    input.display(),
                    output.display(),
                    img.width(),
                    img.height()
                ),
            )
        }
        Command::Verify { original, packed } => {
            let img = load_image(original)?;
            let back = compact_decode(&read(packed)?)?;
            if back != img {
                return Err(BenchError::LosslessFailure {
                    file: packed.display().to_string(),
                    codec: Codec::Compact.to_string(),
                });
            }
            print(out, format_args!("ok: {} samples identical", img.len()))
        }
        Command::Info { input } => {
            let bytes = read(input)?;
            let h = ContainerHeader::parse(&bytes)?;
            print(out, format_args!("width: {}", h.width))?;
            print(out, format_args!("height: {}", h.height))?;
            print(out, format_args!("channels: {}", h.channels))?;
            print(
                out,
                format_args!("bytes_per_channel: {}", h.bytes_per_channel),
            )?;
            print(out, format_args!("flags: {:#05b}", h.flags))?;
            print(out, format_args!("fractal: {}", h.fractal()))?;
            print(out, format_args!("segmentation: {}", h.segmentation()))?;
            print(out, format_args!("deflate: {}", h.deflate()))?;
            print(
                out,
                format_args!("payload_bytes: {}", bytes.len() - HEADER_LEN),
            )
        }
        Command::Bench {
            codecs,
            phantoms,
            size,
            inputs,
        } => {
            let codecs = if codecs.is_empty() {
                default_codecs()
            } else {
                codecs
                    .iter()
                    .map(|c| c.parse())
                    .collect::<Result<Vec<Codec>>>()?
            };
            let mut report = run_bench(inputs, &codecs, None)?;
            if *phantoms > 0 {
                let synthetic =
                    bench_inputs(&phantom_inputs(*phantoms, *size, cli.seed)?, &codecs)?;
                report.records.extend(synthetic.records);
                report.skipped.extend(synthetic.skipped);
                report = summarize(report, &codecs);
            }
            report_skipped(err, &report.skipped);
            match &cli.csv {
                Some(path) => {
                    let file = std::fs::File::create(path).map_err(|e| BenchError::io(path, e))?;
                    write_bench_csv(file, &codecs, &report)
                }
                None => write_bench_csv(out, &codecs, &report),
            }
        }
        Command::Ablate {
            phantoms,
            size,
            inputs,
        } => {
            let report = if *phantoms > 0 {
                let mut all = phantom_inputs(*phantoms, *size, cli.seed)?;
                for path in inputs {
                    match load_image(path) {
                        Ok(img) => all.push(BenchInput::new(path.display().to_string(), img)),
                        Err(e) => report_skipped(err, &[(path.display().to_string(), e)]),
                    }
                }
                ablate_inputs(&all)?
            } else {
                run_ablation(inputs, None)?
            };
            report_skipped(err, &report.skipped);
            match &cli.csv {
                Some(path) => {
                    let file = std::fs::File::create(path).map_err(|e| BenchError::io(path, e))?;
                    write_ablation_csv(file, &report)
                }
                None => write_ablation_csv(out, &report),
            }
        }
    }
}
