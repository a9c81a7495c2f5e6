use compact_core::ImageBuffer;

use crate::error::{BenchError, Result};

/// Uncompressed over compressed size.
pub fn compression_ratio(raw: usize, compressed: usize) -> Result<f64> {
    if raw == 0 || compressed == 0 {
        return Err(BenchError::ZeroSize { raw, compressed });
    }
    Ok(raw as f64 / compressed as f64)
}

/// Shannon entropy of the sample-value histogram in bits per sample.
pub fn entropy(img: &ImageBuffer) -> Result<f64> {
    entropy_base(img, 2.0)
}

pub fn entropy_base(img: &ImageBuffer, base: f64) -> Result<f64> {
    let samples = img.samples();
    if samples.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    let mut hist = vec![0u64; usize::from(u16::MAX) + 1];
    for &s in samples {
        hist[usize::from(s)] += 1;
    }
    let n = samples.len() as f64;
    // p * log2(1/p) keeps a single-symbol histogram at exactly +0.0
    let bits: f64 = hist
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * (n / c as f64).log2()
        })
        .sum();
    Ok(if base == 2.0 {
        bits
    } else {
        bits / base.log2()
    })
}
