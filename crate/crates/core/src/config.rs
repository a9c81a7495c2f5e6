use crate::error::{Error, Result};

/// Pixels per segmentation block. Fixed by the token format.
pub const BLOCK_SIZE: usize = 16;
/// Unconsumed blocks a mesh flag can reach forward; 6 offset bits.
pub const SEARCH_WINDOW: usize = 64;
/// A block is difficult when its large-delta count exceeds this.
pub const DIFFICULTY_THRESHOLD: usize = BLOCK_SIZE / 2;

/// Stage toggles and segmentation parameters for one encode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PipelineConfig {
    pub fractal_enabled: bool,
    pub segmentation_enabled: bool,
    pub deflate_enabled: bool,
    pub qoi_short_deltas_enabled: bool,
    pub block_size: usize,
    pub search_window: usize,
    pub difficulty_threshold: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::canonical()
    }
}

impl PipelineConfig {
    /// Every stage on, 16-pixel blocks, 64-block window, threshold 8.
    pub const fn canonical() -> Self {
        Self {
            fractal_enabled: true,
            segmentation_enabled: true,
            deflate_enabled: true,
            qoi_short_deltas_enabled: true,
            block_size: BLOCK_SIZE,
            search_window: SEARCH_WINDOW,
            difficulty_threshold: DIFFICULTY_THRESHOLD,
        }
    }

    pub const fn with_fractal(mut self, on: bool) -> Self {
        self.fractal_enabled = on;
        self
    }

    pub const fn with_segmentation(mut self, on: bool) -> Self {
        self.segmentation_enabled = on;
        self
    }

    pub const fn with_deflate(mut self, on: bool) -> Self {
        self.deflate_enabled = on;
        self
    }

    pub const fn with_qoi_short_deltas(mut self, on: bool) -> Self {
        self.qoi_short_deltas_enabled = on;
        self
    }

    /// The decoder assumes 16-pixel blocks and 6-bit offsets, so only the
    /// search window (up to 64) and threshold may be narrowed.
    pub fn validate(&self) -> Result<()> {
        if self.block_size != BLOCK_SIZE {
            return Err(Error::UnsupportedConfig(format!(
                "block size must be {BLOCK_SIZE}, got {}",
                self.block_size
            )));
        }
        if !(1..=SEARCH_WINDOW).contains(&self.search_window) {
            return Err(Error::UnsupportedConfig(format!(
                "search window must be in 1..={SEARCH_WINDOW}, got {}",
                self.search_window
            )));
        }
        if self.difficulty_threshold > BLOCK_SIZE {
            return Err(Error::UnsupportedConfig(format!(
                "difficulty threshold must be at most {BLOCK_SIZE}, got {}",
                self.difficulty_threshold
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_values() {
        let c = PipelineConfig::default();
        assert_eq!(
            (c.block_size, c.search_window, c.difficulty_threshold),
            (16, 64, 8)
        );
        assert!(c.fractal_enabled && c.segmentation_enabled && c.deflate_enabled);
        assert!(c.qoi_short_deltas_enabled);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn every_toggle_combination_is_legal() {
        for bits in 0..16u8 {
            let c = PipelineConfig::canonical()
                .with_fractal(bits & 1 != 0)
                .with_segmentation(bits & 2 != 0)
                .with_deflate(bits & 4 != 0)
                .with_qoi_short_deltas(bits & 8 != 0);
            assert!(c.validate().is_ok());
        }
    }

    #[test]
    fn rejects_other_block_sizes() {
        let c = PipelineConfig {
            block_size: 8,
            ..PipelineConfig::canonical()
        };
        assert_eq!(c.validate().unwrap_err().name(), "UnsupportedConfig");
        let c = PipelineConfig {
            search_window: 65,
            ..PipelineConfig::canonical()
        };
        assert!(c.validate().is_err());
    }
}
