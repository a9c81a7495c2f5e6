//! Generalized Hilbert ("gilbert") traversal of arbitrary rectangles.
//!
//! The recursion follows Jakub Červený's gilbert2d: split the longer side,
//! recurse into rotated and reflected sub-rectangles, and prefer even splits
//! so that only odd-sized leaves ever need a diagonal step.

use crate::error::{Error, Result};
use crate::image::{pixel_count, ImageBuffer};

/// A bijective visiting order over a `width x height` grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScanOrder {
    width: u32,
    height: u32,
    coords: Vec<(u32, u32)>,
}

impl ScanOrder {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn coords(&self) -> &[(u32, u32)] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Row-major sample index for every step of the curve.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        let w = self.width as usize;
        self.coords
            .iter()
            .map(move |&(x, y)| y as usize * w + x as usize)
    }
}

/// Which traversal flattens an image into a pixel stream.
#[derive(Debug, Clone, Copy)]
pub enum Traversal<'a> {
    Raster,
    Curve(&'a ScanOrder),
}

pub fn generate_scan(width: u32, height: u32) -> Result<ScanOrder> {
    let n = pixel_count(width, height)?;
    let mut coords = Vec::with_capacity(n);
    let (w, h) = (i64::from(width), i64::from(height));
    if width >= height {
        gilbert(&mut coords, 0, 0, w, 0, 0, h);
    } else {
        gilbert(&mut coords, 0, 0, 0, h, w, 0);
    }
    debug_assert_eq!(coords.len(), n);
    Ok(ScanOrder {
        width,
        height,
        coords,
    })
}

/// Fill the rectangle spanned from `(x, y)` by the major axis `(ax, ay)`
/// and the minor axis `(bx, by)`.
#[allow(clippy::too_many_arguments)]
fn gilbert(out: &mut Vec<(u32, u32)>, x: i64, y: i64, ax: i64, ay: i64, bx: i64, by: i64) {
    let w = (ax + ay).abs();
    let h = (bx + by).abs();
    let (dax, day) = (ax.signum(), ay.signum());
    let (dbx, dby) = (bx.signum(), by.signum());

    if h == 1 {
        out.extend((0..w).map(|i| ((x + i * dax) as u32, (y + i * day) as u32)));
        return;
    }
    if w == 1 {
        out.extend((0..h).map(|i| ((x + i * dbx) as u32, (y + i * dby) as u32)));
        return;
    }

    // floor division, as in the reference generator
    let (mut ax2, mut ay2) = (ax.div_euclid(2), ay.div_euclid(2));
    let (mut bx2, mut by2) = (bx.div_euclid(2), by.div_euclid(2));
    let w2 = (ax2 + ay2).abs();
    let h2 = (bx2 + by2).abs();

    if 2 * w > 3 * h {
        if w2 % 2 != 0 && w > 2 {
            ax2 += dax;
            ay2 += day;
        }
        // long rectangle: two halves along the major axis
        gilbert(out, x, y, ax2, ay2, bx, by);
        gilbert(out, x + ax2, y + ay2, ax - ax2, ay - ay2, bx, by);
    } else {
        if h2 % 2 != 0 && h > 2 {
            bx2 += dbx;
            by2 += dby;
        }
        // up, across, down
        gilbert(out, x, y, bx2, by2, ax2, ay2);
        gilbert(out, x + bx2, y + by2, ax, ay, bx - bx2, by - by2);
        gilbert(
            out,
            x + (ax - dax) + (bx2 - dbx),
            y + (ay - day) + (by2 - dby),
            -bx2,
            -by2,
            -(ax - ax2),
            -(ay - ay2),
        );
    }
}

/// Read the image's samples in traversal order.
pub fn flatten(img: &ImageBuffer, traversal: Traversal<'_>) -> Result<Vec<u16>> {
    match traversal {
        Traversal::Raster => Ok(img.samples().to_vec()),
        Traversal::Curve(order) => {
            check_dims(order, img.width(), img.height(), img.len())?;
            let samples = img.samples();
            Ok(order.indices().map(|i| samples[i]).collect())
        }
    }
}

/// Put a traversal-ordered stream back into row-major order.
pub fn unflatten(
    stream: &[u16],
    traversal: Traversal<'_>,
    width: u32,
    height: u32,
) -> Result<ImageBuffer> {
    let n = pixel_count(width, height)?;
    if stream.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: stream.len(),
        });
    }
    let samples = match traversal {
        Traversal::Raster => stream.to_vec(),
        Traversal::Curve(order) => {
            check_dims(order, width, height, n)?;
            let mut samples = vec![0u16; n];
            for (i, &s) in order.indices().zip(stream) {
                samples[i] = s;
            }
            samples
        }
    };
    ImageBuffer::new(width, height, samples)
}

fn check_dims(order: &ScanOrder, width: u32, height: u32, len: usize) -> Result<()> {
    if order.width != width || order.height != height {
        return Err(Error::DimensionMismatch {
            expected: order.len(),
            actual: len,
        });
    }
    Ok(())
}
