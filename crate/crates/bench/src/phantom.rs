//! Seeded synthetic slices: a soft-edged body ellipse with Gaussian
//! structures inside, low-amplitude noise, and an exactly black background.

use compact_core::image::MAX_SAMPLE;
use compact_core::ImageBuffer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;

/// Body profile below this is background.
const BODY_CUTOFF: f64 = 0.01;

#[derive(Debug, Clone, Copy)]
struct Ellipse {
    cx: f64,
    cy: f64,
    a: f64,
    b: f64,
    theta: f64,
    amplitude: f64,
    /// 1 gives a Gaussian, larger values flatten the top.
    order: i32,
}

impl Ellipse {
    fn profile(&self, x: f64, y: f64) -> f64 {
        let (s, c) = self.theta.sin_cos();
        let (dx, dy) = (x - self.cx, y - self.cy);
        let u = (dx * c + dy * s) / self.a;
        let v = (dy * c - dx * s) / self.b;
        (-0.5 * (u * u + v * v).powi(self.order)).exp()
    }
}

pub fn phantom(width: u32, height: u32, seed: u64) -> Result<ImageBuffer> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (f64::from(width), f64::from(height));

    let body = Ellipse {
        cx: w * rng.random_range(0.46..0.54),
        cy: h * rng.random_range(0.46..0.54),
        a: w * rng.random_range(0.30..0.40),
        b: h * rng.random_range(0.26..0.36),
        theta: rng.random_range(-0.2..0.2),
        amplitude: rng.random_range(900.0..1200.0),
        order: 4,
    };
    let organs: Vec<Ellipse> = (0..rng.random_range(3..7))
        .map(|_| Ellipse {
            cx: body.cx + body.a * rng.random_range(-0.6..0.6),
            cy: body.cy + body.b * rng.random_range(-0.6..0.6),
            a: w * rng.random_range(0.03..0.12),
            b: h * rng.random_range(0.03..0.12),
            theta: rng.random_range(0.0..std::f64::consts::PI),
            amplitude: rng.random_range(-500.0..1600.0),
            order: 1,
        })
        .collect();
    let sigma = rng.random_range(2.0..6.0);
    let noise = Normal::new(0.0, sigma).expect("positive sigma");

    let mut samples = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        for x in 0..width {
            let (px, py) = (f64::from(x) + 0.5, f64::from(y) + 0.5);
            let mask = body.profile(px, py);
            if mask < BODY_CUTOFF {
                samples.push(0);
                continue;
            }
            let inner: f64 = organs.iter().map(|o| o.amplitude * o.profile(px, py)).sum();
            let v = mask * (body.amplitude + inner) + noise.sample(&mut rng);
            samples.push(v.round().clamp(0.0, f64::from(MAX_SAMPLE)) as u16);
        }
    }
    Ok(ImageBuffer::new(width, height, samples)?)
}

/// `count` phantoms with ids `phantom_000`, ... and seeds `seed`, `seed + 1`, ...
pub fn phantom_set(
    count: usize,
    width: u32,
    height: u32,
    seed: u64,
) -> Result<Vec<(String, ImageBuffer)>> {
    (0..count)
        .map(|i| {
            Ok((
                format!("phantom_{i:03}"),
                phantom(width, height, seed.wrapping_add(i as u64))?,
            ))
        })
        .collect()
}
