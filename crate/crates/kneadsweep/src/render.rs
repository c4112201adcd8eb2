//! Rasterization of sweep grids. The kneading colormap is engineered so
//! that nearby parameter regions with different symbolic futures are
//! visually separable: red and blue vary monotonically with the kneading
//! bin (so any two bins differ there), while green is decorrelated by a
//! seeded hash to break up smooth gradients between adjacent bins.

use crate::sweep::{CellClass, SweepGrid, DCP_CHAOTIC_BIT, DCP_ESCAPED};
use crate::symbolic::EncodeMode;
use crate::theory::{FeasCell, TheoryGrid};
use crate::container::write_atomic;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unsupported image extension {0:?} (use ppm or png)")]
    UnsupportedFormat(String),
    #[error("png codec error: {0}")]
    Png(#[from] image::ImageError),
}

/// SplitMix64 generator; tiny, seedable, and stable across platforms, so
/// colormaps are reproducible from the seed alone.
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }
}

/// 256-bin colormap: bin k has red 255 - k, blue k, and a hashed green
/// byte drawn from a [`SplitMix64`] stream seeded by `seed`.
#[derive(Clone)]
pub struct Colormap {
    pub table: [[u8; 3]; 256],
}

impl Colormap {
    pub fn new(seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let mut table = [[0u8; 3]; 256];
        for (k, entry) in table.iter_mut().enumerate() {
            *entry = [
                255 - k as u8,
                (rng.next_u64() & 0xFF) as u8,
                k as u8,
            ];
        }
        Colormap { table }
    }

    /// Bin index for a kneading value; values are clamped into [0, 1] and
    /// 1.0 maps to the top bin.
    pub fn bin(value: f64) -> usize {
        (value.clamp(0.0, 1.0) * 255.999) as usize
    }

    pub fn color(&self, value: f64) -> [u8; 3] {
        self.table[Self::bin(value)]
    }
}

impl Default for Colormap {
    fn default() -> Self {
        Colormap::new(42)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    pub seed: u64,
    pub escape: [u8; 3],
    pub timeout: [u8; 3],
    pub feas_neg: [u8; 3],
    pub feas_pos: [u8; 3],
    pub infeasible: [u8; 3],
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            seed: 42,
            escape: [0, 0, 0],
            timeout: [70, 70, 70],
            feas_neg: [10, 10, 10],
            feas_pos: [250, 180, 60],
            infeasible: [255, 255, 255],
        }
    }
}

/// 8-bit RGB raster, row-major with the top row first.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<[u8; 3]>,
}

impl Image {
    pub fn new(width: u32, height: u32) -> Self {
        Image {
            width,
            height,
            pixels: vec![[255, 255, 255]; width as usize * height as usize],
        }
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        self.pixels[(y * self.width + x) as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, c: [u8; 3]) {
        let w = self.width;
        self.pixels[(y * w + x) as usize] = c;
    }
}

/// Renders a flow sweep one pixel per cell. Grid row 0 (the low-v edge)
/// lands at the bottom of the image, matching plot orientation.
pub fn render_grid(grid: &SweepGrid, opts: &RenderOptions) -> Image {
    let (nu, nv) = grid.config.resolution;
    let cmap = Colormap::new(opts.seed);
    let mut img = Image::new(nu, nv);
    for y in 0..nv {
        let q = nv - 1 - y;
        for x in 0..nu {
            let i = (q * nu + x) as usize;
            let color = match grid.config.encoding.mode {
                EncodeMode::Dcp => dcp_color(grid, i, &cmap, opts),
                _ => match grid.classes[i] {
                    CellClass::Escaped => opts.escape,
                    CellClass::TimedOut => opts.timeout,
                    _ => cmap.color(grid.values[i]),
                },
            };
            img.set(x, y, color);
        }
    }
    img
}

fn dcp_color(grid: &SweepGrid, i: usize, cmap: &Colormap, opts: &RenderOptions) -> [u8; 3] {
    let code = grid
        .dcp
        .as_ref()
        .map(|d| d[i])
        .unwrap_or(DCP_ESCAPED);
    if code == DCP_ESCAPED || grid.classes[i] == CellClass::Escaped {
        return opts.escape;
    }
    if code & DCP_CHAOTIC_BIT != 0 {
        // Chaotic cells in grayscale: more complex reads darker.
        let l = (255.0 * (1.0 - grid.values[i].clamp(0.0, 1.0))).round() as u8;
        return [l, l, l];
    }
    // Periodic cells keyed by period, hashed so close periods separate.
    let mut rng = SplitMix64::new(code as u64);
    cmap.table[(rng.next_u64() & 0xFF) as usize]
}

/// Renders a feasibility diagram; same orientation as [`render_grid`].
pub fn render_theory(grid: &TheoryGrid, opts: &RenderOptions) -> Image {
    let (nc, nr) = grid.config.resolution;
    let mut img = Image::new(nc, nr);
    for y in 0..nr {
        let r = nr - 1 - y;
        for x in 0..nc {
            let color = match grid.cells[(r * nc + x) as usize] {
                FeasCell::FeasibleNeg => opts.feas_neg,
                FeasCell::FeasiblePos => opts.feas_pos,
                FeasCell::Infeasible => opts.infeasible,
            };
            img.set(x, y, color);
        }
    }
    img
}

/// A curve drawn on top of a rendered grid, in chart coordinates.
pub enum OverlayCurve {
    /// v = f(u); None where the curve is undefined (poles, out of domain).
    Graph(Box<dyn Fn(f64) -> Option<f64>>),
    /// Vertical line u = const.
    Vertical(f64),
}

/// Strokes curves into `img`, which must cover `u_range` x `v_range` with
/// the v axis pointing up. Graphs are sampled at column centers and
/// consecutive in-range samples are joined vertically, giving unbroken
/// one-pixel strokes; everything outside the ranges is clipped.
pub fn overlay_curves(
    img: &mut Image,
    u_range: (f64, f64),
    v_range: (f64, f64),
    curves: &[OverlayCurve],
    color: [u8; 3],
) {
    let (w, h) = (img.width, img.height);
    if w == 0 || h == 0 {
        return;
    }
    let row_of = |v: f64| -> Option<u32> {
        let t = (v - v_range.0) / (v_range.1 - v_range.0);
        if !(0.0..1.0).contains(&t) {
            return None;
        }
        Some(h - 1 - (t * h as f64) as u32)
    };
    for curve in curves {
        match curve {
            OverlayCurve::Vertical(u0) => {
                let t = (u0 - u_range.0) / (u_range.1 - u_range.0);
                if !(0.0..1.0).contains(&t) {
                    continue;
                }
                let x = (t * w as f64) as u32;
                for y in 0..h {
                    img.set(x, y, color);
                }
            }
            OverlayCurve::Graph(f) => {
                let mut prev: Option<u32> = None;
                for x in 0..w {
                    let u = u_range.0
                        + (x as f64 + 0.5) * (u_range.1 - u_range.0) / w as f64;
                    let y = f(u).and_then(row_of);
                    match (prev, y) {
                        (Some(py), Some(cy)) => {
                            for yy in py.min(cy)..=py.max(cy) {
                                img.set(x, yy, color);
                            }
                        }
                        (None, Some(cy)) => img.set(x, cy, color),
                        _ => {}
                    }
                    prev = y;
                }
            }
        }
    }
}

/// Binary PPM (P6) encoding: header `P6\n{w} {h}\n255\n` followed by RGB
/// triples, top row first.
pub fn ppm_bytes(img: &Image) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.reserve(img.pixels.len() * 3);
    for p in &img.pixels {
        out.extend_from_slice(p);
    }
    out
}

pub fn png_bytes(img: &Image) -> Result<Vec<u8>, RenderError> {
    use image::codecs::png::PngEncoder;
    use image::{ExtendedColorType, ImageEncoder};
    let raw: Vec<u8> = img.pixels.iter().flatten().copied().collect();
    let mut buf = Vec::new();
    PngEncoder::new(&mut buf).write_image(&raw, img.width, img.height, ExtendedColorType::Rgb8)?;
    Ok(buf)
}

/// Writes `img` to `path`, picking the codec from the extension (`ppm` or
/// `png`); the file appears atomically.
pub fn write_image(path: &Path, img: &Image) -> Result<(), RenderError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let bytes = match ext.as_str() {
        "ppm" => ppm_bytes(img),
        "png" => png_bytes(img)?,
        other => return Err(RenderError::UnsupportedFormat(other.to_string())),
    };
    Ok(write_atomic(path, &bytes)?)
}
