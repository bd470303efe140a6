//! Grayscale source ingestion, block partitioning and synthetic fixtures.
//!
//! Images and label maps travel as binary PGM (`P5`, maxval 255). Everything
//! downstream works on an 8×8 block grid; partial blocks at the right and
//! bottom edges are filled by edge replication.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::semantics::SemanticLabelMap;

/// Side length of a transform block in pixels.
pub const BLOCK_SIZE: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceImage {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl SourceImage {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidSize(format!("{width}x{height} image")));
        }
        if samples.len() != width * height {
            return Err(Error::Truncated {
                expected: width * height,
                found: samples.len(),
            });
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }
}

/// Per-pixel region labels, relabeled to the contiguous range `0..num_labels`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelLabelMap {
    width: usize,
    height: usize,
    labels: Vec<u8>,
    num_labels: usize,
}

impl PixelLabelMap {
    /// Builds a map from raw label values, relabeling them to `0..L` while
    /// preserving their order.
    pub fn from_raw(width: usize, height: usize, raw: &[u8]) -> Result<Self> {
        if raw.len() != width * height || raw.is_empty() {
            return Err(Error::Truncated {
                expected: width * height,
                found: raw.len(),
            });
        }
        let mut present = [false; 256];
        for &v in raw {
            present[v as usize] = true;
        }
        let mut remap = [0u8; 256];
        let mut next = 0usize;
        for (value, _) in present.iter().enumerate().filter(|(_, p)| **p) {
            remap[value] = next as u8;
            next += 1;
        }
        Ok(Self {
            width,
            height,
            labels: raw.iter().map(|&v| remap[v as usize]).collect(),
            num_labels: next,
        })
    }

    pub fn uniform(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            labels: vec![0; width * height],
            num_labels: 1,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.labels[y * self.width + x]
    }
}

/// Geometry of the 8×8 block partition of an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockGrid {
    pub cols: usize,
    pub rows: usize,
    pub width: usize,
    pub height: usize,
    pub pad_right: usize,
    pub pad_bottom: usize,
}

impl BlockGrid {
    pub fn for_dims(width: usize, height: usize) -> Self {
        let cols = width.div_ceil(BLOCK_SIZE);
        let rows = height.div_ceil(BLOCK_SIZE);
        Self {
            cols,
            rows,
            width,
            height,
            pad_right: cols * BLOCK_SIZE - width,
            pad_bottom: rows * BLOCK_SIZE - height,
        }
    }

    pub fn padded_width(&self) -> usize {
        self.cols * BLOCK_SIZE
    }

    pub fn padded_height(&self) -> usize {
        self.rows * BLOCK_SIZE
    }

    pub fn n_blocks(&self) -> usize {
        self.cols * self.rows
    }

    /// Number of original (non-padding) pixels inside block `index`.
    pub fn block_pixel_count(&self, index: usize) -> usize {
        let (bx, by) = (index % self.cols, index / self.cols);
        let w = (self.width - bx * BLOCK_SIZE).min(BLOCK_SIZE);
        let h = (self.height - by * BLOCK_SIZE).min(BLOCK_SIZE);
        w * h
    }
}

/// Parses a binary PGM byte buffer.
pub fn decode_pgm(bytes: &[u8]) -> Result<SourceImage> {
    if bytes.len() < 2 {
        return Err(Error::MalformedHeader("missing magic".into()));
    }
    if &bytes[..2] != b"P5" {
        return Err(Error::UnsupportedFormat(
            String::from_utf8_lossy(&bytes[..2]).into_owned(),
        ));
    }
    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        // whitespace and comments between tokens
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::MalformedHeader("header ends early".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::MalformedHeader(format!("expected a number at byte {start}")));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *field = text
            .parse()
            .map_err(|_| Error::MalformedHeader(format!("number out of range: {text}")))?;
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::MalformedHeader("missing separator before payload".into()));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!("zero dimension {width}x{height}")));
    }
    let (width, height) = (width as usize, height as usize);
    let payload = &bytes[pos..];
    if payload.len() < width * height {
        return Err(Error::Truncated {
            expected: width * height,
            found: payload.len(),
        });
    }
    SourceImage::new(width, height, payload[..width * height].to_vec())
}

pub fn encode_pgm(img: &SourceImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.samples);
    out
}

pub fn load_image(path: impl AsRef<Path>) -> Result<SourceImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&bytes)
}

pub fn write_image(path: impl AsRef<Path>, img: &SourceImage) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_pgm(img)).map_err(|e| Error::io(path, e))
}

/// Loads a per-pixel label map whose dimensions must equal `expected`.
pub fn load_label_map(path: impl AsRef<Path>, expected: (usize, usize)) -> Result<PixelLabelMap> {
    let img = load_image(path)?;
    if img.dims() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: img.dims(),
        });
    }
    PixelLabelMap::from_raw(img.width, img.height, &img.samples)
}

/// Pads an image to whole blocks by replicating the last column and row.
pub fn pad_and_grid(img: &SourceImage) -> (Vec<u8>, BlockGrid) {
    let grid = BlockGrid::for_dims(img.width, img.height);
    let pw = grid.padded_width();
    let mut padded = Vec::with_capacity(pw * grid.padded_height());
    for y in 0..grid.padded_height() {
        let sy = y.min(img.height - 1);
        let row = &img.samples[sy * img.width..(sy + 1) * img.width];
        padded.extend_from_slice(row);
        padded.extend(std::iter::repeat_n(row[img.width - 1], pw - img.width));
    }
    (padded, grid)
}

/// Majority label of each block; padding pixels do not vote and ties go to
/// the smaller label.
pub fn block_labels(map: &PixelLabelMap, grid: &BlockGrid) -> SemanticLabelMap {
    let mut labels = Vec::with_capacity(grid.n_blocks());
    let mut counts = vec![0usize; map.num_labels.max(1)];
    for by in 0..grid.rows {
        for bx in 0..grid.cols {
            counts.iter_mut().for_each(|c| *c = 0);
            let y_end = ((by + 1) * BLOCK_SIZE).min(map.height);
            let x_end = ((bx + 1) * BLOCK_SIZE).min(map.width);
            for y in by * BLOCK_SIZE..y_end {
                for x in bx * BLOCK_SIZE..x_end {
                    counts[map.get(x, y) as usize] += 1;
                }
            }
            let mut best = 0;
            for (label, &count) in counts.iter().enumerate() {
                if count > counts[best] {
                    best = label;
                }
            }
            labels.push(best as u8);
        }
    }
    SemanticLabelMap::new(grid.cols, grid.rows, labels, map.num_labels.max(1))
        .expect("block labels stay within the pixel label range")
}

/// Synthetic test sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    Flat,
    Gradient,
    Checker,
    /// Flat bright "sky" over a textured "structure" (label 1).
    TwoRegion,
    /// Sky, textured structure and a gently shaded ground band.
    ThreeRegion,
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(Pattern::Flat),
            "gradient" => Ok(Pattern::Gradient),
            "checker" => Ok(Pattern::Checker),
            "two-region" => Ok(Pattern::TwoRegion),
            "three-region" => Ok(Pattern::ThreeRegion),
            other => Err(Error::Config(format!("unknown source pattern '{other}'"))),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::Flat => "flat",
            Pattern::Gradient => "gradient",
            Pattern::Checker => "checker",
            Pattern::TwoRegion => "two-region",
            Pattern::ThreeRegion => "three-region",
        })
    }
}

const SKY_LEVEL: u8 = 200;

fn texture(x: usize, y: usize, rng: &mut ChaCha8Rng) -> u8 {
    let (xf, yf) = (x as f64, y as f64);
    let v = 80.0 + 30.0 * (0.9 * xf).sin() * (0.7 * yf).cos() + rng.random_range(-35.0..35.0);
    v.round().clamp(0.0, 255.0) as u8
}

/// Deterministic square test source and its pixel labels.
pub fn synthesize_source(
    pattern: Pattern,
    size: usize,
    seed: u64,
) -> Result<(SourceImage, PixelLabelMap)> {
    if size == 0 || !size.is_multiple_of(BLOCK_SIZE) {
        return Err(Error::InvalidSize(format!(
            "synthetic size {size} is not a positive multiple of {BLOCK_SIZE}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(size * size);
    let mut labels = Vec::with_capacity(size * size);
    for y in 0..size {
        for x in 0..size {
            let (value, label) = match pattern {
                Pattern::Flat => (128, 0),
                Pattern::Gradient => ((255 * x / (size - 1)) as u8, 0),
                Pattern::Checker => {
                    let dark = ((x / BLOCK_SIZE) + (y / BLOCK_SIZE)).is_multiple_of(2);
                    (if dark { 64 } else { 192 }, 0)
                }
                Pattern::TwoRegion => {
                    if y < size / 2 {
                        (SKY_LEVEL, 0)
                    } else {
                        (texture(x, y, &mut rng), 1)
                    }
                }
                Pattern::ThreeRegion => {
                    let sky_end = size * 3 / 8;
                    let ground_start = size * 3 / 4;
                    if y < sky_end {
                        (SKY_LEVEL, 0)
                    } else if y < ground_start {
                        (texture(x, y, &mut rng), 1)
                    } else {
                        let shade = 100.0 + 30.0 * x as f64 / size as f64
                            + rng.random_range(-6.0..6.0);
                        (shade.round().clamp(0.0, 255.0) as u8, 2)
                    }
                }
            };
            samples.push(value);
            labels.push(label);
        }
    }
    let img = SourceImage::new(size, size, samples)?;
    let map = PixelLabelMap::from_raw(size, size, &labels)?;
    Ok((img, map))
}
