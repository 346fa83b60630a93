//! Heat-map rasters and image files.

use std::io::{self, BufRead, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::{Point, Rect};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("bounding box must have positive area")]
    DegenerateBBox,
    #[error("raster must be at least 1x1")]
    EmptyRaster,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("png encoding failed: {0}")]
    Png(#[from] png::EncodingError),
    #[error("malformed ppm: {0}")]
    BadPpm(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            other => Err(format!("unknown scale `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Ppm,
    Png,
}

impl ImageFormat {
    /// PNG for a `.png` extension, PPM otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("png") => ImageFormat::Png,
            _ => ImageFormat::Ppm,
        }
    }
}

/// Intensities in [0, 1], row-major, row 0 at the top (largest y).
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub bbox: Rect,
    pub pixels: Vec<f64>,
}

impl Raster {
    /// World coordinates of the center of pixel (`col`, `row`).
    pub fn pixel_center(&self, col: usize, row: usize) -> Point {
        pixel_center(&self.bbox, self.width, self.height, col, row)
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    pub fn to_rgb(&self, cmap: &Colormap) -> Vec<u8> {
        self.pixels.iter().flat_map(|&v| cmap.color(v)).collect()
    }
}

fn pixel_center(bbox: &Rect, w: usize, h: usize, col: usize, row: usize) -> Point {
    Point::new(
        bbox.x_lo + (col as f64 + 0.5) * bbox.width() / w as f64,
        bbox.y_hi - (row as f64 + 0.5) * bbox.height() / h as f64,
    )
}

/// Samples `value` at every pixel center and normalizes so the largest
/// value maps to 1 and 0 maps to 0. Rows are split across threads.
pub fn rasterize<F>(w: usize, h: usize, bbox: Rect, scale: Scale, value: F) -> Result<Raster, RenderError>
where
    F: Fn(Point) -> f64 + Sync,
{
    if w == 0 || h == 0 {
        return Err(RenderError::EmptyRaster);
    }
    if !(bbox.width() > 0.0 && bbox.height() > 0.0) {
        return Err(RenderError::DegenerateBBox);
    }
    let mut pixels = vec![0.0; w * h];
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(h);
    let rows_per = h.div_ceil(threads);
    std::thread::scope(|s| {
        for (chunk, rows) in pixels.chunks_mut(rows_per * w).enumerate() {
            let value = &value;
            s.spawn(move || {
                for (i, px) in rows.iter_mut().enumerate() {
                    let (row, col) = (chunk * rows_per + i / w, i % w);
                    *px = value(pixel_center(&bbox, w, h, col, row)).max(0.0);
                }
            });
        }
    });
    normalize(&mut pixels, scale);
    Ok(Raster {
        width: w,
        height: h,
        bbox,
        pixels,
    })
}

/// Maps values onto [0, 1]; order-preserving for both scales.
pub fn normalize(values: &mut [f64], scale: Scale) {
    let max = values.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        values.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    match scale {
        Scale::Linear => values.iter_mut().for_each(|v| *v /= max),
        Scale::Log => {
            let d = max.ln_1p();
            values.iter_mut().for_each(|v| *v = v.ln_1p() / d);
        }
    }
}

/// Linear blend from `low` at intensity 0 to `high` at intensity 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Colormap {
    pub low: [u8; 3],
    pub high: [u8; 3],
}

impl Default for Colormap {
    fn default() -> Self {
        Colormap {
            low: [255, 255, 255],
            high: [103, 0, 13],
        }
    }
}

impl Colormap {
    pub fn color(&self, t: f64) -> [u8; 3] {
        let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
        std::array::from_fn(|i| {
            let (a, b) = (self.low[i] as f64, self.high[i] as f64);
            (a + (b - a) * t).round() as u8
        })
    }
}

pub fn encode_ppm(w: usize, h: usize, rgb: &[u8], out: &mut impl Write) -> io::Result<()> {
    write!(out, "P6\n{w} {h}\n255\n")?;
    out.write_all(rgb)
}

/// Reads a binary PPM with maxval 255; returns (width, height, rgb).
pub fn decode_ppm(input: &mut impl BufRead) -> Result<(usize, usize, Vec<u8>), RenderError> {
    let mut fields = Vec::with_capacity(4);
    let mut token = Vec::new();
    let mut byte = [0u8; 1];
    while fields.len() < 4 {
        if input.read(&mut byte)? == 0 {
            return Err(RenderError::BadPpm("truncated header"));
        }
        let c = byte[0];
        if c == b'#' && token.is_empty() {
            let mut skip = Vec::new();
            input.read_until(b'\n', &mut skip)?;
        } else if c.is_ascii_whitespace() {
            if !token.is_empty() {
                fields.push(std::mem::take(&mut token));
            }
        } else {
            if token.len() > 20 {
                return Err(RenderError::BadPpm("header field too long"));
            }
            token.push(c);
        }
    }
    if fields[0] != b"P6" {
        return Err(RenderError::BadPpm("not a P6 file"));
    }
    let num = |f: &[u8]| -> Result<usize, RenderError> {
        std::str::from_utf8(f)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(RenderError::BadPpm("bad number"))
    };
    let (w, h, maxval) = (num(&fields[1])?, num(&fields[2])?, num(&fields[3])?);
    if maxval != 255 {
        return Err(RenderError::BadPpm("only maxval 255 is supported"));
    }
    let len = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(3))
        .ok_or(RenderError::BadPpm("size overflow"))?;
    let mut rgb = Vec::new();
    input.take(len as u64).read_to_end(&mut rgb)?;
    if rgb.len() != len {
        return Err(RenderError::BadPpm("truncated pixel data"));
    }
    Ok((w, h, rgb))
}

pub fn encode_png(w: usize, h: usize, rgb: &[u8], out: impl Write) -> Result<(), RenderError> {
    let mut enc = png::Encoder::new(out, w as u32, h as u32);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    let mut writer = enc.write_header()?;
    writer.write_image_data(rgb)?;
    writer.finish()?;
    Ok(())
}

pub fn write_image(r: &Raster, cmap: &Colormap, path: &Path, format: ImageFormat) -> Result<(), RenderError> {
    let rgb = r.to_rgb(cmap);
    let mut file = BufWriter::new(std::fs::File::create(path)?);
    match format {
        ImageFormat::Ppm => encode_ppm(r.width, r.height, &rgb, &mut file)?,
        ImageFormat::Png => encode_png(r.width, r.height, &rgb, &mut file)?,
    }
    file.flush()?;
    Ok(())
}
