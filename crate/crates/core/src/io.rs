//! 8-bit PNG/PGM image input and output.
//!
//! Color inputs collapse to luminance with the 0.299/0.587/0.114 weights;
//! outputs quantize with round-half-away-from-zero after clamping.

use std::path::Path;

use image::{DynamicImage, GrayImage, ImageFormat};

use crate::error::{Error, Result};
use crate::plane::ImagePlane;

/// Output encoding for `save_image`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormatKind {
    Png,
    Pgm,
}

impl ImageFormatKind {
    /// Infers the encoding from a file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        match ext.as_deref() {
            Some("png") => Ok(Self::Png),
            Some("pgm") | Some("pnm") => Ok(Self::Pgm),
            _ => Err(Error::invalid(format!(
                "cannot infer image format from {}; use .png or .pgm",
                path.display()
            ))),
        }
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn image_error(path: &Path, source: image::ImageError) -> Error {
    Error::Image {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads a PNG or PGM image and converts it to a luminance plane in [0, 1].
/// The decoder is chosen by sniffing the file content, so a mislabeled
/// extension does not matter.
pub fn load_image(path: &Path) -> Result<ImagePlane> {
    let reader = image::ImageReader::open(path)
        .map_err(|e| io_error(path, e))?
        .with_guessed_format()
        .map_err(|e| io_error(path, e))?;
    let decoded = reader.decode().map_err(|e| image_error(path, e))?;
    Ok(luminance_plane(&decoded))
}

/// Collapses any decoded image to the luminance plane used internally.
pub fn luminance_plane(decoded: &DynamicImage) -> ImagePlane {
    let rgb = decoded.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let mut pixels = Vec::with_capacity(w * h);
    for px in rgb.pixels() {
        let [r, g, b] = px.0;
        let y = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
        pixels.push(y / 255.0);
    }
    ImagePlane::from_clamped(w, h, pixels)
}

/// Quantizes a unit-interval intensity to 8 bits, rounding half away from
/// zero.
pub fn quantize_to_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Writes the plane as an 8-bit grayscale PNG or PGM. With `format` absent
/// the encoding follows the file extension.
pub fn save_image(plane: &ImagePlane, path: &Path, format: Option<ImageFormatKind>) -> Result<()> {
    let format = match format {
        Some(f) => f,
        None => ImageFormatKind::from_path(path)?,
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| io_error(path, e))?;
        }
    }
    let mut img = GrayImage::new(plane.width() as u32, plane.height() as u32);
    for y in 0..plane.height() {
        for x in 0..plane.width() {
            img.put_pixel(x as u32, y as u32, image::Luma([quantize_to_u8(plane.get(x, y))]));
        }
    }
    let encoder_format = match format {
        ImageFormatKind::Png => ImageFormat::Png,
        ImageFormatKind::Pgm => ImageFormat::Pnm,
    };
    img.save_with_format(path, encoder_format)
        .map_err(|e| image_error(path, e))
}
